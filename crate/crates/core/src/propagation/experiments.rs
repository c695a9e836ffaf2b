//! Experiments around flatness propagation: type degradation across a
//! sector, uniform bounds from two flat directions, the Phragmén–Lindelöf
//! sanity check, the corrected function `F = f e^{V(a/z)}`, the Wasow
//! counterexample and extension of directional expansions.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::{expansion_fit, fit_flat_type, trace_ray, ExpansionFit, ExpansionVerdict, FlatVerdict, FlatnessFit};
use super::functions::TestFunction;
use crate::assoc_fn::AssociatedFunction;
use crate::error::{domain, parameter, Error, Result};
use crate::gevrey_type::SectorSpec;
use crate::maergoiz::{MaergoizFunction, SectorPoint};
use crate::scalar::{geomspace, idx, linspace, lit, Real};
use crate::sequences::WeightSequence;

#[derive(Clone, Debug, Serialize)]
pub struct Boundedness<T> {
    pub max_log_abs: T,
    pub bounded: bool,
    pub worst_direction: Option<T>,
}

/// Grid check that `f` does not grow toward the vertex: along each direction
/// the maximum over the inner half of the radii may exceed the maximum over
/// the outer half by at most 1 (in `log |f|`).
pub fn check_bounded<T: Real>(f: &TestFunction<T>, directions: &[T], radii: &[T]) -> Result<Boundedness<T>> {
    let half = radii.len() / 2;
    let per_dir = directions
        .par_iter()
        .map(|&theta| {
            let vals = radii
                .iter()
                .map(|&r| f.log_abs(SectorPoint::new(r, theta)))
                .collect::<Result<Vec<T>>>()?;
            let outer = vals[..half].iter().copied().fold(T::neg_infinity(), T::max);
            let inner = vals[half..].iter().copied().fold(T::neg_infinity(), T::max);
            let ok = outer.is_finite() && !(inner > outer + T::one()) && !vals.iter().any(|v| v.is_nan());
            Ok((theta, outer.max(inner), ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_log_abs = per_dir.iter().map(|d| d.1).fold(T::neg_infinity(), T::max);
    let worst_direction = per_dir.iter().find(|d| !d.2).map(|d| d.0);
    Ok(Boundedness { max_log_abs, bounded: worst_direction.is_none(), worst_direction })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MvInput<T> {
    pub a_est: T,
    pub b_est: T,
    pub omega: T,
}

/// `(2B/A)^ω (1/sin(δ/(2ω)))^ω c2`.
pub fn predicted_type_bound<T: Real>(mv: &MvInput<T>, delta: T, c2: T) -> T {
    let two = lit::<T>(2.0);
    (two * mv.b_est / mv.a_est).powf(mv.omega) * (delta / (two * mv.omega)).sin().recip().powf(mv.omega) * c2
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationRow<T> {
    pub delta: T,
    pub direction: T,
    pub k2_fitted: T,
    pub k2_predicted_bound: T,
    pub satisfied: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationTable<T> {
    pub gamma: T,
    pub flat_direction: T,
    pub flat_fit: FlatnessFit<T>,
    pub rows: Vec<PropagationRow<T>>,
}

impl<T: Real> PropagationTable<T> {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }
}

fn fan<T: Real>(gamma: T, n: usize) -> Vec<T> {
    let h = T::PI() * gamma / lit(2.0);
    linspace(-h, h, n)
}

/// Fits `k2(δ)` at directions `−πγ/2 + δ` and compares with the predicted bound.
pub fn propagation_experiment<T: Real>(
    f: &TestFunction<T>,
    a: &AssociatedFunction<T>,
    gamma: T,
    flat_direction: T,
    delta_grid: &[T],
    mv: &MvInput<T>,
    radii: &[T],
) -> Result<PropagationTable<T>> {
    if !(gamma > T::zero()) {
        return parameter(format!("gamma must be positive, got {gamma}"));
    }
    if !(mv.a_est > T::zero()) || !(mv.b_est >= mv.a_est) || !(mv.omega > T::zero()) {
        return parameter("M-V band needs 0 < A <= B and omega > 0");
    }
    let opening = T::PI() * gamma;
    if let Some(d) = delta_grid.iter().find(|&&d| !(d > T::zero() && d <= opening)) {
        return domain(format!("delta = {d} outside (0, pi*gamma]"));
    }
    let bounded = check_bounded(f, &fan(gamma, 33), radii)?;
    if !bounded.bounded {
        return domain(format!(
            "f is not bounded on the sector (grows toward 0 along direction {:?})",
            bounded.worst_direction
        ));
    }
    let flat_fit = match fit_flat_type(&trace_ray(f, flat_direction, radii)?, a)? {
        FlatVerdict::Flat(fit) => fit,
        FlatVerdict::NotFlat { reason, .. } => {
            return domain(format!("f is not flat in direction {flat_direction}: {reason}"))
        }
    };
    let start = -opening / lit(2.0);
    let rows = delta_grid
        .par_iter()
        .map(|&delta| {
            let direction = (start + delta).min(opening / lit(2.0));
            let k2_fitted = match fit_flat_type(&trace_ray(f, direction, radii)?, a)? {
                FlatVerdict::Flat(fit) => fit.c2,
                FlatVerdict::NotFlat { .. } => T::infinity(),
            };
            let k2_predicted_bound = predicted_type_bound(mv, delta, flat_fit.c2);
            Ok(PropagationRow {
                delta,
                direction,
                k2_fitted,
                k2_predicted_bound,
                satisfied: k2_fitted <= k2_predicted_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PropagationTable { gamma, flat_direction, flat_fit, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoDirection<T> {
    pub k1: T,
    pub k2: T,
    pub uniform: bool,
    pub failing_direction: Option<T>,
    pub per_direction: Vec<FlatVerdict<T>>,
}

/// Fits a single `(k1, k2)` over a fan of `n_dirs` directions covering
/// `[−πγ/2, πγ/2]`.
pub fn two_direction_experiment<T: Real>(
    f: &TestFunction<T>,
    a: &AssociatedFunction<T>,
    gamma: T,
    n_dirs: usize,
    radii: &[T],
) -> Result<TwoDirection<T>> {
    if n_dirs < 2 {
        return parameter("the fan needs at least the two boundary directions");
    }
    let per_direction = fan(gamma, n_dirs)
        .par_iter()
        .map(|&theta| fit_flat_type(&trace_ray(f, theta, radii)?, a))
        .collect::<Result<Vec<_>>>()?;
    let failing_direction = per_direction.iter().find_map(|v| match v {
        FlatVerdict::NotFlat { theta, .. } => Some(*theta),
        FlatVerdict::Flat(_) => None,
    });
    let (k1, k2) = if failing_direction.is_some() {
        (T::infinity(), T::infinity())
    } else {
        per_direction
            .iter()
            .filter_map(|v| v.fit())
            .fold((T::zero(), T::zero()), |(k1, k2), fit| (k1.max(fit.c1), k2.max(fit.c2)))
    };
    Ok(TwoDirection { k1, k2, uniform: failing_direction.is_none(), failing_direction, per_direction })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlCheck<T> {
    pub log_max_boundary: T,
    pub log_max_interior: T,
    pub max_boundary: T,
    pub max_interior: T,
    pub satisfied: bool,
    pub boundary_points: usize,
    pub interior_points: usize,
}

/// Smallest radius sampled, relative to the sector radius.
const PL_INNER_RATIO: f64 = 1e-3;

/// Maximum-modulus sanity check on a bounded sector: the interior maximum may
/// not exceed the boundary maximum by more than a relative `1e-6`.
pub fn pl_numeric_check<T: Real>(
    f: &TestFunction<T>,
    sector: &SectorSpec<T>,
    boundary_n: usize,
    interior_n: usize,
) -> Result<PlCheck<T>> {
    let big_r = sector.radius.ok_or_else(|| Error::Parameter("the check needs a bounded sector".into()))?;
    if boundary_n < 6 || interior_n < 4 {
        return parameter("need at least 6 boundary and 4 interior points");
    }
    let (alpha, beta) = (sector.alpha(), sector.beta());
    let r_min = big_r * lit(PL_INNER_RATIO);
    let per_ray = boundary_n / 3;
    let n_arc = boundary_n - 2 * per_ray;
    let ray_radii = geomspace(big_r, r_min, per_ray);
    let mut boundary: Vec<SectorPoint<T>> = Vec::with_capacity(boundary_n);
    for theta in [alpha, beta] {
        boundary.extend(ray_radii.iter().map(|&r| SectorPoint::new(r, theta)));
    }
    boundary.extend(linspace(alpha, beta, n_arc).into_iter().map(|t| SectorPoint::new(big_r, t)));

    let n_theta = ((interior_n as f64).sqrt().round() as usize).max(2);
    let n_r = (interior_n / n_theta).max(2);
    let step = (beta - alpha) / idx::<T>(n_theta + 1);
    let thetas: Vec<T> = (1..=n_theta).map(|i| alpha + step * idx::<T>(i)).collect();
    // radii strictly below the arc, down to the inner cut-off
    let radii: Vec<T> = geomspace(big_r, r_min, n_r + 1).into_iter().skip(1).collect();
    let interior: Vec<SectorPoint<T>> =
        thetas.iter().flat_map(|&t| radii.iter().map(move |&r| SectorPoint::new(r, t))).collect();

    let max_over = |pts: &[SectorPoint<T>]| -> Result<T> {
        let vals = pts.par_iter().map(|&z| f.log_abs(z)).collect::<Result<Vec<_>>>()?;
        if vals.iter().any(|v| v.is_nan()) {
            return domain("f could not be evaluated on the grid");
        }
        Ok(vals.into_iter().fold(T::neg_infinity(), T::max))
    };
    let log_max_boundary = max_over(&boundary)?;
    let log_max_interior = max_over(&interior)?;
    Ok(PlCheck {
        log_max_boundary,
        log_max_interior,
        max_boundary: log_max_boundary.exp(),
        max_interior: log_max_interior.exp(),
        satisfied: log_max_interior <= log_max_boundary + lit::<T>(1e-6).ln_1p(),
        boundary_points: boundary.len(),
        interior_points: interior.len(),
    })
}

/// Parameters of the correcting factor `e^{V(a/z)}` used to push flatness
/// from one direction into a sector of small opening.
#[derive(Clone, Debug, Serialize)]
pub struct ProofRecipe<T> {
    pub omega: T,
    pub gamma: T,
    pub delta: T,
    pub c2: T,
    pub a_est: T,
    pub arg_a: T,
    pub d2: T,
    pub modulus_a: T,
    pub beta: T,
    pub epsilon: T,
    pub eta: T,
    pub r2: T,
}

impl<T: Real> ProofRecipe<T> {
    pub fn a(&self) -> SectorPoint<T> {
        SectorPoint::new(self.modulus_a, self.arg_a)
    }

    /// `F(z) = f(z) e^{V(a/z)}`.
    pub fn corrected(&self, f: TestFunction<T>, kernel: MaergoizFunction<T>) -> TestFunction<T> {
        TestFunction::Corrected { inner: Box::new(f), kernel, a: self.a() }
    }
}

/// Fraction of `c2^{−1/ω}` used for `d2`, and of `(A d2 / 2)^ω` used for `|a|`.
const D2_FRACTION: f64 = 0.9;
const A_FRACTION: f64 = 0.5;

/// `arg a = ωπ/2 − πγ/2 + δ/2`, `d2 < c2^{−1/ω}`, `|a| < (A d2 / 2)^ω`.
pub fn proof_recipe<T: Real>(omega: T, gamma: T, delta: T, c2: T, a_est: T) -> Result<ProofRecipe<T>> {
    if !(omega > T::zero()) || !(gamma > T::zero()) || !(delta > T::zero()) || !(c2 > T::zero()) || !(a_est > T::zero()) {
        return parameter("recipe parameters must be positive");
    }
    let two = lit::<T>(2.0);
    let half_pi = T::FRAC_PI_2();
    let arg_a = omega * half_pi - T::PI() * gamma / two + delta / two;
    let d2 = lit::<T>(D2_FRACTION) * c2.powf(-omega.recip());
    let modulus_a = lit::<T>(A_FRACTION) * (a_est * d2 / two).powf(omega);
    let beta = (T::PI() * omega / two + delta / two) / omega;
    let epsilon = -beta.cos() / two;
    let eta = epsilon;
    let r2 = eta * modulus_a.powf(omega.recip());
    log::debug!("proof recipe: beta = {beta}, epsilon = eta = {eta}, r2 = {r2}");
    Ok(ProofRecipe { omega, gamma, delta, c2, a_est, arg_a, d2, modulus_a, beta, epsilon, eta, r2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsequenceSample<T> {
    pub n: u64,
    pub r: T,
    pub derivative_abs: T,
    /// `V'(1/r)/r²`: the size of the oscillating term.
    pub envelope: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct WasowDemo<T> {
    pub flat_fit_on_axis: FlatVerdict<T>,
    pub derivative_samples: Vec<(T, T)>,
    pub oscillation_detected: bool,
    /// `e^{V(1/r)} = πn + π/2`: cosine vanishes, `|f'| = V' e^{−V}/r² → 0`.
    pub cos_zero: Vec<SubsequenceSample<T>>,
    /// `e^{V(1/r)} = πn`: sine vanishes, `|f'| = V'/r²` is unbounded.
    pub sin_zero: Vec<SubsequenceSample<T>>,
    pub cos_zero_to_zero: bool,
    pub sin_zero_unbounded: bool,
}

/// `f'(r)` on the positive axis for `f = sin(e^{V(1/z)}) e^{−V(1/z)}`, with the
/// local flat envelope `e^{−V} V' / r²`.
fn wasow_derivative<T: Real>(v: &MaergoizFunction<T>, r: T) -> Result<(T, T)> {
    let s = r.recip();
    let u = v.eval_real(s)?;
    let du = v.derivative(SectorPoint::real(s))?.re;
    let w = u.exp();
    let scale = du / (r * r);
    Ok((scale * (w.sin() * (-u).exp() - w.cos()), scale * (-u).exp()))
}

/// Subsequence points with `e^{V(1/r)} = target`.
fn wasow_point<T: Real>(v: &MaergoizFunction<T>, target: T) -> Result<T> {
    Ok(v.invert_real(target.ln())?.recip())
}

/// Oscillation threshold relative to the flat envelope.
const OSCILLATION_FACTOR: f64 = 10.0;

pub fn wasow_demo<T: Real>(v: &MaergoizFunction<T>, r_grid: &[T], fit_radii: &[T], a: &AssociatedFunction<T>) -> Result<WasowDemo<T>> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| !(w[1] < w[0])) || !(r_grid[r_grid.len() - 1] > T::zero()) {
        return domain("derivative grid must be positive and strictly decreasing");
    }
    let f = TestFunction::Wasow(*v);
    let flat_fit_on_axis = fit_flat_type(&trace_ray(&f, T::zero(), fit_radii)?, a)?;

    let pairs = r_grid.iter().map(|&r| wasow_derivative(v, r).map(|d| (r, d))).collect::<Result<Vec<_>>>()?;
    let factor = lit::<T>(OSCILLATION_FACTOR);
    let above = pairs.iter().any(|(_, (d, env))| *d > factor * *env);
    let below = pairs.iter().any(|(_, (d, env))| *d < -factor * *env);
    let derivative_samples = pairs.iter().map(|(r, (d, _))| (*r, *d)).collect();

    let pi = T::PI();
    let sample = |n: u64, target: T| -> Result<SubsequenceSample<T>> {
        let r = wasow_point(v, target)?;
        let (d, _) = wasow_derivative(v, r)?;
        let du = v.derivative(SectorPoint::real(r.recip()))?.re;
        Ok(SubsequenceSample { n, r, derivative_abs: d.abs(), envelope: du / (r * r) })
    };
    let ns: Vec<u64> = (1..=20).map(|k| 1u64 << k).collect();
    let cos_zero = ns
        .iter()
        .map(|&n| sample(n, pi * T::from_u64(n).expect("index") + T::FRAC_PI_2()))
        .collect::<Result<Vec<_>>>()?;
    let sin_zero = ns
        .iter()
        .map(|&n| sample(n, pi * T::from_u64(n).expect("index")))
        .collect::<Result<Vec<_>>>()?;
    let tail_decreasing = |s: &[SubsequenceSample<T>]| s[s.len() / 2..].windows(2).all(|w| w[1].derivative_abs < w[0].derivative_abs);
    let cos_zero_to_zero = tail_decreasing(&cos_zero) && cos_zero[cos_zero.len() - 1].derivative_abs < cos_zero[0].derivative_abs;
    let sin_zero_unbounded = sin_zero.windows(2).all(|w| w[1].derivative_abs > w[0].derivative_abs)
        && sin_zero.iter().all(|s| s.derivative_abs >= lit::<T>(0.5) * s.envelope);
    Ok(WasowDemo {
        flat_fit_on_axis,
        derivative_samples,
        oscillation_detected: above && below,
        cos_zero,
        sin_zero,
        cos_zero_to_zero,
        sin_zero_unbounded,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionRow<T> {
    pub theta: T,
    pub fit: ExpansionVerdict<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionTable<T> {
    pub theta0: T,
    pub rows: Vec<ExtensionRow<T>>,
    pub success: bool,
}

impl<T: Real> ExtensionTable<T> {
    pub fn fits(&self) -> Vec<&ExpansionFit<T>> {
        self.rows.iter().filter_map(|r| r.fit.fit()).collect()
    }
}

/// Fits a directional expansion on every direction of a fan, after checking
/// boundedness on the subsector the fan spans.
#[allow(clippy::too_many_arguments)]
pub fn extension_experiment<T: Real>(
    f: &TestFunction<T>,
    coeffs: &[Complex<T>],
    w: &WeightSequence<T>,
    region: &SectorSpec<T>,
    theta0: T,
    direction_fan: &[T],
    radii: &[T],
    p_max: usize,
) -> Result<ExtensionTable<T>> {
    if let Some(t) = direction_fan.iter().chain(std::iter::once(&theta0)).find(|&&t| !region.contains_direction(t)) {
        return domain(format!("direction {t} lies outside the region"));
    }
    let bounded = check_bounded(f, direction_fan, radii)?;
    if !bounded.bounded {
        return domain(format!(
            "f is unbounded on the subsector: growth toward 0 along direction {:?}",
            bounded.worst_direction
        ));
    }
    if expansion_fit(f, coeffs, w, theta0, radii, p_max)?.fit().is_none() {
        return domain(format!("no expansion fit in the initial direction {theta0}"));
    }
    let rows = direction_fan
        .par_iter()
        .map(|&theta| Ok(ExtensionRow { theta, fit: expansion_fit(f, coeffs, w, theta, radii, p_max)? }))
        .collect::<Result<Vec<_>>>()?;
    let success = rows.iter().all(|r| r.fit.fit().is_some());
    Ok(ExtensionTable { theta0, rows, success })
}

#[cfg(test)]
mod tests {
    use super::super::fit::default_radii;
    use super::*;

    fn gevrey_one(p: usize) -> (WeightSequence<f64>, AssociatedFunction<f64>) {
        let w = WeightSequence::gevrey(1.0, p).unwrap();
        let a = AssociatedFunction::new(&w).unwrap();
        (w, a)
    }

    fn exp_flat(gamma: f64) -> TestFunction<f64> {
        TestFunction::ExpFlat(MaergoizFunction::power(1.0, gamma).unwrap())
    }

    #[test]
    fn predicted_bound_grows_as_delta_shrinks() {
        let mv = MvInput { a_est: 0.9, b_est: 1.0, omega: 1.0 };
        let deltas = [1.0, 0.5, 0.1, 0.01];
        let b: Vec<f64> = deltas.iter().map(|&d| predicted_type_bound(&mv, d, 2.0)).collect();
        assert!(b.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn two_directions_narrow_sector() {
        let (_, a) = gevrey_one(4000);
        let r = two_direction_experiment(&exp_flat(1.0), &a, 0.9, 9, &default_radii(1.0)).unwrap();
        assert!(r.uniform);
        let exact = 1.0 / (0.45 * std::f64::consts::PI).cos();
        assert!((r.k2 / exact - 1.0).abs() < 0.1, "{}", r.k2);
    }

    #[test]
    fn two_directions_half_plane_fails_at_boundary() {
        let (_, a) = gevrey_one(4000);
        let r = two_direction_experiment(&exp_flat(2.0), &a, 1.0, 9, &default_radii(1.0)).unwrap();
        assert!(!r.uniform);
        assert!((r.failing_direction.unwrap().abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pl_for_identity_and_exp_inverse() {
        let s = SectorSpec::new(0.0, 1.0, Some(1.0)).unwrap();
        let id: PlCheck<f64> = pl_numeric_check(&TestFunction::Identity, &s, 300, 400).unwrap();
        assert!(id.satisfied);
        assert!(id.log_max_boundary.abs() < 1e-15);
        let s = SectorSpec::new(0.0, 0.9, Some(0.5)).unwrap();
        assert!(!pl_numeric_check(&TestFunction::ExpInverse, &s, 300, 400).unwrap().satisfied);
        assert!(pl_numeric_check(&TestFunction::Identity, &SectorSpec::new(0.0, 1.0, None).unwrap(), 300, 400).is_err());
    }

    #[test]
    fn recipe_matches_closed_form() {
        let r = proof_recipe(1.0, 0.9, 0.45 * std::f64::consts::PI, 4.0, 1.0).unwrap();
        assert!((r.arg_a - 0.275 * std::f64::consts::PI).abs() < 1e-15);
        assert!((r.d2 - 0.225).abs() < 1e-15);
        assert!((r.modulus_a - 0.5 * 0.1125).abs() < 1e-15);
        assert!(r.eta > 0.0);
    }

    #[test]
    fn bounded_check_detects_growth() {
        let radii = default_radii(0.5);
        assert!(check_bounded(&exp_flat(1.0), &[0.0, 0.5], &radii).unwrap().bounded);
        let b = check_bounded(&TestFunction::ExpInverse, &[0.0], &radii).unwrap();
        assert_eq!(b.worst_direction, Some(0.0));
    }

    #[test]
    fn extension_of_geometric_series() {
        let (w, _) = gevrey_one(4000);
        let region = SectorSpec::new(std::f64::consts::PI, 0.5, None).unwrap();
        let coeffs = vec![Complex::new(1.0, 0.0); 100];
        let fan = linspace(0.8 * std::f64::consts::PI, 1.2 * std::f64::consts::PI, 5);
        let radii = super::super::fit::geometric_radii(0.5, 0.9, 32);
        let t = extension_experiment(&TestFunction::Geometric, &coeffs, &w, &region, std::f64::consts::PI, &fan, &radii, 100).unwrap();
        assert!(t.success);
        assert_eq!(t.rows.len(), 5);
    }

    #[test]
    fn extension_aborts_for_wasow_off_axis() {
        let (w, _) = gevrey_one(4000);
        let f = TestFunction::Wasow(MaergoizFunction::power(1.0, 1.0).unwrap());
        let region = SectorSpec::new(0.0, 0.9, None).unwrap();
        let zeros = vec![Complex::new(0.0, 0.0); 4000];
        let r = extension_experiment(&f, &zeros, &w, &region, 0.0, &[-0.3, 0.0, 0.3], &default_radii(1.0), 4000);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
