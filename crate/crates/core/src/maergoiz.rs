//! Concrete sectorial functions `V` attached to a proximate order and a
//! numerical check of their defining properties (I)–(VI).
//!
//! Two families are provided: `power(ρ)` with `V(z) = z^ρ`, matching Gevrey
//! sequences, and `power_log(ρ, b)` with `V(z) = z^ρ (Log(e + z))^b`, matching
//! the `alpha_beta` sequences. `Log(e + z)` rather than `Log z` keeps `V`
//! positive on the whole half-line and makes `V(r) → 0` as `r → 0`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::assoc_fn::AssociatedFunction;
use crate::error::{domain, parameter, Result};
use crate::report::{fmt_num, Csv};
use crate::scalar::{geomspace, lit, linspace, Real};

/// A point `modulus · e^{i arg}` with its argument kept unwrapped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorPoint<T> {
    pub modulus: T,
    pub arg: T,
}

impl<T: Real> SectorPoint<T> {
    pub fn new(modulus: T, arg: T) -> Self {
        Self { modulus, arg }
    }

    pub fn real(r: T) -> Self {
        Self { modulus: r, arg: T::zero() }
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::from_polar(self.modulus, self.arg)
    }

    pub fn recip(self) -> Self {
        Self { modulus: self.modulus.recip(), arg: -self.arg }
    }

    pub fn conj(self) -> Self {
        Self { modulus: self.modulus, arg: -self.arg }
    }

    pub fn scale(self, r: T) -> Self {
        Self { modulus: self.modulus * r, arg: self.arg }
    }

    pub fn mul(self, other: Self) -> Self {
        Self { modulus: self.modulus * other.modulus, arg: self.arg + other.arg }
    }

    /// Principal-branch power `z^ρ` along the unwrapped argument.
    pub fn powf(self, rho: T) -> Complex<T> {
        Complex::from_polar(self.modulus.powf(rho), rho * self.arg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaergoizFamily<T> {
    Power { rho: T },
    PowerLog { rho: T, b: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaergoizFunction<T> {
    pub family: MaergoizFamily<T>,
    /// `V` is defined on `S_γ = {|arg z| < πγ/2}`.
    pub gamma: T,
    /// Constant factor; 1 for the plain families.
    pub scale: T,
}

impl<T: Real> MaergoizFunction<T> {
    pub fn power(rho: T, gamma: T) -> Result<Self> {
        Self::new(MaergoizFamily::Power { rho }, gamma)
    }

    pub fn power_log(rho: T, b: T, gamma: T) -> Result<Self> {
        Self::new(MaergoizFamily::PowerLog { rho, b }, gamma)
    }

    pub fn new(family: MaergoizFamily<T>, gamma: T) -> Result<Self> {
        let rho = match family {
            MaergoizFamily::Power { rho } => rho,
            MaergoizFamily::PowerLog { rho, b } => {
                if !b.is_finite() {
                    return parameter(format!("b must be finite, got {b}"));
                }
                if gamma > lit(2.0) {
                    return parameter("power_log needs gamma <= 2 so that e + z avoids the branch cut");
                }
                rho
            }
        };
        if !(rho > T::zero()) || !rho.is_finite() {
            return parameter(format!("rho must be positive, got {rho}"));
        }
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return parameter(format!("gamma must be positive, got {gamma}"));
        }
        Ok(Self { family, gamma, scale: T::one() })
    }

    pub fn with_scale(mut self, scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return parameter(format!("scale must be positive, got {scale}"));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn rho(&self) -> T {
        match self.family {
            MaergoizFamily::Power { rho } | MaergoizFamily::PowerLog { rho, .. } => rho,
        }
    }

    pub fn half_opening(&self) -> T {
        T::PI() * self.gamma / lit(2.0)
    }

    pub fn name(&self) -> String {
        let base = match self.family {
            MaergoizFamily::Power { rho } => format!("power({rho})"),
            MaergoizFamily::PowerLog { rho, b } => format!("power_log({rho}, {b})"),
        };
        if self.scale == T::one() {
            base
        } else {
            format!("{} * {base}", self.scale)
        }
    }

    fn check(&self, z: SectorPoint<T>) -> Result<()> {
        if !(z.modulus > T::zero()) || !z.modulus.is_finite() {
            return domain(format!("modulus must be positive and finite, got {}", z.modulus));
        }
        if !(z.arg.abs() < self.half_opening()) {
            return domain(format!("arg {} outside the sector |arg z| < {}", z.arg, self.half_opening()));
        }
        Ok(())
    }

    /// `V(z)` on the principal branch.
    pub fn eval(&self, z: SectorPoint<T>) -> Result<Complex<T>> {
        self.check(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: SectorPoint<T>) -> Complex<T> {
        let v = match self.family {
            MaergoizFamily::Power { rho } => z.powf(rho),
            MaergoizFamily::PowerLog { rho, b } => {
                let log = (z.to_complex() + T::E()).ln();
                z.powf(rho) * (log.ln() * b).exp()
            }
        };
        v * self.scale
    }

    /// `V(r)` for real `r > 0`.
    pub fn eval_real(&self, r: T) -> Result<T> {
        if !(r > T::zero()) || !r.is_finite() {
            return domain(format!("r must be positive and finite, got {r}"));
        }
        let v = match self.family {
            MaergoizFamily::Power { rho } => r.powf(rho),
            MaergoizFamily::PowerLog { rho, b } => r.powf(rho) * (T::E() + r).ln().powf(b),
        };
        Ok(v * self.scale)
    }

    /// `log V(r)` for real `r > 0`.
    pub fn log_eval_real(&self, r: T) -> Result<T> {
        if !(r > T::zero()) || !r.is_finite() {
            return domain(format!("r must be positive and finite, got {r}"));
        }
        let lv = match self.family {
            MaergoizFamily::Power { rho } => rho * r.ln(),
            MaergoizFamily::PowerLog { rho, b } => rho * r.ln() + b * (T::E() + r).ln().ln(),
        };
        Ok(lv + self.scale.ln())
    }

    /// `V'(z)`.
    pub fn derivative(&self, z: SectorPoint<T>) -> Result<Complex<T>> {
        self.check(z)?;
        let v = self.eval_unchecked(z);
        let zc = z.to_complex();
        Ok(match self.family {
            MaergoizFamily::Power { rho } => v * rho / zc,
            MaergoizFamily::PowerLog { rho, b } => {
                let w = zc + T::E();
                v * (Complex::from(rho) / zc + Complex::from(b) / (w * w.ln()))
            }
        })
    }

    /// `V(zr) / V(r)` for real `r > 0`, with the `r^ρ` factors cancelled
    /// algebraically.
    pub fn ratio(&self, z: SectorPoint<T>, r: T) -> Result<Complex<T>> {
        self.check(z)?;
        self.check(z.scale(r))?;
        if !(r > T::zero()) {
            return domain(format!("r must be positive, got {r}"));
        }
        Ok(match self.family {
            MaergoizFamily::Power { rho } => z.powf(rho),
            MaergoizFamily::PowerLog { rho, b } => {
                let num = (z.scale(r).to_complex() + T::E()).ln();
                let den = (T::E() + r).ln();
                z.powf(rho) * ((num / den).ln() * b).exp()
            }
        })
    }

    /// Solves `V(r) = v` for `r > 0` by bisection in `log r`.
    pub fn invert_real(&self, v: T) -> Result<T> {
        if !(v > T::zero()) || !v.is_finite() {
            return domain(format!("V^(-1) needs a positive finite value, got {v}"));
        }
        let target = v.ln();
        let f = |u: T| self.log_eval_real(u.exp()).map(|lv| lv - target);
        let (mut lo, mut hi) = (-T::one(), T::one());
        while f(lo)? > T::zero() {
            lo = lo * lit(2.0);
        }
        while f(hi)? < T::zero() {
            hi = hi * lit(2.0);
        }
        for _ in 0..200 {
            let mid = (lo + hi) / lit(2.0);
            if mid == lo || mid == hi {
                break;
            }
            if f(mid)? < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(((lo + hi) / lit(2.0)).exp())
    }
}

/// `ρ_V(r) = log V(r) / log r` for `r > 1`.
pub fn rho_v<T: Real>(v: &MaergoizFunction<T>, r: T) -> Result<T> {
    if !(r > T::one()) {
        return domain(format!("rho_V needs r > 1, got {r}"));
    }
    Ok(v.log_eval_real(r)? / r.ln())
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyI<T> {
    /// `max_z |V(zr)/V(r) − z^ρ|` at the largest `r`.
    pub deviation: T,
    pub decay: Vec<(T, T)>,
    pub decreasing: bool,
}

impl<T: Real> PropertyI<T> {
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["r", "deviation"]);
        for &(r, d) in &self.decay {
            csv.row(&[fmt_num(r), fmt_num(d)]);
        }
        csv.finish()
    }
}

/// Compact grid `|z| ∈ [1/2, 2]`, `|arg z| ≤ π/4`.
pub fn default_z_grid<T: Real>(n_mod: usize, n_arg: usize) -> Vec<SectorPoint<T>> {
    let mods = geomspace(lit(0.5), lit(2.0), n_mod);
    let args = linspace(-T::FRAC_PI_4(), T::FRAC_PI_4(), n_arg);
    mods.iter()
        .flat_map(|&m| args.iter().map(move |&a| SectorPoint::new(m, a)))
        .collect()
}

/// Property (I): `V(zr)/V(r) → z^ρ` uniformly on compact sets.
pub fn property_i_check<T: Real>(
    v: &MaergoizFunction<T>,
    z_grid: &[SectorPoint<T>],
    r_seq: &[T],
) -> Result<PropertyI<T>> {
    if z_grid.is_empty() || r_seq.is_empty() {
        return domain("property (I) needs a nonempty z grid and r sequence");
    }
    if r_seq.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("r sequence must be increasing");
    }
    let rho = v.rho();
    let decay = r_seq
        .par_iter()
        .map(|&r| {
            let mut worst = T::zero();
            for &z in z_grid {
                let dev = (v.ratio(z, r)? - z.powf(rho)).norm();
                worst = worst.max(dev);
            }
            Ok((r, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing = decay.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(PropertyI { deviation: decay[decay.len() - 1].1, decay, decreasing })
}

/// Property (II): `max |V(z̄) − conj V(z)|` over the grid.
pub fn property_ii_check<T: Real>(v: &MaergoizFunction<T>, z_grid: &[SectorPoint<T>]) -> Result<T> {
    let mut worst = T::zero();
    for &z in z_grid {
        worst = worst.max((v.eval(z.conj())? - v.eval(z)?.conj()).norm());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    /// Strictly of the required sign everywhere on the grid.
    Strict,
    /// Zero to rounding: the affine degenerate case.
    Boundary,
    /// Wrong sign somewhere on the grid.
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeReport<T> {
    /// (III) `V > 0`, increasing, and `log V / log r` slope positive at the small end.
    pub positive_increasing: bool,
    pub small_end_value: T,
    pub small_end_slope: T,
    pub vanishes_at_zero: bool,
    /// (IV) worst `(d²/dt² V(e^t)) / V` over the grid.
    pub convexity_margin: T,
    pub convex: bool,
    /// (V) worst `r² (d²/dr² log V)` over the grid; negative means strictly concave in `r`.
    pub concavity_in_r_margin: T,
    pub concave_in_r: bool,
    /// Worst `d²/du² log V(e^u)`: curvature of `log V` in `log r`.
    pub log_r_curvature_margin: T,
    pub log_r_curvature: Curvature,
    /// Points where `log V` is convex in `log r`, if any.
    pub log_r_convex_below: Option<T>,
}

/// Second divided difference at the middle of three points.
fn second_divided<T: Real>(x: [T; 3], y: [T; 3]) -> T {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    lit::<T>(2.0) * (d2 - d1) / (x[2] - x[0])
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Properties (III)–(V) on an increasing grid of radii.
pub fn property_iii_to_v_check<T: Real>(v: &MaergoizFunction<T>, r_grid: &[T]) -> Result<ShapeReport<T>> {
    if r_grid.len() < 32 {
        return domain(format!("shape check needs at least 32 radii, got {}", r_grid.len()));
    }
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("radii must be strictly increasing");
    }
    let vals: Vec<T> = r_grid.iter().map(|&r| v.eval_real(r)).collect::<Result<_>>()?;
    let logs: Vec<T> = r_grid.iter().map(|&r| v.log_eval_real(r)).collect::<Result<_>>()?;
    let us: Vec<T> = r_grid.iter().map(|r| r.ln()).collect();

    let positive_increasing = vals[0] > T::zero() && vals.windows(2).all(|w| w[1] > w[0]);
    let small_end_slope = (logs[1] - logs[0]) / (us[1] - us[0]);

    let n = r_grid.len();
    let mut convexity_margin = T::infinity();
    let mut concavity_in_r_margin = T::neg_infinity();
    let mut log_r_curvature_margin = T::neg_infinity();
    let mut log_r_min = T::infinity();
    let mut log_r_convex_below: Option<T> = None;
    let tol = lit::<T>(BOUNDARY_TOL);
    for i in 1..n - 1 {
        let u3 = [us[i - 1], us[i], us[i + 1]];
        let r3 = [r_grid[i - 1], r_grid[i], r_grid[i + 1]];
        let v3 = [vals[i - 1], vals[i], vals[i + 1]];
        let l3 = [logs[i - 1], logs[i], logs[i + 1]];
        convexity_margin = convexity_margin.min(second_divided(u3, v3) / vals[i]);
        concavity_in_r_margin = concavity_in_r_margin.max(second_divided(r3, l3) * r3[1] * r3[1]);
        let k = second_divided(u3, l3);
        log_r_curvature_margin = log_r_curvature_margin.max(k);
        log_r_min = log_r_min.min(k);
        if k > tol {
            log_r_convex_below = Some(log_r_convex_below.map_or(r3[1], |b: T| b.max(r3[1])));
        }
    }
    let log_r_curvature = if log_r_curvature_margin > tol {
        Curvature::Violated
    } else if log_r_curvature_margin.abs() <= tol && log_r_min.abs() <= tol {
        Curvature::Boundary
    } else if log_r_curvature_margin < -tol {
        Curvature::Strict
    } else {
        Curvature::Boundary
    };
    Ok(ShapeReport {
        positive_increasing,
        small_end_value: vals[0],
        small_end_slope,
        vanishes_at_zero: small_end_slope > T::zero(),
        convexity_margin,
        convex: convexity_margin > T::zero(),
        concavity_in_r_margin,
        concave_in_r: concavity_in_r_margin < T::zero(),
        log_r_curvature_margin,
        log_r_curvature,
        log_r_convex_below,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MvBounds<T> {
    pub a_est: T,
    pub b_est: T,
    pub t0_used: T,
    pub bounded: bool,
    pub ratios: Vec<(T, T)>,
}

/// Band `[A, B]` with `A V(t) ≤ M(t) ≤ B V(t)` over the tail half of the grid
/// points `t ≥ t0`.
pub fn mv_bounds<T: Real>(
    a: &AssociatedFunction<T>,
    v: &MaergoizFunction<T>,
    t_grid: &[T],
    t0: T,
) -> Result<MvBounds<T>> {
    let ts: Vec<T> = t_grid.iter().copied().filter(|&t| t >= t0).collect();
    if ts.len() < 4 {
        return domain(format!("need at least 4 grid points beyond t0 = {t0}"));
    }
    let ratios: Vec<(T, T)> = ts
        .par_iter()
        .map(|&t| Ok((t, (a.m_of_t(t)?.ln() - v.log_eval_real(t)?).exp())))
        .collect::<Result<_>>()?;
    let half = ratios.len() / 2;
    let band = |s: &[(T, T)]| {
        s.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| (lo.min(x.1), hi.max(x.1)))
    };
    let (head_lo, head_hi) = band(&ratios[..half]);
    let (a_est, b_est) = band(&ratios[half..]);
    let bounded = a_est > T::zero() && a_est >= head_lo * lit(0.5) && b_est <= head_hi * lit(2.0);
    Ok(MvBounds { a_est, b_est, t0_used: ts[0], bounded, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::WeightSequence;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn evaluation_examples() {
        let p = MaergoizFunction::power(0.5, 1.5).unwrap();
        assert_abs_diff_eq!(p.eval(SectorPoint::real(4.0)).unwrap().re, 2.0, epsilon = 1e-15);
        let z = p.eval(SectorPoint::new(4.0, FRAC_PI_2)).unwrap();
        let expect = Complex::from_polar(2.0, FRAC_PI_4);
        assert!((z - expect).norm() < 1e-15);
        let pl = MaergoizFunction::power_log(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(pl.eval(SectorPoint::real(1.0)).unwrap().re, (E + 1.0).ln(), epsilon = 1e-15);
        assert!(p.eval(SectorPoint::new(1.0, 3.0)).is_err());
        assert!(MaergoizFunction::power_log(1.0, 1.0, 2.5).is_err());
    }

    #[test]
    fn conjugation_is_exact() {
        let grid = default_z_grid(5, 7);
        for v in [MaergoizFunction::power(0.7, 1.0).unwrap(), MaergoizFunction::power_log(0.5, 1.0, 1.0).unwrap()] {
            assert_eq!(property_ii_check(&v, &grid).unwrap(), 0.0);
        }
    }

    #[test]
    fn rho_v_examples() {
        let p = MaergoizFunction::power(0.8, 1.0).unwrap();
        assert_abs_diff_eq!(rho_v(&p, 1e5).unwrap(), 0.8, epsilon = 1e-15);
        let pl = MaergoizFunction::power_log(1.0, 1.0, 1.0).unwrap();
        let r = rho_v(&pl, 1e6).unwrap();
        assert_abs_diff_eq!(r, 1.0 + (E + 1e6).ln().ln() / 1e6f64.ln(), epsilon = 1e-12);
        assert!(rho_v(&pl, 1e7).unwrap() < r);
        let flat = MaergoizFunction::power_log(0.3, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(rho_v(&flat, 50.0).unwrap(), 0.3, epsilon = 1e-15);
        assert!(rho_v(&pl, 1.0).is_err());
    }

    #[test]
    fn power_is_homogeneous() {
        let v = MaergoizFunction::power(0.5, 1.0).unwrap();
        let rs = geomspace(1e2, 1e8, 7);
        let i = property_i_check(&v, &default_z_grid(9, 9), &rs).unwrap();
        assert_eq!(i.deviation, 0.0);
        let pl = MaergoizFunction::power_log(0.5, 1.0, 1.0).unwrap();
        let z = SectorPoint::new(1.7, 0.6);
        let direct = pl.eval(z.scale(1e3)).unwrap() / pl.eval(SectorPoint::real(1e3)).unwrap();
        assert!((pl.ratio(z, 1e3).unwrap() - direct).norm() < 1e-13);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for v in [MaergoizFunction::power(0.5, 1.0).unwrap(), MaergoizFunction::power_log(0.5, 1.0, 1.0).unwrap()] {
            let z = SectorPoint::new(2.0, 0.3);
            let h = 1e-6;
            let plus = v.eval(SectorPoint::new(2.0 + h, 0.3)).unwrap();
            let minus = v.eval(SectorPoint::new(2.0 - h, 0.3)).unwrap();
            // radial difference quotient equals e^{i arg} V'(z)
            let radial = (plus - minus) / (2.0 * h);
            let expect = v.derivative(z).unwrap() * Complex::from_polar(1.0, 0.3);
            assert!((radial - expect).norm() < 1e-8);
        }
    }

    #[test]
    fn inversion_round_trips() {
        let v = MaergoizFunction::power_log(0.5, 1.0, 1.0).unwrap();
        for target in [0.1f64, 3.0, 400.0] {
            let r = v.invert_real(target).unwrap();
            assert!((v.eval_real(r).unwrap() / target - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_of_power() {
        let v = MaergoizFunction::power(0.5, 1.0).unwrap();
        let s = property_iii_to_v_check(&v, &geomspace(1e-3, 1e6, 64)).unwrap();
        assert!(s.positive_increasing && s.vanishes_at_zero && s.convex && s.concave_in_r);
        assert_eq!(s.log_r_curvature, Curvature::Boundary);
        assert!(property_iii_to_v_check(&v, &[1.0; 40]).is_err());
        assert!(property_iii_to_v_check(&v, &geomspace(1.0, 2.0, 10)).is_err());
    }

    #[test]
    fn shape_of_power_log() {
        let v = MaergoizFunction::power_log(0.5, 1.0, 1.0).unwrap();
        let s = property_iii_to_v_check(&v, &geomspace(1e-3, 1e6, 64)).unwrap();
        assert!(s.positive_increasing && s.vanishes_at_zero && s.convex && s.concave_in_r);
        // log V is convex in log r near the origin for this family
        assert_eq!(s.log_r_curvature, Curvature::Violated);
        let r = s.log_r_convex_below.unwrap();
        assert!(r > 1.0 && r < 10.0);
    }

    #[test]
    fn mv_band_for_gevrey_one() {
        let w = WeightSequence::gevrey(1.0, 1_100_000).unwrap();
        let a = AssociatedFunction::new(&w).unwrap();
        let grid = geomspace(1e2, 1e6, 60);
        let v = MaergoizFunction::power(1.0, 1.0).unwrap();
        let b = mv_bounds(&a, &v, &grid, 1e2).unwrap();
        assert!(b.a_est > 0.8 && b.a_est < 1.0 && b.b_est <= 1.0 && b.bounded);

        let doubled = mv_bounds(&a, &v.with_scale(2.0).unwrap(), &grid, 1e2).unwrap();
        assert_abs_diff_eq!(doubled.a_est, b.a_est / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(doubled.b_est, b.b_est / 2.0, epsilon = 1e-12);

        let wrong = mv_bounds(&a, &MaergoizFunction::power(2.0, 1.0).unwrap(), &grid, 1e2).unwrap();
        assert!(!wrong.bounded && wrong.a_est < 1e-4);
    }
}
