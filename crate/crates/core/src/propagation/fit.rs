//! Ray traces and the fitting of flatness and expansion constants.
//!
//! Both fits use the same rule: the smallest constant on a log-spaced bracket
//! (relative resolution 1e-3) for which the supremum of the slack, over all
//! samples, stays within `margin` of its value at the largest radius. The
//! slack is monotone in the constant, so bisection applies.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::functions::TestFunction;
use crate::assoc_fn::AssociatedFunction;
use crate::error::{domain, Error, Result};
use crate::maergoiz::SectorPoint;
use crate::scalar::{idx, lit, CompensatedSum, Real};
use crate::sequences::WeightSequence;

pub const FIT_RESOLUTION: f64 = 1e-3;
pub const FIT_MARGIN: f64 = 1.0;
/// Decay `M(1/(c r_min))` demanded at the top of the bracket.
pub const MIN_DECAY: f64 = 10.0;
pub const DEFAULT_RAY_POINTS: usize = 64;
pub const DEFAULT_RAY_RATIO: f64 = 0.9;

#[derive(Clone, Debug, Serialize)]
pub struct RayTrace<T> {
    pub theta: T,
    pub radii: Vec<T>,
    pub log_abs: Vec<T>,
}

/// `r0 · 0.9^i`, 64 points.
pub fn default_radii<T: Real>(r0: T) -> Vec<T> {
    geometric_radii(r0, lit(DEFAULT_RAY_RATIO), DEFAULT_RAY_POINTS)
}

pub fn geometric_radii<T: Real>(r0: T, q: T, n: usize) -> Vec<T> {
    (0..n).map(|i| r0 * q.powi(i as i32)).collect()
}

fn check_radii<T: Real>(radii: &[T]) -> Result<()> {
    if radii.len() < 16 {
        return domain(format!("a ray needs at least 16 radii, got {}", radii.len()));
    }
    if !(radii[radii.len() - 1] > T::zero()) || radii.windows(2).any(|w| !(w[1] < w[0])) {
        return domain("radii must be positive and strictly decreasing");
    }
    Ok(())
}

/// Samples `log |f(r e^{iθ})|` along a ray.
pub fn trace_ray<T: Real>(f: &TestFunction<T>, theta: T, radii: &[T]) -> Result<RayTrace<T>> {
    check_radii(radii)?;
    let log_abs = radii
        .par_iter()
        .map(|&r| f.log_abs(SectorPoint::new(r, theta)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = log_abs.iter().position(|v| v.is_nan()) {
        return domain(format!("f is undefined at r = {}", radii[i]));
    }
    Ok(RayTrace { theta, radii: radii.to_vec(), log_abs })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatnessFit<T> {
    pub theta: T,
    pub c1: T,
    pub c2: T,
    /// Worst `log|f| − (log c1 − M(1/(c2 r)))` over the samples (≤ 0).
    pub residual: T,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlatVerdict<T> {
    Flat(FlatnessFit<T>),
    NotFlat { theta: T, reason: String },
}

impl<T: Real> FlatVerdict<T> {
    pub fn fit(&self) -> Option<&FlatnessFit<T>> {
        match self {
            FlatVerdict::Flat(f) => Some(f),
            FlatVerdict::NotFlat { .. } => None,
        }
    }
}

/// `log t` with `M(t) = target`, by bisection on the representable range.
fn log_t_for_level<T: Real>(a: &AssociatedFunction<T>, target: T) -> Result<T> {
    let hi0 = a.max_log_t();
    if a.m_of_log_t(hi0)? < target {
        return domain(format!(
            "horizon {} too small: M(m_(P-1)) < {target}; raise the horizon",
            a.horizon()
        ));
    }
    let (mut lo, mut hi) = (a.breakpoints()[0], hi0);
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if mid == lo || mid == hi {
            break;
        }
        if a.m_of_log_t(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Bracket `[log c_lo, log c_hi]` for a ray whose smallest radius is `r_min`.
///
/// `c_lo` keeps `1/(c r)` inside the representable range; at `c_hi` the bound
/// demands a decay of `MIN_DECAY` at `r_min`, so functions without decay fail.
pub fn bracket<T: Real>(a: &AssociatedFunction<T>, r_min: T) -> Result<(T, T)> {
    let lo = -(a.max_log_t() + r_min.ln());
    let hi = -(log_t_for_level(a, lit(MIN_DECAY))? + r_min.ln());
    if !(hi > lo) {
        return domain("empty fitting bracket; raise the horizon");
    }
    Ok((lo, hi))
}

/// Smallest `x` in `[lo, hi]` with `ok(x)`, assuming `ok` is monotone and `ok(hi)`.
fn bisect_log<T: Real>(lo: T, hi: T, mut ok: impl FnMut(T) -> Result<bool>) -> Result<T> {
    if ok(lo)? {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    let res = lit::<T>(FIT_RESOLUTION).ln_1p();
    while hi - lo > res {
        let mid = (lo + hi) / lit(2.0);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn flat_slacks<T: Real>(trace: &RayTrace<T>, a: &AssociatedFunction<T>, log_c: T) -> Result<Vec<T>> {
    trace
        .radii
        .iter()
        .zip(&trace.log_abs)
        .map(|(&r, &l)| Ok(l + a.m_of_log_t(-(log_c + r.ln()))?))
        .collect()
}

fn max_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::neg_infinity(), T::max)
}

/// Fits `|f| ≤ c1 e^{−M(1/(c2 r))}` along a ray.
pub fn fit_flat_type<T: Real>(trace: &RayTrace<T>, a: &AssociatedFunction<T>) -> Result<FlatVerdict<T>> {
    check_radii(&trace.radii)?;
    if trace.log_abs.len() != trace.radii.len() {
        return domain("trace arrays differ in length");
    }
    let not_flat = |reason: String| Ok(FlatVerdict::NotFlat { theta: trace.theta, reason });
    if trace.log_abs.iter().any(|v| *v == T::infinity()) {
        return not_flat("f is unbounded on the ray".into());
    }
    let margin = lit::<T>(FIT_MARGIN);
    let (lo, hi) = bracket(a, trace.radii[trace.radii.len() - 1])?;
    let ok = |log_c: T| -> Result<bool> {
        let s = flat_slacks(trace, a, log_c)?;
        Ok(max_of(&s) <= s[0] + margin)
    };
    if !ok(hi)? {
        return not_flat(format!(
            "no c2 up to {} keeps the bound within margin of its value at the largest radius",
            hi.exp()
        ));
    }
    let log_c2 = bisect_log(lo, hi, ok)?;
    let slacks = flat_slacks(trace, a, log_c2)?;
    let log_c1 = max_of(&slacks);
    Ok(FlatVerdict::Flat(FlatnessFit {
        theta: trace.theta,
        c1: log_c1.exp(),
        c2: log_c2.exp(),
        residual: max_of(&slacks) - log_c1,
    }))
}

/// Checks `log|f| ≤ log c1 − M(1/(c2 r)) + tol` on every sample.
pub fn flat_bound_holds<T: Real>(trace: &RayTrace<T>, a: &AssociatedFunction<T>, fit: &FlatnessFit<T>, tol: T) -> Result<bool> {
    for (&r, &l) in trace.radii.iter().zip(&trace.log_abs) {
        if l > a.flat_bound(fit.c1, fit.c2, r)? + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit<T> {
    pub theta: T,
    pub c: T,
    pub a: T,
    pub p_max: usize,
    /// `max_i` of the slack for each `p` at the fitted `A`.
    pub per_p_slack: Vec<T>,
    pub dropped_samples: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExpansionVerdict<T> {
    Fit(ExpansionFit<T>),
    NoFit { theta: T, reason: String },
}

impl<T: Real> ExpansionVerdict<T> {
    pub fn fit(&self) -> Option<&ExpansionFit<T>> {
        match self {
            ExpansionVerdict::Fit(f) => Some(f),
            ExpansionVerdict::NoFit { .. } => None,
        }
    }
}

/// Loss factor (in ulps of the summands) beyond which a remainder is dropped.
const CANCELLATION_LIMIT: f64 = 1e6;

/// `log |f(z) − Σ_{n<p} a_n z^n|` for `p = 0..=p_max`; `None` where the
/// subtraction cancels catastrophically.
fn log_remainders<T: Real>(f: &TestFunction<T>, coeffs: &[Complex<T>], z: SectorPoint<T>, p_max: usize) -> Result<Vec<Option<T>>> {
    let fz = f.eval(z)?;
    let mut out = Vec::with_capacity(p_max + 1);
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    let fc = fz.to_complex();
    re.add(fc.re);
    im.add(fc.im);
    let mut magnitude = fc.norm();
    let mut all_zero = true;
    let zc = z.to_complex();
    let mut zn = Complex::from(T::one());
    let limit = lit::<T>(CANCELLATION_LIMIT) * T::epsilon();
    for p in 0..=p_max {
        if all_zero {
            out.push(Some(fz.log_abs));
        } else {
            let rem = Complex::new(re.value(), im.value()).norm();
            out.push(if rem > limit * magnitude { Some(rem.ln()) } else { None });
        }
        if p < p_max {
            let a = coeffs[p];
            if a != Complex::from(T::zero()) {
                all_zero = false;
                let term = a * zn;
                re.add(-term.re);
                im.add(-term.im);
                magnitude = magnitude + term.norm();
            }
            zn = zn * zc;
        }
    }
    Ok(out)
}

/// Fits `|f(z) − Σ_{n<p} a_n z^n| ≤ C A^p M_p |z|^p` for `p ≤ p_max` along a ray.
pub fn expansion_fit<T: Real>(
    f: &TestFunction<T>,
    coeffs: &[Complex<T>],
    w: &WeightSequence<T>,
    theta: T,
    radii: &[T],
    p_max: usize,
) -> Result<ExpansionVerdict<T>> {
    check_radii(radii)?;
    if p_max > coeffs.len() || p_max > w.horizon() {
        return domain(format!(
            "p_max = {p_max} exceeds the coefficient count {} or the horizon {}",
            coeffs.len(),
            w.horizon()
        ));
    }
    let rems: Vec<Vec<Option<T>>> = radii
        .par_iter()
        .map(|&r| log_remainders(f, coeffs, SectorPoint::new(r, theta), p_max))
        .collect::<Result<_>>()?;
    let dropped = rems.iter().flatten().filter(|v| v.is_none()).count();
    if dropped > 0 {
        log::warn!("expansion fit at theta = {theta}: dropped {dropped} remainders to cancellation");
    }
    if rems.iter().flatten().all(|v| v.is_none()) {
        return Err(Error::Domain("every remainder cancelled catastrophically".into()));
    }
    if rems.iter().flatten().flatten().any(|v| *v == T::infinity()) {
        return Ok(ExpansionVerdict::NoFit { theta, reason: "f is unbounded on the ray".into() });
    }
    let log_r: Vec<T> = radii.iter().map(|r| r.ln()).collect();
    // slack(p, i) = log|R_p(z_i)| − p log A − log M_p − p log r_i
    let slack_table = |log_a: T| -> (Vec<T>, T) {
        let mut per_p = vec![T::neg_infinity(); p_max + 1];
        let mut anchor = T::neg_infinity();
        for (i, row) in rems.iter().enumerate() {
            for (p, v) in row.iter().enumerate() {
                if let Some(l) = v {
                    let s = *l - idx::<T>(p) * (log_a + log_r[i]) - w.log_term(p);
                    per_p[p] = per_p[p].max(s);
                    if i == 0 {
                        anchor = anchor.max(s);
                    }
                }
            }
        }
        (per_p, anchor)
    };
    if p_max == 0 {
        let (per_p, _) = slack_table(T::zero());
        return Ok(ExpansionVerdict::Fit(ExpansionFit {
            theta,
            c: per_p[0].exp(),
            a: T::one(),
            p_max,
            per_p_slack: per_p,
            dropped_samples: dropped,
        }));
    }
    let margin = lit::<T>(FIT_MARGIN);
    let ok = |log_a: T| -> Result<bool> {
        let (per_p, anchor) = slack_table(log_a);
        Ok(max_of(&per_p) <= anchor + margin)
    };
    let a_fn = AssociatedFunction::new(&w.truncated(p_max.max(2))?)?;
    let (lo, hi) = bracket(&a_fn, radii[radii.len() - 1])?;
    if !ok(hi)? {
        return Ok(ExpansionVerdict::NoFit {
            theta,
            reason: format!("no A up to {} keeps the remainder bound within margin", hi.exp()),
        });
    }
    let log_a = bisect_log(lo, hi, ok)?;
    let (per_p, _) = slack_table(log_a);
    Ok(ExpansionVerdict::Fit(ExpansionFit {
        theta,
        c: max_of(&per_p).exp(),
        a: log_a.exp(),
        p_max,
        per_p_slack: per_p,
        dropped_samples: dropped,
    }))
}

/// Checks the expansion inequality on every retained sample.
pub fn expansion_bound_holds<T: Real>(
    f: &TestFunction<T>,
    coeffs: &[Complex<T>],
    w: &WeightSequence<T>,
    radii: &[T],
    fit: &ExpansionFit<T>,
    tol: T,
) -> Result<bool> {
    let (log_c, log_a) = (fit.c.ln(), fit.a.ln());
    for &r in radii {
        let rems = log_remainders(f, coeffs, SectorPoint::new(r, fit.theta), fit.p_max)?;
        for (p, v) in rems.iter().enumerate() {
            if let Some(l) = v {
                let bound = log_c + idx::<T>(p) * (log_a + r.ln()) + w.log_term(p);
                if *l > bound + tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
