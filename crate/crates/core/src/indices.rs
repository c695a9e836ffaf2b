//! Growth indices of a weight sequence: ω(M), exponents of convergence,
//! the regular-variation ratio test and the `b`-limit.
//!
//! Every limit here is estimated by an extremum over a final window of
//! indices. The sliding series is returned with each estimate so that a
//! non-stabilizing tail is visible instead of being hidden behind a number.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::report::{fmt_num, Csv};
use crate::scalar::{idx, lit, Real};
use crate::sequences::WeightSequence;

pub const DEFAULT_TOL: f64 = 1e-3;
/// Relative change of the ω window series (between horizon P/2 and P) above
/// which the estimate is reported as unstable.
pub const OMEGA_STABILITY_TOL: f64 = 0.05;

/// Default window: a tenth of the horizon.
pub fn default_window(horizon: usize) -> usize {
    horizon / 10
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaEstimate<T> {
    pub estimate: T,
    pub window: usize,
    /// `(h, min_{h−window ≤ p < h} log m_p / log p)` for `h = k·P/10`.
    pub window_series: Vec<(usize, T)>,
    pub stable: bool,
}

fn check_window(horizon: usize, window: usize) -> Result<()> {
    if window < 10 {
        return domain(format!("window must be at least 10, got {window}"));
    }
    if horizon < 10 * window {
        return domain(format!("horizon {horizon} must be at least 10 x window ({window})"));
    }
    Ok(())
}

fn omega_tail<T: Real>(lq: &[T], end: usize, window: usize) -> T {
    (end.saturating_sub(window).max(2)..end)
        .map(|p| lq[p] / idx::<T>(p).ln())
        .fold(T::infinity(), T::min)
}

/// Estimates `ω(M) = liminf log m_p / log p` over the final `window` indices.
pub fn omega<T: Real>(w: &WeightSequence<T>, window: usize) -> Result<OmegaEstimate<T>> {
    let horizon = w.horizon();
    check_window(horizon, window)?;
    let lq = w.log_quots();
    let window_series: Vec<(usize, T)> = (1..=10usize)
        .into_par_iter()
        .map(|k| {
            let h = k * horizon / 10;
            (h, omega_tail(lq, h, window))
        })
        .collect();
    let estimate = window_series[9].1;
    let half = window_series[4].1;
    let stable = estimate.is_finite()
        && estimate > T::zero()
        && ((estimate - half) / estimate).abs() <= lit(OMEGA_STABILITY_TOL);
    Ok(OmegaEstimate { estimate, window, window_series, stable })
}

/// Estimates `limsup log n / log c_n` from `log c_n`, `n = 0..N−1`, over the
/// final `window` indices.
pub fn exponent_of_convergence<T: Real>(log_c: &[T], window: usize) -> Result<T> {
    let n = log_c.len();
    if window < 2 || n < 2 * window + 2 {
        return domain(format!("need at least 2 x window + 2 terms, got {n} for window {window}"));
    }
    let tail = &log_c[n - window..];
    if let Some(i) = tail.windows(2).position(|w| w[1] < w[0]) {
        return domain(format!("sequence is not monotone in its tail (index {})", n - window + i));
    }
    let prev_min = log_c[n - 2 * window..n - window].iter().copied().fold(T::infinity(), T::min);
    if !(tail[0] > T::zero()) || !(tail[window - 1] > prev_min) {
        return domain("sequence does not tend to infinity within the horizon");
    }
    Ok((n - window..n)
        .map(|i| idx::<T>(i).ln() / log_c[i])
        .fold(T::neg_infinity(), T::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct RegvarRow<T> {
    pub ell: usize,
    pub p: usize,
    pub ratio: T,
    pub target: T,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegvarTable<T> {
    pub omega: T,
    pub tol: T,
    pub rows: Vec<RegvarRow<T>>,
}

impl<T: Real> RegvarTable<T> {
    pub fn all_pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["ell", "p", "ratio", "target", "pass"]);
        for r in &self.rows {
            csv.row(&[r.ell.to_string(), r.p.to_string(), fmt_num(r.ratio), fmt_num(r.target), r.pass.to_string()]);
        }
        csv.finish()
    }
}

/// Default probes `P/16, P/8, (P−1)/4`, multipliers `{2, 3, 4}`.
pub fn default_regvar_grid(horizon: usize) -> (Vec<usize>, Vec<usize>) {
    (vec![2, 3, 4], vec![horizon / 16, horizon / 8, (horizon - 1) / 4])
}

/// Compares `m_{ℓp}/m_p` with `ℓ^ω` for every multiplier and probe.
pub fn regvar_test<T: Real>(
    w: &WeightSequence<T>,
    omega: T,
    multipliers: &[usize],
    probes: &[usize],
    tol: T,
) -> Result<RegvarTable<T>> {
    let last = w.horizon() - 1;
    let mut rows = Vec::with_capacity(multipliers.len() * probes.len());
    for &ell in multipliers {
        if ell == 0 {
            return domain("multiplier must be positive");
        }
        for &p in probes {
            if p == 0 || ell * p > last {
                return domain(format!("probe l={ell}, p={p} outside 1..={last}"));
            }
            let log_ratio = w.log_quot(ell * p) - w.log_quot(p);
            let log_target = omega * idx::<T>(ell).ln();
            let rel = (log_ratio - log_target).exp_m1().abs();
            rows.push(RegvarRow {
                ell,
                p,
                ratio: log_ratio.exp(),
                target: log_target.exp(),
                pass: ell == 1 || rel < tol,
            });
        }
    }
    Ok(RegvarTable { omega, tol, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct BLimit<T> {
    /// `log m_p − log M_p / p` at the last index.
    pub estimate: T,
    /// Range of the same quantity over the final window.
    pub spread: T,
    pub converged: bool,
}

/// Estimates `lim log m_p − (log M_p)/p` over the final window.
pub fn b_limit<T: Real>(w: &WeightSequence<T>, window: usize) -> Result<BLimit<T>> {
    let horizon = w.horizon();
    check_window(horizon, window)?;
    let value = |p: usize| w.log_quot(p) - w.log_term(p) / idx::<T>(p);
    let (lo, hi) = (horizon - window..horizon)
        .map(value)
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let estimate = value(horizon - 1);
    let spread = hi - lo;
    let converged = spread <= lit::<T>(1e-2) * estimate.abs().max(T::one());
    Ok(BLimit { estimate, spread, converged })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport<T> {
    pub omega_estimate: T,
    pub omega_window_series: Vec<(usize, T)>,
    pub omega_stable: bool,
    pub lambda_m: Option<T>,
    pub lambda_pm: Option<T>,
    pub b_limit: BLimit<T>,
    pub regvar_table: RegvarTable<T>,
}

impl<T: Real> IndexReport<T> {
    /// True when some estimate failed to stabilize and no verdict should be drawn.
    pub fn inconclusive(&self) -> bool {
        !self.omega_stable || !self.b_limit.converged || self.lambda_m.is_none()
    }
}

/// All index estimates with default probes.
pub fn index_report<T: Real>(w: &WeightSequence<T>, window: usize, tol: T) -> Result<IndexReport<T>> {
    let om = omega(w, window)?;
    let lq = w.log_quots();
    let lambda_m = exponent_of_convergence(lq, window).ok();
    let log_pm: Vec<T> = lq.iter().enumerate().map(|(p, &q)| q + idx::<T>(p + 1).ln()).collect();
    let lambda_pm = exponent_of_convergence(&log_pm, window).ok();
    let b = b_limit(w, window)?;
    let (ells, probes) = default_regvar_grid(w.horizon());
    let regvar_table = regvar_test(w, om.estimate, &ells, &probes, tol)?;
    Ok(IndexReport {
        omega_estimate: om.estimate,
        omega_window_series: om.window_series,
        omega_stable: om.stable,
        lambda_m,
        lambda_pm,
        b_limit: b,
        regvar_table,
    })
}
