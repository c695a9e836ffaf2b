//! Weight sequences `M = (M_p)` kept in the log domain, their quotients,
//! the four structural conditions and sequence equivalence.
//!
//! `M_p` overflows any fixed-width float long before the horizons we care
//! about (`p ~ 10^6`), so a [`WeightSequence`] only ever stores `log M_p` and
//! `log m_p`. For the built-in families the quotients are evaluated in closed
//! form and the terms are their compensated prefix sums, which keeps
//! `log m_p` exact to rounding regardless of how large `log M_p` gets.

use std::path::Path;

use serde::Serialize;

use crate::error::{domain, parameter, Error, Result};
use crate::scalar::{idx, lit, log_add_exp, CompensatedSum, Real};

/// Relative change below which a running supremum counts as stabilized.
pub const STABILIZATION_TOL: f64 = 1e-3;

/// Built-in sequence families plus user-supplied data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family<T> {
    /// `M_p = p!^α`.
    Gevrey { alpha: T },
    /// `M_p = p!^α · Π_{m=0}^{p} log^β(e + m)`.
    AlphaBeta { alpha: T, beta: T },
    /// `M_p = Π_{m=0}^{p} log^β(e + m)`.
    ZeroBeta { beta: T },
    /// `M_p = q^{p²}`.
    QSquare { q: T },
    Custom,
}

impl<T: Real> Family<T> {
    fn validate(&self) -> Result<()> {
        match *self {
            Family::Gevrey { alpha } | Family::AlphaBeta { alpha, .. } if !(alpha > T::zero()) => {
                parameter(format!("alpha must be positive, got {alpha}"))
            }
            Family::AlphaBeta { beta, .. } if !beta.is_finite() => {
                parameter(format!("beta must be finite, got {beta}"))
            }
            Family::ZeroBeta { beta } if !(beta > T::zero()) => {
                parameter(format!("beta must be positive, got {beta}"))
            }
            Family::QSquare { q } if !(q > T::one()) => {
                parameter(format!("q must exceed 1, got {q}"))
            }
            _ => Ok(()),
        }
    }

    /// `log m_p` in closed form; `None` for custom data.
    fn log_quotient(&self, p: usize) -> Option<T> {
        let e = T::E();
        let next = idx::<T>(p + 1);
        Some(match *self {
            Family::Gevrey { alpha } => alpha * next.ln(),
            Family::AlphaBeta { alpha, beta } => alpha * next.ln() + beta * (e + next).ln().ln(),
            Family::ZeroBeta { beta } => beta * (e + next).ln().ln(),
            Family::QSquare { q } => idx::<T>(2 * p + 1) * q.ln(),
            Family::Custom => return None,
        })
    }

    /// The index ω(M) when it is known in closed form.
    pub fn closed_form_omega(&self) -> Option<T> {
        match *self {
            Family::Gevrey { alpha } | Family::AlphaBeta { alpha, .. } => Some(alpha),
            Family::ZeroBeta { .. } => Some(T::zero()),
            Family::QSquare { .. } => Some(T::infinity()),
            Family::Custom => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Family::Gevrey { alpha } => format!("gevrey({alpha})"),
            Family::AlphaBeta { alpha, beta } => format!("alpha_beta({alpha}, {beta})"),
            Family::ZeroBeta { beta } => format!("zero_beta({beta})"),
            Family::QSquare { q } => format!("q_square({q})"),
            Family::Custom => "custom".to_string(),
        }
    }
}

/// A weight sequence `(M_p)_{p=0..=P}` with `M_0 = 1`, stored as logarithms.
#[derive(Clone, Debug, Serialize)]
pub struct WeightSequence<T> {
    family: Family<T>,
    log_terms: Vec<T>,
    #[serde(skip)]
    log_quots: Vec<T>,
}

/// `log m_p = log M_{p+1} − log M_p` for `p = 0..P−1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quotients<T> {
    pub log_quots: Vec<T>,
}

impl<T: Real> Quotients<T> {
    pub fn len(&self) -> usize {
        self.log_quots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_quots.is_empty()
    }

    /// `m_p` itself; overflows to infinity for fast-growing sequences.
    pub fn value(&self, p: usize) -> T {
        self.log_quots[p].exp()
    }
}

impl<T: Real> WeightSequence<T> {
    /// Builds a built-in family up to index `horizon`.
    pub fn build(family: Family<T>, horizon: usize) -> Result<Self> {
        if horizon < 2 {
            return domain(format!("horizon must be at least 2, got {horizon}"));
        }
        family.validate()?;
        if family == Family::Custom {
            return parameter("custom sequences are built from data, see WeightSequence::from_log_terms");
        }
        let log_quots: Vec<T> = (0..horizon)
            .map(|p| family.log_quotient(p).expect("built-in family"))
            .collect();
        let log_terms = match family {
            // p² log q is exact; a running sum would only add rounding.
            Family::QSquare { q } => (0..=horizon).map(|p| idx::<T>(p * p) * q.ln()).collect(),
            _ => {
                let mut acc = CompensatedSum::new();
                let mut terms = Vec::with_capacity(horizon + 1);
                terms.push(T::zero());
                for &lq in &log_quots {
                    acc.add(lq);
                    terms.push(acc.value());
                }
                terms
            }
        };
        Ok(Self { family, log_terms, log_quots })
    }

    pub fn gevrey(alpha: T, horizon: usize) -> Result<Self> {
        Self::build(Family::Gevrey { alpha }, horizon)
    }

    pub fn alpha_beta(alpha: T, beta: T, horizon: usize) -> Result<Self> {
        Self::build(Family::AlphaBeta { alpha, beta }, horizon)
    }

    pub fn zero_beta(beta: T, horizon: usize) -> Result<Self> {
        Self::build(Family::ZeroBeta { beta }, horizon)
    }

    pub fn q_square(q: T, horizon: usize) -> Result<Self> {
        Self::build(Family::QSquare { q }, horizon)
    }

    /// Wraps user data `log M_0, …, log M_P`.
    pub fn from_log_terms(log_terms: Vec<T>) -> Result<Self> {
        if log_terms.len() < 3 {
            return domain(format!(
                "a sequence needs at least 3 terms (horizon >= 2), got {}",
                log_terms.len()
            ));
        }
        if log_terms[0] != T::zero() {
            return domain(format!("log M_0 must be 0, got {}", log_terms[0]));
        }
        if let Some(p) = log_terms.iter().position(|v| !v.is_finite()) {
            return domain(format!("log M_{p} is not finite"));
        }
        let log_quots = log_terms.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { family: Family::Custom, log_terms, log_quots })
    }

    /// Reads a custom sequence: one decimal `log M_p` per line, first line 0.
    pub fn read_custom(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_custom(&text)
    }

    pub fn parse_custom(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{e}: {line:?}"),
            })?;
            if values.is_empty() && v != 0.0 {
                return Err(Error::Parse { line: i + 1, message: "first value must be 0 (M_0 = 1)".into() });
            }
            values.push(T::from_f64(v).ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "value not representable".into(),
            })?);
        }
        Self::from_log_terms(values)
    }

    /// Truncates to a smaller horizon.
    pub fn truncated(&self, horizon: usize) -> Result<Self> {
        if horizon < 2 || horizon > self.horizon() {
            return domain(format!("cannot truncate horizon {} to {horizon}", self.horizon()));
        }
        Ok(Self {
            family: self.family,
            log_terms: self.log_terms[..=horizon].to_vec(),
            log_quots: self.log_quots[..horizon].to_vec(),
        })
    }

    pub fn family(&self) -> Family<T> {
        self.family
    }

    pub fn horizon(&self) -> usize {
        self.log_terms.len() - 1
    }

    pub fn log_terms(&self) -> &[T] {
        &self.log_terms
    }

    pub fn log_quots(&self) -> &[T] {
        &self.log_quots
    }

    pub fn log_term(&self, p: usize) -> T {
        self.log_terms[p]
    }

    pub fn log_quot(&self, p: usize) -> T {
        self.log_quots[p]
    }

    pub fn quotients(&self) -> Quotients<T> {
        Quotients { log_quots: self.log_quots.clone() }
    }

    /// First `p` with `m_p > m_{p+1}`; equal quotients count as nondecreasing.
    pub fn first_lc_violation(&self) -> Option<usize> {
        self.log_quots.windows(2).position(|w| w[0] > w[1])
    }

    pub fn is_log_convex(&self) -> bool {
        self.first_lc_violation().is_none()
    }

    /// Largest log-convex minorant: the lower convex hull of `(p, log M_p)`.
    ///
    /// For a sequence that is already (lc) this returns the same terms.
    pub fn log_convex_minorant(&self) -> Self {
        let n = self.log_terms.len();
        let mut hull: Vec<usize> = Vec::with_capacity(n);
        for p in 0..n {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b if it lies on or above the chord a→p
                let lhs = (self.log_terms[b] - self.log_terms[a]) * idx::<T>(p - a);
                let rhs = (self.log_terms[p] - self.log_terms[a]) * idx::<T>(b - a);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut terms = vec![T::zero(); n];
        for w in hull.windows(2) {
            let (a, b) = (w[0], w[1]);
            let slope = (self.log_terms[b] - self.log_terms[a]) / idx::<T>(b - a);
            for (k, t) in terms.iter_mut().enumerate().take(b + 1).skip(a) {
                *t = if k == b { self.log_terms[b] } else { self.log_terms[a] + slope * idx::<T>(k - a) };
            }
        }
        if self.is_log_convex() {
            return self.clone();
        }
        let log_quots = terms.windows(2).map(|w| w[1] - w[0]).collect();
        Self { family: Family::Custom, log_terms: terms, log_quots }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LcReport {
    pub holds_up_to_horizon: bool,
    pub first_violation: Option<usize>,
}

/// Finite-horizon estimate for one of the "there exists a constant" conditions.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantEstimate<T> {
    /// Running supremum of the defining ratio over the whole horizon.
    pub estimate: T,
    /// Same supremum in the log domain (finite even when `estimate` overflows).
    pub log_estimate: T,
    /// Supremum restricted to the first half of the horizon.
    pub half_horizon_log_estimate: T,
    /// Relative change of the running supremum over the last half of the horizon.
    pub relative_change: T,
    pub bounded_trend: bool,
}

impl<T: Real> ConstantEstimate<T> {
    fn from_running(log_running: &[T], horizon: usize) -> Self {
        let last = *log_running.last().expect("nonempty running sup");
        let half = log_running[(horizon / 2).min(log_running.len() - 1)];
        // (R(P) − R(P/2)) / R(P) with R = exp(log R)
        let relative_change = if last == T::neg_infinity() {
            T::zero()
        } else {
            -(half - last).exp_m1()
        };
        Self {
            estimate: last.exp(),
            log_estimate: last,
            half_horizon_log_estimate: half,
            relative_change,
            bounded_trend: relative_change < lit(STABILIZATION_TOL),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport<T> {
    pub family: String,
    pub horizon: usize,
    pub lc: LcReport,
    pub dc: ConstantEstimate<T>,
    pub mg: ConstantEstimate<T>,
    pub snq: ConstantEstimate<T>,
    pub quotients_to_infinity: bool,
}

impl<T: Real> ConditionReport<T> {
    /// (lc), (mg) and (snq) all hold up to the horizon.
    pub fn strongly_regular_trend(&self) -> bool {
        self.lc.holds_up_to_horizon && self.mg.bounded_trend && self.snq.bounded_trend
    }
}

/// Running maximum, where `values[h]` is the candidate first admitted at horizon `h`.
fn running_max<T: Real>(values: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(values.len());
    let mut best = T::neg_infinity();
    for &v in values {
        if v > best {
            best = v;
        }
        out.push(best);
    }
    out
}

/// Checks (lc), (dc), (mg), (snq) up to the horizon.
///
/// Each existential constant is reported as the running supremum of its
/// defining ratio together with a stabilization flag; see [`ConstantEstimate`].
/// For (mg) on an (lc) sequence the supremum over `p + q = n` is attained at
/// the balanced split, so the scan is linear; non-(lc) input falls back to the
/// exhaustive quadratic scan.
pub fn condition_report<T: Real>(w: &WeightSequence<T>) -> Result<ConditionReport<T>> {
    let horizon = w.horizon();
    if horizon < 8 {
        return domain(format!("condition_report needs horizon >= 8, got {horizon}"));
    }
    let lt = w.log_terms();
    let lq = w.log_quots();

    let first_violation = w.first_lc_violation();
    let lc = LcReport { holds_up_to_horizon: first_violation.is_none(), first_violation };

    // (dc): m_p ≤ A^{p+1}; candidate admitted at horizon h = p + 1.
    let mut dc_at = vec![T::neg_infinity(); horizon + 1];
    for (p, &q) in lq.iter().enumerate() {
        dc_at[p + 1] = q / idx::<T>(p + 1);
    }
    let dc = ConstantEstimate::from_running(&running_max(&dc_at), horizon);

    // (mg): M_{p+q} ≤ B^{p+q} M_p M_q; candidates with p + q = n appear at horizon n.
    let mut mg_at = vec![T::neg_infinity(); horizon + 1];
    if lc.holds_up_to_horizon {
        for (n, slot) in mg_at.iter_mut().enumerate().skip(1) {
            let p = n / 2;
            *slot = (lt[n] - lt[p] - lt[n - p]) / idx::<T>(n);
        }
    } else {
        for (n, slot) in mg_at.iter_mut().enumerate().skip(1) {
            *slot = (0..=n)
                .map(|p| (lt[n] - lt[p] - lt[n - p]) / idx::<T>(n))
                .fold(T::neg_infinity(), T::max);
        }
    }
    let mg = ConstantEstimate::from_running(&running_max(&mg_at), horizon);

    // (snq): m_p Σ_{q=p}^{h−1} 1/((q+1) m_q) for p ≤ h/2, evaluated at each horizon h.
    // The supremum at horizon h only needs suffix sums truncated at h, so it is
    // recomputed on a geometric ladder of horizons and interpolated as a step function.
    let snq_at = snq_running(lq, horizon);
    let snq = ConstantEstimate::from_running(&snq_at, horizon);

    let quotients_to_infinity = quotients_diverge(lq);

    Ok(ConditionReport {
        family: w.family().name(),
        horizon,
        lc,
        dc,
        mg,
        snq,
        quotients_to_infinity,
    })
}

/// log of `sup_{p ≤ h/2} m_p Σ_{q=p}^{h−1} 1/((q+1) m_q)` for the horizons that
/// matter to the trend test (`h = P/2` and `h = P`), filled into a running array.
fn snq_running<T: Real>(lq: &[T], horizon: usize) -> Vec<T> {
    let sup_at = |h: usize| -> T {
        let mut log_tail = T::neg_infinity();
        let mut best = T::neg_infinity();
        for q in (0..h).rev() {
            log_tail = log_add_exp(log_tail, -(idx::<T>(q + 1).ln()) - lq[q]);
            if q <= h / 2 {
                best = best.max(lq[q] + log_tail);
            }
        }
        best
    };
    let half = horizon / 2;
    let mut out = vec![T::neg_infinity(); horizon + 1];
    let at_half = sup_at(half.max(1));
    let at_full = sup_at(horizon).max(at_half);
    for (h, slot) in out.iter_mut().enumerate() {
        if h >= half {
            *slot = if h == horizon { at_full } else { at_half };
        }
    }
    out
}

/// Tail minima over successive halves strictly increase and the last one
/// exceeds the first quotient.
fn quotients_diverge<T: Real>(lq: &[T]) -> bool {
    let n = lq.len();
    let min_of = |a: usize, b: usize| lq[a..b].iter().copied().fold(T::infinity(), T::min);
    let quarter = min_of(n / 4, n / 2);
    let last = min_of(n / 2, n);
    last > quarter && last > lq[0]
}

#[derive(Clone, Debug, Serialize)]
pub struct Equivalence<T> {
    /// `inf_p (M_p / L_p)^{1/p}` over `p ≥ 1`.
    pub lower: T,
    /// `sup_p (M_p / L_p)^{1/p}` over `p ≥ 1`.
    pub upper: T,
    pub equivalent_trend: bool,
}

/// Estimates constants `A, B` with `A^p L_p ≤ M_p ≤ B^p L_p`.
pub fn equivalence_estimate<T: Real>(
    m: &WeightSequence<T>,
    l: &WeightSequence<T>,
) -> Result<Equivalence<T>> {
    if m.horizon() != l.horizon() {
        return domain(format!(
            "horizons differ: {} vs {}",
            m.horizon(),
            l.horizon()
        ));
    }
    let horizon = m.horizon();
    let ratio = |p: usize| (m.log_term(p) - l.log_term(p)) / idx::<T>(p);
    let extrema = |upto: usize| {
        (1..=upto).map(ratio).fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (lo, hi) = extrema(horizon);
    let (lo_half, hi_half) = extrema((horizon / 2).max(1));
    let tol = lit::<T>(STABILIZATION_TOL);
    let stable = (lo - lo_half).abs() < tol && (hi - hi_half).abs() < tol;
    let (lower, upper) = (lo.exp(), hi.exp());
    let finite = lower.is_finite() && upper.is_finite() && lower > T::zero();
    Ok(Equivalence { lower, upper, equivalent_trend: finite && stable })
}
