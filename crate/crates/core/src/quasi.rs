//! Quasianalyticity of the three asymptotic classes attached to a weight
//! sequence, decided through their series criteria.
//!
//! The borderline series in this theory all sit at power exponent 1, where a
//! partial-sum test is useless at any feasible horizon. [`series_classify`]
//! therefore fits the tail of `−log t_p` against the log-scale
//! `log p, log log p, log log log p` one tier at a time.

use serde::Serialize;

use crate::error::{domain, parameter, Error, Result};
use crate::indices::{default_regvar_grid, default_window, omega, regvar_test};
use crate::scalar::{geomspace, idx, least_squares, lit, to_f64, CompensatedSum, Real};
use crate::sequences::WeightSequence;

/// Tolerance on the fitted exponents around the critical value 1.
pub const SERIES_TOL: f64 = 1e-2;
/// Number of log-spaced tail points used by the exponent fits.
const FIT_POINTS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesOutcome {
    Diverges,
    Converges,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesVerdict<T> {
    pub verdict: SeriesOutcome,
    /// Power exponent `s` in `t_p ≈ p^{−s}`.
    pub s_exponent: T,
    /// Exponent `c` in `t_p ≈ 1/(p log^c p)`, fitted when `s ≈ 1`.
    pub bertrand_exponent: Option<T>,
    /// Exponent `e` in `t_p ≈ 1/(p log p log^e log p)`, fitted when `s ≈ c ≈ 1`.
    pub loglog_exponent: Option<T>,
    pub partial_sums: Vec<(usize, T)>,
}

fn decide<T: Real>(x: T, tol: T) -> Option<SeriesOutcome> {
    if x > T::one() + tol {
        Some(SeriesOutcome::Converges)
    } else if x < T::one() - tol {
        Some(SeriesOutcome::Diverges)
    } else {
        None
    }
}

/// Classifies `Σ t_p` from `log t_p`, `p = 0..horizon−1`.
pub fn series_classify_log<T: Real, F>(log_term: F, horizon: usize) -> Result<SeriesVerdict<T>>
where
    F: Fn(usize) -> T,
{
    if horizon < 1000 {
        return domain(format!("series classification needs horizon >= 1000, got {horizon}"));
    }
    let tol = lit::<T>(SERIES_TOL);
    let mut ps: Vec<usize> = geomspace((horizon / 10) as f64, (horizon - 1) as f64, FIT_POINTS)
        .into_iter()
        .map(|x| x.round() as usize)
        .collect();
    ps.dedup();
    let mut y = Vec::with_capacity(ps.len());
    for &p in &ps {
        let lt = log_term(p);
        if lt.is_nan() || lt == T::infinity() {
            return domain(format!("term {p} is not a finite positive number"));
        }
        y.push(-lt);
    }
    let l1: Vec<T> = ps.iter().map(|&p| idx::<T>(p).ln()).collect();
    let l2: Vec<T> = l1.iter().map(|v| v.ln()).collect();
    let l3: Vec<T> = l2.iter().map(|v| v.ln()).collect();

    let fit = |cols: &[Vec<T>], y: &[T]| {
        least_squares(cols, y).map(|b| b[0]).ok_or_else(|| Error::Domain("degenerate tail fit".into()))
    };
    let s = fit(&[l1.clone(), l2.clone()], &y)?;

    let mut bertrand = None;
    let mut loglog = None;
    let verdict = match decide(s, tol) {
        Some(v) => v,
        None => {
            let y2: Vec<T> = y.iter().zip(&l1).map(|(a, b)| *a - *b).collect();
            let c = fit(std::slice::from_ref(&l2), &y2)?;
            bertrand = Some(c);
            match decide(c, tol) {
                Some(v) => v,
                None => {
                    let y3: Vec<T> = y2.iter().zip(&l2).map(|(a, b)| *a - *b).collect();
                    let e = fit(&[l3], &y3)?;
                    loglog = Some(e);
                    decide(e, tol).unwrap_or(SeriesOutcome::Inconclusive)
                }
            }
        }
    };

    let mut partial_sums = Vec::new();
    let mut acc = CompensatedSum::new();
    let mut next = 1usize;
    for p in 0..horizon {
        acc.add(log_term(p).exp());
        if p + 1 == next || p + 1 == horizon {
            partial_sums.push((p + 1, acc.value()));
            next *= 2;
        }
    }
    Ok(SeriesVerdict { verdict, s_exponent: s, bertrand_exponent: bertrand, loglog_exponent: loglog, partial_sums })
}

/// Classifies `Σ t_p` from positive terms.
pub fn series_classify<T: Real>(terms: &[T]) -> Result<SeriesVerdict<T>> {
    if let Some(p) = terms.iter().position(|t| !(*t > T::zero())) {
        return domain(format!("term {p} is not positive"));
    }
    series_classify_log(|p| terms[p].ln(), terms.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Quasianalytic,
    NotQuasianalytic,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    /// Functions with M-derivative bounds on an unbounded sector.
    Salinas,
    /// Uniform M-asymptotics on an unbounded sector.
    Uniform,
    /// M-asymptotics on a sectorial region.
    Regions,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiResult<T> {
    pub class: ClassKind,
    pub gamma: T,
    pub omega: T,
    /// `closed_form` for built-in families, `estimate` otherwise.
    pub omega_source: &'static str,
    pub verdict: Verdict,
    pub reason: String,
    pub series: Option<SeriesVerdict<T>>,
}

#[derive(Clone, Copy, Debug)]
pub struct QuasiOptions<T> {
    /// Half-width of the band in which `γ = ω` is assumed.
    pub tol: T,
    pub bounded_sector: bool,
    /// Skip the regular-variation prerequisite of the regions criterion.
    pub assume_admissible: bool,
}

impl<T: Real> Default for QuasiOptions<T> {
    fn default() -> Self {
        Self { tol: lit(1e-3), bounded_sector: false, assume_admissible: false }
    }
}

struct OmegaInfo<T> {
    value: T,
    source: &'static str,
}

fn omega_info<T: Real>(w: &WeightSequence<T>) -> std::result::Result<OmegaInfo<T>, String> {
    if let Some(value) = w.family().closed_form_omega() {
        return Ok(OmegaInfo { value, source: "closed_form" });
    }
    let window = default_window(w.horizon());
    let est = omega(w, window).map_err(|e| format!("omega unavailable: {e}"))?;
    if !est.stable {
        return Err(format!(
            "omega estimate does not stabilize ({} at P/2, {} at P)",
            est.window_series[4].1, est.estimate
        ));
    }
    Ok(OmegaInfo { value: est.estimate, source: "estimate" })
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return parameter(format!("gamma must be positive, got {gamma}"));
    }
    Ok(())
}

fn series_verdict(s: &SeriesVerdict<impl Real>) -> String {
    let mut out = format!("s = {:.4}", to_f64(s.s_exponent));
    if let Some(c) = s.bertrand_exponent {
        out += &format!(", log exponent = {:.4}", to_f64(c));
    }
    if let Some(e) = s.loglog_exponent {
        out += &format!(", log-log exponent = {:.4}", to_f64(e));
    }
    out
}

fn inconclusive<T: Real>(class: ClassKind, gamma: T, reason: String) -> QuasiResult<T> {
    QuasiResult {
        class,
        gamma,
        omega: T::nan(),
        omega_source: "unavailable",
        verdict: Verdict::Inconclusive,
        reason,
        series: None,
    }
}

fn with_sector_note<T: Real>(mut r: QuasiResult<T>, opts: &QuasiOptions<T>) -> QuasiResult<T> {
    if opts.bounded_sector {
        r.reason += "; bounded sector: the criterion is established only for gamma <= 1";
        if r.gamma > T::one() {
            r.reason += " and is applied here beyond that range";
        }
    }
    r
}

/// Criterion for the class defined by derivative bounds: quasianalytic iff
/// `γ > ω`, or `γ = ω` and `Σ ((p+1) m_p)^{−1/(ω+1)}` diverges.
pub fn classify_salinas<T: Real>(w: &WeightSequence<T>, gamma: T, opts: &QuasiOptions<T>) -> Result<QuasiResult<T>> {
    check_gamma(gamma)?;
    let class = ClassKind::Salinas;
    let om = match omega_info(w) {
        Ok(o) => o,
        Err(e) => return Ok(with_sector_note(inconclusive(class, gamma, e), opts)),
    };
    let mut res = QuasiResult {
        class,
        gamma,
        omega: om.value,
        omega_source: om.source,
        verdict: Verdict::Inconclusive,
        reason: String::new(),
        series: None,
    };
    if gamma > om.value + opts.tol {
        res.verdict = Verdict::Quasianalytic;
        res.reason = format!("gamma > omega = {}", om.value);
    } else if gamma < om.value - opts.tol {
        res.verdict = Verdict::NotQuasianalytic;
        res.reason = format!("gamma < omega = {}", om.value);
    } else {
        let expo = (om.value + T::one()).recip();
        let lq = w.log_quots();
        let s = series_classify_log(|p| -expo * (idx::<T>(p + 1).ln() + lq[p]), lq.len())?;
        res.verdict = match s.verdict {
            SeriesOutcome::Diverges => Verdict::Quasianalytic,
            SeriesOutcome::Converges => Verdict::NotQuasianalytic,
            SeriesOutcome::Inconclusive => Verdict::Inconclusive,
        };
        res.reason = format!(
            "gamma = omega = {}; series of ((p+1) m_p)^(-1/(omega+1)) {:?} ({})",
            om.value,
            s.verdict,
            series_verdict(&s)
        )
        .to_lowercase();
        res.series = Some(s);
    }
    Ok(with_sector_note(res, opts))
}

/// Criterion for uniform asymptotics: quasianalytic iff `Σ (1/m_p)^{1/γ}` diverges.
pub fn classify_watson_uniform<T: Real>(
    w: &WeightSequence<T>,
    gamma: T,
    opts: &QuasiOptions<T>,
) -> Result<QuasiResult<T>> {
    check_gamma(gamma)?;
    let lq = w.log_quots();
    let s = series_classify_log(|p| -lq[p] / gamma, lq.len())?;
    let (omega_value, omega_source) = match omega_info(w) {
        Ok(o) => (o.value, o.source),
        Err(_) => (T::nan(), "unavailable"),
    };
    let verdict = match s.verdict {
        SeriesOutcome::Diverges => Verdict::Quasianalytic,
        SeriesOutcome::Converges => Verdict::NotQuasianalytic,
        SeriesOutcome::Inconclusive => Verdict::Inconclusive,
    };
    let reason = format!("series of (1/m_p)^(1/gamma) {:?} ({})", s.verdict, series_verdict(&s)).to_lowercase();
    Ok(with_sector_note(
        QuasiResult {
            class: ClassKind::Uniform,
            gamma,
            omega: omega_value,
            omega_source,
            verdict,
            reason,
            series: Some(s),
        },
        opts,
    ))
}

/// Criterion for sectorial regions: quasianalytic iff `γ > ω` strictly.
///
/// The criterion presumes the sequence admits a nonzero proximate order; this
/// is checked through the regular-variation ratio test unless
/// `assume_admissible` is set.
pub fn classify_watson_regions<T: Real>(
    w: &WeightSequence<T>,
    gamma: T,
    opts: &QuasiOptions<T>,
) -> Result<QuasiResult<T>> {
    check_gamma(gamma)?;
    let class = ClassKind::Regions;
    let om = match omega_info(w) {
        Ok(o) => o,
        Err(e) => return Ok(inconclusive(class, gamma, e)),
    };
    let mut res = QuasiResult {
        class,
        gamma,
        omega: om.value,
        omega_source: om.source,
        verdict: Verdict::Inconclusive,
        reason: String::new(),
        series: None,
    };
    if !opts.assume_admissible {
        let (ells, probes) = default_regvar_grid(w.horizon());
        let admissible = om.value.is_finite()
            && regvar_test(w, om.value, &ells, &probes, lit(crate::indices::DEFAULT_TOL))?.all_pass();
        if !admissible {
            res.reason = "regular-variation prerequisite not met; pass assume_admissible to override".into();
            return Ok(res);
        }
    }
    if gamma > om.value + opts.tol {
        res.verdict = Verdict::Quasianalytic;
        res.reason = format!("gamma > omega = {}", om.value);
    } else {
        res.verdict = Verdict::NotQuasianalytic;
        res.reason = format!("gamma <= omega = {} (equality admits nontrivial flat functions)", om.value);
    }
    Ok(res)
}

/// Dispatches on the class kind.
pub fn classify<T: Real>(
    w: &WeightSequence<T>,
    class: ClassKind,
    gamma: T,
    opts: &QuasiOptions<T>,
) -> Result<QuasiResult<T>> {
    match class {
        ClassKind::Salinas => classify_salinas(w, gamma, opts),
        ClassKind::Uniform => classify_watson_uniform(w, gamma, opts),
        ClassKind::Regions => classify_watson_regions(w, gamma, opts),
    }
}
