//! The associated function `M(t) = sup_p log(t^p / M_p)`, the order function
//! `d_M(t) = log M(t) / log t`, proximate orders and the flat bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, parameter, Error, Result};
use crate::report::{fmt_num, Csv};
use crate::scalar::{idx, lit, Real};
use crate::sequences::WeightSequence;

/// Piecewise-linear (in `log t`) representation of `M(t)` for an (lc) sequence.
///
/// On `[m_{p−1}, m_p)` the supremum is attained at index `p`, so evaluation is
/// a binary search over the log-quotients followed by one affine expression.
#[derive(Clone, Debug)]
pub struct AssociatedFunction<T> {
    log_quots: Vec<T>,
    log_terms: Vec<T>,
}

impl<T: Real> AssociatedFunction<T> {
    /// Requires a log-convex sequence; regularize with
    /// [`WeightSequence::log_convex_minorant`] first otherwise.
    pub fn new(w: &WeightSequence<T>) -> Result<Self> {
        if let Some(p) = w.first_lc_violation() {
            return domain(format!(
                "sequence is not log-convex (m_{p} > m_{}); use its log-convex minorant",
                p + 1
            ));
        }
        Ok(Self { log_quots: w.log_quots().to_vec(), log_terms: w.log_terms().to_vec() })
    }

    pub fn horizon(&self) -> usize {
        self.log_terms.len() - 1
    }

    /// `log m_{P−1}`: the largest `log t` the horizon can represent.
    pub fn max_log_t(&self) -> T {
        *self.log_quots.last().expect("horizon >= 2")
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.log_quots
    }

    /// `M(t)` from `log t`; `log t = −∞` stands for `t = 0`.
    pub fn m_of_log_t(&self, log_t: T) -> Result<T> {
        if log_t.is_nan() {
            return domain("log t is NaN");
        }
        if log_t > self.max_log_t() {
            return Err(Error::Range(format!(
                "log t = {log_t} exceeds log m_(P-1) = {}; raise the horizon",
                self.max_log_t()
            )));
        }
        // p = #{k : m_k ≤ t}, i.e. t ∈ [m_{p−1}, m_p)
        let p = self.log_quots.partition_point(|&lq| lq <= log_t);
        if p == 0 {
            return Ok(T::zero());
        }
        Ok(idx::<T>(p) * log_t - self.log_terms[p])
    }

    pub fn m_of_t(&self, t: T) -> Result<T> {
        if t < T::zero() {
            return domain(format!("t must be nonnegative, got {t}"));
        }
        self.m_of_log_t(t.ln())
    }

    /// Value of segment `p` (the affine piece `p log t − log M_p`) at `log t`.
    pub fn segment(&self, p: usize, log_t: T) -> T {
        idx::<T>(p) * log_t - self.log_terms[p]
    }

    /// `d_M(t) = log M(t) / log t`.
    pub fn d_m(&self, t: T) -> Result<T> {
        if !(t > T::one()) {
            return domain(format!("d_M needs t > 1, got {t}"));
        }
        let m = self.m_of_t(t)?;
        if !(m > T::one()) {
            return domain(format!("d_M needs M(t) > 1, got M({t}) = {m}"));
        }
        Ok(m.ln() / t.ln())
    }

    /// `log c1 − M(1/(c2 r))`: log of the flat bound `c1 e^{−M(1/(c2 r))}`.
    pub fn flat_bound(&self, c1: T, c2: T, r: T) -> Result<T> {
        if !(c1 > T::zero()) || !(c2 > T::zero()) || !(r > T::zero()) {
            return parameter(format!("flat bound needs c1, c2, r > 0, got ({c1}, {c2}, {r})"));
        }
        Ok(c1.ln() - self.m_of_log_t(-(c2.ln() + r.ln()))?)
    }
}

/// `max_{p ≤ P} (p log t − log M_p)` by direct scan; independent of the
/// piecewise representation.
pub fn m_of_t_bruteforce<T: Real>(w: &WeightSequence<T>, t: T, upto: usize) -> Result<T> {
    if upto > w.horizon() {
        return domain(format!("scan bound {upto} exceeds horizon {}", w.horizon()));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let lt = t.ln();
    Ok((0..=upto)
        .map(|p| idx::<T>(p) * lt - w.log_term(p))
        .fold(T::neg_infinity(), T::max))
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProximateOrderSpec<T> {
    /// `ρ(r) = ρ + b log log r / log r`, defined for `r > e`.
    ClosedForm { rho: T, b: T },
    /// Samples `(r, ρ(r))` with `r` increasing; linear interpolation in `log r`.
    Sampled { samples: Vec<(T, T)>, rho_limit: T },
}

impl<T: Real> ProximateOrderSpec<T> {
    pub fn constant(rho: T) -> Self {
        Self::ClosedForm { rho, b: T::zero() }
    }

    pub fn rho_limit(&self) -> T {
        match self {
            Self::ClosedForm { rho, .. } => *rho,
            Self::Sampled { rho_limit, .. } => *rho_limit,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho_limit() >= T::zero()) {
            return parameter(format!("rho limit must be nonnegative, got {}", self.rho_limit()));
        }
        if let Self::Sampled { samples, .. } = self {
            if samples.len() < 2 || samples.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(samples[0].0 > T::zero()) {
                return parameter("samples need at least two strictly increasing positive radii");
            }
        }
        Ok(())
    }

    /// `ρ(r)`.
    pub fn eval(&self, r: T) -> Result<T> {
        match self {
            Self::ClosedForm { rho, b } => {
                if *b == T::zero() {
                    return Ok(*rho);
                }
                if !(r > T::E()) {
                    return domain(format!("closed-form proximate order needs r > e, got {r}"));
                }
                let l = r.ln();
                Ok(*rho + *b * l.ln() / l)
            }
            Self::Sampled { samples, .. } => {
                let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
                if r < first || r > last {
                    return domain(format!("r = {r} outside sampled range [{first}, {last}]"));
                }
                let i = samples.partition_point(|s| s.0 <= r).clamp(1, samples.len() - 1);
                let ((r0, v0), (r1, v1)) = (samples[i - 1], samples[i]);
                let s = (r.ln() - r0.ln()) / (r1.ln() - r0.ln());
                Ok(v0 + s * (v1 - v0))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProximateOrderReport<T> {
    /// (A): largest jump between adjacent samples; `None` for closed forms.
    pub max_jump: Option<T>,
    pub jump_index: Option<usize>,
    pub continuity: bool,
    /// (B): `min ρ(r)` on the grid.
    pub min_rho: T,
    pub nonnegative: bool,
    /// (C): `|ρ(r) − ρ|` at the last grid point, and whether it shrinks along the tail.
    pub limit_gap: T,
    pub converges: bool,
    /// (D): `max |r ρ'(r) log r|` over the tail half of the grid.
    pub d_tail_max: T,
    pub d_condition: bool,
    pub tol: T,
}

impl<T: Real> ProximateOrderReport<T> {
    pub fn passes(&self) -> bool {
        self.continuity && self.nonnegative && self.converges && self.d_condition
    }
}

/// Checks conditions (A)–(D) for a candidate proximate order on an increasing grid.
pub fn proximate_order_check<T: Real>(
    spec: &ProximateOrderSpec<T>,
    r_grid: &[T],
    tol: T,
) -> Result<ProximateOrderReport<T>> {
    spec.validate()?;
    let n = r_grid.len();
    if n < 16 {
        return domain(format!("grid needs at least 16 points for finite differences, got {n}"));
    }
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("grid must be strictly increasing");
    }
    let values: Vec<T> = r_grid.iter().map(|&r| spec.eval(r)).collect::<Result<_>>()?;
    let rho = spec.rho_limit();

    // (D) via central differences in u = log r: r ρ'(r) = dρ/du.
    let d_quantity = |i: usize| -> Result<T> {
        let u = r_grid[i].ln();
        let slope = match spec {
            ProximateOrderSpec::ClosedForm { .. } => {
                let h = lit::<T>(1e-4) * u.abs().max(T::one());
                let lo = (u - h).exp().max(r_grid[0]);
                let hi = (u + h).exp();
                (spec.eval(hi)? - spec.eval(lo)?) / (hi.ln() - lo.ln())
            }
            ProximateOrderSpec::Sampled { .. } => {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (values[b] - values[a]) / (r_grid[b].ln() - r_grid[a].ln())
            }
        };
        Ok(slope * u)
    };
    let tail = n / 2;
    let d_tail_max = (tail..n)
        .map(|i| d_quantity(i).map(|v| v.abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(T::zero(), T::max);

    let (max_jump, jump_index) = match spec {
        ProximateOrderSpec::ClosedForm { .. } => (None, None),
        ProximateOrderSpec::Sampled { samples, .. } => {
            let (i, j) = samples
                .windows(2)
                .map(|w| (w[1].1 - w[0].1).abs())
                .enumerate()
                .fold((0, T::zero()), |best, (i, j)| if j > best.1 { (i, j) } else { best });
            (Some(j), if j > tol { Some(i) } else { None })
        }
    };

    let min_rho = values.iter().copied().fold(T::infinity(), T::min);
    let gaps: Vec<T> = values.iter().map(|&v| (v - rho).abs()).collect();
    let limit_gap = gaps[n - 1];
    let converges = limit_gap < tol && limit_gap <= gaps[tail] + lit(1e-15);

    Ok(ProximateOrderReport {
        max_jump,
        jump_index,
        continuity: jump_index.is_none(),
        min_rho,
        nonnegative: min_rho >= T::zero(),
        limit_gap,
        converges,
        d_tail_max,
        d_condition: d_tail_max < tol,
        tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Admissibility<T> {
    /// Min of `g(t) = log t (ρ(t) − d_M(t))` over the tail half.
    pub a_est: T,
    /// Max of `g` over the tail half.
    pub b_est: T,
    pub bounded: bool,
    pub samples: Vec<(T, T)>,
}

impl<T: Real> Admissibility<T> {
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["t", "g"]);
        for &(t, g) in &self.samples {
            csv.row(&[fmt_num(t), fmt_num(g)]);
        }
        csv.finish()
    }
}

pub const ADMISSIBILITY_TOL: f64 = 0.1;

/// Evaluates `g(t) = log t (ρ(t) − d_M(t))` on the grid and reports its tail band.
///
/// `bounded` means `g` moved by at most `tol` between the middle and the end of
/// the grid, i.e. no drift of the kind `g ~ c log t` is visible.
pub fn admissibility_check<T: Real>(
    a: &AssociatedFunction<T>,
    rho: &ProximateOrderSpec<T>,
    t_grid: &[T],
    tol: T,
) -> Result<Admissibility<T>> {
    if t_grid.len() < 4 {
        return domain("admissibility grid needs at least 4 points");
    }
    if t_grid.iter().any(|&t| !(t > T::E())) {
        return domain("admissibility grid must lie in t > e");
    }
    let samples: Vec<(T, T)> = t_grid
        .par_iter()
        .map(|&t| Ok((t, t.ln() * (rho.eval(t)? - a.d_m(t)?))))
        .collect::<Result<_>>()?;
    let n = samples.len();
    let tail = &samples[n / 2..];
    let a_est = tail.iter().map(|s| s.1).fold(T::infinity(), T::min);
    let b_est = tail.iter().map(|s| s.1).fold(T::neg_infinity(), T::max);
    let drift = (samples[n - 1].1 - samples[n / 2].1).abs();
    Ok(Admissibility { a_est, b_est, bounded: drift <= tol, samples })
}
