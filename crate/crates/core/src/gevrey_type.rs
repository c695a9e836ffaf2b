//! Propagation of the Gevrey type across a sector.
//!
//! A function with Gevrey asymptotics of order `1/k` on `S(d, γ)` whose type is
//! `R0` in direction `θ0` has type `R(θ)` elsewhere, with a plateau on
//! `[α', β']` and sine-shaped decay toward the sector edges. "Type" follows
//! the convention of the source theorem (there is no agreed terminology).

use serde::Serialize;

use crate::error::{domain, parameter, Result};
use crate::report::{fmt_num, Csv};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorSpec<T> {
    /// Bisecting direction (radians).
    pub d: T,
    /// Opening is `π γ`.
    pub gamma: T,
    /// Radius; `None` for an unbounded sector.
    pub radius: Option<T>,
}

impl<T: Real> SectorSpec<T> {
    pub fn new(d: T, gamma: T, radius: Option<T>) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return parameter(format!("sector opening gamma must be positive, got {gamma}"));
        }
        if let Some(r) = radius {
            if !(r > T::zero()) {
                return parameter(format!("sector radius must be positive, got {r}"));
            }
        }
        Ok(Self { d, gamma, radius })
    }

    pub fn half_opening(&self) -> T {
        T::PI() * self.gamma / lit(2.0)
    }

    /// `α = d − πγ/2`.
    pub fn alpha(&self) -> T {
        self.d - self.half_opening()
    }

    /// `β = d + πγ/2`.
    pub fn beta(&self) -> T {
        self.d + self.half_opening()
    }

    pub fn contains_direction(&self, theta: T) -> bool {
        theta > self.alpha() && theta < self.beta()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Left,
    Plateau,
    Right,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Left => "left",
            Branch::Plateau => "plateau",
            Branch::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfileSample<T> {
    pub theta: T,
    pub r: T,
    pub branch: Branch,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeProfile<T> {
    pub k: T,
    pub sector: SectorSpec<T>,
    pub theta0: T,
    pub r0: T,
    pub alpha: T,
    pub beta: T,
    pub alpha_p: T,
    pub beta_p: T,
    pub samples: Vec<ProfileSample<T>>,
}

impl<T: Real> TypeProfile<T> {
    /// Builds the profile without samples; use [`TypeProfile::eval`] or [`type_profile`].
    pub fn new(k: T, sector: SectorSpec<T>, theta0: T, r0: T) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return parameter(format!("k must be positive, got {k}"));
        }
        if !(r0 > T::zero()) {
            return parameter(format!("R0 must be positive, got {r0}"));
        }
        if !sector.contains_direction(theta0) {
            return domain(format!(
                "theta0 = {theta0} must lie strictly inside ({}, {})",
                sector.alpha(),
                sector.beta()
            ));
        }
        let (alpha, beta) = (sector.alpha(), sector.beta());
        let quarter = T::FRAC_PI_2() / k;
        Ok(Self {
            k,
            sector,
            theta0,
            r0,
            alpha,
            beta,
            alpha_p: theta0.min(alpha + quarter),
            beta_p: theta0.max(beta - quarter),
            samples: Vec::new(),
        })
    }

    /// `R(θ)` and its branch for `θ` strictly inside the sector.
    pub fn eval(&self, theta: T) -> Result<ProfileSample<T>> {
        if !(theta > self.alpha && theta < self.beta) {
            return domain(format!("theta = {theta} must lie strictly inside ({}, {})", self.alpha, self.beta));
        }
        let k = self.k;
        let (r, branch) = if theta < self.alpha_p {
            let ratio = (k * (theta - self.alpha)).sin() / (k * (self.alpha_p - self.alpha)).sin();
            (self.r0 * ratio.powf(k.recip()), Branch::Left)
        } else if theta > self.beta_p {
            let ratio = (k * (self.beta - theta)).sin() / (k * (self.beta - self.beta_p)).sin();
            (self.r0 * ratio.powf(k.recip()), Branch::Right)
        } else {
            (self.r0, Branch::Plateau)
        };
        Ok(ProfileSample { theta, r, branch })
    }

    /// Left sine branch evaluated at any `θ ∈ (α, α']`, including the junction.
    pub fn left_branch(&self, theta: T) -> T {
        let k = self.k;
        self.r0 * ((k * (theta - self.alpha)).sin() / (k * (self.alpha_p - self.alpha)).sin()).powf(k.recip())
    }

    /// Right sine branch evaluated at any `θ ∈ [β', β)`, including the junction.
    pub fn right_branch(&self, theta: T) -> T {
        let k = self.k;
        self.r0 * ((k * (self.beta - theta)).sin() / (k * (self.beta - self.beta_p)).sin()).powf(k.recip())
    }

    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["theta", "R", "branch"]);
        for s in &self.samples {
            csv.row(&[fmt_num(s.theta), fmt_num(s.r), s.branch.as_str().to_string()]);
        }
        csv.finish()
    }
}

/// Evaluates the profile on a grid of directions.
pub fn type_profile<T: Real>(k: T, sector: SectorSpec<T>, theta0: T, r0: T, theta_grid: &[T]) -> Result<TypeProfile<T>> {
    let mut p = TypeProfile::new(k, sector, theta0, r0)?;
    p.samples = theta_grid.iter().map(|&t| p.eval(t)).collect::<Result<_>>()?;
    Ok(p)
}

/// `n` directions evenly spaced strictly inside the sector (endpoints excluded).
pub fn interior_grid<T: Real>(sector: &SectorSpec<T>, n: usize) -> Vec<T> {
    let (a, b) = (sector.alpha(), sector.beta());
    let step = (b - a) / T::from_usize(n + 1).expect("grid size");
    (1..=n).map(|i| a + step * T::from_usize(i).expect("grid index")).collect()
}
