//! Argument groups shared by several subcommands, and their resolution into
//! library values.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use mflat::indices::default_window;
use mflat::{MaergoizFunctionF64, SectorSpecF64, TestFunctionF64, WeightSequenceF64};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Gevrey,
    AlphaBeta,
    ZeroBeta,
    QSquare,
    Custom,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SequenceArgs {
    /// Weight sequence family
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Number of quotients to compute
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Text file of log M_p values, one per line, first line 0 (family custom)
    #[arg(long)]
    pub custom_file: Option<PathBuf>,
}

fn need(v: Option<f64>, flag: &str, family: &str) -> Result<f64> {
    v.ok_or_else(|| UsageError(format!("--{flag} is required for family {family}")).into())
}

impl SequenceArgs {
    pub fn given(&self) -> bool {
        self.family.is_some()
    }

    pub fn build(&self, default_family: Option<FamilyKind>, default_horizon: usize) -> Result<WeightSequenceF64> {
        let (family, defaulted) = match (self.family, default_family) {
            (Some(f), _) => (f, false),
            (None, Some(f)) => (f, true),
            (None, None) => return Err(UsageError("--family is required".into()).into()),
        };
        let horizon = self.horizon.unwrap_or(default_horizon);
        let w = match family {
            FamilyKind::Gevrey => {
                let alpha = match self.alpha {
                    Some(a) => a,
                    None if defaulted => 1.0,
                    None => need(None, "alpha", "gevrey")?,
                };
                WeightSequenceF64::gevrey(alpha, horizon)?
            }
            FamilyKind::AlphaBeta => WeightSequenceF64::alpha_beta(
                need(self.alpha, "alpha", "alpha-beta")?,
                need(self.beta, "beta", "alpha-beta")?,
                horizon,
            )?,
            FamilyKind::ZeroBeta => WeightSequenceF64::zero_beta(need(self.beta, "beta", "zero-beta")?, horizon)?,
            FamilyKind::QSquare => WeightSequenceF64::q_square(need(self.q, "q", "q-square")?, horizon)?,
            FamilyKind::Custom => {
                let path = self
                    .custom_file
                    .as_ref()
                    .ok_or_else(|| UsageError("--custom-file is required for family custom".into()))?;
                let w = WeightSequenceF64::read_custom(path)?;
                match self.horizon {
                    Some(h) => w.truncated(h)?,
                    None => w,
                }
            }
        };
        Ok(w)
    }
}

/// `ω` from the closed form when known, else the tail estimate.
pub fn omega_of(w: &WeightSequenceF64) -> Result<f64> {
    if let Some(om) = w.family().closed_form_omega() {
        if om.is_finite() {
            return Ok(om);
        }
    }
    Ok(mflat::indices::omega(w, default_window(w.horizon()))?.estimate)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Power,
    PowerLog,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct KernelArgs {
    /// Sectorial kernel V: z^rho or z^rho log(e + z)^b
    #[arg(long, value_enum)]
    pub v: Option<KernelKind>,
    /// Order rho of V (defaults to 1/omega when a sequence is given, else 1)
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Log exponent b of power-log
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Opening parameter of the sector V is defined on
    #[arg(long, allow_negative_numbers = true)]
    pub v_gamma: Option<f64>,
}

impl KernelArgs {
    pub fn build(&self, default_rho: f64) -> Result<MaergoizFunctionF64> {
        let rho = self.rho.unwrap_or(default_rho);
        let gamma = self.v_gamma.unwrap_or(2.0);
        Ok(match self.v.unwrap_or(KernelKind::Power) {
            KernelKind::Power => MaergoizFunctionF64::power(rho, gamma)?,
            KernelKind::PowerLog => MaergoizFunctionF64::power_log(rho, self.b.unwrap_or(1.0), gamma)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    ExpFlat,
    Wasow,
    Identity,
    ExpInverse,
    Constant,
    Geometric,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FunctionArgs {
    /// Test function: exp-flat is e^{-V(1/z)}, wasow is sin(e^{V(1/z)}) e^{-V(1/z)}
    #[arg(long, value_enum)]
    pub function: Option<FunctionKind>,
    /// Value for --function constant
    #[arg(long, allow_negative_numbers = true)]
    pub constant: Option<f64>,
}

impl FunctionArgs {
    pub fn kind(&self) -> FunctionKind {
        self.function.unwrap_or(FunctionKind::ExpFlat)
    }

    pub fn build(&self, v: MaergoizFunctionF64) -> TestFunctionF64 {
        match self.kind() {
            FunctionKind::ExpFlat => TestFunctionF64::ExpFlat(v),
            FunctionKind::Wasow => TestFunctionF64::Wasow(v),
            FunctionKind::Identity => TestFunctionF64::Identity,
            FunctionKind::ExpInverse => TestFunctionF64::ExpInverse,
            FunctionKind::Constant => TestFunctionF64::Constant(self.constant.unwrap_or(1.0)),
            FunctionKind::Geometric => TestFunctionF64::Geometric,
        }
    }

    /// Taylor coefficients at 0 of the analytic members, zero for the flat ones.
    pub fn coefficients(&self, n: usize) -> Result<Vec<Complex<f64>>> {
        let mut c = vec![Complex::new(0.0, 0.0); n];
        match self.kind() {
            FunctionKind::ExpFlat | FunctionKind::Wasow => {}
            FunctionKind::Identity => {
                if n > 1 {
                    c[1] = Complex::new(1.0, 0.0);
                }
            }
            FunctionKind::Constant => {
                if n > 0 {
                    c[0] = Complex::new(self.constant.unwrap_or(1.0), 0.0);
                }
            }
            FunctionKind::Geometric => c.iter_mut().for_each(|x| *x = Complex::new(1.0, 0.0)),
            FunctionKind::ExpInverse => {
                return Err(UsageError("e^{1/z} has no asymptotic expansion at 0".into()).into())
            }
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SectorArgs {
    /// Bisecting direction d (radians)
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Opening parameter: the sector has opening pi*gamma
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Sector radius (unbounded when absent)
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<f64>,
}

impl SectorArgs {
    pub fn build(&self, default_gamma: Option<f64>, default_radius: Option<f64>) -> Result<SectorSpecF64> {
        let gamma = self
            .gamma
            .or(default_gamma)
            .ok_or_else(|| UsageError("--gamma is required".into()))?;
        Ok(SectorSpecF64::new(self.d.unwrap_or(0.0), gamma, self.radius.or(default_radius))?)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OutputArgs {
    /// Directory for report files; without it the JSON report goes to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots (requires --out)
    #[arg(long)]
    pub svg: bool,
}
