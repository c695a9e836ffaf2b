//! Test functions evaluated in log-modulus / unwrapped-argument form.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::maergoiz::{MaergoizFunction, SectorPoint};
use crate::scalar::{lit, Real};

/// `f(z) = exp(log_abs + i arg)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogComplex<T> {
    pub log_abs: T,
    pub arg: T,
}

impl<T: Real> LogComplex<T> {
    pub fn from_complex(c: Complex<T>) -> Self {
        Self { log_abs: c.norm().ln(), arg: c.arg() }
    }

    /// Linear value; underflows to zero for very flat functions.
    pub fn to_complex(self) -> Complex<T> {
        Complex::from_polar(self.log_abs.exp(), self.arg)
    }

    pub fn mul_exp(self, u: Complex<T>) -> Self {
        Self { log_abs: self.log_abs + u.re, arg: self.arg + u.im }
    }
}

pub type Evaluator<T> = Arc<dyn Fn(SectorPoint<T>) -> Result<LogComplex<T>> + Send + Sync>;

#[derive(Clone)]
pub enum TestFunction<T> {
    /// `e^{−V(1/z)}`.
    ExpFlat(MaergoizFunction<T>),
    /// `sin(e^{V(1/z)}) e^{−V(1/z)}`.
    Wasow(MaergoizFunction<T>),
    /// `f(z) e^{V(a/z)}`.
    Corrected { inner: Box<TestFunction<T>>, kernel: MaergoizFunction<T>, a: SectorPoint<T> },
    /// `z`.
    Identity,
    /// `e^{1/z}`.
    ExpInverse,
    Constant(T),
    /// `1/(1 − z)`.
    Geometric,
    Custom { name: String, eval: Evaluator<T> },
}

impl<T: Real> fmt::Debug for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Above this modulus the phase of `e^{V}` is not resolvable in floating point.
const PHASE_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

/// `log |sin w|` and `arg sin w` for `w = e^u`, robust to overflow.
fn log_sin_exp<T: Real>(u: Complex<T>) -> LogComplex<T> {
    let modulus = u.re.exp();
    let a = modulus * u.im.cos();
    // keep the real axis exact when e^{Re u} overflows
    let b = if u.im == T::zero() { T::zero() } else { modulus * u.im.sin() };
    let big = lit::<T>(20.0);
    if b > big {
        // sin w ≈ (i/2) e^{b} e^{−ia}
        return LogComplex { log_abs: b - T::LN_2(), arg: T::FRAC_PI_2() - a };
    }
    if b < -big {
        return LogComplex { log_abs: -b - T::LN_2(), arg: a - T::FRAC_PI_2() };
    }
    if !(a.abs() < lit(PHASE_LIMIT)) {
        // Only |sin w| ≤ cosh b is known.
        return LogComplex { log_abs: b.cosh().ln(), arg: T::zero() };
    }
    LogComplex::from_complex(Complex::new(a, b).sin())
}

impl<T: Real> TestFunction<T> {
    pub fn name(&self) -> String {
        match self {
            Self::ExpFlat(v) => format!("exp_flat({})", v.name()),
            Self::Wasow(v) => format!("wasow({})", v.name()),
            Self::Corrected { inner, kernel, a } => {
                format!("corrected({}, {}, |a|={}, arg a={})", inner.name(), kernel.name(), a.modulus, a.arg)
            }
            Self::Identity => "identity".into(),
            Self::ExpInverse => "exp_inverse".into(),
            Self::Constant(c) => format!("constant({c})"),
            Self::Geometric => "geometric".into(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, z: SectorPoint<T>) -> Result<LogComplex<T>> {
        if !(z.modulus > T::zero()) || !z.modulus.is_finite() {
            return domain(format!("modulus must be positive and finite, got {}", z.modulus));
        }
        match self {
            Self::ExpFlat(v) => {
                let u = v.eval(z.recip())?;
                Ok(LogComplex { log_abs: -u.re, arg: -u.im })
            }
            Self::Wasow(v) => {
                let u = v.eval(z.recip())?;
                let s = log_sin_exp(u);
                Ok(LogComplex { log_abs: s.log_abs - u.re, arg: s.arg - u.im })
            }
            Self::Corrected { inner, kernel, a } => {
                let f = inner.eval(z)?;
                Ok(f.mul_exp(kernel.eval(a.mul(z.recip()))?))
            }
            Self::Identity => Ok(LogComplex { log_abs: z.modulus.ln(), arg: z.arg }),
            Self::ExpInverse => Ok(LogComplex { log_abs: z.arg.cos() / z.modulus, arg: -z.arg.sin() / z.modulus }),
            Self::Constant(c) => Ok(LogComplex::from_complex(Complex::from(*c))),
            Self::Geometric => {
                let w = Complex::from(T::one()) - z.to_complex();
                if w == Complex::from(T::zero()) {
                    return domain("1/(1 - z) has a pole at z = 1");
                }
                let l = LogComplex::from_complex(w);
                Ok(LogComplex { log_abs: -l.log_abs, arg: -l.arg })
            }
            Self::Custom { eval, .. } => eval(z),
        }
    }

    pub fn log_abs(&self, z: SectorPoint<T>) -> Result<T> {
        self.eval(z).map(|v| v.log_abs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    fn v1() -> MaergoizFunction<f64> {
        MaergoizFunction::power(1.0, 1.0).unwrap()
    }

    #[test]
    fn exp_flat_on_rays() {
        let f = TestFunction::ExpFlat(v1());
        assert_abs_diff_eq!(f.log_abs(SectorPoint::real(0.1)).unwrap(), -10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.log_abs(SectorPoint::new(0.1, FRAC_PI_3)).unwrap(), -5.0, epsilon = 1e-12);
        // far in the underflow regime the log modulus is still exact
        assert_abs_diff_eq!(f.log_abs(SectorPoint::real(1e-5)).unwrap(), -1e5, epsilon = 1e-9);
    }

    #[test]
    fn wasow_is_below_flat_envelope_on_axis() {
        let f = TestFunction::Wasow(v1());
        for i in 0..200 {
            let r = 0.9f64.powi(i);
            assert!(f.log_abs(SectorPoint::real(r)).unwrap() <= -1.0 / r + 1e-12);
        }
    }

    #[test]
    fn wasow_matches_direct_complex_evaluation() {
        let f = TestFunction::Wasow(v1());
        let z = SectorPoint::new(0.7, 0.4);
        let zc = z.to_complex();
        let u = zc.inv();
        let direct = u.exp().sin() * (-u).exp();
        let got = f.eval(z).unwrap().to_complex();
        assert!((got - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn wasow_blows_up_off_axis() {
        let f = TestFunction::Wasow(v1());
        assert!(f.log_abs(SectorPoint::new(0.05, 0.3)).unwrap() > 1e3);
    }

    #[test]
    fn corrected_adds_kernel() {
        let kernel = MaergoizFunction::power(1.0, 2.0).unwrap();
        let a = SectorPoint::new(0.1, 0.5);
        let f = TestFunction::Corrected { inner: Box::new(TestFunction::ExpFlat(v1())), kernel, a };
        let z = SectorPoint::new(0.2, -0.3);
        let expect = -(0.3f64).cos() / 0.2 + 0.1 * (0.5f64 + 0.3).cos() / 0.2;
        assert_abs_diff_eq!(f.log_abs(z).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn elementary_functions() {
        let z = SectorPoint::new(0.5, 0.2);
        assert_abs_diff_eq!(TestFunction::<f64>::Identity.log_abs(z).unwrap(), 0.5f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(TestFunction::ExpInverse.log_abs(z).unwrap(), 0.2f64.cos() / 0.5, epsilon = 1e-15);
        let g = TestFunction::Geometric.eval(SectorPoint::new(0.5, std::f64::consts::PI)).unwrap();
        assert_abs_diff_eq!(g.log_abs, -(1.5f64).ln(), epsilon = 1e-15);
        assert!(TestFunction::<f64>::Geometric.eval(SectorPoint::real(1.0)).is_err());
        let c = TestFunction::Custom { name: "two".into(), eval: Arc::new(|_| Ok(LogComplex { log_abs: 2f64.ln(), arg: 0.0 })) };
        assert_eq!(c.name(), "two");
        assert_abs_diff_eq!(c.eval(z).unwrap().to_complex().re, 2.0, epsilon = 1e-15);
    }
}
