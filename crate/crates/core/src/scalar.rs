//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the toolkit is generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Sum
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an index into `T`.
#[inline]
pub fn idx<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("index representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `n` points geometrically spaced from `start` to `end` inclusive.
pub fn geomspace<T: Real>(start: T, end: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && start > T::zero() && end > T::zero());
    let (ls, le) = (start.ln(), end.ln());
    let step = (le - ls) / idx::<T>(n - 1);
    (0..n)
        .map(|i| {
            if i == 0 {
                start
            } else if i == n - 1 {
                end
            } else {
                (ls + step * idx(i)).exp()
            }
        })
        .collect()
}

/// `n` points evenly spaced from `start` to `end` inclusive.
pub fn linspace<T: Real>(start: T, end: T, n: usize) -> Vec<T> {
    assert!(n >= 2);
    let step = (end - start) / idx::<T>(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { end } else { start + step * idx(i) })
        .collect()
}

/// Ordinary least squares for `y ≈ c + X β` (implicit intercept); returns β.
///
/// Columns are centred and scaled before solving the normal equations, which
/// keeps the near-collinear log-scale bases used by the series classifier
/// well conditioned.
pub fn least_squares<T: Real>(columns: &[Vec<T>], y: &[T]) -> Option<Vec<T>> {
    let k = columns.len();
    let n = y.len();
    if n <= k || columns.iter().any(|c| c.len() != n) {
        return None;
    }
    let nf = idx::<T>(n);
    let ymean = y.iter().copied().sum::<T>() / nf;
    let mut means = Vec::with_capacity(k);
    let mut scales = Vec::with_capacity(k);
    for c in columns {
        let m = c.iter().copied().sum::<T>() / nf;
        let s = (c.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / nf).sqrt();
        if s == T::zero() {
            return None;
        }
        means.push(m);
        scales.push(s);
    }
    let z = |j: usize, i: usize| (columns[j][i] - means[j]) / scales[j];
    let mut a = vec![vec![T::zero(); k + 1]; k];
    for r in 0..k {
        for c in 0..k {
            a[r][c] = (0..n).map(|i| z(r, i) * z(c, i)).sum();
        }
        a[r][k] = (0..n).map(|i| z(r, i) * (y[i] - ymean)).sum();
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].abs() < T::epsilon() {
            return None;
        }
        a.swap(col, piv);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    let v = a[col][c];
                    a[row][c] = a[row][c] - f * v;
                }
            }
        }
    }
    Some((0..k).map(|j| a[j][k] / a[j][j] / scales[j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::<f64>::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-15)).abs() < 1e-18);
    }

    #[test]
    fn log_add_exp_handles_infinities() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 2.0), 2.0);
        assert!((log_add_exp(0.0f64, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add_exp(1000.0f64, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_exact_model() {
        let x: Vec<f64> = (1..50).map(|i| i as f64).collect();
        let x2: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = x.iter().zip(&x2).map(|(a, b)| 3.0 + 2.0 * a - 0.5 * b).collect();
        let beta = least_squares(&[x, x2], &y).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-9);
        assert!((beta[1] + 0.5).abs() < 1e-9);
    }

    #[test]
    fn spacing_helpers_hit_endpoints() {
        let g = geomspace(1e-3f64, 1e6, 10);
        assert_eq!(g[0].to_bits(), 1e-3f64.to_bits());
        assert_eq!(g[9], 1e6);
        let l = linspace(-1.0f32, 1.0, 5);
        assert_eq!(l, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
