//! One-dimensional adaptive Gauss–Kronrod quadrature (7/15 points) for
//! vector-valued complex integrands, and Neville extrapolation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use thiserror::Error;

use crate::{cabs, lit, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: error estimate {err:e} after {intervals} intervals")]
    NotConverged { err: f64, intervals: usize },
    #[error("extrapolation needs at least one sample")]
    NoSamples,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

struct Piece<T: Real> {
    a: T,
    b: T,
    value: Vec<Complex<T>>,
    err: f64,
}

impl<T: Real> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real> Eq for Piece<T> {}
impl<T: Real> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<T: Real, F: Fn(T) -> Vec<Complex<T>>>(f: &F, a: T, b: T) -> Piece<T> {
    let half: T = (b - a) / lit(2.0);
    let mid: T = (a + b) / lit(2.0);
    let mut kron: Vec<Complex<T>> = Vec::new();
    let mut gauss: Vec<Complex<T>> = Vec::new();
    let mut acc = |x: T, wk: f64, wg: Option<f64>| {
        let v = f(x);
        if kron.is_empty() {
            kron = vec![Complex::new(T::zero(), T::zero()); v.len()];
            gauss = kron.clone();
        }
        for (i, y) in v.iter().enumerate() {
            kron[i] += *y * lit::<T>(wk);
            if let Some(w) = wg {
                gauss[i] += *y * lit::<T>(w);
            }
        }
    };
    acc(mid, WGK[7], Some(WG[3]));
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let wg = if j % 2 == 1 { Some(WG[j / 2]) } else { None };
        acc(mid - dx, WGK[j], wg);
        acc(mid + dx, WGK[j], wg);
    }
    let scale = Complex::new(half, T::zero());
    let value: Vec<Complex<T>> = kron.iter().map(|k| *k * scale).collect();
    let err = kron
        .iter()
        .zip(&gauss)
        .map(|(k, g)| to_f64(cabs(*k - *g) * half.abs()))
        .fold(0.0, f64::max);
    Piece { a, b, value, err }
}

fn max_norm<T: Real>(v: &[Complex<T>]) -> f64 {
    v.iter().map(|z| to_f64(cabs(*z))).fold(0.0, f64::max)
}

/// Adaptive integral of a vector-valued complex function over `[a, b]`.
/// Returns the values and the global error estimate (max over components).
pub fn integrate_vec<T: Real, F: Fn(T) -> Vec<Complex<T>>>(
    f: F,
    a: T,
    b: T,
    opts: QuadOptions,
) -> Result<(Vec<Complex<T>>, f64), QuadError> {
    let first = gk15(&f, a, b);
    let mut total = first.value.clone();
    let mut total_err = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * max_norm(&total));
        if total_err <= target {
            return Ok((total, total_err));
        }
        if heap.len() >= opts.max_intervals {
            return Err(QuadError::NotConverged {
                err: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = (worst.a + worst.b) / lit(2.0);
        let left = gk15(&f, worst.a, m);
        let right = gk15(&f, m, worst.b);
        for i in 0..total.len() {
            total[i] += left.value[i] + right.value[i] - worst.value[i];
        }
        // recompute the error sum to avoid drift from subtraction
        heap.push(left);
        heap.push(right);
        total_err = heap.iter().map(|p| p.err).sum();
    }
}

/// Adaptive integral of a complex scalar function.
pub fn integrate_complex<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    a: T,
    b: T,
    opts: QuadOptions,
) -> Result<(Complex<T>, f64), QuadError> {
    let (v, e) = integrate_vec(|x| vec![f(x)], a, b, opts)?;
    Ok((v[0], e))
}

/// Adaptive integral of a real function.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, opts: QuadOptions) -> Result<(T, f64), QuadError> {
    let (v, e) = integrate_vec(|x| vec![Complex::new(f(x), T::zero())], a, b, opts)?;
    Ok((v[0].re, e))
}

/// Value at `x0` of the interpolating polynomial through `(xs[i], ys[i])`.
pub fn neville<T: Real>(xs: &[T], ys: &[Complex<T>], x0: T) -> Result<Complex<T>, QuadError> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(QuadError::NoSamples);
    }
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            let w = Complex::new(xs[i + m] - xs[i], T::zero());
            p[i] = (p[i] * Complex::new(x0 - xs[i + m], T::zero())
                + p[i + 1] * Complex::new(xs[i] - x0, T::zero()))
                / -w;
        }
    }
    Ok(p[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let (v, _) = integrate(|x: f64| x.powi(5) - 3.0 * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 4.5)).abs() < 1e-13);
    }

    #[test]
    fn integrates_peaked_function() {
        let (v, _) = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, QuadOptions::default()).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - want).abs() / want < 1e-9);
    }

    #[test]
    fn neville_recovers_quadratic_limit() {
        let xs = [0.4, 0.2, 0.1];
        let ys: Vec<Complex<f64>> = xs.iter().map(|&x| Complex::new(1.0 + x + x * x, -x)).collect();
        let v = neville(&xs, &ys, 0.0).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gives_up_on_divergent_integrand() {
        let opts = QuadOptions {
            max_intervals: 50,
            ..QuadOptions::default()
        };
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, opts);
        assert!(r.is_err(), "{r:?}");
    }
}
