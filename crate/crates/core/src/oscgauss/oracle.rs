//! ε-regularized quadrature oracle for improper integrals.
//!
//! Everything here is numerical: a cyclic Jacobi eigensolver, adaptive
//! Gauss–Kronrod integrals of the regularized integrand, and Neville
//! extrapolation of ε → 0 followed by a ratio test on the samples.
//!
//! For integrands `P(x) e^{i⟨j,x⟩}` the regularized integral factorizes over
//! the eigen-directions of `S`, and so does its limit; each 1-D factor gets
//! its own ε-scale, proportional to `|λ|`, so the number of resolved
//! oscillations stays bounded. General callables are integrated with nested
//! quadrature in the original coordinates (dimension ≤ 2) and a common ε.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::{OscError, OscGaussMeasure, Poly2};
use crate::quad::{integrate_complex, integrate_vec, neville, QuadOptions};
use crate::{cabs, lit, polar, to_f64, Real};

#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Relative ε values (scaled by `|λ|` per direction for exp-linear
    /// integrands, used as is for callables).
    pub eps: Vec<f64>,
    pub quad: QuadOptions,
    /// Successive sample differences must shrink at least by this ratio.
    pub ratio: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            eps: vec![0.02, 0.01, 0.005, 0.0025],
            quad: QuadOptions {
                abs_tol: 1e-11,
                rel_tol: 1e-10,
                max_intervals: 200_000,
            },
            ratio: 0.75,
        }
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
/// Returns eigenvalues and eigenvectors as columns.
pub fn jacobi_eigen<T: Real>(a: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<T>::identity(n, n);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off <= lit::<T>(1e-30) * (T::one() + a.norm_squared()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)] == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (lit::<T>(2.0) * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn extrapolate<T: Real>(
    eps: &[T],
    samples: &[Complex<T>],
    ratio: f64,
    what: &str,
) -> Result<Complex<T>, OscError> {
    if samples.len() >= 3 {
        let k = samples.len();
        let d1 = to_f64(cabs(samples[k - 2] - samples[k - 3]));
        let d2 = to_f64(cabs(samples[k - 1] - samples[k - 2]));
        let scale = to_f64(cabs(samples[k - 1]));
        if d2 > ratio * d1 + 1e-9 * (1.0 + scale) {
            return Err(OscError::NotConverged(format!(
                "{what}: sample differences {d1:e} then {d2:e}"
            )));
        }
    }
    Ok(neville(eps, samples, T::zero())?)
}

/// Oracle value of `∫~ P(x) e^{i⟨j,x⟩} dμ(x)`.
pub fn exp_linear<T: Real>(
    mu: &OscGaussMeasure<T>,
    j: &DVector<T>,
    p: &Poly2<T>,
    opts: &OracleOptions,
) -> Result<Complex<T>, OscError> {
    let n = mu.dim();
    if j.len() != n || p.dim() != n {
        return Err(OscError::Dimension("j and P must live on the measure's space".into()));
    }
    let (lam, v) = jacobi_eigen(&mu.s);
    let snorm = mu.s.norm();
    let vc = v.map(|x| Complex::new(x, T::zero()));
    let gt = vc.transpose() * &p.g;
    let ht = vc.transpose() * &p.h * &vc;
    let hscale = lit::<T>(1e-12) * (T::one() + p.h.norm());
    let gscale = lit::<T>(1e-12) * (T::one() + p.g.norm());
    let mut moments: Vec<[Complex<T>; 3]> = Vec::with_capacity(n);
    for i in 0..n {
        let need2 = cabs(ht[(i, i)]) > hscale;
        let need1 = cabs(gt[i]) > gscale || (0..n).any(|k| k != i && cabs(ht[(i, k)]) > hscale);
        let deg = if need2 { 2 } else if need1 { 1 } else { 0 };
        let li = lam[i];
        let ji = v.column(i).dot(j);
        let mi = v.column(i).dot(&mu.mean);
        let kernel = li.abs() <= lit::<T>(1e-10) * snorm;
        let zstar = if kernel { T::zero() } else { mi + ji / li };
        let scale = if kernel {
            T::one()
        } else {
            li.abs() / (T::one() + li.abs() * zstar * zstar)
        };
        let mut eps_used = Vec::new();
        let mut samples: [Vec<Complex<T>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for &f in &opts.eps {
            let eps = lit::<T>(f) * scale;
            let r = zstar.abs() + (lit::<T>(40.0) / eps).sqrt();
            let half = lit::<T>(0.5);
            let integrand = |z: T| {
                let dz = z - mi;
                let phase = ji * z - half * li * dz * dz;
                let base = polar((-eps * z * z).exp(), phase);
                let mut out = Vec::with_capacity(deg + 1);
                let mut zp = T::one();
                for _ in 0..=deg {
                    out.push(base * zp);
                    zp *= z;
                }
                out
            };
            let (vals, _) = integrate_vec(integrand, -r, r, opts.quad)?;
            let norm = if kernel { (eps / T::pi()).sqrt() } else { T::one() };
            for (d, val) in vals.iter().enumerate() {
                samples[d].push(*val * norm);
            }
            eps_used.push(eps);
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut m = [zero; 3];
        for d in 0..=deg {
            m[d] = extrapolate(&eps_used, &samples[d], opts.ratio, &format!("direction {i}, moment {d}"))?;
        }
        moments.push(m);
    }
    let prod_except = |skip: &[usize]| {
        (0..n)
            .filter(|l| !skip.contains(l))
            .fold(Complex::new(T::one(), T::zero()), |acc, l| acc * moments[l][0])
    };
    let mut total = p.c * prod_except(&[]);
    for i in 0..n {
        if cabs(gt[i]) > gscale {
            total += gt[i] * moments[i][1] * prod_except(&[i]);
        }
        if cabs(ht[(i, i)]) > hscale {
            total += ht[(i, i)] * moments[i][2] * prod_except(&[i]);
        }
        for k in 0..n {
            if k != i && cabs(ht[(i, k)]) > hscale {
                total += ht[(i, k)] * moments[i][1] * moments[k][1] * prod_except(&[i, k]);
            }
        }
    }
    Ok(total / mu.z)
}

/// Oracle value of `∫~ f dμ` for a bounded smooth callable, dimension ≤ 2,
/// by nested quadrature at each ε of `opts.eps`.
pub fn callable<T: Real, F: Fn(&[T]) -> Complex<T> + Sync>(
    mu: &OscGaussMeasure<T>,
    f: F,
    opts: &OracleOptions,
) -> Result<Complex<T>, OscError> {
    let n = mu.dim();
    if n == 0 || n > 2 {
        return Err(OscError::Dimension(format!(
            "nested quadrature oracle handles dimension 1 or 2, got {n}"
        )));
    }
    let (lam, _) = jacobi_eigen(&mu.s);
    let snorm = mu.s.norm();
    let nker = lam.iter().filter(|l| l.abs() <= lit::<T>(1e-10) * snorm).count();
    let half = lit::<T>(0.5);
    let density = |x: &[T], eps: T| {
        let mut q = T::zero();
        let mut r2 = T::zero();
        for a in 0..n {
            r2 += x[a] * x[a];
            for b in 0..n {
                q += (x[a] - mu.mean[a]) * mu.s[(a, b)] * (x[b] - mu.mean[b]);
            }
        }
        polar((-eps * r2).exp(), -half * q)
    };
    let mut eps_used = Vec::new();
    let mut samples = Vec::new();
    for &e in &opts.eps {
        let eps = lit::<T>(e);
        let r = mu.mean.amax() + (lit::<T>(40.0) / eps).sqrt();
        let val = if n == 1 {
            integrate_complex(|x| f(&[x]) * density(&[x], eps), -r, r, opts.quad)?.0
        } else {
            let inner = |x0: T| {
                integrate_complex(|x1| f(&[x0, x1]) * density(&[x0, x1], eps), -r, r, opts.quad)
                    .map(|v| v.0)
                    .unwrap_or(Complex::new(lit::<T>(f64::NAN), lit::<T>(f64::NAN)))
            };
            let (v, _) = integrate_complex(inner, -r, r, opts.quad)?;
            if !v.re.is_finite() {
                return Err(OscError::NotConverged("inner quadrature failed".into()));
            }
            v
        };
        let norm = (eps / T::pi()).powi(nker as i32).sqrt();
        samples.push(val * norm / mu.z);
        eps_used.push(eps);
    }
    extrapolate(&eps_used, &samples, opts.ratio, "callable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let a = DMatrix::<f64>::from_row_slice(3, 3, &[2.0, 1.0, 0.5, 1.0, -1.0, 0.3, 0.5, 0.3, 0.7]);
        let (l, v) = jacobi_eigen(&a);
        let d = v.transpose() * &a * &v;
        for i in 0..3 {
            assert!((d[(i, i)] - l[i]).abs() < 1e-12);
            for k in 0..3 {
                if k != i {
                    assert!(d[(i, k)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_dimensional_value() {
        let mu = OscGaussMeasure::centered(DMatrix::from_element(1, 1, 2.0f64)).unwrap();
        let v = exp_linear(&mu, &DVector::zeros(1), &Poly2::one(1), &OracleOptions::default()).unwrap();
        let want = mu.fourier(&DVector::zeros(1)).unwrap();
        assert!((v - want).norm() / want.norm() < 1e-6, "{v} vs {want}");
    }
}
