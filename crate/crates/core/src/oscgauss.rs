//! Oscillatory Gauss-type measures `dμ = Z⁻¹ exp(-(i/2)⟨x-m, S(x-m)⟩) dx`
//! and their improper integrals
//! `∫~ f dμ = lim_{ε→0} (ε/π)^{n/2} ∫ f(x) e^{-ε|x|²} dμ(x)`, `n = dim ker S`.
//!
//! The closed form works in the spectral basis of `S`. The quadrature
//! oracle in [`oracle`] evaluates the ε-regularized integrals numerically and
//! shares no code with the closed form (it carries its own eigensolver).
//!
//! Chern–Simons measures have density `e^{+iS_CS}`; callers pass `-S_CS`'s
//! Hessian as `S` here. [`offdiag_block_reduce`] does that conversion for the
//! `(A_c, B)` coupling.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use thiserror::Error;

use crate::quad::QuadError;
use crate::{cabs, lit, polar, to_f64, Real};

pub mod oracle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OscError {
    #[error("S is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("normalization Z must be nonzero")]
    ZeroNormalization,
    #[error("improper integral diverges: {0}")]
    Divergent(String),
    #[error("extrapolation did not converge: {0}")]
    NotConverged(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// `P(x) = c + ⟨g, x⟩ + ⟨x, H x⟩` with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2<T: Real> {
    pub c: Complex<T>,
    pub g: DVector<Complex<T>>,
    pub h: DMatrix<Complex<T>>,
}

impl<T: Real> Poly2<T> {
    pub fn constant(n: usize, c: Complex<T>) -> Self {
        Poly2 {
            c,
            g: DVector::zeros(n),
            h: DMatrix::zeros(n, n),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex::new(T::one(), T::zero()))
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn eval(&self, x: &DVector<T>) -> Complex<T> {
        let xc: DVector<Complex<T>> = x.map(|v| Complex::new(v, T::zero()));
        self.eval_c(&xc)
    }

    fn eval_c(&self, x: &DVector<Complex<T>>) -> Complex<T> {
        self.c + self.g.dot(x) + x.dot(&(&self.h * x))
    }

    pub fn degree(&self) -> usize {
        let zero = Complex::new(T::zero(), T::zero());
        if self.h.iter().any(|&v| v != zero) {
            2
        } else if self.g.iter().any(|&v| v != zero) {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone)]
pub struct OscGaussMeasure<T: Real> {
    pub z: Complex<T>,
    pub mean: DVector<T>,
    pub s: DMatrix<T>,
    eigenvalues: DVector<T>,
    eigenvectors: DMatrix<T>,
    is_kernel: Vec<bool>,
}

impl<T: Real> OscGaussMeasure<T> {
    pub fn new(z: Complex<T>, mean: DVector<T>, s: DMatrix<T>) -> Result<Self, OscError> {
        let n = mean.len();
        if s.nrows() != n || s.ncols() != n {
            return Err(OscError::Dimension(format!(
                "S is {}x{}, mean has {} entries",
                s.nrows(),
                s.ncols(),
                n
            )));
        }
        if z == Complex::new(T::zero(), T::zero()) {
            return Err(OscError::ZeroNormalization);
        }
        let asym = (&s - s.transpose()).norm();
        if asym > lit::<T>(1e-12) * (T::one() + s.norm()) {
            return Err(OscError::NotSymmetric(to_f64(asym)));
        }
        let eig = SymmetricEigen::new(s.clone());
        let snorm = s.norm();
        let tol = lit::<T>(1e-10) * snorm;
        let is_kernel = eig.eigenvalues.iter().map(|&l| l.abs() <= tol).collect();
        Ok(OscGaussMeasure {
            z,
            mean,
            s,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            is_kernel,
        })
    }

    /// Centered measure with `Z = 1`.
    pub fn centered(s: DMatrix<T>) -> Result<Self, OscError> {
        let n = s.nrows();
        Self::new(Complex::new(T::one(), T::zero()), DVector::zeros(n), s)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    pub fn kernel_dim(&self) -> usize {
        self.is_kernel.iter().filter(|&&k| k).count()
    }

    pub fn is_degenerate(&self) -> bool {
        self.kernel_dim() > 0
    }

    /// Columns: orthonormal basis of `ker S`.
    pub fn kernel_basis(&self) -> DMatrix<T> {
        let cols: Vec<DVector<T>> = (0..self.dim())
            .filter(|&i| self.is_kernel[i])
            .map(|i| self.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(self.dim(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// Number of positive minus number of negative nonzero eigenvalues.
    pub fn signature(&self) -> i64 {
        self.eigenvalues
            .iter()
            .zip(&self.is_kernel)
            .filter(|(_, &k)| !k)
            .map(|(&l, _)| if l > T::zero() { 1 } else { -1 })
            .sum()
    }

    /// `∫~ P(x) e^{i⟨j,x⟩} dμ(x)` in closed form.
    pub fn integrate_exp_linear(&self, j: &DVector<T>, p: &Poly2<T>) -> Result<Complex<T>, OscError> {
        let n = self.dim();
        if j.len() != n || p.dim() != n {
            return Err(OscError::Dimension("j and P must live on the measure's space".into()));
        }
        let v = &self.eigenvectors;
        let jt = v.transpose() * j;
        let mt = v.transpose() * &self.mean;
        let jscale = T::one() + j.norm();
        let mut factor = Complex::new(T::one(), T::zero()) / self.z;
        let mut star = DVector::<Complex<T>>::zeros(n);
        let mut cov_diag = DVector::<Complex<T>>::zeros(n);
        let mut kernel_h_trace = Complex::new(T::zero(), T::zero());
        let ht = v.transpose().map(|x| Complex::new(x, T::zero())) * &p.h * v.map(|x| Complex::new(x, T::zero()));
        let two_pi = lit::<T>(2.0) * T::pi();
        let quarter_pi = T::pi() / lit(4.0);
        for i in 0..n {
            if self.is_kernel[i] {
                if jt[i].abs() > lit::<T>(1e-12) * jscale {
                    // (ε/π)^{1/2} ∫ e^{ijz - εz²} dz = e^{-j²/4ε} → 0
                    return Ok(Complex::new(T::zero(), T::zero()));
                }
                kernel_h_trace += ht[(i, i)];
                continue;
            }
            let l = self.eigenvalues[i];
            let amp = (two_pi / l.abs()).sqrt();
            let phase = -quarter_pi * l.signum() + jt[i] * mt[i] + jt[i] * jt[i] / (lit::<T>(2.0) * l);
            factor *= polar(amp, phase);
            star[i] = Complex::new(mt[i] + jt[i] / l, T::zero());
            cov_diag[i] = Complex::new(T::zero(), -T::one() / l);
        }
        if p.degree() == 2 && cabs(kernel_h_trace) > lit::<T>(1e-12) * (T::one() + p.h.norm()) {
            return Err(OscError::Divergent(
                "quadratic polynomial growth along ker S is not improperly integrable".into(),
            ));
        }
        // P at the stationary point plus the second-moment correction, in the
        // eigenbasis: x = V z
        let vc = v.map(|x| Complex::new(x, T::zero()));
        let xstar = &vc * &star;
        let mut expect = p.eval_c(&xstar);
        for i in 0..n {
            expect += ht[(i, i)] * cov_diag[i];
        }
        Ok(factor * expect)
    }

    /// `∫~ e^{i⟨j,x⟩} dμ(x)`.
    pub fn fourier(&self, j: &DVector<T>) -> Result<Complex<T>, OscError> {
        self.integrate_exp_linear(j, &Poly2::one(self.dim()))
    }
}

/// Result of integrating out an off-diagonal block coupling
/// `exp(i⟨a, C b⟩)` over `(a, b)`.
#[derive(Debug, Clone)]
pub struct BlockReduction<T: Real> {
    /// `(2π)^r / Π σ_i` over the nonzero singular values of `C`.
    pub prefactor: T,
    pub rank: usize,
    /// Columns: orthonormal basis of `ker C` inside the b-space.
    pub kernel: DMatrix<T>,
    pub singular_values: Vec<T>,
}

impl<T: Real> BlockReduction<T> {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.ncols()
    }
}

/// Exact ε→0 reduction of `∫~ f(b) e^{i⟨a, C b⟩} d(a, b)`: the prefactor
/// times the improper (normalized) integral of `f` over `ker C`.
/// The measure in the sense of this module has `S = -[[0, C], [Cᵀ, 0]]`.
pub fn offdiag_block_reduce<T: Real>(c: &DMatrix<T>) -> BlockReduction<T> {
    let (na, nb) = c.shape();
    if na == 0 || nb == 0 {
        return BlockReduction {
            prefactor: T::one(),
            rank: 0,
            kernel: DMatrix::identity(nb, nb),
            singular_values: Vec::new(),
        };
    }
    // eigen-decomposition of CᵀC gives right singular vectors, including the
    // full kernel when nb > na
    let ctc = c.transpose() * c;
    let eig = SymmetricEigen::new(ctc);
    let top = eig.eigenvalues.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    let tol = lit::<T>(1e-20) * (T::one() + top);
    let mut sv = Vec::new();
    let mut kernel_cols = Vec::new();
    for i in 0..nb {
        let l = eig.eigenvalues[i];
        if l.abs() <= tol.max(lit::<T>(1e-10) * top) {
            kernel_cols.push(eig.eigenvectors.column(i).into_owned());
        } else {
            sv.push(l.sqrt());
        }
    }
    let two_pi = lit::<T>(2.0) * T::pi();
    let prefactor = sv.iter().fold(T::one(), |acc, &s| acc * two_pi / s);
    let kernel = if kernel_cols.is_empty() {
        DMatrix::zeros(nb, 0)
    } else {
        DMatrix::from_columns(&kernel_cols)
    };
    BlockReduction {
        prefactor,
        rank: sv.len(),
        kernel,
        singular_values: sv,
    }
}

/// The symmetric matrix `-[[0, C], [Cᵀ, 0]]` of the coupling measure.
pub fn coupling_matrix<T: Real>(c: &DMatrix<T>) -> DMatrix<T> {
    let (na, nb) = c.shape();
    let mut s = DMatrix::zeros(na + nb, na + nb);
    for i in 0..na {
        for j in 0..nb {
            s[(i, na + j)] = -c[(i, j)];
            s[(na + j, i)] = -c[(i, j)];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zero_form_integrates_one_to_one() {
        let mu = OscGaussMeasure::centered(DMatrix::<f64>::zeros(3, 3)).unwrap();
        let v = mu.fourier(&DVector::zeros(3)).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn one_dimensional_fresnel_phase() {
        for s in [0.7f64, -2.0] {
            let mu = OscGaussMeasure::centered(DMatrix::from_element(1, 1, s)).unwrap();
            let v = mu.fourier(&DVector::zeros(1)).unwrap();
            let want = polar((2.0 * PI / s.abs()).sqrt(), -PI / 4.0 * s.signum());
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn translation_covariance() {
        let s = DMatrix::from_row_slice(2, 2, &[1.3, 0.2, 0.2, -0.8]);
        let m = DVector::from_vec(vec![0.4, -1.1]);
        let j = DVector::from_vec(vec![0.3, 0.9]);
        let centered = OscGaussMeasure::centered(s.clone()).unwrap().fourier(&j).unwrap();
        let shifted = OscGaussMeasure::new(c(1.0, 0.0), m.clone(), s).unwrap().fourier(&j).unwrap();
        assert!((shifted - centered * polar(1.0, j.dot(&m))).norm() < 1e-13);
    }

    #[test]
    fn kernel_growth_is_divergent() {
        let mu = OscGaussMeasure::centered(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let mut p = Poly2::one(2);
        p.h[(1, 1)] = c(1.0, 0.0);
        assert!(matches!(
            mu.integrate_exp_linear(&DVector::zeros(2), &p),
            Err(OscError::Divergent(_))
        ));
    }

    #[test]
    fn rejects_asymmetric_form() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(OscGaussMeasure::centered(s), Err(OscError::NotSymmetric(_))));
    }

    #[test]
    fn block_reduction_matches_full_measure() {
        let cm = DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.5, -2.0]);
        let red = offdiag_block_reduce(&cm);
        assert_eq!(red.rank, 2);
        let full = OscGaussMeasure::centered(coupling_matrix(&cm)).unwrap();
        let v = full.fourier(&DVector::zeros(4)).unwrap();
        assert!((v - c(red.prefactor, 0.0)).norm() < 1e-12);
        assert_eq!(full.signature(), 0);
    }

    #[test]
    fn zero_coupling_keeps_everything() {
        let red = offdiag_block_reduce(&DMatrix::<f64>::zeros(2, 3));
        assert_eq!(red.rank, 0);
        assert_eq!(red.kernel_dim(), 3);
        assert_eq!(red.prefactor, 1.0);
    }
}
