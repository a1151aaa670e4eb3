//! Lie and level-k data.
//!
//! Points of `𝔱` are given in torus coordinates `b = Σ x_i H_i` where `H_i`
//! are the first `rank` basis elements of `𝔤`; for SU(2) that is `b = xτ`
//! with `τ = diag(i, -i)`. Roots are stored as angle functionals: `e^{ad b}`
//! acts on the root space of `α` by `e^{iα(b)}`, so for SU(2) `α(xτ) = 2x`.
//! Alcove walls are the hyperplanes `α(b) ∈ 2πZ`.
//!
//! Level data uses the unshifted level: `q = exp(2πi/k)`, colors `0..=k-2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde_json::json;
use thiserror::Error;

use crate::{lit, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("empty color set: level {k} is below the dual Coxeter number {g}")]
    EmptyColorSet { k: u32, g: u32 },
    #[error("color {color} outside the level-{k} color set 0..={max}")]
    ColorOutOfRange { color: usize, k: u32, max: usize },
    #[error("Verlinde sum {value} for N^{lam}_({mu},{nu}) is not within the guard band of an integer")]
    NotIntegral { mu: usize, nu: usize, lam: usize, value: f64 },
    #[error("mollifier width must be positive, got {0}")]
    BadWidth(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

type CMat<T> = DMatrix<Complex<T>>;

#[derive(Debug, Clone)]
pub struct LieData<T: Real> {
    pub name: String,
    pub rank: usize,
    pub dim: usize,
    /// `⟨H_i, H_j⟩` on torus coordinates.
    pub gram: DMatrix<T>,
    pub positive_roots: Vec<DVector<T>>,
    /// Columns: basis of `I = ker(exp|_𝔱)` in torus coordinates.
    pub lattice: DMatrix<T>,
    /// Weyl vector in torus coordinates.
    pub rho: DVector<T>,
    pub dual_coxeter: u32,
    /// Basis of `𝔤` in the defining representation; the first `rank` span `𝔱`.
    pub basis: Vec<CMat<T>>,
    /// `structure[a][b]`: coordinates of `[X_a, X_b]`.
    structure: Vec<Vec<Vec<T>>>,
}

/// Invariant form `⟨A, B⟩ = -Re Tr(AB) / 4π²`.
fn form<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    let four_pi2 = lit::<T>(4.0) * T::pi() * T::pi();
    -(a * b).trace().re / four_pi2
}

impl<T: Real> LieData<T> {
    pub fn su2() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let tau = DMatrix::from_row_slice(2, 2, &[i, z, z, -i]);
        let k1 = DMatrix::from_row_slice(2, 2, &[z, -one, one, z]);
        let k2 = DMatrix::from_row_slice(2, 2, &[z, i, i, z]);
        let basis = vec![tau, k1, k2];
        let pi = T::pi();
        let g = form(&basis[0], &basis[0]);
        let mut lie = LieData {
            name: "su2".into(),
            rank: 1,
            dim: 3,
            gram: DMatrix::from_element(1, 1, g),
            positive_roots: vec![DVector::from_element(1, lit(2.0))],
            lattice: DMatrix::from_element(1, 1, lit::<T>(2.0) * pi),
            rho: DVector::from_element(1, pi),
            dual_coxeter: 2,
            basis,
            structure: Vec::new(),
        };
        lie.structure = lie.compute_structure();
        lie
    }

    fn compute_structure(&self) -> Vec<Vec<Vec<T>>> {
        let n = self.dim;
        let mut c = vec![vec![vec![T::zero(); n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                let br = &self.basis[a] * &self.basis[b] - &self.basis[b] * &self.basis[a];
                for d in 0..n {
                    c[a][b][d] = form(&br, &self.basis[d]) / form(&self.basis[d], &self.basis[d]);
                }
            }
        }
        c
    }

    /// `⟨X_a, X_a⟩`, the same for every basis element.
    pub fn basis_norm2(&self) -> T {
        form(&self.basis[0], &self.basis[0])
    }

    /// `⟨b, c⟩` for torus coordinates.
    pub fn pairing(&self, b: &[T], c: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += b[i] * self.gram[(i, j)] * c[j];
            }
        }
        s
    }

    pub fn root_angle(&self, alpha: &DVector<T>, b: &[T]) -> T {
        alpha.iter().zip(b).fold(T::zero(), |acc, (&a, &x)| acc + a * x)
    }

    /// Matrix of `ad(X)` in the basis of `𝔤` for `X` with coordinates `x`.
    pub fn ad(&self, x: &[T]) -> DMatrix<T> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            if x[a] == T::zero() {
                continue;
            }
            for b in 0..n {
                for d in 0..n {
                    m[(d, b)] += x[a] * self.structure[a][b][d];
                }
            }
        }
        m
    }

    /// `exp(ad(b))` for `b ∈ 𝔱` in torus coordinates, as an orthogonal
    /// matrix on `𝔤`.
    pub fn exp_ad_torus(&self, b: &[T]) -> DMatrix<T> {
        if self.name == "su2" {
            // ad(τ) rotates (k1, k2) by the angle -2x
            let (s, c) = (lit::<T>(2.0) * b[0]).sin_cos();
            let mut m = DMatrix::identity(3, 3);
            m[(1, 1)] = c;
            m[(2, 2)] = c;
            m[(1, 2)] = s;
            m[(2, 1)] = -s;
            return m;
        }
        let mut x = vec![T::zero(); self.dim];
        x[..self.rank].copy_from_slice(&b[..self.rank]);
        self.ad(&x).exp()
    }

    /// Element of `𝔤` in the defining representation.
    pub fn matrix(&self, x: &[T]) -> CMat<T> {
        let mut m = CMat::zeros(self.basis[0].nrows(), self.basis[0].ncols());
        for (a, xa) in x.iter().enumerate() {
            if *xa != T::zero() {
                m += &self.basis[a] * Complex::new(*xa, T::zero());
            }
        }
        m
    }

    /// `exp(X)` in the defining representation.
    pub fn group_exp(&self, x: &[T]) -> CMat<T> {
        let m = self.matrix(x);
        if m.nrows() == 2 {
            // X² = -θ² for X ∈ su(2)
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let theta = det.re.max(T::zero()).sqrt();
            let (s, c) = theta.sin_cos();
            let sinc = if theta > lit(1e-8) {
                s / theta
            } else {
                T::one() - theta * theta / lit(6.0)
            };
            let mut out = m * Complex::new(sinc, T::zero());
            out[(0, 0)] += Complex::new(c, T::zero());
            out[(1, 1)] += Complex::new(c, T::zero());
            return out;
        }
        m.exp()
    }

    /// `det(1 - e^{ad b}|_𝔨) = Π_{α>0} 4 sin²(α(b)/2)`.
    pub fn fp_density(&self, b: &[T]) -> T {
        let four = lit::<T>(4.0);
        self.positive_roots
            .iter()
            .map(|a| {
                let s = (self.root_angle(a, b) / lit(2.0)).sin();
                four * s * s
            })
            .fold(T::one(), |x, y| x * y)
    }

    /// `T(b) = Π_{α>0} 2 sin(α(b)/2)`, the signed square root of
    /// [`fp_density`](Self::fp_density).
    pub fn fp_root(&self, b: &[T]) -> T {
        let two = lit::<T>(2.0);
        self.positive_roots
            .iter()
            .map(|a| two * (self.root_angle(a, b) / two).sin())
            .fold(T::one(), |x, y| x * y)
    }

    /// Euclidean distance (torus coordinates) from `b` to the nearest wall.
    pub fn wall_distance(&self, b: &[T]) -> T {
        let two_pi = lit::<T>(2.0) * T::pi();
        self.positive_roots
            .iter()
            .map(|a| {
                let ang = self.root_angle(a, b);
                let r = ang - (ang / two_pi).round() * two_pi;
                r.abs() / a.norm()
            })
            .fold(T::max_value().unwrap_or(lit(1e300)), |x, y| x.min(y))
    }

    /// Regular-part cutoff: 0 within `s/2` of a wall, 1 beyond `s`, a
    /// C^∞ step between.
    pub fn mollifier(&self, s: T, b: &[T]) -> Result<T, LieError> {
        if s <= T::zero() {
            return Err(LieError::BadWidth(to_f64(s)));
        }
        let half = s / lit(2.0);
        Ok(smooth_step((self.wall_distance(b) - half) / half))
    }

    /// Character of the irreducible representation with highest weight
    /// `n ω` at `exp(b)`.
    pub fn character(&self, n: usize, b: &[T]) -> Complex<T> {
        assert_eq!(self.rank, 1, "characters are wired for rank one");
        let x = b[0];
        let mut re = T::zero();
        let mut im = T::zero();
        for j in 0..=n {
            let w: T = lit((n as f64) - 2.0 * j as f64);
            let (s, c) = (w * x).sin_cos();
            re += c;
            im += s;
        }
        Complex::new(re, im)
    }

    /// Trace of `U` (an SU(2) matrix in the defining representation) in the
    /// spin-n/2 representation: the Chebyshev polynomial `U_n(Tr U / 2)`.
    pub fn trace_in_color(&self, n: usize, u: &CMat<T>) -> Complex<T> {
        let c = u.trace() * Complex::new(lit::<T>(0.5), T::zero());
        let two = Complex::new(lit::<T>(2.0), T::zero());
        let mut prev = Complex::new(T::one(), T::zero());
        if n == 0 {
            return prev;
        }
        let mut cur = two * c;
        for _ in 1..n {
            let next = two * c * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1.
pub fn smooth_step<T: Real>(t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let f = |u: T| (-T::one() / u).exp();
    let a = f(t);
    a / (a + f(T::one() - t))
}

/// Element of the affine Weyl group of SU(2): `x ↦ sign·x + 2π·shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineWeyl {
    pub sign: i8,
    pub shift: i64,
}

impl AffineWeyl {
    /// Word in the generators `0: x ↦ -x` and `1: x ↦ x + 2π`.
    pub fn from_word(word: &[usize]) -> Self {
        word.iter().fold(AffineWeyl { sign: 1, shift: 0 }, |w, &g| match g {
            0 => AffineWeyl {
                sign: -w.sign,
                shift: -w.shift,
            },
            _ => AffineWeyl {
                sign: w.sign,
                shift: w.shift + 1,
            },
        })
    }

    pub fn apply<T: Real>(&self, x: T) -> T {
        let s: T = lit(self.sign as f64);
        s * x + lit::<T>(2.0 * std::f64::consts::PI * self.shift as f64)
    }
}

#[derive(Debug, Clone)]
pub struct LevelData<T: Real> {
    pub lie: LieData<T>,
    pub k: u32,
    pub s: DMatrix<Complex<T>>,
    pub dims: Vec<T>,
    fusion: Vec<u32>,
}

impl<T: Real> LevelData<T> {
    pub fn new(lie: LieData<T>, k: u32) -> Result<Self, LieError> {
        if lie.rank != 1 {
            return Err(LieError::Unsupported("level data is implemented for SU(2)".into()));
        }
        if k < lie.dual_coxeter {
            return Err(LieError::EmptyColorSet {
                k,
                g: lie.dual_coxeter,
            });
        }
        let n = (k - 1) as usize;
        let kf: T = lit(k as f64);
        let norm = (lit::<T>(2.0) / kf).sqrt();
        let s = DMatrix::from_fn(n, n, |a, b| {
            let arg = T::pi() * lit(((a + 1) * (b + 1)) as f64) / kf;
            Complex::new(norm * arg.sin(), T::zero())
        });
        let dims = (0..n).map(|a| s[(a, 0)].re / s[(0, 0)].re).collect();
        let mut level = LevelData {
            lie,
            k,
            s,
            dims,
            fusion: vec![0; n * n * n],
        };
        for mu in 0..n {
            for nu in 0..n {
                for lam in 0..n {
                    let v = level.verlinde_sum(mu, nu, lam);
                    let r = v.round();
                    if (v - r).abs() > 1e-6 || r < 0.0 {
                        return Err(LieError::NotIntegral { mu, nu, lam, value: v });
                    }
                    level.fusion[(mu * n + nu) * n + lam] = r as u32;
                }
            }
        }
        Ok(level)
    }

    pub fn su2(k: u32) -> Result<Self, LieError> {
        Self::new(LieData::su2(), k)
    }

    pub fn n_colors(&self) -> usize {
        self.dims.len()
    }

    pub fn colors(&self) -> std::ops::Range<usize> {
        0..self.n_colors()
    }

    fn check(&self, c: usize) -> Result<(), LieError> {
        if c >= self.n_colors() {
            return Err(LieError::ColorOutOfRange {
                color: c,
                k: self.k,
                max: self.n_colors() - 1,
            });
        }
        Ok(())
    }

    /// `Σ_σ S_{μσ} S_{νσ} conj(S_{λσ}) / S_{0σ}` (real part).
    pub fn verlinde_sum(&self, mu: usize, nu: usize, lam: usize) -> f64 {
        let mut acc = Complex::new(T::zero(), T::zero());
        for sg in self.colors() {
            acc += self.s[(mu, sg)] * self.s[(nu, sg)] * self.s[(lam, sg)].conj() / self.s[(0, sg)];
        }
        to_f64(acc.re)
    }

    /// `N^λ_{μν}`.
    pub fn fusion(&self, mu: usize, nu: usize, lam: usize) -> Result<u32, LieError> {
        self.check(mu)?;
        self.check(nu)?;
        self.check(lam)?;
        let n = self.n_colors();
        Ok(self.fusion[(mu * n + nu) * n + lam])
    }

    pub fn s_entry(&self, mu: usize, nu: usize) -> Complex<T> {
        self.s[(mu, nu)]
    }

    pub fn dim(&self, c: usize) -> T {
        self.dims[c]
    }

    /// `⟨nω, nω + 2ρ⟩ = n(n+2)/2`.
    pub fn casimir(&self, n: usize) -> T {
        lit((n * (n + 2)) as f64 / 2.0)
    }

    /// Twist `exp(πi/k ⟨φ, φ+2ρ⟩)`.
    pub fn twist(&self, n: usize) -> Complex<T> {
        let arg = T::pi() * self.casimir(n) / lit(self.k as f64);
        Complex::new(arg.cos(), arg.sin())
    }

    /// `exp(2πi/k)`.
    pub fn q(&self) -> Complex<T> {
        let arg = lit::<T>(2.0) * T::pi() / lit(self.k as f64);
        Complex::new(arg.cos(), arg.sin())
    }

    /// Torus coordinate of `(λ + ρ)/k`, the point where characters reproduce
    /// S-matrix ratios.
    pub fn shifted_point(&self, lam: usize) -> T {
        T::pi() * lit((lam + 1) as f64) / lit(self.k as f64)
    }

    pub fn exp_weight_trace(&self, mu: usize, b: &[T]) -> Result<Complex<T>, LieError> {
        self.check(mu)?;
        Ok(self.lie.character(mu, b))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.n_colors();
        let s: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| [to_f64(self.s[(a, b)].re), to_f64(self.s[(a, b)].im)])
                    .collect()
            })
            .collect();
        let fusion: Vec<Vec<Vec<u32>>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| (0..n).map(|c| self.fusion[(a * n + b) * n + c]).collect())
                    .collect()
            })
            .collect();
        json!({
            "schema": "v1",
            "group": self.lie.name,
            "k": self.k,
            "dual_coxeter": self.lie.dual_coxeter,
            "colors": (0..n).collect::<Vec<_>>(),
            "dims": self.dims.iter().map(|&d| to_f64(d)).collect::<Vec<_>>(),
            "twists": (0..n).map(|c| { let t = self.twist(c); [to_f64(t.re), to_f64(t.im)] }).collect::<Vec<_>>(),
            "s_matrix": s,
            "fusion": fusion,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn su2_form_and_lattice() {
        let lie = LieData::<f64>::su2();
        assert!((lie.basis_norm2() - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        // short coroot 2πτ has norm² 2
        let c = [2.0 * PI];
        assert!((lie.pairing(&c, &c) - 2.0).abs() < 1e-12);
        // ρ = πτ pairs to 1/2... ⟨ρ, coroot⟩ = 1
        assert!((lie.pairing(&[PI], &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ad_matches_closed_form_rotation() {
        let lie = LieData::<f64>::su2();
        let x = 0.37;
        let num = lie.ad(&[x, 0.0, 0.0]).exp();
        let closed = lie.exp_ad_torus(&[x]);
        assert!((num - closed).norm() < 1e-12);
    }

    #[test]
    fn group_exp_is_unitary_and_matches_series() {
        let lie = LieData::<f64>::su2();
        let x = [0.3, -1.1, 0.7];
        let u = lie.group_exp(&x);
        let series = lie.matrix(&x).exp();
        assert!((&u - &series).norm() < 1e-12);
        let id = &u * u.adjoint();
        assert!((id - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn trace_in_color_matches_character() {
        let lie = LieData::<f64>::su2();
        let x = 0.81;
        let u = lie.group_exp(&[x, 0.0, 0.0]);
        for n in 0..6 {
            assert!((lie.trace_in_color(n, &u) - lie.character(n, &[x])).norm() < 1e-12);
        }
    }

    #[test]
    fn level_two_is_trivial() {
        let l = LevelData::<f64>::su2(2).unwrap();
        assert_eq!(l.n_colors(), 1);
        assert!(matches!(LevelData::<f64>::su2(1), Err(LieError::EmptyColorSet { .. })));
    }

    #[test]
    fn mollifier_rejects_nonpositive_width() {
        let lie = LieData::<f64>::su2();
        assert!(lie.mollifier(0.0, &[1.0]).is_err());
    }

    #[test]
    fn single_precision_level_data() {
        let l = LevelData::<f32>::su2(5).unwrap();
        assert_eq!(l.fusion(1, 1, 2).unwrap(), 1);
        assert!((l.dim(1) - 1.618034).abs() < 1e-5);
    }
}
