//! Discrete Chern–Simons data on `qK × Z_N` in torus gauge and the staged
//! evaluation of the Wilson-loop ratio.
//!
//! Coordinates. Fields in `A⊥(K)` are stored as `a[((i·N + t)·3 + c)]` where
//! `i = side·E + e` runs over the edges of K1 then K2, `t ∈ Z_N`, and `c`
//! indexes the basis `(τ, k1, k2)` of `su(2)`. The scalar product is the
//! 1/N-averaged one inherited from `qK` through `ψ`, which is `2g/N` times
//! the Euclidean one (`g = ⟨τ,τ⟩`). `B` is a `𝔱`-valued 0-form on `qK`,
//! stored by its `τ`-coefficients `x_v`. Every Gaussian is written in
//! orthonormal coordinates, so the normalized Lebesgue measures of the
//! improper integrals are plain Lebesgue measures there.
//!
//! Evaluation order: the `Ǎ⊥` integral in closed form per edge pair, then
//! the off-diagonal `(A⊥_c, B)` block by [`offdiag_block_reduce`], leaving a
//! mean over the line `ker C ∩ B-space` of a 2π-periodic integrand. The
//! `y`-sum is done either as a truncated Dirichlet kernel under adaptive
//! quadrature or by Poisson resummation onto `2k` nodes.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lie::{LevelData, LieData, LieError};
use crate::oscgauss::offdiag_block_reduce;
use crate::polycomplex::{ComplexError, JoinedComplex, ProductComplex, Side};
use crate::quad::{integrate_vec, neville, QuadError, QuadOptions};
use crate::ribbon::{s1_step, sigma_step, vertex_split, RibbonClass, RibbonLink, SimplicialLoop, SimplicialRibbon, Step};
use crate::{lit, polar, to_f64, Real};

type CMat<T> = DMatrix<Complex<T>>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("the averaged operator needs even N, got N = {0}")]
    OddN(usize),
    #[error("sigma0 = {0} is not a vertex of qK")]
    BadSigma(usize),
    #[error("degenerate Gaussian: {0}")]
    Degenerate(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("field has {got} coordinates, expected {want}")]
    Dimension { got: usize, want: usize },
    #[error("direct and Poisson y-sums disagree: {direct} vs {poisson} (difference {diff:e})")]
    Cutoff { direct: String, poisson: String, diff: f64 },
    #[error("denominator {0:e} is too small")]
    Denominator(f64),
    #[error("link was built for N = {link}, the field spaces use N = {spaces}")]
    MismatchedN { link: usize, spaces: usize },
}

/// Field spaces of the discrete theory over a joined complex and `Z_N`.
#[derive(Debug, Clone)]
pub struct FieldSpaces<T: Real> {
    pub jc: JoinedComplex,
    pub pc: ProductComplex,
    pub lie: LieData<T>,
    pub n: usize,
    pub sigma0: usize,
    /// Vertices of the qK faces containing `σ₀`.
    pub u_sigma0: Vec<usize>,
    /// Orthonormal basis (columns, vertex coordinates) of the B-space cut
    /// out by the affine condition on tetragons and local constancy at `σ₀`.
    pub b_basis: DMatrix<T>,
    /// `⋆_K` as a signed permutation of the 2E edges.
    star: Vec<(usize, i8)>,
    /// qK midpoint vertex of every edge of K1 ⊔ K2.
    mid: Vec<usize>,
}

/// Orthonormal basis of the zero-sum vectors in `R^N`.
pub fn helmert<T: Real>(n: usize) -> Vec<Vec<T>> {
    (1..n)
        .map(|m| {
            let norm = lit::<T>((m * (m + 1)) as f64).sqrt();
            (0..n)
                .map(|t| {
                    if t < m {
                        T::one() / norm
                    } else if t == m {
                        -lit::<T>(m as f64) / norm
                    } else {
                        T::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal basis of the null space of `a` (columns).
pub fn null_space<T: Real>(a: &DMatrix<T>, ncols: usize) -> DMatrix<T> {
    if a.nrows() == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    let ata = a.transpose() * a;
    let eig = SymmetricEigen::new(ata);
    let top = eig.eigenvalues.iter().fold(T::zero(), |m, &l| m.max(l.abs()));
    let tol = lit::<T>(1e-10) * (T::one() + top);
    let cols: Vec<DVector<T>> = (0..ncols)
        .filter(|&i| eig.eigenvalues[i].abs() <= tol)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(ncols, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Constraint rows of the B-space: `B(p1)+B(p4) = B(p2)+B(p3)` on every
/// tetragon (`mod2`) and `B` constant on `U(σ₀)` (`mod3`).
pub fn b_constraints<T: Real>(jc: &JoinedComplex, sigma0: usize, mod2: bool, mod3: bool) -> DMatrix<T> {
    let nv = jc.qk.count(0);
    let mut rows: Vec<Vec<T>> = Vec::new();
    if mod2 {
        for f in 0..jc.qk.count(2) {
            let [p1, p2, p4, p3] = jc.tetragon(f);
            let mut r = vec![T::zero(); nv];
            r[p1] += T::one();
            r[p4] += T::one();
            r[p2] -= T::one();
            r[p3] -= T::one();
            rows.push(r);
        }
    }
    if mod3 {
        for u in neighborhood(jc, sigma0) {
            if u != sigma0 {
                let mut r = vec![T::zero(); nv];
                r[u] = T::one();
                r[sigma0] = -T::one();
                rows.push(r);
            }
        }
    }
    DMatrix::from_fn(rows.len(), nv, |i, j| rows[i][j])
}

/// `U(σ₀)`: all vertices of qK faces containing `σ₀`.
pub fn neighborhood(jc: &JoinedComplex, sigma0: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..jc.qk.count(2))
        .map(|f| jc.qk.closure_vertices(2, f))
        .filter(|vs| vs.contains(&sigma0))
        .flatten()
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl<T: Real> FieldSpaces<T> {
    pub fn new(jc: &JoinedComplex, n: usize, sigma0: usize, lie: LieData<T>) -> Result<Self, CsError> {
        if lie.name != "su2" {
            return Err(CsError::Unsupported("the torus-gauge pipeline is wired for SU(2)".into()));
        }
        if sigma0 >= jc.qk.count(0) {
            return Err(CsError::BadSigma(sigma0));
        }
        let pc = ProductComplex::new(&jc.qk, n)?;
        let e = jc.n_edges();
        let pair = &jc.pair;
        let mut star = vec![(0usize, 0i8); 2 * e];
        let mut mid = vec![0usize; 2 * e];
        let nv = pair.base.count(0);
        for (s, side) in [Side::K1, Side::K2].into_iter().enumerate() {
            for ed in 0..e {
                let i = s * e + ed;
                let tgt = pair.partner(side, 1, ed);
                star[i] = ((1 - s) * e + tgt, pair.star_sign(side, 1, ed));
                mid[i] = nv + jc.midpoint_of(side, ed);
            }
        }
        let cons = b_constraints::<T>(jc, sigma0, true, true);
        let b_basis = null_space(&cons, jc.qk.count(0));
        Ok(FieldSpaces {
            jc: jc.clone(),
            pc,
            u_sigma0: neighborhood(jc, sigma0),
            lie,
            n,
            sigma0,
            b_basis,
            star,
            mid,
        })
    }

    pub fn n_edges(&self) -> usize {
        self.jc.n_edges()
    }

    /// Number of qK vertices.
    pub fn n_vertices(&self) -> usize {
        self.jc.qk.count(0)
    }

    pub fn dim_a(&self) -> usize {
        2 * self.n_edges() * self.n * 3
    }

    /// Per-edge dimension of `Ǎ⊥`: `N-1` for `τ`, `2N` for `𝔨`.
    pub fn dc(&self) -> usize {
        3 * self.n - 1
    }

    pub fn dim_check(&self) -> usize {
        2 * self.n_edges() * self.dc()
    }

    pub fn dim_c(&self) -> usize {
        2 * self.n_edges()
    }

    pub fn dim_b(&self) -> usize {
        self.b_basis.ncols()
    }

    pub fn g(&self) -> T {
        self.lie.basis_norm2()
    }

    pub fn idx(&self, i: usize, t: usize, c: usize) -> usize {
        (i * self.n + t) * 3 + c
    }

    /// Edge of K1 ⊔ K2 paired by `⋆_K`, with the sign.
    pub fn star_of(&self, i: usize) -> (usize, i8) {
        self.star[i]
    }

    /// qK midpoint vertex of edge `i` of K1 ⊔ K2.
    pub fn midpoint(&self, i: usize) -> usize {
        self.mid[i]
    }

    /// Side and edge of `i`.
    pub fn edge(&self, i: usize) -> (Side, usize) {
        let e = self.n_edges();
        if i < e {
            (Side::K1, i)
        } else {
            (Side::K2, i - e)
        }
    }

    /// The signed permutation `⋆_K` on `A⊥(K)`.
    pub fn star_k_matrix(&self) -> DMatrix<T> {
        let d = self.dim_a();
        let mut m = DMatrix::zeros(d, d);
        for (i, &(j, s)) in self.star.iter().enumerate() {
            for t in 0..self.n {
                for c in 0..3 {
                    m[(self.idx(j, t, c), self.idx(i, t, c))] = lit(s as f64);
                }
            }
        }
        m
    }

    /// Columns: orthonormal basis of `Ǎ⊥(K)` in raw coordinates, grouped per
    /// edge (`τ` Helmert vectors first, then `k1`, `k2` at each `t`).
    pub fn check_basis(&self) -> DMatrix<T> {
        let (da, dc) = (self.dim_a(), self.dc());
        let mut q = DMatrix::zeros(da, self.dim_check());
        let h = helmert::<T>(self.n);
        for i in 0..2 * self.n_edges() {
            let base = i * dc;
            for (m, hv) in h.iter().enumerate() {
                for t in 0..self.n {
                    q[(self.idx(i, t, 0), base + m)] = hv[t];
                }
            }
            for t in 0..self.n {
                for c in 1..3 {
                    q[(self.idx(i, t, c), base + (self.n - 1) + 2 * t + (c - 1))] = T::one();
                }
            }
        }
        q
    }

    /// `N(τ₁ e^{ad(b)/N} - 1)` on `Map(Z_N, 𝔤)`, index `t·3 + c`.
    pub fn lhat(&self, b: T) -> DMatrix<T> {
        lhat_op(&self.lie, b, self.n)
    }

    pub fn lcheck(&self, b: T) -> DMatrix<T> {
        lcheck_op(&self.lie, b, self.n)
    }

    /// `L^{(N)}(B)`: `L̂` on K1 edges and `Ľ` on K2 edges, at the midpoint
    /// values of `B` (vertex coordinates).
    pub fn build_ln(&self, x: &[T]) -> Result<DMatrix<T>, CsError> {
        self.check_b(x)?;
        let d = self.dim_a();
        let w = 3 * self.n;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..2 * self.n_edges() {
            let b = x[self.mid[i]];
            let blk = if i < self.n_edges() { self.lhat(b) } else { self.lcheck(b) };
            m.view_mut((i * w, i * w), (w, w)).copy_from(&blk);
        }
        Ok(m)
    }

    /// `⋆_K L^{(N)}(B)`.
    pub fn star_l(&self, x: &[T]) -> Result<DMatrix<T>, CsError> {
        Ok(self.star_k_matrix() * self.build_ln(x)?)
    }

    fn check_b(&self, x: &[T]) -> Result<(), CsError> {
        if x.len() != self.n_vertices() {
            return Err(CsError::Dimension {
                got: x.len(),
                want: self.n_vertices(),
            });
        }
        Ok(())
    }

    /// `M̌(B) = πk Qᵀ ⋆_K L(B) Q` in orthonormal `Ǎ⊥` coordinates: the
    /// action restricted to `Ǎ⊥` is `⟨u, M̌ u⟩`.
    pub fn check_form(&self, x: &[T], k: u32) -> Result<DMatrix<T>, CsError> {
        let q = self.check_basis();
        let pik = T::pi() * lit(k as f64);
        Ok((q.transpose() * self.star_l(x)? * &q) * pik)
    }

    /// Bilinear form `2πk ⟨⟨⋆_K a, d_{qK} B⟩⟩` in raw coordinates: rows are
    /// the `τ`-coefficients of `A⊥_c` per edge, columns qK vertices.
    pub fn coupling_raw(&self, k: u32) -> DMatrix<T> {
        let e = self.n_edges();
        let qk = &self.jc.qk;
        let nv = self.n_vertices();
        let scale = lit::<T>(2.0) * T::pi() * lit(k as f64) * self.g();
        let mut f = DMatrix::zeros(2 * e, nv);
        for i in 0..2 * e {
            let (j, s) = self.star[i];
            let (side, ed) = self.edge(j);
            // ψ puts the value of ⋆a on both half-edges of the target edge
            for h in self.jc.half_edges(side, ed) {
                for &(v, inc) in qk.boundary(1, h) {
                    f[(i, v)] += scale * lit::<T>((s * inc) as f64);
                }
            }
        }
        f
    }

    /// Coupling matrix `C` in orthonormal coordinates of `A⊥_c` and the
    /// B-space: `2πk⟨⟨⋆_K A_c, d B⟩⟩ = ⟨a, C w⟩`.
    pub fn coupling(&self, k: u32) -> DMatrix<T> {
        let g = self.g();
        let s = (lit::<T>(2.0) * g).sqrt() * g.sqrt();
        self.coupling_raw(k) * &self.b_basis / s
    }

    /// Vertex values of the B-space element with orthonormal coordinates `w`.
    pub fn b_from_coords(&self, w: &DVector<T>) -> Vec<T> {
        (&self.b_basis * w / self.g().sqrt()).iter().copied().collect()
    }

    /// Full discrete action `S(A, B)` for a t-dependent field.
    pub fn action(&self, a: &[T], x: &[T], k: u32) -> Result<T, CsError> {
        if a.len() != self.dim_a() {
            return Err(CsError::Dimension {
                got: a.len(),
                want: self.dim_a(),
            });
        }
        let av = DVector::from_column_slice(a);
        let g = self.g();
        let nn: T = lit(self.n as f64);
        let gram = lit::<T>(2.0) * g / nn;
        let pik = T::pi() * lit(k as f64);
        let quad = av.dot(&(self.star_l(x)? * &av)) * gram;
        // ⟨⟨⋆_K A, d B⟩⟩ averages over t; only the τ part pairs with d B
        let f = self.coupling_raw(k);
        let mut lin = T::zero();
        for i in 0..2 * self.n_edges() {
            let mean = (0..self.n).fold(T::zero(), |s, t| s + a[self.idx(i, t, 0)]) / nn;
            for v in 0..self.n_vertices() {
                lin += mean * f[(i, v)] * x[v];
            }
        }
        Ok(pik * quad + lin)
    }

    /// Split a field into `Ǎ⊥` and `A⊥_c` parts.
    pub fn split(&self, a: &[T]) -> (Vec<T>, Vec<T>) {
        let nn: T = lit(self.n as f64);
        let mut check = a.to_vec();
        let mut c = vec![T::zero(); 2 * self.n_edges()];
        for i in 0..2 * self.n_edges() {
            let mean = (0..self.n).fold(T::zero(), |s, t| s + a[self.idx(i, t, 0)]) / nn;
            c[i] = mean;
            for t in 0..self.n {
                check[self.idx(i, t, 0)] -= mean;
            }
        }
        (check, c)
    }

    /// `A⊥_c` part as a field on `Z_N` (constant in t, `τ`-valued).
    pub fn constant_field(&self, c: &[T]) -> Vec<T> {
        let mut a = vec![T::zero(); self.dim_a()];
        for (i, &ci) in c.iter().enumerate() {
            for t in 0..self.n {
                a[self.idx(i, t, 0)] = ci;
            }
        }
        a
    }

    fn step_exponent(&self, s: Step, start: usize, a: &[T], x: &[T]) -> [T; 3] {
        let (qv, t) = vertex_split(&self.pc, start);
        let mut out = [T::zero(); 3];
        if let Step::Edge { edge, sign } = sigma_step(&self.pc, s) {
            if !a.is_empty() {
                let (side, e, _) = self.jc.edge_parent(edge);
                let i = side as usize * self.n_edges() + e;
                let sg: T = lit(sign as f64);
                for c in 0..3 {
                    out[c] += sg * a[self.idx(i, t, c)];
                }
            }
        }
        if let Step::Edge { sign, .. } = s1_step(&self.pc, s) {
            out[0] += x[qv] * lit::<T>(sign as f64) / lit(self.n as f64);
        }
        out
    }

    /// Loop holonomy `Π_k exp(A(start l^{(k)}_{S¹})(l^{(k)}_Σ) + B(start l^{(k)}_Σ) dt(l^{(k)}_{S¹}))`.
    /// An empty `a` stands for `A = 0`.
    pub fn loop_holonomy(&self, l: &SimplicialLoop, a: &[T], x: &[T]) -> CMat<T> {
        let mut u = CMat::identity(2, 2);
        for (&s, &v) in l.steps.iter().zip(&l.starts) {
            u *= self.lie.group_exp(&self.step_exponent(s, v, a, x));
        }
        u
    }

    /// Ribbon holonomy: per face the average of the two boundary-loop
    /// exponents.
    pub fn ribbon_holonomy(&self, r: &SimplicialRibbon, a: &[T], x: &[T]) -> CMat<T> {
        let half = lit::<T>(0.5);
        let mut u = CMat::identity(2, 2);
        for k in 0..r.faces.len() {
            let p = self.step_exponent(r.l.steps[k], r.l.starts[k], a, x);
            let q = self.step_exponent(r.l_prime.steps[k], r.l_prime.starts[k], a, x);
            let e = [half * (p[0] + q[0]), half * (p[1] + q[1]), half * (p[2] + q[2])];
            u *= self.lie.group_exp(&e);
        }
        u
    }

    /// `Tr_μ` of the ribbon holonomy.
    pub fn ribbon_trace(
        &self,
        r: &SimplicialRibbon,
        color: usize,
        level: &LevelData<T>,
        a: &[T],
        x: &[T],
    ) -> Result<Complex<T>, CsError> {
        level.fusion(color, 0, color)?;
        Ok(self.lie.trace_in_color(color, &self.ribbon_holonomy(r, a, x)))
    }

    /// Discrete Faddeev–Popov factor `Π_x` over qK vertices.
    pub fn det_fp(&self, x: &[T], fp: FpFactor) -> T {
        x.iter().fold(T::one(), |acc, &v| {
            acc * match fp {
                FpFactor::SignedRoot => self.lie.fp_root(&[v]),
                FpFactor::AbsRoot => self.lie.fp_density(&[v]).sqrt(),
                FpFactor::Full => self.lie.fp_density(&[v]),
            }
        })
    }

    pub fn det_fp_mod1(&self, x: &[T]) -> T {
        self.det_fp(x, FpFactor::SignedRoot)
    }

    /// Local `⋆_K L` block on the edge pair `(i, j = ⋆i)` with midpoint value `b`.
    fn pair_block(&self, i: usize, b: T, k: u32) -> DMatrix<T> {
        let (j, sij) = self.star[i];
        let (_, sji) = self.star[j];
        let w = 3 * self.n;
        let (first, second) = if i < self.n_edges() { (i, j) } else { (j, i) };
        let (s_fs, s_sf) = if i < self.n_edges() { (sij, sji) } else { (sji, sij) };
        // rows: (⋆L A)_first = s(second→first) L_second A_second
        let mut m = DMatrix::zeros(2 * w, 2 * w);
        let lh = self.lhat(b);
        let lc = self.lcheck(b);
        let _ = (first, second);
        m.view_mut((0, w), (w, w)).copy_from(&(lc * lit::<T>(s_sf as f64)));
        m.view_mut((w, 0), (w, w)).copy_from(&(lh * lit::<T>(s_fs as f64)));
        let q = self.local_check_basis();
        let mut qq = DMatrix::zeros(2 * w, 2 * self.dc());
        qq.view_mut((0, 0), (w, self.dc())).copy_from(&q);
        qq.view_mut((w, self.dc()), (w, self.dc())).copy_from(&q);
        (qq.transpose() * m * qq) * (T::pi() * lit(k as f64))
    }

    fn local_check_basis(&self) -> DMatrix<T> {
        let w = 3 * self.n;
        let mut q = DMatrix::zeros(w, self.dc());
        for (m, hv) in helmert::<T>(self.n).iter().enumerate() {
            for t in 0..self.n {
                q[(t * 3, m)] = hv[t];
            }
        }
        for t in 0..self.n {
            for c in 1..3 {
                q[(t * 3 + c, (self.n - 1) + 2 * t + (c - 1))] = T::one();
            }
        }
        q
    }

    /// `∫ exp(i⟨u, M̌(B) u⟩) du` over `Ǎ⊥` in closed form, edge pair by
    /// edge pair.
    pub fn inner_gaussian(&self, x: &[T], k: u32) -> Result<GaussFactor<T>, CsError> {
        self.check_b(x)?;
        let mut out = GaussFactor {
            log_abs: T::zero(),
            signature: 0,
            dim: 0,
        };
        let half_log_pi = T::pi().ln() * lit(0.5);
        // pairs with equal midpoint value and signs share their spectrum
        let mut memo: Vec<((u64, i8, i8), T, i64, usize)> = Vec::new();
        for i in 0..self.n_edges() {
            let b = x[self.mid[i]];
            let (j, sij) = self.star[i];
            let key = (to_f64(b).to_bits(), sij, self.star[j].1);
            if let Some(&(_, la, sg, d)) = memo.iter().find(|m| m.0 == key) {
                out.log_abs += la;
                out.signature += sg;
                out.dim += d;
                continue;
            }
            let blk = self.pair_block(i, b, k);
            let scale = blk.norm();
            let eig = SymmetricEigen::new(blk);
            let (mut la, mut sg) = (T::zero(), 0i64);
            for &l in eig.eigenvalues.iter() {
                if l.abs() <= lit::<T>(1e-12) * (T::one() + scale) {
                    return Err(CsError::Degenerate(format!(
                        "M̌(B) is singular on the pair of edge {i} (B(ē) = {})",
                        to_f64(b)
                    )));
                }
                la += half_log_pi - l.abs().ln() * lit(0.5);
                sg += if l > T::zero() { 1 } else { -1 };
            }
            let d = eig.eigenvalues.len();
            memo.push((key, la, sg, d));
            out.log_abs += la;
            out.signature += sg;
            out.dim += d;
        }
        Ok(out)
    }
}

/// `N(τ₁ e^{ad(b)/N} - 1)`.
pub fn lhat_op<T: Real>(lie: &LieData<T>, b: T, n: usize) -> DMatrix<T> {
    let nn: T = lit(n as f64);
    let r = lie.exp_ad_torus(&[b / nn]) * nn;
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    for t in 0..n {
        let u = (t + 1) % n;
        let mut blk = m.view_mut((t * 3, u * 3), (3, 3));
        blk += &r;
        for c in 0..3 {
            m[(t * 3 + c, t * 3 + c)] -= nn;
        }
    }
    m
}

/// `N(1 - τ₋₁ e^{-ad(b)/N})`.
pub fn lcheck_op<T: Real>(lie: &LieData<T>, b: T, n: usize) -> DMatrix<T> {
    let nn: T = lit(n as f64);
    let r = lie.exp_ad_torus(&[-b / nn]) * nn;
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    for t in 0..n {
        let u = (t + n - 1) % n;
        let mut blk = m.view_mut((t * 3, u * 3), (3, 3));
        blk -= &r;
        for c in 0..3 {
            m[(t * 3 + c, t * 3 + c)] += nn;
        }
    }
    m
}

/// `(N/2)(τ₁ e^{ad(b)/N} - τ₋₁ e^{-ad(b)/N})`, even `N` only.
pub fn lbar_op<T: Real>(lie: &LieData<T>, b: T, n: usize) -> Result<DMatrix<T>, CsError> {
    if n % 2 != 0 {
        return Err(CsError::OddN(n));
    }
    let nn: T = lit(n as f64);
    let half = nn / lit(2.0);
    let rp = lie.exp_ad_torus(&[b / nn]) * half;
    let rm = lie.exp_ad_torus(&[-b / nn]) * half;
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    for t in 0..n {
        let mut up = m.view_mut((t * 3, ((t + 1) % n) * 3), (3, 3));
        up += &rp;
        let mut down = m.view_mut((t * 3, ((t + n - 1) % n) * 3), (3, 3));
        down -= &rm;
    }
    Ok(m)
}

/// `Φ ↦ N(Φ(t+1) - Φ(t))`, the forward difference on `Map(Z_N, R^w)`.
pub fn forward_difference<T: Real>(n: usize, w: usize) -> DMatrix<T> {
    let nn: T = lit(n as f64);
    let mut m = DMatrix::zeros(w * n, w * n);
    for t in 0..n {
        for c in 0..w {
            m[(t * w + c, ((t + 1) % n) * w + c)] += nn;
            m[(t * w + c, t * w + c)] -= nn;
        }
    }
    m
}

/// Closed-form value of a non-degenerate Gaussian, as `exp(log_abs) ·
/// e^{iπ·signature/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussFactor<T: Real> {
    pub log_abs: T,
    pub signature: i64,
    pub dim: usize,
}

impl<T: Real> GaussFactor<T> {
    pub fn value(&self) -> Complex<T> {
        polar(self.log_abs.exp(), T::pi() * lit(self.signature as f64) / lit(4.0))
    }
}

/// Default direct-mode cutoff at the largest `s` of the schedule.
pub const DEFAULT_Y_CUTOFF: usize = 64;

/// How the lattice sum over `y ∈ I` is carried out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum YMode {
    /// Truncated sums `|n| ≤ c` for each listed cutoff under one adaptive
    /// quadrature; the last cutoff is the reported value. Cutoffs are given
    /// for the largest `s` and scaled by `s_max/s` for the others.
    Direct { cutoffs: Vec<usize> },
    /// Poisson resummation onto the nodes `B(σ₀) = πj/k`.
    Poisson,
}

/// Per-vertex Faddeev–Popov factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpFactor {
    /// `T(B(x))` with `det(1 - e^{ad B(x)})|_𝔨 = T(B(x))²`.
    SignedRoot,
    /// `|det(1 - e^{ad B(x)})|_𝔨|^{1/2}`.
    AbsRoot,
    /// The unmodified determinant.
    Full,
}

#[derive(Debug, Clone)]
pub struct WloOptions {
    pub k: u32,
    pub s_schedule: Vec<f64>,
    pub mode: YMode,
    pub quad: QuadOptions,
    pub fp: FpFactor,
    /// Relative tolerance for the direct/Poisson and cutoff-doubling checks.
    pub tol: f64,
}

impl WloOptions {
    pub fn new(k: u32) -> Self {
        WloOptions {
            k,
            s_schedule: vec![0.2, 0.1, 0.05],
            mode: YMode::Poisson,
            quad: QuadOptions {
                abs_tol: 1e-13,
                rel_tol: 1e-11,
                max_intervals: 20_000,
            },
            fp: FpFactor::SignedRoot,
            tol: 1e-4,
        }
    }

    pub fn direct(mut self, cutoff: usize) -> Self {
        self.mode = YMode::Direct {
            cutoffs: vec![cutoff, 2 * cutoff],
        };
        self
    }
}

/// One term of the weight decomposition of the generic holonomies.
#[derive(Debug, Clone)]
pub struct WeightTerm<T: Real> {
    /// Phase from the `Ǎ⊥` integral of the linear source.
    pub coef: Complex<T>,
    /// `B = x·1 - shift` on the kernel line.
    pub shift: Vec<T>,
    /// Linear dependence of the holonomy phase on the vertex values.
    pub jx: Vec<T>,
}

/// Everything the outer integrand needs for one link, precomputed.
pub struct OuterIntegrand<'a, T: Real> {
    fs: &'a FieldSpaces<T>,
    link: &'a RibbonLink,
    level: &'a LevelData<T>,
    k: u32,
    fp: FpFactor,
    terms: Vec<WeightTerm<T>>,
    /// `log|Z|` at the reference point, divided out of every value.
    pub log_scale: T,
    /// `(2π)^r / Π σ` of the `(A⊥_c, B)` block.
    pub prefactor: T,
    pub vanished_terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterResult {
    /// Value divided by `exp(log_scale)` and by the block prefactor.
    pub value: [f64; 2],
    pub log_scale: f64,
    pub prefactor: f64,
    /// Value at each `s` of the schedule.
    pub per_s: Vec<(f64, [f64; 2])>,
    /// Direct mode: value at each cutoff (last `s`).
    pub per_cutoff: Vec<(usize, [f64; 2])>,
    pub quad_error: f64,
    pub weight_terms: usize,
    pub vanished_terms: usize,
}

/// `D_c(y) = Σ_{|n|≤c} e^{iny} = sin((c+½)y)/sin(y/2)`.
pub fn dirichlet<T: Real>(c: usize, y: T) -> T {
    let h = y / lit(2.0);
    let sh = h.sin();
    let m: T = lit(2.0 * c as f64 + 1.0);
    if sh.abs() < lit(1e-7) {
        // near y ∈ 2πZ use the sum itself
        let mut d = T::one();
        for n in 1..=c {
            d += lit::<T>(2.0) * (lit::<T>(n as f64) * y).cos();
        }
        return d;
    }
    (m * h).sin() / sh
}

fn c2<T: Real>(z: Complex<T>) -> [f64; 2] {
    [to_f64(z.re), to_f64(z.im)]
}

impl<'a, T: Real> OuterIntegrand<'a, T> {
    pub fn new(fs: &'a FieldSpaces<T>, link: &'a RibbonLink, level: &'a LevelData<T>, fp: FpFactor) -> Result<Self, CsError> {
        if link.n != fs.n {
            return Err(CsError::MismatchedN {
                link: link.n,
                spaces: fs.n,
            });
        }
        for &c in &link.colors {
            level.fusion(c, 0, c)?;
        }
        let k = level.k;
        let c = fs.coupling(k);
        let red = offdiag_block_reduce(&c);
        if red.kernel_dim() != 1 {
            return Err(CsError::Unsupported(format!(
                "ker C inside the B-space has dimension {}; only a line is handled",
                red.kernel_dim()
            )));
        }
        let dir = fs.b_from_coords(&red.kernel.column(0).into_owned());
        let mean = dir.iter().fold(T::zero(), |a, &b| a + b) / lit(dir.len() as f64);
        if dir.iter().any(|&d| (d - mean).abs() > lit::<T>(1e-8) * mean.abs()) {
            return Err(CsError::Unsupported("ker C inside the B-space is not the constant line".into()));
        }
        let refx = vec![T::pi() / lit(2.0); fs.n_vertices()];
        let log_scale = fs.inner_gaussian(&refx, k)?.log_abs;
        let (terms, vanished) = weight_terms(fs, link, level, &c, &refx)?;
        Ok(OuterIntegrand {
            fs,
            link,
            level,
            k,
            fp,
            terms,
            log_scale,
            prefactor: red.prefactor,
            vanished_terms: vanished,
        })
    }

    /// `f_s` at the point `B = x·1` of the kernel line (without the y-sum),
    /// summed over weight terms. Each term returns its own `B(σ₀)` offset.
    fn term_value(&self, term: &WeightTerm<T>, x: T, s: T) -> Result<Complex<T>, CsError> {
        let fs = self.fs;
        let b: Vec<T> = term.shift.iter().map(|&d| x - d).collect();
        let mut moll = T::one();
        for &v in &b {
            moll *= fs.lie.mollifier(s, &[v])?;
            if moll == T::zero() {
                return Ok(Complex::new(T::zero(), T::zero()));
            }
        }
        let fp = fs.det_fp(&b, self.fp);
        let z = fs.inner_gaussian(&b, self.k)?;
        let zval = polar((z.log_abs - self.log_scale).exp(), T::pi() * lit(z.signature as f64) / lit(4.0));
        let phase = term.jx.iter().zip(&b).fold(T::zero(), |a, (&j, &v)| a + j * v);
        let mut val = term.coef * zval * polar(moll * fp, phase);
        for (i, p) in self.link.projections.iter().enumerate() {
            if let RibbonClass::Vertical { .. } = p.class {
                val *= fs.ribbon_trace(&self.link.ribbons[i], self.link.colors[i], self.level, &[], &b)?;
            }
        }
        Ok(val)
    }

    pub fn terms(&self) -> &[WeightTerm<T>] {
        &self.terms
    }

    /// Poisson-resummed value `(1/2k) Σ_j f(B(σ₀) = πj/k)` at width `s`.
    pub fn poisson(&self, s: T) -> Result<Complex<T>, CsError> {
        let k2 = 2 * self.k as usize;
        let mut acc = Complex::new(T::zero(), T::zero());
        for term in &self.terms {
            let off = term.shift[self.fs.sigma0];
            for j in 0..k2 {
                let x = T::pi() * lit(j as f64) / lit(self.k as f64) + off;
                acc += self.term_value(term, x, s)?;
            }
        }
        Ok(acc / lit::<T>(k2 as f64))
    }

    /// Truncated direct sums `Σ_{|n|≤c} mean_x[f(x) e^{-2ikn(x - off)}]`
    /// for each cutoff, with the quadrature error estimate.
    pub fn direct(&self, s: T, cutoffs: &[usize], quad: QuadOptions) -> Result<(Vec<Complex<T>>, f64), CsError> {
        let two_pi = lit::<T>(2.0) * T::pi();
        let kk: T = lit(self.k as f64);
        let nc = cutoffs.len();
        let mut total = vec![Complex::new(T::zero(), T::zero()); nc];
        let mut err = 0.0;
        for term in &self.terms {
            let off = term.shift[self.fs.sigma0];
            let failed = std::sync::atomic::AtomicBool::new(false);
            let integrand = |x: T| -> Vec<Complex<T>> {
                let f = match self.term_value(term, x, s) {
                    Ok(v) => v,
                    Err(_) => {
                        failed.store(true, std::sync::atomic::Ordering::Relaxed);
                        Complex::new(T::zero(), T::zero())
                    }
                };
                if f == Complex::new(T::zero(), T::zero()) {
                    return vec![f; nc];
                }
                let y = lit::<T>(2.0) * kk * (x - off);
                cutoffs.iter().map(|&c| f * dirichlet(c, y)).collect()
            };
            // split at the nodes so that the kernel peaks sit on endpoints
            let pieces = 2 * self.k as usize;
            let mut parts = Vec::with_capacity(pieces);
            for p in 0..pieces {
                let a = off + T::pi() * lit(p as f64) / kk;
                let b = off + T::pi() * lit((p + 1) as f64) / kk;
                parts.push((a, b));
            }
            let results: Vec<Result<(Vec<Complex<T>>, f64), QuadError>> = parts
                .par_iter()
                .map(|&(a, b)| integrate_vec(&integrand, a, b, quad))
                .collect();
            if failed.load(std::sync::atomic::Ordering::Relaxed) {
                return Err(CsError::Degenerate("integrand failed inside the mollifier support".into()));
            }
            for r in results {
                let (v, e) = r?;
                for i in 0..nc {
                    total[i] += v[i] / two_pi;
                }
                err += e / to_f64(two_pi);
            }
        }
        Ok((total, err))
    }

    /// Samples `(x, Re f, Im f)` of the summed integrand along the kernel
    /// line, for CSV output.
    pub fn samples(&self, s: T, count: usize) -> Result<Vec<[f64; 3]>, CsError> {
        (0..count)
            .map(|i| {
                let x = lit::<T>(2.0) * T::pi() * lit(i as f64) / lit(count as f64);
                let mut v = Complex::new(T::zero(), T::zero());
                for term in &self.terms {
                    v += self.term_value(term, x, s)?;
                }
                Ok([to_f64(x), to_f64(v.re), to_f64(v.im)])
            })
            .collect()
    }

    /// Outer integral with the s-extrapolation.
    pub fn evaluate(&self, opts: &WloOptions) -> Result<OuterResult, CsError> {
        let svals: Vec<T> = opts.s_schedule.iter().map(|&s| lit(s)).collect();
        let s_max = opts.s_schedule.iter().cloned().fold(0.0, f64::max);
        let runs: Vec<Result<(Complex<T>, Vec<(usize, [f64; 2])>, f64), CsError>> = svals
            .par_iter()
            .map(|&s| match &opts.mode {
                YMode::Poisson => Ok((self.poisson(s)?, Vec::new(), 0.0)),
                YMode::Direct { cutoffs } => {
                    let cutoffs = scaled_cutoffs(cutoffs, s_max, to_f64(s));
                    let (vals, err) = self.direct(s, &cutoffs, opts.quad)?;
                    let v = *vals.last().ok_or_else(|| CsError::Unsupported("no cutoff given".into()))?;
                    Ok((v, cutoffs.iter().zip(&vals).map(|(&c, &v)| (c, c2(v))).collect(), err))
                }
            })
            .collect();
        let mut per_s = Vec::new();
        let mut per_cutoff = Vec::new();
        let mut quad_error = 0.0f64;
        let mut values = Vec::new();
        for (&s, run) in svals.iter().zip(runs) {
            let (v, pc, err) = run?;
            quad_error = quad_error.max(err);
            // reported for the smallest s, the last one of the schedule
            per_cutoff = pc;
            per_s.push((to_f64(s), c2(v)));
            values.push(v);
        }
        let value = if values.len() == 1 { values[0] } else { neville(&svals, &values, T::zero())? };
        Ok(OuterResult {
            value: c2(value),
            log_scale: to_f64(self.log_scale),
            prefactor: to_f64(self.prefactor),
            per_s,
            per_cutoff,
            quad_error,
            weight_terms: self.terms.len(),
            vanished_terms: self.vanished_terms,
        })
    }
}

/// Cutoffs for width `s`, given the ones for `s_max`. The Fourier tail of
/// the mollified integrand lives at frequencies `∝ 1/s`.
pub fn scaled_cutoffs(cutoffs: &[usize], s_max: f64, s: f64) -> Vec<usize> {
    cutoffs
        .iter()
        .map(|&c| (c as f64 * s_max / s).ceil() as usize)
        .collect()
}

/// Weight decomposition of the generic ribbons' holonomies with the
/// `𝔨`-components of `A` dropped: every exponent is `𝔱`-valued, so
/// `Tr_μ exp(Φτ) = Σ_w e^{iwΦ}` and `Φ` is linear in `(Ǎ_τ, A_c, B)`.
fn weight_terms<T: Real>(
    fs: &FieldSpaces<T>,
    link: &RibbonLink,
    level: &LevelData<T>,
    c: &DMatrix<T>,
    refx: &[T],
) -> Result<(Vec<WeightTerm<T>>, usize), CsError> {
    let e2 = 2 * fs.n_edges();
    let n = fs.n;
    let nv = fs.n_vertices();
    let generic: Vec<usize> = (0..link.len())
        .filter(|&i| link.projections[i].class == RibbonClass::Generic)
        .collect();
    let zero = WeightTerm {
        coef: Complex::new(T::one(), T::zero()),
        shift: vec![T::zero(); nv],
        jx: vec![T::zero(); nv],
    };
    if generic.is_empty() {
        return Ok((vec![zero], 0));
    }
    // per generic ribbon: unit-weight sources on (A_τ(i,t)) and x
    let half = lit::<T>(0.5);
    let mut sources: Vec<(Vec<T>, Vec<T>)> = Vec::new();
    for &r in &generic {
        let rib = &link.ribbons[r];
        let mut ja = vec![T::zero(); e2 * n];
        let mut jx = vec![T::zero(); nv];
        for lp in [&rib.l, &rib.l_prime] {
            for (&s, &v) in lp.steps.iter().zip(&lp.starts) {
                let (qv, t) = vertex_split(&fs.pc, v);
                if let Step::Edge { edge, sign } = sigma_step(&fs.pc, s) {
                    let (side, e, _) = fs.jc.edge_parent(edge);
                    let i = side as usize * fs.n_edges() + e;
                    ja[i * n + t] += half * lit(sign as f64);
                }
                if let Step::Edge { sign, .. } = s1_step(&fs.pc, s) {
                    jx[qv] += half * lit::<T>(sign as f64) / lit(n as f64);
                }
            }
        }
        sources.push((ja, jx));
    }
    // τ-sector of M̌ is independent of B; invert it once
    let dc = fs.dc();
    let mut tau_idx = Vec::new();
    for i in 0..e2 {
        for m in 0..n - 1 {
            tau_idx.push(i * dc + m);
        }
    }
    let mut m_tau = DMatrix::zeros(tau_idx.len(), tau_idx.len());
    for i in 0..fs.n_edges() {
        let blk = fs.pair_block(i, refx[fs.midpoint(i)], level.k);
        let (j, _) = fs.star_of(i);
        let map = |loc: usize| -> Option<usize> {
            let (edge, off) = if loc < dc { (i, loc) } else { (j, loc - dc) };
            (off < n - 1).then(|| edge * (n - 1) + off)
        };
        for a in 0..2 * dc {
            for b in 0..2 * dc {
                match (map(a), map(b)) {
                    (Some(p), Some(q)) => m_tau[(p, q)] = blk[(a, b)],
                    (None, None) => {}
                    _ => {
                        if blk[(a, b)].abs() > lit::<T>(1e-12) {
                            return Err(CsError::Degenerate("τ and 𝔨 sectors of M̌ couple".into()));
                        }
                    }
                }
            }
        }
    }
    let m_inv = if tau_idx.is_empty() {
        m_tau.clone()
    } else {
        m_tau
            .clone()
            .try_inverse()
            .ok_or_else(|| CsError::Degenerate("τ sector of M̌ is singular".into()))?
    };
    let g = fs.g();
    let nn: T = lit(n as f64);
    let u_scale = (lit::<T>(2.0) * g / nn).sqrt();
    let c_scale = (lit::<T>(2.0) * g).sqrt();
    let h = helmert::<T>(n);
    let svd = SVD::new(c.clone(), true, true);
    let mut terms = Vec::new();
    let mut vanished = 0;
    let weights: Vec<Vec<i64>> = generic
        .iter()
        .map(|&r| {
            let mu = link.colors[r] as i64;
            (0..=mu).map(|j| mu - 2 * j).collect()
        })
        .collect();
    let mut idx = vec![0usize; generic.len()];
    loop {
        let mut ja = vec![T::zero(); e2 * n];
        let mut jx = vec![T::zero(); nv];
        for (gi, &wi) in idx.iter().enumerate() {
            let w: T = lit(weights[gi][wi] as f64);
            for (a, &b) in ja.iter_mut().zip(&sources[gi].0) {
                *a += w * b;
            }
            for (a, &b) in jx.iter_mut().zip(&sources[gi].1) {
                *a += w * b;
            }
        }
        let mut ju = DVector::zeros(tau_idx.len());
        let mut jc = DVector::zeros(e2);
        for i in 0..e2 {
            for (m, hv) in h.iter().enumerate() {
                ju[i * (n - 1) + m] = (0..n).fold(T::zero(), |s, t| s + hv[t] * ja[i * n + t]) / u_scale;
            }
            jc[i] = (0..n).fold(T::zero(), |s, t| s + ja[i * n + t]) / c_scale;
        }
        let quad = ju.dot(&(&m_inv * &ju));
        let coef = polar(T::one(), -quad / lit(4.0));
        let wj = svd
            .solve(&jc, lit(1e-10))
            .map_err(|e| CsError::Degenerate(format!("source solve: {e}")))?;
        let resid = (c * &wj - &jc).norm();
        if resid > lit::<T>(1e-9) * (T::one() + jc.norm()) {
            vanished += 1;
        } else {
            let shift = fs.b_from_coords(&wj);
            terms.push(WeightTerm { coef, shift, jx });
        }
        // next multi-index
        let mut p = 0;
        loop {
            if p == idx.len() {
                return Ok((terms, vanished));
            }
            idx[p] += 1;
            if idx[p] < weights[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WloReport {
    pub k: u32,
    pub n: usize,
    pub mode: YMode,
    pub numerator: OuterResult,
    pub denominator: OuterResult,
    pub ratio: [f64; 2],
    /// Poisson cross-check of the ratio when the direct mode was used.
    pub poisson_ratio: Option<[f64; 2]>,
    pub mode_difference: Option<f64>,
}

/// `WLO_rig(L) = WLO^disc_rig(L) / WLO^disc_rig(∅)` with the same complex,
/// `N`, `k` and `σ₀`.
pub fn wlo_rig<T: Real>(
    fs: &FieldSpaces<T>,
    link: &RibbonLink,
    level: &LevelData<T>,
    opts: &WloOptions,
) -> Result<WloReport, CsError> {
    if level.k != opts.k {
        return Err(CsError::Unsupported(format!(
            "level data has k = {} but the options ask for k = {}",
            level.k, opts.k
        )));
    }
    if link.sigma0 != fs.sigma0 {
        return Err(CsError::Unsupported("link and field spaces use different σ₀".into()));
    }
    let fp = opts.fp;
    let empty = RibbonLink::empty(&fs.pc, fs.sigma0);
    let num_i = OuterIntegrand::new(fs, link, level, fp)?;
    let den_i = OuterIntegrand::new(fs, &empty, level, fp)?;
    let (num, den) = rayon::join(|| num_i.evaluate(opts), || den_i.evaluate(opts));
    let (num, den) = (num?, den?);
    let ratio = cdiv(num.value, den.value)?;
    let (poisson_ratio, mode_difference) = match opts.mode {
        YMode::Poisson => (None, None),
        YMode::Direct { .. } => {
            let popts = WloOptions {
                mode: YMode::Poisson,
                ..opts.clone()
            };
            let pn = num_i.evaluate(&popts)?;
            let pd = den_i.evaluate(&popts)?;
            let pr = cdiv(pn.value, pd.value)?;
            let diff = ((ratio[0] - pr[0]).powi(2) + (ratio[1] - pr[1]).powi(2)).sqrt();
            let scale = 1.0 + (pr[0].powi(2) + pr[1].powi(2)).sqrt();
            if diff > opts.tol * scale {
                return Err(CsError::Cutoff {
                    direct: format!("{:?}", ratio),
                    poisson: format!("{:?}", pr),
                    diff,
                });
            }
            if num.per_cutoff.len() >= 2 {
                let a = num.per_cutoff[num.per_cutoff.len() - 2].1;
                let b = num.per_cutoff[num.per_cutoff.len() - 1].1;
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                let sc = (b[0].powi(2) + b[1].powi(2)).sqrt().max(f64::MIN_POSITIVE);
                if d > opts.tol * sc {
                    return Err(CsError::Cutoff {
                        direct: format!("{a:?}"),
                        poisson: format!("{b:?}"),
                        diff: d,
                    });
                }
            }
            (Some(pr), Some(diff))
        }
    };
    Ok(WloReport {
        k: opts.k,
        n: fs.n,
        mode: opts.mode.clone(),
        numerator: num,
        denominator: den,
        ratio,
        poisson_ratio,
        mode_difference,
    })
}

fn cdiv(a: [f64; 2], b: [f64; 2]) -> Result<[f64; 2], CsError> {
    let d = b[0] * b[0] + b[1] * b[1];
    if d.sqrt() < 1e-12 {
        return Err(CsError::Denominator(d.sqrt()));
    }
    Ok([(a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d])
}
