//! Chains and cochains with vector coefficients.
//!
//! A cochain of degree p with coefficients in `V = R^d` is stored densely,
//! indexed by `(face, axis)`. The standard scalar product is the counting
//! measure on faces tensored with the Euclidean product on `V`. Chains and
//! cochains are identified through the basis `δ_α`.

use std::fmt::Debug;
use std::fmt::Write as _;
use std::ops::Neg;

use num_traits::Num;
use thiserror::Error;

use crate::polycomplex::{JoinedComplex, PolyComplex, Side};

/// Coefficient ring for cochains: integers for exact identities, floats for
/// everything numerical.
pub trait Scalar: Num + Copy + Neg<Output = Self> + Debug + PartialEq + Send + Sync + 'static {}

impl<T: Num + Copy + Neg<Output = T> + Debug + PartialEq + Send + Sync + 'static> Scalar for T {}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecError {
    #[error("boundary of a 0-chain")]
    BoundaryOfVertex,
    #[error("coboundary out of range: degree {0} is the top degree")]
    TopDegree(usize),
    #[error("cochain shape does not match the complex: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cochain<T> {
    pub degree: usize,
    pub coeff_dim: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> Cochain<T> {
    pub fn zeros(cx: &PolyComplex, degree: usize, coeff_dim: usize) -> Self {
        Cochain {
            degree,
            coeff_dim,
            values: vec![T::zero(); cx.count(degree) * coeff_dim],
        }
    }

    /// The basis cochain `δ_face ⊗ e_axis`.
    pub fn basis(cx: &PolyComplex, degree: usize, coeff_dim: usize, face: usize, axis: usize) -> Self {
        let mut c = Self::zeros(cx, degree, coeff_dim);
        c.values[face * coeff_dim + axis] = T::one();
        c
    }

    pub fn from_values(degree: usize, coeff_dim: usize, values: Vec<T>) -> Self {
        Cochain {
            degree,
            coeff_dim,
            values,
        }
    }

    pub fn n_faces(&self) -> usize {
        self.values.len() / self.coeff_dim.max(1)
    }

    pub fn at(&self, face: usize) -> &[T] {
        &self.values[face * self.coeff_dim..(face + 1) * self.coeff_dim]
    }

    pub fn at_mut(&mut self, face: usize) -> &mut [T] {
        let d = self.coeff_dim;
        &mut self.values[face * d..(face + 1) * d]
    }

    pub fn check(&self, cx: &PolyComplex) -> Result<(), DecError> {
        if self.values.len() != cx.count(self.degree) * self.coeff_dim {
            return Err(DecError::Shape(format!(
                "{} values for {} {}-faces x {}",
                self.values.len(),
                cx.count(self.degree),
                self.degree,
                self.coeff_dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect();
        Cochain { values, ..*self }
    }

    pub fn scale(&self, s: T) -> Self {
        Cochain {
            values: self.values.iter().map(|&a| a * s).collect(),
            ..*self
        }
    }
}

impl<T> Cochain<T> {
    fn shape_like(&self, degree: usize, n: usize, zero: T) -> Cochain<T>
    where
        T: Clone,
    {
        Cochain {
            degree,
            coeff_dim: self.coeff_dim,
            values: vec![zero; n * self.coeff_dim],
        }
    }
}

fn signed<T: Scalar>(s: i8, x: T) -> T {
    if s < 0 {
        -x
    } else {
        x
    }
}

/// Boundary of a p-chain.
pub fn boundary<T: Scalar>(cx: &PolyComplex, c: &Cochain<T>) -> Result<Cochain<T>, DecError> {
    c.check(cx)?;
    if c.degree == 0 {
        return Err(DecError::BoundaryOfVertex);
    }
    let p = c.degree;
    let d = c.coeff_dim;
    let mut out = c.shape_like(p - 1, cx.count(p - 1), T::zero());
    for f in 0..cx.count(p) {
        for &(g, s) in cx.boundary(p, f) {
            for a in 0..d {
                out.values[g * d + a] = out.values[g * d + a] + signed(s, c.values[f * d + a]);
            }
        }
    }
    Ok(out)
}

/// Coboundary of a p-cochain, the adjoint of [`boundary`].
pub fn coboundary<T: Scalar>(cx: &PolyComplex, c: &Cochain<T>) -> Result<Cochain<T>, DecError> {
    c.check(cx)?;
    let p = c.degree;
    if p >= cx.dim() {
        return Err(DecError::TopDegree(p));
    }
    let d = c.coeff_dim;
    let mut out = c.shape_like(p + 1, cx.count(p + 1), T::zero());
    for f in 0..cx.count(p + 1) {
        for &(g, s) in cx.boundary(p + 1, f) {
            for a in 0..d {
                out.values[f * d + a] = out.values[f * d + a] + signed(s, c.values[g * d + a]);
            }
        }
    }
    Ok(out)
}

/// Standard scalar product.
pub fn inner<T: Scalar>(a: &Cochain<T>, b: &Cochain<T>) -> T {
    assert_eq!(a.values.len(), b.values.len(), "scalar product of mismatched cochains");
    a.values
        .iter()
        .zip(&b.values)
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `ψ`: a 1-cochain on K1 or K2 viewed as a 1-cochain on qK, taking the
/// value on `e` on both half-edges of `e`.
pub fn psi_embed<T: Scalar>(jc: &JoinedComplex, side: Side, a: &Cochain<T>) -> Result<Cochain<T>, DecError> {
    a.check(jc.pair.complex(side))?;
    if a.degree != 1 {
        return Err(DecError::Shape("ψ acts on 1-cochains".into()));
    }
    let d = a.coeff_dim;
    let mut out = Cochain::zeros(&jc.qk, 1, d);
    for e in 0..jc.pair.complex(side).count(1) {
        for h in jc.half_edges(side, e) {
            out.at_mut(h).copy_from_slice(a.at(e));
        }
    }
    Ok(out)
}

/// Hodge star between the two complexes of a dual pair, as a signed
/// permutation: `star(δ_f) = sign * δ_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeStar {
    pub from: Side,
    pub degree: usize,
    pub perm: Vec<(usize, i8)>,
}

impl HodgeStar {
    pub fn new(pair: &crate::polycomplex::DualPairing, from: Side, degree: usize) -> Self {
        let n = pair.complex(from).count(degree);
        let perm = (0..n)
            .map(|f| (pair.partner(from, degree, f), pair.star_sign(from, degree, f)))
            .collect();
        HodgeStar { from, degree, perm }
    }

    pub fn apply<T: Scalar>(&self, a: &Cochain<T>) -> Cochain<T> {
        let d = a.coeff_dim;
        let mut out = Cochain {
            degree: 2 - self.degree,
            coeff_dim: d,
            values: vec![T::zero(); self.perm.len() * d],
        };
        for (f, &(g, s)) in self.perm.iter().enumerate() {
            for x in 0..d {
                out.values[g * d + x] = signed(s, a.values[f * d + x]);
            }
        }
        out
    }

    /// Dense matrix (rows: target faces, columns: source faces).
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.perm.len();
        let mut m = vec![vec![0i64; n]; n];
        for (f, &(g, s)) in self.perm.iter().enumerate() {
            m[g][f] = s as i64;
        }
        m
    }
}

/// Hodge star of a cochain on `from` (K1 or K2).
pub fn hodge_star<T: Scalar>(
    pair: &crate::polycomplex::DualPairing,
    from: Side,
    a: &Cochain<T>,
) -> Result<Cochain<T>, DecError> {
    a.check(pair.complex(from))?;
    Ok(HodgeStar::new(pair, from, a.degree).apply(a))
}

/// CSV dump: one row per face, label then components.
pub fn to_csv<T: Scalar + std::fmt::Display>(cx: &PolyComplex, c: &Cochain<T>) -> String {
    let mut s = String::from("face");
    for a in 0..c.coeff_dim {
        let _ = write!(s, ",c{a}");
    }
    s.push('\n');
    for f in 0..c.n_faces() {
        let _ = write!(s, "{}", cx.label(c.degree, f));
        for x in c.at(f) {
            let _ = write!(s, ",{x}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycomplex::builtin;

    #[test]
    fn boundary_of_an_edge() {
        let cx = builtin::tetrahedron();
        let e = Cochain::<i64>::basis(&cx, 1, 1, 2, 0);
        let b = boundary(&cx, &e).unwrap();
        let (s, d) = cx.endpoints(2);
        let mut want = vec![0i64; 4];
        want[s] = -1;
        want[d] = 1;
        assert_eq!(b.values, want);
    }

    #[test]
    fn constant_has_zero_coboundary() {
        let cx = builtin::cube();
        let c = Cochain::from_values(0, 2, vec![3i64; 16]);
        assert!(coboundary(&cx, &c).unwrap().values.iter().all(|&x| x == 0));
    }

    #[test]
    fn degree_errors() {
        let cx = builtin::cube();
        assert_eq!(
            boundary(&cx, &Cochain::<i64>::zeros(&cx, 0, 1)),
            Err(DecError::BoundaryOfVertex)
        );
        assert_eq!(coboundary(&cx, &Cochain::<i64>::zeros(&cx, 2, 1)), Err(DecError::TopDegree(2)));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cx = builtin::tetrahedron();
        let c = Cochain::from_values(0, 1, vec![1.5f64, 0.0, -2.0, 4.0]);
        let s = to_csv(&cx, &c);
        assert_eq!(s.lines().count(), 5);
        assert!(s.starts_with("face,c0\n0,1.5"));
    }
}
