//! Products `P x Z_N` with the cyclic complex.
//!
//! Index layout in dimension p: first the cells `f x v_t` for p-faces f of
//! P (index `f*N + t`), then the cells `g x e_t` for (p-1)-faces g of P
//! (index `count_p(P)*N + g*N + t`). The edge `e_t` of Z_N runs from `v_t`
//! to `v_{t+1}`, the direction of `dt`.

use super::{ComplexError, Incidence, PolyComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductCell {
    /// dimension of the P-factor
    pub base_dim: usize,
    /// face of P
    pub base: usize,
    /// 0 for a vertex of Z_N, 1 for an edge
    pub zn_dim: usize,
    pub t: usize,
}

#[derive(Debug, Clone)]
pub struct ProductComplex {
    pub complex: PolyComplex,
    base_counts: Vec<usize>,
    n: usize,
}

impl ProductComplex {
    pub fn new(p: &PolyComplex, n: usize) -> Result<Self, ComplexError> {
        if n == 0 {
            return Err(ComplexError::ZeroN);
        }
        let d = p.dim() + 1;
        let bc: Vec<usize> = (0..=p.dim()).map(|q| p.count(q)).collect();
        let cnt = |q: usize| bc.get(q).copied().unwrap_or(0);
        let counts: Vec<usize> = (0..=d)
            .map(|q| cnt(q) * n + if q > 0 { cnt(q - 1) * n } else { 0 })
            .collect();
        let hor = |f: usize, t: usize| f * n + (t % n);
        let ver = |q: usize, g: usize, t: usize| cnt(q) * n + g * n + (t % n);
        let mut incidence: Vec<Vec<Vec<Incidence>>> = vec![vec![Vec::new(); counts[0]]];
        for q in 1..=d {
            let mut level = Vec::with_capacity(counts[q]);
            for f in 0..cnt(q) {
                for t in 0..n {
                    level.push(
                        p.boundary(q, f)
                            .iter()
                            .map(|&(g, s)| (hor(g, t), s))
                            .collect(),
                    );
                }
            }
            for g in 0..cnt(q - 1) {
                for t in 0..n {
                    // d(g x e) = dg x e + (-1)^{dim g} g x de
                    let sign: i8 = if (q - 1) % 2 == 0 { 1 } else { -1 };
                    let mut bd: Vec<Incidence> = if q >= 2 {
                        p.boundary(q - 1, g)
                            .iter()
                            .map(|&(h, s)| (ver(q - 1, h, t), s))
                            .collect()
                    } else {
                        Vec::new()
                    };
                    let top = (hor(g, t + 1), sign);
                    let bottom = (hor(g, t), -sign);
                    if q == 2 {
                        // keep the walk order bottom, right side, top, left side
                        let (a, b) = (bd[0], bd[1]);
                        let (src_side, dst_side) = if a.1 < 0 { (a, b) } else { (b, a) };
                        bd = vec![
                            (hor(g, t), 1),
                            (dst_side.0, 1),
                            (hor(g, t + 1), -1),
                            (src_side.0, -1),
                        ];
                    } else {
                        bd.push(bottom);
                        bd.push(top);
                    }
                    level.push(bd);
                }
            }
            incidence.push(level);
        }
        let complex = PolyComplex::from_parts(d, counts, incidence, None, None, false)?;
        Ok(ProductComplex {
            complex,
            base_counts: bc,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn bc(&self, q: usize) -> usize {
        self.base_counts.get(q).copied().unwrap_or(0)
    }

    /// Index of `f x v_t` (same dimension as f).
    pub fn horizontal(&self, f: usize, t: usize) -> usize {
        f * self.n + (t % self.n)
    }

    /// Index of `g x e_t` (a (p+1)-cell with g a p-face of the base).
    pub fn vertical(&self, p: usize, g: usize, t: usize) -> usize {
        self.bc(p + 1) * self.n + g * self.n + (t % self.n)
    }

    pub fn decompose(&self, p: usize, idx: usize) -> ProductCell {
        let h = self.bc(p) * self.n;
        if idx < h {
            ProductCell {
                base_dim: p,
                base: idx / self.n,
                zn_dim: 0,
                t: idx % self.n,
            }
        } else {
            let r = idx - h;
            ProductCell {
                base_dim: p - 1,
                base: r / self.n,
                zn_dim: 1,
                t: r % self.n,
            }
        }
    }
}

/// Cyclic complex Z_N alone (the product of a point with Z_N).
pub fn zn(n: usize) -> Result<ProductComplex, ComplexError> {
    let point = PolyComplex::from_parts(0, vec![1], vec![vec![Vec::new()]], None, None, false)?;
    ProductComplex::new(&point, n)
}

#[cfg(test)]
mod tests {
    use super::super::{builtin, JoinedComplex};
    use super::*;

    #[test]
    fn point_times_z3() {
        let c = zn(3).unwrap();
        assert_eq!(c.complex.counts(), &[3, 3]);
        assert_eq!(c.complex.euler_characteristic(), 0);
        assert_eq!(c.complex.endpoints(c.vertical(0, 0, 2)), (2, 0));
    }

    #[test]
    fn tet_qk_times_z2() {
        let jc = JoinedComplex::from_base(builtin::tetrahedron()).unwrap();
        let pc = ProductComplex::new(&jc.qk, 2).unwrap();
        assert_eq!(pc.complex.count(2), 72);
        assert_eq!(pc.complex.euler_characteristic(), 0);
        for f in 0..pc.complex.count(2) {
            assert_eq!(pc.complex.boundary(2, f).len(), 4);
        }
    }

    #[test]
    fn z1_is_a_loop() {
        let c = zn(1).unwrap();
        assert_eq!(c.complex.counts(), &[1, 1]);
    }
}
