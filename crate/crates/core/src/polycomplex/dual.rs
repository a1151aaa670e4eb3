//! Dual pairs `(K1, K2)` and the joined complex `qK`.
//!
//! Sign convention (the one place it is fixed): the dual edge of a primal
//! edge `e` runs from the face on the right of `e` to the face on the left,
//! so `(e, dual e)` is a positive frame of the surface. Dual faces are walked
//! counterclockwise around their primal vertex. The Hodge star sends a cell
//! to its partner with sign +1 exactly when the partner's stored orientation
//! agrees with this induced one; see [`DualPairing::star_sign`].

use std::collections::HashMap;

use super::{ComplexError, Incidence, PolyComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    K1,
    K2,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::K1 => Side::K2,
            Side::K2 => Side::K1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualPairing {
    pub base: PolyComplex,
    pub dual: PolyComplex,
    /// `forward[p][f]`: the K2 (2-p)-face paired with the K1 p-face f.
    forward: [Vec<usize>; 3],
    /// `backward[p][f]`: the K1 (2-p)-face paired with the K2 p-face f.
    backward: [Vec<usize>; 3],
    left_right: [Vec<(usize, usize)>; 2],
}

impl DualPairing {
    /// Combinatorial canonical dual: one dual vertex per face (placed at the
    /// barycenter when geometry is present), one dual edge per edge, one dual
    /// face per vertex.
    pub fn canonical(k1: PolyComplex) -> Result<Self, ComplexError> {
        if !k1.is_closed_surface() {
            return Err(ComplexError::NotSurface("canonical dual needs a closed surface".into()));
        }
        let (nv, ne, nf) = (k1.count(0), k1.count(1), k1.count(2));
        let mut lr1 = Vec::with_capacity(ne);
        let mut inc1 = Vec::with_capacity(ne);
        for e in 0..ne {
            let (l, r) = k1.left_right(e)?;
            if l == r {
                return Err(ComplexError::NotSurface(format!("edge {e} has the same face on both sides")));
            }
            lr1.push((l, r));
            inc1.push(vec![(r, -1i8), (l, 1i8)]);
        }
        let mut inc2: Vec<Vec<Incidence>> = vec![Vec::new(); nv];
        for e in 0..ne {
            let (a, b) = k1.endpoints(e);
            if a == b {
                return Err(ComplexError::NotSurface(format!("edge {e} is a loop")));
            }
            inc2[a].push((e, 1));
            inc2[b].push((e, -1));
        }
        let geometry = k1.geometry().map(|g| {
            (0..nf)
                .map(|f| {
                    let vs = k1.face_vertices(f);
                    let n = vs.len() as f64;
                    vs.iter().fold([0.0; 3], |acc, &v| {
                        [acc[0] + g[v][0] / n, acc[1] + g[v][1] / n, acc[2] + g[v][2] / n]
                    })
                })
                .collect()
        });
        let dual = PolyComplex::from_parts(
            2,
            vec![nf, ne, nv],
            vec![vec![Vec::new(); nf], inc1, inc2],
            None,
            geometry,
            true,
        )?;
        let id = |n: usize| (0..n).collect::<Vec<_>>();
        let mut lr2 = Vec::with_capacity(ne);
        for e in 0..ne {
            lr2.push(dual.left_right(e)?);
        }
        Ok(DualPairing {
            base: k1,
            dual,
            forward: [id(nv), id(ne), id(nf)],
            backward: [id(nf), id(ne), id(nv)],
            left_right: [lr1, lr2],
        })
    }

    pub fn complex(&self, side: Side) -> &PolyComplex {
        match side {
            Side::K1 => &self.base,
            Side::K2 => &self.dual,
        }
    }

    /// The (2-p)-face of the other complex paired with the p-face f.
    pub fn partner(&self, side: Side, p: usize, f: usize) -> usize {
        match side {
            Side::K1 => self.forward[p][f],
            Side::K2 => self.backward[p][f],
        }
    }

    /// `(left, right)` faces of edge e in the complex `side`.
    pub fn left_right(&self, side: Side, e: usize) -> (usize, usize) {
        self.left_right[side as usize][e]
    }

    /// Sign s with `star(f) = s * partner(f)`.
    pub fn star_sign(&self, side: Side, p: usize, f: usize) -> i8 {
        let other = self.complex(side.other());
        match p {
            0 => other.token(2, self.partner(side, 0, f)),
            2 => self.complex(side).token(2, f),
            1 => {
                let (_, right) = self.left_right(side, f);
                let d = self.partner(side, 1, f);
                let (a, _) = other.endpoints(d);
                if self.partner(side.other(), 0, a) == right {
                    1
                } else {
                    -1
                }
            }
            _ => panic!("Hodge star on a surface pairs degrees 0..=2"),
        }
    }

    /// Joined complex built from this pairing.
    pub fn joined(self) -> Result<JoinedComplex, ComplexError> {
        JoinedComplex::new(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QkVertex {
    /// vertex of K1
    Primal(usize),
    /// midpoint of the K1 edge
    Mid(usize),
    /// vertex of K2
    Dual(usize),
}

/// `qK`: vertices are K1 vertices, edge midpoints and K2 vertices; every
/// 2-face is the tetragon `(v, mid e_b, F, mid e_a)` at a corner `(v, F)`.
#[derive(Debug, Clone)]
pub struct JoinedComplex {
    pub pair: DualPairing,
    pub qk: PolyComplex,
    corners: Vec<(usize, usize)>,
}

impl JoinedComplex {
    pub fn new(pair: DualPairing) -> Result<Self, ComplexError> {
        let k1 = &pair.base;
        let k2 = &pair.dual;
        let (nv, ne, nf) = (k1.count(0), k1.count(1), k1.count(2));
        let nvq = nv + ne + nf;
        let mut edges: Vec<Vec<Incidence>> = Vec::with_capacity(4 * ne);
        let mut lookup: HashMap<(usize, usize), (usize, i8)> = HashMap::new();
        let mid = |e: usize| nv + e;
        for (side, cx) in [(Side::K1, k1), (Side::K2, k2)] {
            for e in 0..ne {
                let (a, b) = cx.endpoints(e);
                let (a, b) = match side {
                    Side::K1 => (a, b),
                    Side::K2 => (nv + ne + a, nv + ne + b),
                };
                let m = mid(match side {
                    Side::K1 => e,
                    Side::K2 => pair.partner(Side::K2, 1, e),
                });
                for (s, t) in [(a, m), (m, b)] {
                    let idx = edges.len();
                    edges.push(vec![(s, -1), (t, 1)]);
                    lookup.insert((s, t), (idx, 1));
                    lookup.insert((t, s), (idx, -1));
                }
            }
        }
        let mut faces = Vec::new();
        let mut corners = Vec::new();
        for f in 0..nf {
            let walk = k1.ccw_boundary(f);
            let n = walk.len();
            let fv = nv + ne + pair.partner(Side::K1, 2, f);
            for i in 0..n {
                let (ea, sa) = walk[i];
                let (eb, _) = walk[(i + 1) % n];
                let (s, d) = k1.endpoints(ea);
                let v = if sa > 0 { d } else { s };
                let cyc = [v, mid(eb), fv, mid(ea)];
                let mut bd = Vec::with_capacity(4);
                for j in 0..4 {
                    let key = (cyc[j], cyc[(j + 1) % 4]);
                    let &(idx, sgn) = lookup.get(&key).ok_or_else(|| {
                        ComplexError::NotSurface(format!("corner ({v}, {f}) has no half-edge {key:?}"))
                    })?;
                    bd.push((idx, sgn));
                }
                faces.push(bd);
                corners.push((v, f));
            }
        }
        let geometry = match (k1.geometry(), k2.geometry()) {
            (Some(g1), Some(g2)) => {
                let mut g = g1.to_vec();
                for e in 0..ne {
                    let (a, b) = k1.endpoints(e);
                    g.push([
                        (g1[a][0] + g1[b][0]) / 2.0,
                        (g1[a][1] + g1[b][1]) / 2.0,
                        (g1[a][2] + g1[b][2]) / 2.0,
                    ]);
                }
                g.extend_from_slice(g2);
                Some(g)
            }
            _ => None,
        };
        let qk = PolyComplex::from_parts(
            2,
            vec![nvq, edges.len(), faces.len()],
            vec![vec![Vec::new(); nvq], edges, faces],
            None,
            geometry,
            true,
        )?;
        Ok(JoinedComplex { pair, qk, corners })
    }

    /// Canonical dual and joined complex of a closed surface in one step.
    pub fn from_base(k1: PolyComplex) -> Result<Self, ComplexError> {
        DualPairing::canonical(k1)?.joined()
    }

    pub fn n_edges(&self) -> usize {
        self.pair.base.count(1)
    }

    pub fn vertex_index(&self, v: QkVertex) -> usize {
        let (nv, ne) = (self.pair.base.count(0), self.pair.base.count(1));
        match v {
            QkVertex::Primal(i) => i,
            QkVertex::Mid(e) => nv + e,
            QkVertex::Dual(f) => nv + ne + f,
        }
    }

    pub fn vertex_kind(&self, i: usize) -> QkVertex {
        let (nv, ne) = (self.pair.base.count(0), self.pair.base.count(1));
        if i < nv {
            QkVertex::Primal(i)
        } else if i < nv + ne {
            QkVertex::Mid(i - nv)
        } else {
            QkVertex::Dual(i - nv - ne)
        }
    }

    /// The two qK half-edges of edge e of K1 or K2, from start to end.
    pub fn half_edges(&self, side: Side, e: usize) -> [usize; 2] {
        let base = match side {
            Side::K1 => 0,
            Side::K2 => 2 * self.n_edges(),
        };
        [base + 2 * e, base + 2 * e + 1]
    }

    /// `(side, parent edge, half)` of a qK edge.
    pub fn edge_parent(&self, q: usize) -> (Side, usize, usize) {
        let ne = self.n_edges();
        if q < 2 * ne {
            (Side::K1, q / 2, q % 2)
        } else {
            (Side::K2, (q - 2 * ne) / 2, q % 2)
        }
    }

    /// Midpoint index `e` (a K1 edge) used by the K1 or K2 edge.
    pub fn midpoint_of(&self, side: Side, e: usize) -> usize {
        match side {
            Side::K1 => e,
            Side::K2 => self.pair.partner(Side::K2, 1, e),
        }
    }

    /// `(K1 vertex, K1 face)` of a qK tetragon.
    pub fn corner(&self, f: usize) -> (usize, usize) {
        self.corners[f]
    }

    /// Vertex cycle `[p1, p2, p4, p3]` of a tetragon with diagonals
    /// `{p1, p4}` (K1 vertex, K2 vertex) and `{p2, p3}` (midpoints).
    pub fn tetragon(&self, f: usize) -> [usize; 4] {
        let vs = self.qk.face_vertices(f);
        let start = vs
            .iter()
            .position(|&v| matches!(self.vertex_kind(v), QkVertex::Primal(_)))
            .expect("tetragon has a primal vertex");
        [vs[start], vs[(start + 1) % 4], vs[(start + 2) % 4], vs[(start + 3) % 4]]
    }
}

#[cfg(test)]
mod tests {
    use super::super::builtin;
    use super::*;

    #[test]
    fn tetrahedron_counts() {
        let jc = JoinedComplex::from_base(builtin::tetrahedron()).unwrap();
        assert_eq!(jc.pair.dual.counts(), &[4, 6, 4]);
        assert_eq!(jc.qk.counts(), &[14, 24, 12]);
        assert_eq!(jc.qk.euler_characteristic(), 2);
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let jc = JoinedComplex::from_base(builtin::cube()).unwrap();
        assert_eq!(jc.pair.dual.counts(), &[6, 12, 8]);
        assert!((0..8).all(|f| jc.pair.dual.boundary(2, f).len() == 3));
        assert_eq!(jc.qk.count(0), 26);
        assert_eq!(jc.qk.euler_characteristic(), 2);
    }

    #[test]
    fn tetragon_diagonals() {
        let jc = JoinedComplex::from_base(builtin::cube()).unwrap();
        for f in 0..jc.qk.count(2) {
            let [p1, p2, p4, p3] = jc.tetragon(f);
            assert!(matches!(jc.vertex_kind(p1), QkVertex::Primal(_)));
            assert!(matches!(jc.vertex_kind(p4), QkVertex::Dual(_)));
            assert!(matches!(jc.vertex_kind(p2), QkVertex::Mid(_)));
            assert!(matches!(jc.vertex_kind(p3), QkVertex::Mid(_)));
        }
    }

    #[test]
    fn star_signs_square_to_minus_one_on_edges() {
        let pair = DualPairing::canonical(builtin::icosahedron()).unwrap();
        for e in 0..pair.base.count(1) {
            let d = pair.partner(Side::K1, 1, e);
            assert_eq!(pair.star_sign(Side::K1, 1, e) * pair.star_sign(Side::K2, 1, d), -1);
        }
    }
}
