//! Finite oriented polyhedral cell complexes.
//!
//! Cells are stored combinatorially: for every p-face the list of its
//! (p-1)-faces with incidence signs. For 2-faces the list is kept in cyclic
//! order so that the boundary can be walked as a closed polygon. Orientation
//! of edges is the direction `src -> dst`; orientation of a 2-face is the
//! direction of its boundary walk, and the token records whether that walk is
//! counterclockwise (+1) or clockwise (-1) with respect to the surface
//! orientation.
//!
//! Duals and the joined complex `qK` live in [`crate::polycomplex::dual`];
//! products with the cyclic complex `Z_N` live in
//! [`crate::polycomplex::product`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod builtin;
pub mod dual;
pub mod product;

pub use dual::{DualPairing, JoinedComplex, QkVertex, Side};
pub use product::{ProductCell, ProductComplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("dangling face reference: {dim}-face {face} refers to missing {sub}-face {missing}")]
    DanglingFace {
        dim: usize,
        face: usize,
        sub: usize,
        missing: i64,
    },
    #[error("boundary of boundary is nonzero on {dim}-face {face}")]
    BoundaryNotZero { dim: usize, face: usize },
    #[error("non-surface edge: edge {edge} bounds {count} faces")]
    NonSurfaceEdge { edge: usize, count: usize },
    #[error("face {face} boundary is not a closed edge cycle")]
    BrokenCycle { face: usize },
    #[error("inconsistent surface orientation (fundamental class has nonzero boundary)")]
    Orientation,
    #[error("not a closed surface complex: {0}")]
    NotSurface(String),
    #[error("Z_N needs N >= 1")]
    ZeroN,
    #[error("duplicate id {id} among {dim}-faces")]
    DuplicateId { dim: usize, id: i64 },
    #[error("unsupported complex: {0}")]
    Unsupported(String),
}

/// Signed reference to a lower-dimensional face.
pub type Incidence = (usize, i8);

#[derive(Debug, Clone, PartialEq)]
pub struct PolyComplex {
    dim: usize,
    counts: Vec<usize>,
    labels: Vec<Vec<i64>>,
    incidence: Vec<Vec<Vec<Incidence>>>,
    orientation: Vec<Vec<i8>>,
    geometry: Option<Vec<[f64; 3]>>,
    closed_surface: bool,
}

impl PolyComplex {
    /// Assemble and validate a complex. `incidence[p][f]` lists the
    /// (p-1)-faces of the p-face `f`; `incidence[0]` must be empty lists.
    /// 2-face boundaries are reordered into a walkable cycle.
    pub fn from_parts(
        dim: usize,
        counts: Vec<usize>,
        mut incidence: Vec<Vec<Vec<Incidence>>>,
        orientation: Option<Vec<Vec<i8>>>,
        geometry: Option<Vec<[f64; 3]>>,
        closed_surface: bool,
    ) -> Result<Self, ComplexError> {
        if counts.len() != dim + 1 || incidence.len() != dim + 1 {
            return Err(ComplexError::Unsupported("face/incidence table size".into()));
        }
        if dim > 3 {
            return Err(ComplexError::Unsupported(format!("dimension {dim}")));
        }
        for p in 1..=dim {
            if incidence[p].len() != counts[p] {
                return Err(ComplexError::Unsupported(format!("incidence[{p}] length")));
            }
            for (f, bd) in incidence[p].iter().enumerate() {
                for &(g, _) in bd {
                    if g >= counts[p - 1] {
                        return Err(ComplexError::DanglingFace {
                            dim: p,
                            face: f,
                            sub: p - 1,
                            missing: g as i64,
                        });
                    }
                }
            }
        }
        if dim >= 2 {
            let edges = incidence[1].clone();
            for (f, bd) in incidence[2].iter_mut().enumerate() {
                *bd = order_cycle(&edges, bd).ok_or(ComplexError::BrokenCycle { face: f })?;
            }
        }
        let orientation = orientation
            .unwrap_or_else(|| counts.iter().map(|&n| vec![1i8; n]).collect());
        let labels = counts.iter().map(|&n| (0..n as i64).collect()).collect();
        let cx = PolyComplex {
            dim,
            counts,
            labels,
            incidence,
            orientation,
            geometry,
            closed_surface,
        };
        cx.validate()?;
        Ok(cx)
    }

    /// Closed oriented surface from vertex cycles of its faces, each listed
    /// counterclockwise. Edges are created between consecutive cycle entries
    /// and oriented from the smaller to the larger vertex index.
    pub fn from_polygons(
        n_vertices: usize,
        polygons: &[Vec<usize>],
        geometry: Option<Vec<[f64; 3]>>,
    ) -> Result<Self, ComplexError> {
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Vec<Incidence>> = Vec::new();
        let mut faces = Vec::with_capacity(polygons.len());
        for poly in polygons {
            let mut bd = Vec::with_capacity(poly.len());
            for i in 0..poly.len() {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                if a >= n_vertices || b >= n_vertices {
                    return Err(ComplexError::DanglingFace {
                        dim: 2,
                        face: faces.len(),
                        sub: 0,
                        missing: a.max(b) as i64,
                    });
                }
                let key = (a.min(b), a.max(b));
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(vec![(key.0, -1), (key.1, 1)]);
                    edges.len() - 1
                });
                bd.push((e, if a < b { 1 } else { -1 }));
            }
            faces.push(bd);
        }
        let counts = vec![n_vertices, edges.len(), faces.len()];
        PolyComplex::from_parts(
            2,
            counts,
            vec![vec![Vec::new(); n_vertices], edges, faces],
            None,
            geometry,
            true,
        )
    }

    fn validate(&self) -> Result<(), ComplexError> {
        for p in 2..=self.dim {
            for f in 0..self.counts[p] {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(g, s) in &self.incidence[p][f] {
                    for &(h, t) in &self.incidence[p - 1][g] {
                        *acc.entry(h).or_default() += (s as i64) * (t as i64);
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return Err(ComplexError::BoundaryNotZero { dim: p, face: f });
                }
            }
        }
        if self.dim == 2 && self.closed_surface {
            let mut count = vec![0usize; self.counts[1]];
            let mut fundamental = vec![0i64; self.counts[1]];
            for f in 0..self.counts[2] {
                let tok = self.orientation[2][f] as i64;
                for &(e, s) in &self.incidence[2][f] {
                    count[e] += 1;
                    fundamental[e] += tok * s as i64;
                }
            }
            if let Some((edge, &c)) = count.iter().enumerate().find(|(_, &c)| c != 2) {
                return Err(ComplexError::NonSurfaceEdge { edge, count: c });
            }
            if fundamental.iter().any(|&v| v != 0) {
                return Err(ComplexError::Orientation);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, p: usize) -> usize {
        self.counts.get(p).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Signed (p-1)-faces of the p-face `f`; cyclic order for p = 2.
    pub fn boundary(&self, p: usize, f: usize) -> &[Incidence] {
        &self.incidence[p][f]
    }

    pub fn token(&self, p: usize, f: usize) -> i8 {
        self.orientation[p][f]
    }

    pub fn label(&self, p: usize, f: usize) -> i64 {
        self.labels[p][f]
    }

    pub fn geometry(&self) -> Option<&[[f64; 3]]> {
        self.geometry.as_deref()
    }

    pub fn is_closed_surface(&self) -> bool {
        self.dim == 2 && self.closed_surface
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// `(src, dst)` of an edge.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let bd = &self.incidence[1][e];
        let src = bd.iter().find(|x| x.1 < 0).map(|x| x.0);
        let dst = bd.iter().find(|x| x.1 > 0).map(|x| x.0);
        match (src, dst) {
            (Some(s), Some(d)) => (s, d),
            // a loop edge records a cancelling pair; both entries name the same vertex
            _ => (bd[0].0, bd[0].0),
        }
    }

    /// Vertices of a 2-face in the order of its boundary walk.
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.incidence[2][f]
            .iter()
            .map(|&(e, s)| {
                let (a, b) = self.endpoints(e);
                if s > 0 {
                    a
                } else {
                    b
                }
            })
            .collect()
    }

    /// Vertex set of any face.
    pub fn closure_vertices(&self, p: usize, f: usize) -> Vec<usize> {
        if p == 0 {
            return vec![f];
        }
        let mut out: Vec<usize> = self.incidence[p][f]
            .iter()
            .flat_map(|&(g, _)| self.closure_vertices(p - 1, g))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Faces of dimension p+1 containing the p-face f.
    pub fn cofaces(&self, p: usize) -> Vec<Vec<Incidence>> {
        let mut out = vec![Vec::new(); self.count(p)];
        if p < self.dim {
            for (g, bd) in self.incidence[p + 1].iter().enumerate() {
                for &(f, s) in bd {
                    out[f].push((g, s));
                }
            }
        }
        out
    }

    /// Left and right 2-face of an edge of a closed oriented surface,
    /// seen along the edge direction.
    pub fn left_right(&self, e: usize) -> Result<(usize, usize), ComplexError> {
        let mut left = None;
        let mut right = None;
        for f in 0..self.count(2) {
            for &(g, s) in &self.incidence[2][f] {
                if g == e {
                    if s * self.orientation[2][f] > 0 {
                        left = Some(f);
                    } else {
                        right = Some(f);
                    }
                }
            }
        }
        match (left, right) {
            (Some(l), Some(r)) => Ok((l, r)),
            _ => Err(ComplexError::NotSurface(format!("edge {e} lacks two sides"))),
        }
    }

    /// Counterclockwise boundary walk of a 2-face: `(edge, sign)` with the
    /// sign taken relative to that walk.
    pub fn ccw_boundary(&self, f: usize) -> Vec<Incidence> {
        let bd = &self.incidence[2][f];
        if self.orientation[2][f] > 0 {
            bd.clone()
        } else {
            bd.iter().rev().map(|&(e, s)| (e, -s)).collect()
        }
    }

    /// Copy with the listed edges and 2-faces reversed. Reversing a 2-face
    /// negates its token, so the surface orientation is unchanged.
    pub fn with_flipped(&self, edges: &[usize], faces: &[usize]) -> PolyComplex {
        let mut cx = self.clone();
        for &e in edges {
            for x in cx.incidence[1][e].iter_mut() {
                x.1 = -x.1;
            }
            if cx.dim >= 2 {
                for bd in cx.incidence[2].iter_mut() {
                    for x in bd.iter_mut() {
                        if x.0 == e {
                            x.1 = -x.1;
                        }
                    }
                }
            }
        }
        for &f in faces {
            let bd = &mut cx.incidence[2][f];
            bd.reverse();
            for x in bd.iter_mut() {
                x.1 = -x.1;
            }
            cx.orientation[2][f] = -cx.orientation[2][f];
            if cx.dim >= 3 {
                for bd in cx.incidence[3].iter_mut() {
                    for x in bd.iter_mut() {
                        if x.0 == f {
                            x.1 = -x.1;
                        }
                    }
                }
            }
        }
        cx
    }

    /// Copy whose cells of each dimension are reindexed by `perm[p]`
    /// (new index of old cell). Labels travel with the cells.
    pub fn relabeled(&self, perm: &[Vec<usize>]) -> PolyComplex {
        let mut cx = self.clone();
        for p in 0..=self.dim {
            let mut inc = vec![Vec::new(); self.counts[p]];
            let mut ori = vec![1i8; self.counts[p]];
            let mut lab = vec![0i64; self.counts[p]];
            for f in 0..self.counts[p] {
                let nf = perm[p][f];
                if p > 0 {
                    inc[nf] = self.incidence[p][f]
                        .iter()
                        .map(|&(g, s)| (perm[p - 1][g], s))
                        .collect();
                }
                ori[nf] = self.orientation[p][f];
                lab[nf] = self.labels[p][f];
            }
            cx.incidence[p] = inc;
            cx.orientation[p] = ori;
            cx.labels[p] = lab;
        }
        if let Some(g) = &self.geometry {
            let mut ng = g.clone();
            for (v, &nv) in perm[0].iter().enumerate() {
                ng[nv] = g[v];
            }
            cx.geometry = Some(ng);
        }
        cx
    }

    /// Dense integer matrix of the boundary map C_p -> C_{p-1}
    /// (rows: (p-1)-faces, columns: p-faces).
    pub fn boundary_matrix(&self, p: usize) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.count(p)]; self.count(p.wrapping_sub(1))];
        if p == 0 || p > self.dim {
            return m;
        }
        for f in 0..self.counts[p] {
            for &(g, s) in &self.incidence[p][f] {
                m[g][f] += s as i64;
            }
        }
        m
    }

    pub fn to_description(&self) -> ComplexDescription {
        assert!(self.dim == 2, "descriptions cover surface complexes");
        let vertices = (0..self.counts[0])
            .map(|v| match &self.geometry {
                Some(g) => VertexDesc::WithPos {
                    id: self.labels[0][v],
                    pos: g[v],
                },
                None => VertexDesc::Id(self.labels[0][v]),
            })
            .collect();
        let edges = (0..self.counts[1])
            .map(|e| {
                let (a, b) = self.endpoints(e);
                EdgeDesc {
                    id: self.labels[1][e],
                    src: self.labels[0][a],
                    dst: self.labels[0][b],
                }
            })
            .collect();
        let faces = (0..self.counts[2])
            .map(|f| FaceDesc {
                id: self.labels[2][f],
                boundary: self.incidence[2][f]
                    .iter()
                    .map(|&(e, s)| {
                        let id = self.labels[1][e];
                        if s > 0 {
                            SignedRef::Int(id)
                        } else if id == 0 {
                            SignedRef::Text("-0".into())
                        } else {
                            SignedRef::Int(-id)
                        }
                    })
                    .collect(),
                orientation: (self.orientation[2][f] < 0).then_some(-1),
            })
            .collect();
        ComplexDescription {
            schema: Some("v1".into()),
            dim: 2,
            vertices,
            edges,
            faces,
            closed_surface: self.closed_surface,
        }
    }

    /// Build from the JSON description. Cells are indexed in increasing id
    /// order per dimension.
    pub fn from_description(d: &ComplexDescription) -> Result<Self, ComplexError> {
        if d.dim != 2 {
            return Err(ComplexError::Unsupported(format!("description of dimension {}", d.dim)));
        }
        let mut vids: Vec<(i64, Option<[f64; 3]>)> = d
            .vertices
            .iter()
            .map(|v| match v {
                VertexDesc::Id(i) => (*i, None),
                VertexDesc::WithPos { id, pos } => (*id, Some(*pos)),
            })
            .collect();
        vids.sort_by_key(|x| x.0);
        let mut edges = d.edges.clone();
        edges.sort_by_key(|e| e.id);
        let mut faces = d.faces.clone();
        faces.sort_by_key(|f| f.id);
        let vmap = index_map(vids.iter().map(|x| x.0), 0)?;
        let emap = index_map(edges.iter().map(|e| e.id), 1)?;
        index_map(faces.iter().map(|f| f.id), 2)?;
        let mut inc1 = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let look = |x: i64| {
                vmap.get(&x).copied().ok_or(ComplexError::DanglingFace {
                    dim: 1,
                    face: i,
                    sub: 0,
                    missing: x,
                })
            };
            inc1.push(vec![(look(e.src)?, -1), (look(e.dst)?, 1)]);
        }
        let mut inc2 = Vec::with_capacity(faces.len());
        let mut tokens = Vec::with_capacity(faces.len());
        for (i, f) in faces.iter().enumerate() {
            let mut bd = Vec::new();
            for r in &f.boundary {
                let (id, s) = r.parse().ok_or_else(|| {
                    ComplexError::Unsupported(format!("bad signed edge reference in face {}", f.id))
                })?;
                let e = emap.get(&id).copied().ok_or(ComplexError::DanglingFace {
                    dim: 2,
                    face: i,
                    sub: 1,
                    missing: id,
                })?;
                bd.push((e, s));
            }
            inc2.push(bd);
            tokens.push(f.orientation.unwrap_or(1).signum() as i8);
        }
        let geometry = if vids.iter().all(|x| x.1.is_some()) && !vids.is_empty() {
            Some(vids.iter().map(|x| x.1.unwrap()).collect())
        } else {
            None
        };
        let counts = vec![vids.len(), edges.len(), faces.len()];
        let orientation = vec![vec![1; counts[0]], vec![1; counts[1]], tokens];
        let mut cx = PolyComplex::from_parts(
            2,
            counts,
            vec![vec![Vec::new(); vids.len()], inc1, inc2],
            Some(orientation),
            geometry,
            d.closed_surface,
        )?;
        cx.labels = vec![
            vids.iter().map(|x| x.0).collect(),
            edges.iter().map(|e| e.id).collect(),
            faces.iter().map(|f| f.id).collect(),
        ];
        Ok(cx)
    }
}

fn index_map(ids: impl Iterator<Item = i64>, dim: usize) -> Result<HashMap<i64, usize>, ComplexError> {
    let mut m = HashMap::new();
    for (i, id) in ids.enumerate() {
        if m.insert(id, i).is_some() {
            return Err(ComplexError::DuplicateId { dim, id });
        }
    }
    Ok(m)
}

/// Reorder a face boundary so consecutive edges share vertices. Returns
/// `None` unless the edges form a single closed cycle.
fn order_cycle(edges: &[Vec<Incidence>], bd: &[Incidence]) -> Option<Vec<Incidence>> {
    if bd.is_empty() {
        return None;
    }
    let ends = |&(e, s): &Incidence| {
        let inc = &edges[e];
        let src = inc.iter().find(|x| x.1 < 0).map_or(inc[0].0, |x| x.0);
        let dst = inc.iter().find(|x| x.1 > 0).map_or(inc[0].0, |x| x.0);
        if s > 0 {
            (src, dst)
        } else {
            (dst, src)
        }
    };
    let mut rest: Vec<Incidence> = bd.to_vec();
    let mut out = vec![rest.remove(0)];
    while !rest.is_empty() {
        let tail = ends(out.last().unwrap()).1;
        let pos = rest.iter().position(|x| ends(x).0 == tail)?;
        out.push(rest.remove(pos));
    }
    if ends(out.last().unwrap()).1 != ends(&out[0]).0 {
        return None;
    }
    Some(out)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum VertexDesc {
    Id(i64),
    WithPos { id: i64, pos: [f64; 3] },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeDesc {
    pub id: i64,
    pub src: i64,
    pub dst: i64,
}

/// Signed edge reference: an integer whose sign is the incidence sign, or a
/// string such as `"-0"` for negatively traversed edge 0.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SignedRef {
    Int(i64),
    Text(String),
}

impl SignedRef {
    fn parse(&self) -> Option<(i64, i8)> {
        match self {
            SignedRef::Int(i) => Some((i.abs(), if *i < 0 { -1 } else { 1 })),
            SignedRef::Text(s) => {
                let t = s.trim();
                let (sign, body) = match t.strip_prefix('-') {
                    Some(b) => (-1, b),
                    None => (1, t.strip_prefix('+').unwrap_or(t)),
                };
                body.parse::<i64>().ok().map(|v| (v, sign))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FaceDesc {
    pub id: i64,
    pub boundary: Vec<SignedRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexDescription {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dim: usize,
    pub vertices: Vec<VertexDesc>,
    pub edges: Vec<EdgeDesc>,
    pub faces: Vec<FaceDesc>,
    #[serde(default)]
    pub closed_surface: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_characteristics_of_builtins() {
        assert_eq!(builtin::tetrahedron().euler_characteristic(), 2);
        assert_eq!(builtin::cube().euler_characteristic(), 2);
        assert_eq!(builtin::icosahedron().euler_characteristic(), 2);
        let t = builtin::hex_torus(3, 4).unwrap();
        assert_eq!(t.euler_characteristic(), 0);
        assert!(t.boundary(2, 0).len() == 6);
    }

    #[test]
    fn description_round_trip() {
        let cx = builtin::cube();
        let d = cx.to_description();
        let back = PolyComplex::from_description(&d).unwrap();
        assert_eq!(back.counts(), cx.counts());
        assert_eq!(back.euler_characteristic(), 2);
    }

    #[test]
    fn missing_edge_is_dangling() {
        let mut d = builtin::tetrahedron().to_description();
        d.edges.pop();
        let err = PolyComplex::from_description(&d).unwrap_err();
        assert!(err.to_string().contains("dangling face reference"), "{err}");
    }

    #[test]
    fn open_surface_rejected_when_flagged() {
        let mut d = builtin::tetrahedron().to_description();
        d.faces.pop();
        assert!(matches!(
            PolyComplex::from_description(&d),
            Err(ComplexError::NonSurfaceEdge { .. })
        ));
        d.closed_surface = false;
        assert!(PolyComplex::from_description(&d).is_ok());
    }

    #[test]
    fn flipping_keeps_validity() {
        let cx = builtin::cube();
        let f = cx.with_flipped(&[0, 3, 7], &[1, 4]);
        assert_eq!(f.euler_characteristic(), 2);
        assert_eq!(f.token(2, 1), -1);
        f.validate().unwrap();
    }
}
