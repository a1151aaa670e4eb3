//! Simplicial loops, ribbons and ribbon links in `qK × Z_N`.
//!
//! A ribbon is a cyclic sequence of tetragons `F_1, …, F_n` where `F_i` and
//! `F_{i+1}` meet in a full edge `s_i`, the edges `s_{i-1}` and `s_i` are
//! opposite in `F_i`, and non-consecutive faces are disjoint. The two
//! boundary loops are `l` (right side) and `l'` (left side) with respect to
//! the direction of traversal and the stored orientation of the reference
//! face (the first parallel face when there is one). For `n = 2` the two faces
//! share two opposite edges; the edge crossed from `F_1` to `F_2` is the one
//! with the larger index.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polycomplex::{JoinedComplex, PolyComplex, ProductComplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RibbonError {
    #[error("face {face} does not exist in the ambient complex")]
    MissingFace { face: usize },
    #[error("a ribbon needs at least two faces")]
    TooShort,
    #[error("(SR1) face {face} at position {index} is not a tetragon")]
    NotTetragon { index: usize, face: usize },
    #[error("(SR2) faces at positions {i} and {j} intersect")]
    Intersection { i: usize, j: usize },
    #[error("(SR2) consecutive faces at positions {i} and {j} do not meet in a full edge")]
    NotChained { i: usize, j: usize },
    #[error("(SR2) face at position {index} is not crossed between opposite edges")]
    NotOpposite { index: usize },
    #[error("ribbon boundary does not close up (non-orientable band)")]
    NonOrientable,
    #[error("loop step {step} does not start where the previous step ended")]
    BrokenLoop { step: usize },
    #[error("ribbon {ribbon}: {reason}")]
    Projection { ribbon: usize, reason: String },
    #[error("(NCP)' violated: {0}")]
    Crossing(String),
    #[error("(NH)' violated: the projection of ribbon {0} is not null-homologous")]
    NotNullHomologous(usize),
    #[error("ribbons {a} and {b} intersect")]
    Overlap { a: usize, b: usize },
    #[error("sigma0 = {0} lies on the image of a ribbon projection")]
    SigmaOnRibbon(usize),
    #[error("sigma0 = {0} is not a vertex of qK")]
    BadSigma(usize),
    #[error("{colors} colors given for {ribbons} ribbons")]
    ColorCount { colors: usize, ribbons: usize },
    #[error("link description: {0}")]
    Description(String),
    #[error("region decomposition: {0}")]
    Regions(String),
}

/// A generalized edge: an oriented edge or the empty edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Edge { edge: usize, sign: i8 },
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialLoop {
    pub steps: Vec<Step>,
    /// `start l^{(k)}` for every step.
    pub starts: Vec<usize>,
}

fn step_end(cx: &PolyComplex, start: usize, s: Step) -> Option<usize> {
    match s {
        Step::Empty => Some(start),
        Step::Edge { edge, sign } => {
            let (a, b) = cx.endpoints(edge);
            let (from, to) = if sign > 0 { (a, b) } else { (b, a) };
            (from == start).then_some(to)
        }
    }
}

impl SimplicialLoop {
    /// Loop in `cx` from its steps and the start vertex of the first step.
    pub fn new(cx: &PolyComplex, steps: Vec<Step>, start: usize) -> Result<Self, RibbonError> {
        let mut starts = Vec::with_capacity(steps.len());
        let mut cur = start;
        for (k, &s) in steps.iter().enumerate() {
            starts.push(cur);
            cur = step_end(cx, cur, s).ok_or(RibbonError::BrokenLoop { step: k })?;
        }
        if cur != start {
            return Err(RibbonError::BrokenLoop { step: steps.len() });
        }
        Ok(SimplicialLoop { steps, starts })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Loop without its empty steps.
    pub fn reduced(&self) -> SimplicialLoop {
        let (steps, starts) = self
            .steps
            .iter()
            .zip(&self.starts)
            .filter(|(s, _)| !matches!(s, Step::Empty))
            .map(|(s, v)| (*s, *v))
            .unzip();
        SimplicialLoop { steps, starts }
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.starts.iter().copied().collect()
    }

    /// The loop as a 1-chain.
    pub fn chain(&self, n_edges: usize) -> Vec<i64> {
        let mut c = vec![0i64; n_edges];
        for s in &self.steps {
            if let Step::Edge { edge, sign } = s {
                c[*edge] += *sign as i64;
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialRibbon {
    pub faces: Vec<usize>,
    /// `shared[i]`: the edge crossed from `F_i` to `F_{i+1}`.
    pub shared: Vec<usize>,
    /// Right boundary loop; `l.steps[k]` runs along `F_k`.
    pub l: SimplicialLoop,
    /// Left boundary loop.
    pub l_prime: SimplicialLoop,
}

fn face_vertex_sets(cx: &PolyComplex, faces: &[usize]) -> Result<Vec<BTreeSet<usize>>, RibbonError> {
    faces
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            if f >= cx.count(2) {
                return Err(RibbonError::MissingFace { face: f });
            }
            let vs: BTreeSet<usize> = cx.closure_vertices(2, f).into_iter().collect();
            if cx.boundary(2, f).len() != 4 || vs.len() != 4 {
                return Err(RibbonError::NotTetragon { index: i, face: f });
            }
            Ok(vs)
        })
        .collect()
}

/// Validate (SR1)/(SR2) with the side reference at position 0.
pub fn validate_ribbon(faces: &[usize], cx: &PolyComplex) -> Result<SimplicialRibbon, RibbonError> {
    validate_ribbon_with_reference(faces, cx, 0)
}

/// Validate (SR1)/(SR2); `l'` is the left side at position `reference`.
pub fn validate_ribbon_with_reference(
    faces: &[usize],
    cx: &PolyComplex,
    reference: usize,
) -> Result<SimplicialRibbon, RibbonError> {
    let n = faces.len();
    if n < 2 {
        return Err(RibbonError::TooShort);
    }
    let verts = face_vertex_sets(cx, faces)?;
    let edges_of = |f: usize| -> BTreeSet<usize> { cx.boundary(2, f).iter().map(|x| x.0).collect() };
    let adjacent = |i: usize, j: usize| j == (i + 1) % n || i == (j + 1) % n;
    for i in 0..n {
        for j in i + 1..n {
            if faces[i] == faces[j] {
                return Err(RibbonError::Intersection { i, j });
            }
            if !adjacent(i, j) && !verts[i].is_disjoint(&verts[j]) {
                return Err(RibbonError::Intersection { i, j });
            }
        }
    }
    let mut shared = Vec::with_capacity(n);
    if n == 2 {
        let common: Vec<usize> = edges_of(faces[0]).intersection(&edges_of(faces[1])).copied().collect();
        if common.len() != 2 {
            return Err(RibbonError::NotChained { i: 0, j: 1 });
        }
        shared.push(common[0].max(common[1]));
        shared.push(common[0].min(common[1]));
    } else {
        for i in 0..n {
            let j = (i + 1) % n;
            let common: Vec<usize> = edges_of(faces[i]).intersection(&edges_of(faces[j])).copied().collect();
            if common.len() != 1 {
                return Err(RibbonError::NotChained { i, j });
            }
            let (a, b) = cx.endpoints(common[0]);
            let cv: BTreeSet<usize> = verts[i].intersection(&verts[j]).copied().collect();
            if cv != BTreeSet::from([a, b]) {
                return Err(RibbonError::Intersection { i, j });
            }
            shared.push(common[0]);
        }
    }
    // positions of the entry and exit edges in each stored cycle
    let mut entry_pos = Vec::with_capacity(n);
    for i in 0..n {
        let bd = cx.boundary(2, faces[i]);
        let pos = |e: usize| bd.iter().position(|x| x.0 == e).expect("shared edge lies on the face");
        let a = pos(shared[(i + n - 1) % n]);
        let b = pos(shared[i]);
        if (b + 4 - a) % 4 != 2 {
            return Err(RibbonError::NotOpposite { index: i });
        }
        entry_pos.push(a);
    }
    let r = reference % n;
    let fv0 = cx.face_vertices(faces[r]);
    let a0 = entry_pos[r];
    let right = walk_side(cx, faces, &entry_pos, r, fv0[(a0 + 1) % 4])?;
    let left = walk_side(cx, faces, &entry_pos, r, fv0[a0])?;
    Ok(SimplicialRibbon {
        faces: faces.to_vec(),
        shared,
        l: right,
        l_prime: left,
    })
}

/// Follow one side of the band starting at position `r` from vertex `w0`
/// (an endpoint of the entry edge of `F_r`).
fn walk_side(
    cx: &PolyComplex,
    faces: &[usize],
    entry_pos: &[usize],
    r: usize,
    w0: usize,
) -> Result<SimplicialLoop, RibbonError> {
    let n = faces.len();
    let mut steps = vec![Step::Empty; n];
    let mut starts = vec![0usize; n];
    let mut w = w0;
    for off in 0..n {
        let i = (r + off) % n;
        let bd = cx.boundary(2, faces[i]);
        let a = entry_pos[i];
        let side = [bd[(a + 1) % 4].0, bd[(a + 3) % 4].0]
            .into_iter()
            .find(|&e| {
                let (p, q) = cx.endpoints(e);
                p == w || q == w
            })
            .ok_or(RibbonError::NonOrientable)?;
        let (p, q) = cx.endpoints(side);
        let (sign, next) = if p == w { (1i8, q) } else { (-1i8, p) };
        steps[i] = Step::Edge { edge: side, sign };
        starts[i] = w;
        w = next;
    }
    if w != w0 {
        return Err(RibbonError::NonOrientable);
    }
    Ok(SimplicialLoop { steps, starts })
}

/// Closed strips of tetragons crossed through opposite edges, one per
/// strip (canonical rotation and direction). Strips are not validated.
pub fn quad_strips(cx: &PolyComplex) -> Vec<Vec<usize>> {
    let cof = cx.cofaces(1);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for f0 in 0..cx.count(2) {
        let bd0 = cx.boundary(2, f0);
        if bd0.len() != 4 {
            continue;
        }
        for k in 0..2 {
            let mut strip = vec![f0];
            let mut f = f0;
            let mut exit = bd0[k].0;
            let ok = loop {
                let Some(&(g, _)) = cof[exit].iter().find(|x| x.0 != f) else { break false };
                if g == f0 {
                    break exit == bd0[(k + 2) % 4].0;
                }
                let bd = cx.boundary(2, g);
                if bd.len() != 4 || strip.len() > 2 * cx.count(2) {
                    break false;
                }
                let p = bd.iter().position(|x| x.0 == exit).expect("coface contains the edge");
                strip.push(g);
                f = g;
                exit = bd[(p + 2) % 4].0;
            };
            if !ok {
                continue;
            }
            let canon = canonical_cycle(&strip);
            if seen.insert(canon.clone()) {
                out.push(canon);
            }
        }
    }
    out
}

fn canonical_cycle(c: &[usize]) -> Vec<usize> {
    let n = c.len();
    let m = (0..n).min_by_key(|&i| c[i]).unwrap_or(0);
    let fwd: Vec<usize> = (0..n).map(|i| c[(m + i) % n]).collect();
    let bwd: Vec<usize> = (0..n).map(|i| c[(m + n - i) % n]).collect();
    fwd.min(bwd)
}

/// Position of a 2-face of `qK × Z_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FaceKind {
    /// `face × v_t`
    Parallel { face: usize, t: usize },
    /// `edge × e_t`
    Vertical { edge: usize, t: usize },
}

pub fn face_kind(pc: &ProductComplex, f: usize) -> FaceKind {
    let c = pc.decompose(2, f);
    if c.zn_dim == 0 {
        FaceKind::Parallel { face: c.base, t: c.t }
    } else {
        FaceKind::Vertical { edge: c.base, t: c.t }
    }
}

pub fn face_index(pc: &ProductComplex, k: FaceKind) -> usize {
    match k {
        FaceKind::Parallel { face, t } => pc.horizontal(face, t),
        FaceKind::Vertical { edge, t } => pc.vertical(1, edge, t),
    }
}

/// `Σ`-projection of a step of a loop in `qK × Z_N`.
pub fn sigma_step(pc: &ProductComplex, s: Step) -> Step {
    match s {
        Step::Empty => Step::Empty,
        Step::Edge { edge, sign } => {
            let c = pc.decompose(1, edge);
            if c.zn_dim == 0 {
                Step::Edge { edge: c.base, sign }
            } else {
                Step::Empty
            }
        }
    }
}

/// `S¹`-projection of a step: the edge `e_t` of `Z_N`.
pub fn s1_step(pc: &ProductComplex, s: Step) -> Step {
    match s {
        Step::Empty => Step::Empty,
        Step::Edge { edge, sign } => {
            let c = pc.decompose(1, edge);
            if c.zn_dim == 1 {
                Step::Edge { edge: c.t, sign }
            } else {
                Step::Empty
            }
        }
    }
}

/// `Σ`-projection of a vertex: `(qK vertex, t)`.
pub fn vertex_split(pc: &ProductComplex, v: usize) -> (usize, usize) {
    let c = pc.decompose(0, v);
    (c.base, c.t)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RibbonClass {
    Generic,
    /// All faces vertical over one edge of `qK`.
    Vertical { edge: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedRibbon {
    pub class: RibbonClass,
    pub face_kinds: Vec<FaceKind>,
    /// `R_Σ` as a validated ribbon in `qK` (generic ribbons only).
    pub sigma: Option<SimplicialRibbon>,
    /// Winding number of `l_{S¹}` around `Z_N`.
    pub winding: i64,
}

/// Classify the faces of a ribbon in `qK × Z_N` and extract `R_Σ`.
pub fn project_ribbon(
    r: &SimplicialRibbon,
    pc: &ProductComplex,
    qk: &PolyComplex,
    index: usize,
) -> Result<ProjectedRibbon, RibbonError> {
    let kinds: Vec<FaceKind> = r.faces.iter().map(|&f| face_kind(pc, f)).collect();
    let net: i64 = r
        .l
        .steps
        .iter()
        .map(|&s| match s1_step(pc, s) {
            Step::Edge { sign, .. } => sign as i64,
            Step::Empty => 0,
        })
        .sum();
    let winding = net / pc.n() as i64;
    let parallel: Vec<usize> = kinds
        .iter()
        .filter_map(|k| match k {
            FaceKind::Parallel { face, .. } => Some(*face),
            _ => None,
        })
        .collect();
    if parallel.is_empty() {
        let edges: BTreeSet<usize> = kinds
            .iter()
            .map(|k| match k {
                FaceKind::Vertical { edge, .. } => *edge,
                FaceKind::Parallel { .. } => unreachable!(),
            })
            .collect();
        if edges.len() != 1 {
            return Err(RibbonError::Projection {
                ribbon: index,
                reason: "vertical faces over more than one edge".into(),
            });
        }
        return Ok(ProjectedRibbon {
            class: RibbonClass::Vertical {
                edge: *edges.iter().next().expect("one edge"),
            },
            face_kinds: kinds,
            sigma: None,
            winding,
        });
    }
    let sigma = validate_ribbon(&parallel, qk).map_err(|e| RibbonError::Projection {
        ribbon: index,
        reason: format!("projection is not a ribbon in qK: {e}"),
    })?;
    Ok(ProjectedRibbon {
        class: RibbonClass::Generic,
        face_kinds: kinds,
        sigma: Some(sigma),
        winding,
    })
}

/// Faces of the vertical ribbon `edge × Z_N`, going up.
pub fn vertical_ribbon_faces(pc: &ProductComplex, edge: usize) -> Vec<usize> {
    (0..pc.n()).map(|t| pc.vertical(1, edge, t)).collect()
}

/// Lift a ribbon of `qK` (face sequence) to `qK × Z_N` starting at level
/// `t0`, climbing one level at each of the first `|winding|·N` crossings
/// (descending for negative winding).
pub fn lift_ribbon(
    pc: &ProductComplex,
    qk: &PolyComplex,
    sigma_faces: &[usize],
    winding: i64,
    t0: usize,
) -> Result<Vec<usize>, RibbonError> {
    let r = validate_ribbon(sigma_faces, qk)?;
    let n = pc.n();
    let m = sigma_faces.len();
    let climbs = winding.unsigned_abs() as usize * n;
    if climbs > m {
        return Err(RibbonError::Description(format!(
            "winding {winding} needs at least {climbs} faces in the projection, got {m}"
        )));
    }
    let mut out = Vec::new();
    let mut t = t0 % n;
    for i in 0..m {
        out.push(pc.horizontal(sigma_faces[i], t));
        if i < climbs {
            let g = r.shared[i];
            if winding > 0 {
                out.push(pc.vertical(1, g, t));
                t = (t + 1) % n;
            } else {
                t = (t + n - 1) % n;
                out.push(pc.vertical(1, g, t));
            }
        }
    }
    Ok(out)
}

/// Exact test whether an integer 1-chain is a boundary in `cx`.
pub fn is_boundary(cx: &PolyComplex, chain: &[i64]) -> bool {
    let d2 = cx.boundary_matrix(2);
    let rows = d2.len();
    let cols = d2.first().map_or(0, |r| r.len());
    let to_q = |m: Vec<Vec<i64>>| -> Vec<Vec<Ratio<i128>>> {
        m.into_iter()
            .map(|r| r.into_iter().map(|x| Ratio::from_integer(x as i128)).collect())
            .collect()
    };
    let a = to_q(d2.clone());
    let mut aug = d2;
    for (r, row) in aug.iter_mut().enumerate() {
        row.push(chain[r]);
    }
    rows == 0 || rank(a, cols) == rank(to_q(aug), cols + 1)
}

fn rank(mut m: Vec<Vec<Ratio<i128>>>, cols: usize) -> usize {
    let rows = m.len();
    let zero = Ratio::from_integer(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != zero) else { continue };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && m[i][c] != zero {
                let f = m[i][c] / m[r][c];
                for j in c..cols {
                    let v = m[r][j] * f;
                    m[i][j] -= v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct RibbonLink {
    pub n: usize,
    pub ribbons: Vec<SimplicialRibbon>,
    pub projections: Vec<ProjectedRibbon>,
    pub colors: Vec<usize>,
    pub sigma0: usize,
}

impl RibbonLink {
    /// Validate a link given as face sequences in `qK × Z_N`.
    pub fn new(
        jc: &JoinedComplex,
        pc: &ProductComplex,
        faces: &[Vec<usize>],
        colors: &[usize],
        sigma0: usize,
    ) -> Result<Self, RibbonError> {
        if faces.len() != colors.len() {
            return Err(RibbonError::ColorCount {
                colors: colors.len(),
                ribbons: faces.len(),
            });
        }
        let qk = &jc.qk;
        if sigma0 >= qk.count(0) {
            return Err(RibbonError::BadSigma(sigma0));
        }
        let mut ribbons = Vec::new();
        let mut projections = Vec::new();
        for (i, fs) in faces.iter().enumerate() {
            let reference = fs
                .iter()
                .position(|&f| matches!(face_kind(pc, f), FaceKind::Parallel { .. }))
                .unwrap_or(0);
            let r = validate_ribbon_with_reference(fs, &pc.complex, reference)?;
            projections.push(project_ribbon(&r, pc, qk, i)?);
            ribbons.push(r);
        }
        // ribbons must not meet in qK × Z_N
        let closures: Vec<BTreeSet<usize>> = ribbons
            .iter()
            .map(|r| {
                r.faces
                    .iter()
                    .flat_map(|&f| pc.complex.closure_vertices(2, f))
                    .collect()
            })
            .collect();
        for a in 0..ribbons.len() {
            for b in a + 1..ribbons.len() {
                if !closures[a].is_disjoint(&closures[b]) {
                    return Err(RibbonError::Overlap { a, b });
                }
            }
        }
        // images in Σ
        let images: Vec<BTreeSet<usize>> = projections
            .iter()
            .map(|p| match (&p.class, &p.sigma) {
                (RibbonClass::Vertical { edge }, _) => qk.closure_vertices(1, *edge).into_iter().collect(),
                (RibbonClass::Generic, Some(s)) => {
                    s.faces.iter().flat_map(|&f| qk.closure_vertices(2, f)).collect()
                }
                (RibbonClass::Generic, None) => BTreeSet::new(),
            })
            .collect();
        for a in 0..projections.len() {
            for b in a + 1..projections.len() {
                let generic = |i: usize| projections[i].class == RibbonClass::Generic;
                if (generic(a) || generic(b)) && !images[a].is_disjoint(&images[b]) {
                    return Err(RibbonError::Crossing(format!(
                        "projections of ribbons {a} and {b} meet"
                    )));
                }
            }
        }
        for (i, p) in projections.iter().enumerate() {
            if let Some(s) = &p.sigma {
                if !is_boundary(qk, &s.l.reduced().chain(qk.count(1))) {
                    return Err(RibbonError::NotNullHomologous(i));
                }
            }
        }
        if images.iter().any(|im| im.contains(&sigma0)) {
            return Err(RibbonError::SigmaOnRibbon(sigma0));
        }
        Ok(RibbonLink {
            n: pc.n(),
            ribbons,
            projections,
            colors: colors.to_vec(),
            sigma0,
        })
    }

    pub fn empty(pc: &ProductComplex, sigma0: usize) -> Self {
        RibbonLink {
            n: pc.n(),
            ribbons: Vec::new(),
            projections: Vec::new(),
            colors: Vec::new(),
            sigma0,
        }
    }

    pub fn len(&self) -> usize {
        self.ribbons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ribbons.is_empty()
    }

    pub fn is_vertical(&self) -> bool {
        self.projections
            .iter()
            .all(|p| matches!(p.class, RibbonClass::Vertical { .. }))
    }

    /// The same link traversed in the opposite direction (ribbon `i` only).
    pub fn reversed_faces(&self, i: usize) -> Vec<Vec<usize>> {
        self.ribbons
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let mut f = r.faces.clone();
                if j == i {
                    f.reverse();
                }
                f
            })
            .collect()
    }
}

/// JSON link file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkDescription {
    #[serde(default = "schema_v1")]
    pub schema: String,
    pub ambient: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub ribbons: Vec<RibbonDescription>,
    pub sigma0: usize,
}

fn schema_v1() -> String {
    "v1".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RibbonDescription {
    pub faces: Vec<FaceRef>,
    pub color: usize,
}

/// A face of `qK × Z_N`: either its index or its product position.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FaceRef {
    Index(usize),
    Cell(FaceKind),
}

impl LinkDescription {
    pub fn from_link(link: &RibbonLink, ambient: &str, pc: &ProductComplex) -> Self {
        LinkDescription {
            schema: schema_v1(),
            ambient: ambient.into(),
            n: link.n,
            ribbons: link
                .ribbons
                .iter()
                .zip(&link.colors)
                .map(|(r, &c)| RibbonDescription {
                    faces: r.faces.iter().map(|&f| FaceRef::Cell(face_kind(pc, f))).collect(),
                    color: c,
                })
                .collect(),
            sigma0: link.sigma0,
        }
    }

    /// Resolve face references and validate.
    pub fn build(&self, jc: &JoinedComplex, pc: &ProductComplex) -> Result<RibbonLink, RibbonError> {
        if self.n != pc.n() {
            return Err(RibbonError::Description(format!(
                "link has N = {} but the ambient product has N = {}",
                self.n,
                pc.n()
            )));
        }
        let mut faces = Vec::new();
        for r in &self.ribbons {
            let mut fs = Vec::new();
            for fr in &r.faces {
                let f = match *fr {
                    FaceRef::Index(i) => i,
                    FaceRef::Cell(k) => {
                        let in_range = match k {
                            FaceKind::Parallel { face, t } => face < jc.qk.count(2) && t < pc.n(),
                            FaceKind::Vertical { edge, t } => edge < jc.qk.count(1) && t < pc.n(),
                        };
                        if !in_range {
                            return Err(RibbonError::Description(format!("face {k:?} out of range")));
                        }
                        face_index(pc, k)
                    }
                };
                if f >= pc.complex.count(2) {
                    return Err(RibbonError::MissingFace { face: f });
                }
                fs.push(f);
            }
            faces.push(fs);
        }
        let colors: Vec<usize> = self.ribbons.iter().map(|r| r.color).collect();
        RibbonLink::new(jc, pc, &faces, &colors, self.sigma0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub faces: Vec<usize>,
    pub chi: i64,
    pub gleam: f64,
}

/// A generic ribbon seen from the regions: `plus` lies on the `l'` side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionEdge {
    pub ribbon: usize,
    pub color: usize,
    pub plus: usize,
    pub minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalMark {
    pub ribbon: usize,
    pub color: usize,
    pub region: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDecomposition {
    pub regions: Vec<Region>,
    /// Region of each qK face (`None` on generic ribbon projections).
    pub face_region: Vec<Option<usize>>,
    pub edges: Vec<RegionEdge>,
    pub vertical: Vec<VerticalMark>,
}

/// Regions of `Σ` minus the generic ribbon projections, with Euler
/// characteristics, adjacency and gleams.
pub fn regions(link: &RibbonLink, qk: &PolyComplex) -> Result<RegionDecomposition, RibbonError> {
    let nf = qk.count(2);
    let mut blocked = vec![false; nf];
    let mut ribbon_vertices = HashSet::new();
    let mut ribbon_edges = HashSet::new();
    for p in &link.projections {
        if let Some(s) = &p.sigma {
            for &f in &s.faces {
                blocked[f] = true;
                ribbon_vertices.extend(qk.closure_vertices(2, f));
                ribbon_edges.extend(qk.boundary(2, f).iter().map(|x| x.0));
            }
        }
    }
    let cof = qk.cofaces(1);
    let mut face_region: Vec<Option<usize>> = vec![None; nf];
    let mut regs = Vec::new();
    for f0 in 0..nf {
        if blocked[f0] || face_region[f0].is_some() {
            continue;
        }
        let id = regs.len();
        let mut faces = Vec::new();
        let mut queue = VecDeque::from([f0]);
        face_region[f0] = Some(id);
        while let Some(f) = queue.pop_front() {
            faces.push(f);
            for &(e, _) in qk.boundary(2, f) {
                for &(g, _) in &cof[e] {
                    if !blocked[g] && face_region[g].is_none() {
                        face_region[g] = Some(id);
                        queue.push_back(g);
                    }
                }
            }
        }
        faces.sort_unstable();
        let edges: BTreeSet<usize> = faces
            .iter()
            .flat_map(|&f| qk.boundary(2, f).iter().map(|x| x.0))
            .filter(|e| !ribbon_edges.contains(e))
            .collect();
        let verts: BTreeSet<usize> = faces
            .iter()
            .flat_map(|&f| qk.closure_vertices(2, f))
            .filter(|v| !ribbon_vertices.contains(v))
            .collect();
        let chi = faces.len() as i64 - edges.len() as i64 + verts.len() as i64;
        regs.push(Region {
            faces,
            chi,
            gleam: 0.0,
        });
    }
    let region_across = |e: usize, ribbon_faces: &HashSet<usize>| -> Option<usize> {
        cof[e]
            .iter()
            .find(|x| !ribbon_faces.contains(&x.0))
            .and_then(|x| face_region[x.0])
    };
    let mut edges = Vec::new();
    let mut vertical = Vec::new();
    for (i, p) in link.projections.iter().enumerate() {
        match (&p.class, &p.sigma) {
            (RibbonClass::Generic, Some(s)) => {
                let own: HashSet<usize> = s.faces.iter().copied().collect();
                let side_region = |lp: &SimplicialLoop| -> Result<usize, RibbonError> {
                    let found: BTreeSet<Option<usize>> = lp
                        .steps
                        .iter()
                        .filter_map(|st| match st {
                            Step::Edge { edge, .. } => Some(region_across(*edge, &own)),
                            Step::Empty => None,
                        })
                        .collect();
                    match found.into_iter().collect::<Vec<_>>().as_slice() {
                        [Some(r)] => Ok(*r),
                        _ => Err(RibbonError::Regions(format!(
                            "one side of ribbon {i} does not face a single region"
                        ))),
                    }
                };
                let plus = side_region(&s.l_prime)?;
                let minus = side_region(&s.l)?;
                if plus == minus {
                    return Err(RibbonError::Regions(format!("ribbon {i} does not separate")));
                }
                // positive winding raises the gleam on the `l` side
                regs[minus].gleam += p.winding as f64;
                regs[plus].gleam -= p.winding as f64;
                edges.push(RegionEdge {
                    ribbon: i,
                    color: link.colors[i],
                    plus,
                    minus,
                });
            }
            (RibbonClass::Vertical { edge }, _) => {
                let region = cof[*edge]
                    .iter()
                    .find_map(|x| face_region[x.0])
                    .ok_or_else(|| RibbonError::Regions(format!("vertical ribbon {i} lies on a generic ribbon")))?;
                vertical.push(VerticalMark {
                    ribbon: i,
                    color: link.colors[i],
                    region,
                });
            }
            (RibbonClass::Generic, None) => unreachable!("generic ribbons carry a projection"),
        }
    }
    Ok(RegionDecomposition {
        regions: regs,
        face_region,
        edges,
        vertical,
    })
}

impl RegionDecomposition {
    /// Region data in the form consumed by the shadow state sum.
    pub fn shadow_data(&self) -> crate::shadow::ShadowData {
        crate::shadow::ShadowData {
            chi: self.regions.iter().map(|r| r.chi).collect(),
            gleam: self.regions.iter().map(|r| r.gleam).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| crate::shadow::ShadowEdge {
                    color: e.color,
                    plus: e.plus,
                    minus: e.minus,
                })
                .collect(),
            marks: self
                .vertical
                .iter()
                .map(|m| crate::shadow::ShadowMark {
                    color: m.color,
                    region: m.region,
                })
                .collect(),
        }
    }
}
