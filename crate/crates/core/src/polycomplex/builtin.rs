//! Built-in surface complexes: platonic boundaries and a hexagonal torus.

use super::{ComplexError, DualPairing, PolyComplex};

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orient a vertex cycle of a convex polytope face outward.
fn outward(pts: &[P3], mut cyc: Vec<usize>) -> Vec<usize> {
    let c = cyc.iter().fold([0.0; 3], |acc, &i| {
        [acc[0] + pts[i][0], acc[1] + pts[i][1], acc[2] + pts[i][2]]
    });
    let n = cross(sub(pts[cyc[1]], pts[cyc[0]]), sub(pts[cyc[2]], pts[cyc[1]]));
    if dot(n, c) < 0.0 {
        cyc.reverse();
    }
    cyc
}

/// Faces of a convex polytope given as vertex sets; returned as outward
/// cycles ordered by angle around the face centroid.
fn cycles_from_sets(pts: &[P3], sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    sets.into_iter()
        .map(|s| {
            let n = s.len() as f64;
            let c = s.iter().fold([0.0; 3], |acc, &i| {
                [acc[0] + pts[i][0] / n, acc[1] + pts[i][1] / n, acc[2] + pts[i][2] / n]
            });
            let u = sub(pts[s[0]], c);
            let normal = cross(u, sub(pts[s[1]], c));
            let normal = if dot(normal, c) < 0.0 {
                [-normal[0], -normal[1], -normal[2]]
            } else {
                normal
            };
            let v = cross(normal, u);
            let mut with_angle: Vec<(f64, usize)> = s
                .iter()
                .map(|&i| {
                    let d = sub(pts[i], c);
                    (dot(d, v).atan2(dot(d, u)), i)
                })
                .collect();
            with_angle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            outward(pts, with_angle.into_iter().map(|x| x.1).collect())
        })
        .collect()
}

pub fn tetrahedron() -> PolyComplex {
    let pts = vec![
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .iter()
        .map(|f| outward(&pts, f.to_vec()))
        .collect::<Vec<_>>();
    PolyComplex::from_polygons(4, &faces, Some(pts)).expect("tetrahedron")
}

pub fn cube() -> PolyComplex {
    let mut pts = Vec::new();
    for i in 0..8 {
        pts.push([
            if i & 1 == 0 { -1.0 } else { 1.0 },
            if i & 2 == 0 { -1.0 } else { 1.0 },
            if i & 4 == 0 { -1.0 } else { 1.0 },
        ]);
    }
    let mut sets = Vec::new();
    for axis in 0..3 {
        for side in [-1.0, 1.0] {
            sets.push((0..8).filter(|&i| pts[i][axis] == side).collect::<Vec<_>>());
        }
    }
    let faces = cycles_from_sets(&pts, sets);
    PolyComplex::from_polygons(8, &faces, Some(pts)).expect("cube")
}

pub fn icosahedron() -> PolyComplex {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            pts.push([0.0, a, b]);
            pts.push([a, b, 0.0]);
            pts.push([b, 0.0, a]);
        }
    }
    let close = |i: usize, j: usize| {
        let d = sub(pts[i], pts[j]);
        (dot(d, d) - 4.0).abs() < 1e-9
    };
    let mut sets = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if close(i, j) && close(j, k) && close(i, k) {
                    sets.push(vec![i, j, k]);
                }
            }
        }
    }
    let faces = cycles_from_sets(&pts, sets);
    PolyComplex::from_polygons(12, &faces, Some(pts)).expect("icosahedron")
}

/// Triangulated n x m torus: a square grid with one diagonal per square.
pub fn triangulated_torus(n: usize, m: usize) -> Result<PolyComplex, ComplexError> {
    if n < 3 || m < 3 {
        return Err(ComplexError::Unsupported("torus grids need n, m >= 3".into()));
    }
    let v = |i: usize, j: usize| (i % n) * m + (j % m);
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..m {
            faces.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            faces.push(vec![v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    PolyComplex::from_polygons(n * m, &faces, None)
}

/// Hexagonal n x m torus grid: the dual of the triangulated torus,
/// with 2nm vertices, 3nm edges and nm hexagons.
pub fn hex_torus(n: usize, m: usize) -> Result<PolyComplex, ComplexError> {
    let tri = triangulated_torus(n, m)?;
    Ok(DualPairing::canonical(tri)?.dual)
}

/// Look up a built-in by name: `tetrahedron`, `cube`, `icosahedron`,
/// `hex_torus:NxM`.
pub fn by_name(name: &str) -> Option<PolyComplex> {
    match name {
        "tetrahedron" | "tet" => Some(tetrahedron()),
        "cube" => Some(cube()),
        "icosahedron" => Some(icosahedron()),
        _ => {
            let dims = name.strip_prefix("hex_torus:")?;
            let (a, b) = dims.split_once('x')?;
            hex_torus(a.parse().ok()?, b.parse().ok()?).ok()
        }
    }
}
