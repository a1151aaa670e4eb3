use proptest::prelude::*;

use cstorus::dec::{boundary, coboundary, hodge_star, inner, psi_embed, Cochain, HodgeStar};
use cstorus::polycomplex::{builtin, DualPairing, JoinedComplex, PolyComplex, ProductComplex, Side};

/// `(v, F)` incidences of a closed surface: one qK tetragon each.
fn corners(k: &PolyComplex) -> usize {
    (0..k.count(2)).map(|f| k.face_vertices(f).len()).sum()
}

#[test]
fn joined_complex_counts() {
    for (base, v, e, f) in [(builtin::tetrahedron(), 4, 6, 4), (builtin::cube(), 8, 12, 6)] {
        let c = corners(&base);
        let jc = JoinedComplex::from_base(base).unwrap();
        assert_eq!(jc.qk.counts(), &[v + e + f, 4 * e, c]);
        assert_eq!(jc.qk.euler_characteristic(), 2);
        assert!((0..jc.qk.count(2)).all(|g| jc.qk.boundary(2, g).len() == 4));
    }
    let jc = JoinedComplex::from_base(builtin::tetrahedron()).unwrap();
    assert_eq!(jc.qk.counts(), &[14, 24, 12]);
    assert_eq!(JoinedComplex::from_base(builtin::cube()).unwrap().qk.count(0), 26);
}

#[test]
fn product_with_z2() {
    let jc = JoinedComplex::from_base(builtin::tetrahedron()).unwrap();
    let pc = ProductComplex::new(&jc.qk, 2).unwrap();
    assert_eq!(pc.complex.count(2), 12 * 2 + 24 * 2);
    assert_eq!(pc.complex.count(0), 14 * 2);
    assert_eq!(pc.complex.euler_characteristic(), 0);
}

#[test]
fn dual_pairing_of_hex_torus() {
    let pair = DualPairing::canonical(builtin::hex_torus(3, 4).unwrap()).unwrap();
    assert_eq!(pair.base.counts(), &[24, 36, 12]);
    assert_eq!(pair.dual.counts(), &[12, 36, 24]);
    assert_eq!(pair.base.euler_characteristic(), 0);
    let star = HodgeStar::new(&pair, Side::K1, 1);
    let m = star.matrix();
    assert!(m.iter().all(|row| row.iter().filter(|&&x| x != 0).count() == 1));
}

#[test]
fn psi_of_an_edge_has_norm_two() {
    let jc = JoinedComplex::from_base(builtin::cube()).unwrap();
    for side in [Side::K1, Side::K2] {
        let cx = jc.pair.complex(side);
        for e in 0..cx.count(1) {
            let p = psi_embed(&jc, side, &Cochain::<i64>::basis(cx, 1, 1, e, 0)).unwrap();
            assert_eq!(inner(&p, &p), 2);
        }
    }
}

#[test]
fn description_round_trip_through_json() {
    let cx = builtin::cube();
    let text = serde_json::to_string(&cx.to_description()).unwrap();
    let back = PolyComplex::from_description(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.counts(), cx.counts());
    for p in 1..=2 {
        for f in 0..cx.count(p) {
            assert_eq!(back.boundary(p, f), cx.boundary(p, f));
        }
    }
}

fn base(which: u8) -> PolyComplex {
    match which % 4 {
        0 => builtin::tetrahedron(),
        1 => builtin::cube(),
        2 => builtin::icosahedron(),
        _ => builtin::hex_torus(3, 3).unwrap(),
    }
}

fn values(seed: &[i64], n: usize) -> Vec<i64> {
    (0..n).map(|i| seed[i % seed.len()] * (1 + (i as i64 % 3))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_and_boundary_are_adjoint(which in 0u8..4, p in 0usize..2, d in 1usize..4,
        s1 in proptest::collection::vec(-20i64..20, 1..9), s2 in proptest::collection::vec(-20i64..20, 1..9)) {
        let jc = JoinedComplex::from_base(base(which)).unwrap();
        for cx in [&jc.pair.base, &jc.pair.dual, &jc.qk] {
            let a = Cochain::from_values(p, d, values(&s1, cx.count(p) * d));
            let b = Cochain::from_values(p + 1, d, values(&s2, cx.count(p + 1) * d));
            prop_assert_eq!(inner(&coboundary(cx, &a).unwrap(), &b), inner(&a, &boundary(cx, &b).unwrap()));
            if p == 0 {
                let dd = coboundary(cx, &coboundary(cx, &a).unwrap()).unwrap();
                prop_assert!(dd.values.iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn star_is_an_isometry_with_the_sign_law(which in 0u8..4, p in 0usize..3, s in proptest::collection::vec(-20i64..20, 1..9)) {
        let pair = DualPairing::canonical(base(which)).unwrap();
        for side in [Side::K1, Side::K2] {
            let cx = pair.complex(side);
            let a = Cochain::from_values(p, 2, values(&s, cx.count(p) * 2));
            let sa = hodge_star(&pair, side, &a).unwrap();
            prop_assert_eq!(inner(&sa, &sa), inner(&a, &a));
            let back = hodge_star(&pair, side.other(), &sa).unwrap();
            let sign = if p == 1 { -1 } else { 1 };
            prop_assert_eq!(back.values, a.scale(sign).values);
        }
    }

    #[test]
    fn psi_is_linear_and_doubles_inner_products(which in 0u8..4,
        s1 in proptest::collection::vec(-20i64..20, 1..9), s2 in proptest::collection::vec(-20i64..20, 1..9)) {
        let jc = JoinedComplex::from_base(base(which)).unwrap();
        for side in [Side::K1, Side::K2] {
            let cx = jc.pair.complex(side);
            let a = Cochain::from_values(1, 3, values(&s1, cx.count(1) * 3));
            let b = Cochain::from_values(1, 3, values(&s2, cx.count(1) * 3));
            let pa = psi_embed(&jc, side, &a).unwrap();
            let pb = psi_embed(&jc, side, &b).unwrap();
            prop_assert_eq!(inner(&pa, &pb), 2 * inner(&a, &b));
            prop_assert_eq!(psi_embed(&jc, side, &a.add(&b.scale(3))).unwrap().values, pa.add(&pb.scale(3)).values);
        }
    }
}
