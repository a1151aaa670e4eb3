use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

use cstorus::lie::{AffineWeyl, LevelData, LieData, LieError};

/// `det(1 - e^{ad b})` on the complement of the torus, exponentiating the
/// 3x3 matrix of `ad b` numerically.
fn fp_by_diagonalization(lie: &LieData<f64>, x: f64) -> f64 {
    let e = lie.ad(&[x, 0.0, 0.0]).exp();
    let k = e.view((1, 1), (2, 2)).into_owned();
    (DMatrix::<f64>::identity(2, 2) - k).determinant()
}

#[test]
fn fp_density_at_quarter_turn() {
    let lie = LieData::<f64>::su2();
    assert!((lie.fp_density(&[PI / 2.0]) - 4.0).abs() < 1e-14);
    assert!((fp_by_diagonalization(&lie, PI / 2.0) - 4.0).abs() < 1e-12);
}

#[test]
fn small_levels() {
    let l3 = LevelData::<f64>::su2(3).unwrap();
    assert_eq!(l3.n_colors(), 2);
    assert!((l3.dim(0) - 1.0).abs() < 1e-14 && (l3.dim(1) - 1.0).abs() < 1e-14);
    let l4 = LevelData::<f64>::su2(4).unwrap();
    let dims: Vec<f64> = l4.colors().map(|c| l4.dim(c)).collect();
    for (d, w) in dims.iter().zip([1.0, 2f64.sqrt(), 1.0]) {
        assert!((d - w).abs() < 1e-14);
    }
    let l2 = LevelData::<f64>::su2(2).unwrap();
    assert_eq!(l2.n_colors(), 1);
}

#[test]
fn fusion_at_level_four() {
    let l = LevelData::<f64>::su2(4).unwrap();
    assert_eq!(l.fusion(1, 1, 0).unwrap(), 1);
    assert_eq!(l.fusion(1, 1, 2).unwrap(), 1);
    assert_eq!(l.fusion(1, 1, 1).unwrap(), 0);
    assert!(matches!(l.fusion(3, 0, 0), Err(LieError::ColorOutOfRange { .. })));
}

#[test]
fn twist_and_s_matrix_values() {
    let l = LevelData::<f64>::su2(5).unwrap();
    let want = Complex::from_polar(1.0, PI / 5.0 * 1.5);
    assert!((l.twist(1) - want).norm() < 1e-14);
    let s01 = (2.0f64 / 5.0).sqrt() * (2.0 * PI / 5.0).sin();
    assert!((l.s_entry(0, 1).re - s01).abs() < 1e-14);
}

#[test]
fn characters_at_shifted_points_give_s_ratios() {
    for k in 3..=8u32 {
        let l = LevelData::<f64>::su2(k).unwrap();
        for lam in l.colors() {
            for mu in l.colors() {
                let chi = l.exp_weight_trace(mu, &[l.shifted_point(lam)]).unwrap();
                let want = l.s_entry(lam, mu).re / l.s_entry(lam, 0).re;
                assert!((chi.re - want).abs() < 1e-12 && chi.im.abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #[test]
    fn fundamental_character_is_twice_cosine(x in -10.0f64..10.0) {
        let lie = LieData::<f64>::su2();
        let c = lie.character(1, &[x]);
        prop_assert!((c.re - 2.0 * x.cos()).abs() < 1e-13 && c.im.abs() < 1e-13);
    }

    #[test]
    fn fp_root_squares_to_density(x in -10.0f64..10.0) {
        let lie = LieData::<f64>::su2();
        let r = lie.fp_root(&[x]);
        prop_assert!((r * r - lie.fp_density(&[x])).abs() < 1e-12);
        prop_assert!((lie.fp_density(&[x]) - fp_by_diagonalization(&lie, x)).abs() < 1e-10);
    }

    #[test]
    fn characters_are_weyl_invariant(n in 0usize..8, x in -7.0f64..7.0, word in proptest::collection::vec(0usize..2, 0..6)) {
        let lie = LieData::<f64>::su2();
        let w = AffineWeyl::from_word(&word);
        let a = lie.character(n, &[x]);
        let b = lie.character(n, &[w.apply(x)]);
        prop_assert!((a - b).norm() < 1e-9);
        prop_assert!((lie.fp_density(&[x]) - lie.fp_density(&[w.apply(x)])).abs() < 1e-9);
    }

    #[test]
    fn trace_of_group_exp_is_character(n in 0usize..7, x in -4.0f64..4.0) {
        let lie = LieData::<f64>::su2();
        let u = lie.group_exp(&[x, 0.0, 0.0]);
        prop_assert!((lie.trace_in_color(n, &u) - lie.character(n, &[x])).norm() < 1e-10);
    }

    #[test]
    fn mollifier_vanishes_near_walls(x in -4.0f64..4.0, s in 0.01f64..0.5) {
        let lie = LieData::<f64>::su2();
        let m = lie.mollifier(s, &[x]).unwrap();
        let d = lie.wall_distance(&[x]);
        prop_assert!((0.0..=1.0).contains(&m));
        if d <= s / 2.0 { prop_assert_eq!(m, 0.0); }
        if d >= s { prop_assert_eq!(m, 1.0); }
    }
}
