use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use proptest::prelude::*;

use cstorus::oscgauss::oracle::{callable, exp_linear, OracleOptions};
use cstorus::oscgauss::{coupling_matrix, offdiag_block_reduce, OscGaussMeasure, Poly2};

#[test]
fn one_dimensional_value_against_oracle() {
    for s in [0.5, 1.0, 3.0] {
        let mu = OscGaussMeasure::centered(DMatrix::from_element(1, 1, s)).unwrap();
        let want = Complex::from_polar((2.0 * PI / s).sqrt(), -PI / 4.0);
        let engine = mu.fourier(&DVector::zeros(1)).unwrap();
        let oracle = exp_linear(&mu, &DVector::zeros(1), &Poly2::one(1), &OracleOptions::default()).unwrap();
        assert!((engine - want).norm() < 1e-12);
        assert!((oracle - want).norm() / want.norm() < 1e-6, "{oracle} vs {want}");
    }
}

#[test]
fn bounded_callable_in_one_dimension() {
    // ∫~ cos(x) dμ is the average of the Fourier transform at ±1
    let mu = OscGaussMeasure::new(Complex::new(1.0, 0.0), DVector::from_element(1, 0.3), DMatrix::from_element(1, 1, -1.7)).unwrap();
    let want = (mu.fourier(&DVector::from_element(1, 1.0)).unwrap() + mu.fourier(&DVector::from_element(1, -1.0)).unwrap()) / 2.0;
    let got = callable(&mu, |x: &[f64]| Complex::new(x[0].cos(), 0.0), &OracleOptions::default()).unwrap();
    assert!((got - want).norm() / want.norm() < 1e-3, "{got} vs {want}");
}

#[test]
fn invertible_coupling_prefactor() {
    let c = DMatrix::<f64>::from_row_slice(3, 3, &[1.0, 0.2, 0.0, -0.4, 2.0, 0.3, 0.0, 0.5, -1.2]);
    let red = offdiag_block_reduce(&c);
    assert_eq!(red.rank, 3);
    assert_eq!(red.kernel_dim(), 0);
    let want = (2.0 * PI).powi(3) / c.determinant().abs();
    assert!((red.prefactor - want).abs() < 1e-10 * want);
}

#[test]
fn rank_one_coupling_has_a_kernel_line() {
    let c = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.5, 1.0]);
    let red = offdiag_block_reduce(&c);
    assert_eq!(red.rank, 1);
    assert_eq!(red.kernel_dim(), 1);
    let k = red.kernel.column(0);
    assert!((&c * k).norm() < 1e-12);
    // with the kernel normalization the full measure integrates to the prefactor
    let full = OscGaussMeasure::centered(coupling_matrix(&c)).unwrap();
    assert_eq!(full.kernel_dim(), 2);
    let v = full.fourier(&DVector::zeros(4)).unwrap();
    assert!((v - Complex::new(red.prefactor, 0.0)).norm() < 1e-10);
    let oracle = exp_linear(&full, &DVector::zeros(4), &Poly2::one(4), &OracleOptions::default()).unwrap();
    assert!((oracle - v).norm() / v.norm() < 1e-3);
}

fn sym(vals: &[f64], n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |i, j| vals[(i * n + j) % vals.len()]);
    (&m + m.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_reduction_matches_full_measure(na in 1usize..4, nb in 1usize..4, vals in proptest::collection::vec(-2.0f64..2.0, 9)) {
        let c = DMatrix::from_fn(na, nb, |i, j| vals[i * 3 + j]);
        let red = offdiag_block_reduce(&c);
        prop_assert_eq!(red.kernel_dim(), nb - red.rank);
        let full = OscGaussMeasure::centered(coupling_matrix(&c)).unwrap();
        prop_assert_eq!(full.signature(), 0);
        let v = full.fourier(&DVector::zeros(na + nb)).unwrap();
        prop_assert!((v - Complex::new(red.prefactor, 0.0)).norm() < 1e-8 * red.prefactor);
    }

    #[test]
    fn translation_and_scaling(n in 1usize..4, vals in proptest::collection::vec(-2.0f64..2.0, 9),
        m in proptest::collection::vec(-1.0f64..1.0, 3), j in proptest::collection::vec(-1.0f64..1.0, 3), zr in 0.5f64..2.0) {
        let s = sym(&vals, n) + DMatrix::identity(n, n) * 0.1;
        let centered = match OscGaussMeasure::centered(s.clone()) { Ok(mu) => mu, Err(_) => return Ok(()) };
        prop_assume!(!centered.is_degenerate());
        let mean = DVector::from_fn(n, |i, _| m[i]);
        let jv = DVector::from_fn(n, |i, _| j[i]);
        let shifted = OscGaussMeasure::new(Complex::new(zr, 0.0), mean.clone(), s).unwrap();
        let a = shifted.fourier(&jv).unwrap() * zr;
        let b = centered.fourier(&jv).unwrap() * Complex::from_polar(1.0, jv.dot(&mean));
        prop_assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
    }

    #[test]
    fn linear_moments_are_stationary_points(n in 1usize..4, vals in proptest::collection::vec(-2.0f64..2.0, 9),
        j in proptest::collection::vec(-1.0f64..1.0, 3)) {
        // ∫~ x e^{i⟨j,x⟩} dμ = -i ∂_j ∫~ e^{i⟨j,x⟩} dμ
        let s = sym(&vals, n);
        // the central difference loses accuracy as j/λ grows
        prop_assume!(s.clone().symmetric_eigenvalues().iter().all(|l| l.abs() > 0.1));
        let mu = OscGaussMeasure::centered(s).unwrap();
        let jv = DVector::from_fn(n, |i, _| j[i]);
        for a in 0..n {
            let mut p = Poly2::constant(n, Complex::new(0.0, 0.0));
            p.g[a] = Complex::new(1.0, 0.0);
            let got = mu.integrate_exp_linear(&jv, &p).unwrap();
            let h = 1e-5;
            let mut jp = jv.clone();
            jp[a] += h;
            let mut jm = jv.clone();
            jm[a] -= h;
            let d = (mu.fourier(&jp).unwrap() - mu.fourier(&jm).unwrap()) / (2.0 * h);
            let want = d * Complex::new(0.0, -1.0);
            prop_assert!((got - want).norm() < 1e-5 * (1.0 + want.norm()), "{} vs {}", got, want);
        }
    }
}
