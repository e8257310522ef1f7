use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use npe_core::heat1d::factors::{cos1, cos_cos2, neg_cos2, one_plus_cos, sin1, sin_half_sin2};
use npe_core::heat1d::{
    closed_form_coefficient, derivative_identities, grid_points, initial_triple, quadrature_coefficient, triple_product_integral, windowed_coeffs,
    Parity, TrigPoly, TrigTerm,
};
use npe_core::Error;
use proptest::prelude::*;

#[test]
fn resonant_and_generic_coefficients() {
    for p in 2..=8 {
        let pf = p as f64;
        let s = windowed_coeffs(&one_plus_cos(), p, 6 * p).unwrap();
        assert_abs_diff_eq!(s.coeff[p], 1.0 / pf, epsilon = 1e-15);
        let d = windowed_coeffs(&cos_cos2(), p, 6 * p).unwrap();
        assert_eq!(d.coeff[3 * p], 0.0);
        let b = windowed_coeffs(&neg_cos2(), p, 6 * p).unwrap();
        assert_abs_diff_eq!(b.coeff[2 * p], -1.0 / pf, epsilon = 1e-15);
    }
    let s = windowed_coeffs(&one_plus_cos(), 2, 12).unwrap();
    assert_abs_diff_eq!(s.coeff[1], 8.0 / (3.0 * PI), epsilon = 1e-14);
}

#[test]
fn rejects_short_truncation_and_mixed_parity() {
    assert!(matches!(windowed_coeffs(&one_plus_cos(), 3, 8), Err(Error::TruncationTooSmall { .. })));
    let mixed = TrigPoly::new(
        0.0,
        vec![TrigTerm { harmonic: 1, parity: Parity::Cos, amp: 1.0 }, TrigTerm { harmonic: 1, parity: Parity::Sin, amp: 1.0 }],
    )
    .unwrap();
    assert!(matches!(windowed_coeffs(&mixed, 2, 12), Err(Error::MixedParity)));
}

#[test]
fn repeated_harmonic_is_invalid() {
    let t = TrigTerm { harmonic: 2, parity: Parity::Cos, amp: 1.0 };
    assert!(TrigPoly::new(0.0, vec![t, t]).is_err());
}

#[test]
fn mass_is_conserved() {
    for f in [one_plus_cos(), cos_cos2(), neg_cos2()] {
        let s = windowed_coeffs(&f, 3, 64).unwrap().solution();
        let m0 = s.mass(0.0);
        for t in [0.01, 0.3, 2.0] {
            assert_abs_diff_eq!(s.mass(t), m0, epsilon = 1e-12);
        }
    }
}

#[test]
fn series_matches_green_oracle() {
    let s = windowed_coeffs(&one_plus_cos(), 2, 64).unwrap().solution();
    let worst = grid_points(24).iter().map(|&x| (s.eval(0.1, x) - s.eval_green(0.1, x, 6).unwrap()).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-10, "series vs Green oracle: {worst:e}");
}

#[test]
fn derivative_identities_follow_hypotheses() {
    let r = derivative_identities(2, &one_plus_cos(), 0.2, 64, 48).unwrap();
    assert!(r.consistent, "{r:?}");
    let r = derivative_identities(3, &sin_half_sin2(), 0.2, 64, 48).unwrap();
    assert!(r.vanishes_at_ends && r.residual_x <= 1e-10, "{r:?}");
    let r = derivative_identities(2, &cos1(), 0.2, 64, 48).unwrap();
    assert!(!r.vanishes_at_ends && !r.consistent);
}

#[test]
fn triple_products() {
    let p = 2;
    let cos = windowed_coeffs(&cos_cos2(), p, 64).unwrap().solution();
    let one = windowed_coeffs(&one_plus_cos(), p, 64).unwrap().solution();
    let sin = windowed_coeffs(&sin_half_sin2(), p, 64).unwrap().solution();
    for t in [0.05, 0.5] {
        assert_eq!(triple_product_integral(&cos, &one, &sin, t).unwrap().value, 0.0);
        let cube = triple_product_integral(&cos, &sin, &sin, t).unwrap();
        assert!(cube.value.abs() <= 1e-12 + cube.tail, "{cube:?}");
    }
    for p in 2..=6 {
        let j3 = initial_triple(p, &cos_cos2(), &cos_cos2(), &cos_cos2()).unwrap();
        assert_abs_diff_eq!(j3, 3.0 * PI / (2.0 * p as f64), epsilon = 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn closed_forms_match_quadrature(p in 2usize..=8, k in 0usize..48, which in 0usize..4) {
        let (f, parity) = [(one_plus_cos(), Parity::Cos), (cos_cos2(), Parity::Cos), (neg_cos2(), Parity::Cos), (sin1(), Parity::Sin)][which].clone();
        let closed = closed_form_coefficient(&f, parity, p, k);
        let quad = quadrature_coefficient(&f, parity, p, k, 1e-13).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-12, "p={} k={} closed={} quad={}", p, k, closed, quad);
    }
}
