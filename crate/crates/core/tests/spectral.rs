use npe_core::spectral::{
    leray_project, phi_functional, psi_tensor, psi_trilinear, random_field, FieldJson, Lattice3, PsiMethod, RawField, SpectralField3, DEFAULT_EPS_DIV,
};
use npe_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: &SpectralField3, b: &SpectralField3) -> f64 {
    a.axpy(-1.0, b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn make_field_rejects_non_transverse_and_out_of_range() {
    let bad = [([1, 0, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])];
    assert!(matches!(SpectralField3::make_field(&bad, 4, DEFAULT_EPS_DIV), Err(Error::Transversality { .. })));
    let far = [([9, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])];
    assert!(matches!(SpectralField3::make_field(&far, 4, DEFAULT_EPS_DIV), Err(Error::ModeOutOfRange { .. })));
}

#[test]
fn make_field_fills_conjugates() {
    let f = SpectralField3::make_field(&[([1, 2, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.25)])], 3, DEFAULT_EPS_DIV).unwrap();
    assert_eq!(f.coeff(&[-1, -2, 0])[2], c(0.5, -0.25));
    assert!(f.invariant_violation().is_none());
}

#[test]
fn curl_round_trips_and_semigroup() {
    for seed in 0..5 {
        let y = random_field(5, 25, seed).unwrap();
        assert!(rel(&y.curl().curl_inv(), &y) <= 1e-12);
        assert!(rel(&y.curl_inv().curl(), &y) <= 1e-12);
        assert!(rel(&y.heat_evolve(0.2).heat_evolve(0.3), &y.heat_evolve(0.5)) <= 1e-12);
    }
}

#[test]
fn heat_evolution_decays_single_mode() {
    let y = SpectralField3::make_field(&[([1, 1, 0], [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])], 2, DEFAULT_EPS_DIV).unwrap();
    let n0 = y.l2_norm();
    for t in [0.1, 1.0, 3.0] {
        let ratio = y.heat_evolve(t).l2_norm() / n0;
        assert!((ratio - (-2.0 * t).exp()).abs() <= 1e-14);
    }
}

#[test]
fn psi_methods_agree() {
    for seed in 0..6 {
        let f = |s: u64| random_field(4, 12, 40 + 3 * seed + s).unwrap();
        let (a, b, d) = (f(0), f(1), f(2));
        let ps = psi_trilinear(&a, &b, &d, PsiMethod::PseudoSpectral).unwrap();
        let ds = psi_trilinear(&a, &b, &d, PsiMethod::DirectSum).unwrap();
        assert!((ps - ds).abs() <= 1e-10 * ds.abs());
    }
}

#[test]
fn psi_tensor_matches_trilinear() {
    let a = random_field(3, 8, 1).unwrap();
    let b = random_field(3, 8, 2).unwrap();
    let t = psi_tensor(&[&a, &b]).unwrap();
    let direct = psi_trilinear(&b, &a, &b, PsiMethod::DirectSum).unwrap();
    assert!((t[1][0][1] - direct).abs() <= 1e-10 * direct.abs().max(1.0));
}

#[test]
fn phi_is_homogeneous_and_zero_at_zero() {
    let y = random_field(4, 12, 3).unwrap();
    let phi = phi_functional(&y);
    assert!((phi_functional(&y.scale(2.5)) - 2.5 * phi).abs() <= 1e-12 * phi.abs());
    assert_eq!(phi_functional(&SpectralField3::zero(Lattice3::new(4).unwrap())), 0.0);
}

#[test]
fn lattice_mismatch_is_an_error() {
    let a = random_field(3, 8, 1).unwrap();
    let b = random_field(4, 8, 1).unwrap();
    assert!(matches!(a.add(&b), Err(Error::LatticeMismatch(..))));
}

#[test]
fn leray_projection_removes_divergence() {
    let lattice = Lattice3::new(3).unwrap();
    let mut coeffs = std::collections::BTreeMap::new();
    coeffs.insert([1, 0, 0], [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    coeffs.insert([-1, 0, 0], [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let raw = RawField { lattice, coeffs };
    assert!(raw.max_divergence() > 0.5);
    let y = leray_project(&raw, DEFAULT_EPS_DIV);
    assert_eq!(y.coeff(&[1, 0, 0])[0], c(0.0, 0.0));
    assert_eq!(y.coeff(&[1, 0, 0])[1], c(1.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn json_round_trip(seed in 0u64..1000, radius in 2usize..6) {
        let y = random_field(radius, 12, seed).unwrap();
        let text = serde_json::to_string(&y.to_json()).unwrap();
        let back: FieldJson = serde_json::from_str(&text).unwrap();
        let z = SpectralField3::from_json(&back).unwrap();
        prop_assert_eq!(z.coeffs(), y.coeffs());
    }

    #[test]
    fn inner_product_is_bilinear(s1 in 0u64..500, s2 in 0u64..500, a in -3.0f64..3.0) {
        let x = random_field(3, 10, s1).unwrap();
        let y = random_field(3, 10, s2).unwrap();
        let lhs = x.scale(a).inner(&y);
        prop_assert!((lhs - a * x.inner(&y)).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}
