use npe_core::control::{
    associativity_residual, build_control, coordinate_shift, curl_inv_residual, divergence_residual, support_check, thin_mode_max, ControlParams, TensorFactorization,
};

#[test]
fn control_is_divergence_free_and_thin_modes_vanish() {
    for p in [2, 3] {
        let params = ControlParams::new(p, [1.0, 0.0, 1.0], 8 * p).unwrap();
        let u = build_control(&params).unwrap();
        assert!(divergence_residual(&u) <= 1e-10);
        assert_eq!(thin_mode_max(&u), 0.0);
        assert!(curl_inv_residual(&params, &u) <= 1e-10 * u.l2_norm());
    }
}

#[test]
fn degenerate_amplitudes_are_rejected() {
    assert!(ControlParams::new(2, [0.0; 3], 16).is_err());
    assert!(ControlParams::new(1, [1.0, 0.0, 1.0], 16).is_err());
}

#[test]
fn factorization_is_exact() {
    let f = TensorFactorization::new([1.0, 0.3, -0.7]);
    assert!(f.grid_residual(24) <= 1e-12);
    assert!(f.spectral_residual(2, 12) <= 1e-12);
    assert!(associativity_residual(&ControlParams::default()) <= 1e-12);
}

#[test]
fn support_improves_with_truncation() {
    let mut ratios = Vec::new();
    for n in [8, 16] {
        let params = ControlParams::new(2, [1.0, 0.0, 1.0], n).unwrap();
        let u = build_control(&params).unwrap();
        ratios.push(support_check(&u, &params, 2 * n + 8).unwrap().ratio);
    }
    assert!(ratios[1] < ratios[0], "{ratios:?}");
}

#[test]
fn shifts_form_a_group_action() {
    let u = build_control(&ControlParams::default()).unwrap();
    assert_eq!(coordinate_shift(&u, [0.0; 3]).coeffs(), u.coeffs());
    let s = [0.3, -1.1, 2.0];
    let back = coordinate_shift(&coordinate_shift(&u, s), s.map(|x| -x));
    assert!(back.axpy(-1.0, &u).unwrap().l2_norm() <= 1e-14 * u.l2_norm());
    let norm = coordinate_shift(&u, s).l2_norm();
    assert!((norm - u.l2_norm()).abs() <= 1e-13 * norm);
}
