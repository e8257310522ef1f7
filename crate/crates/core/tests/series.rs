use std::f64::consts::PI;

use approx::assert_relative_eq;
use npe_core::control::ControlParams;
use npe_core::series::certificates::{alpha, default_t_grid, j_lattice_constant};
use npe_core::series::coeffs::{coefficient_rows, write_coeff_csv};
use npe_core::series::{
    envelope_suite, eval_j, eval_tilde_j, lemma_ratio_suite, lower_bound_certificates, ode_identity_checks, reduction_check, sign_map, CoeffTables,
    Family, JIndex, JMethod, ProductKind, SuiteConfig, Verdict,
};

#[test]
fn coefficient_table_values() {
    let t = CoeffTables::new(2, 12);
    assert_relative_eq!(t.get(Family::C, 2), 0.5, epsilon = 1e-15);
    assert_relative_eq!(t.get(Family::BigB, 4), -PI / 4.0, epsilon = 1e-15);
    let rows = coefficient_rows(2, 12, 1e-13).unwrap();
    assert!(rows.iter().all(|r| (r.value - r.quadrature).abs() <= 1e-12));
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_coeff_csv(&rows, &mut a).unwrap();
    write_coeff_csv(&coefficient_rows(2, 12, 1e-13).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn j_values_agree_between_methods() {
    for p in [2, 3, 5] {
        for idx in [JIndex::J1, JIndex::J2, JIndex::J3, JIndex::J4] {
            for t in [0.05, 0.5] {
                let s = eval_j(idx, p, t, JMethod::Series).unwrap();
                let q = eval_j(idx, p, t, JMethod::Quadrature).unwrap();
                assert!((s.value - q.value).abs() <= 1e-9 + s.error, "{idx:?} p={p} t={t}");
            }
        }
        let j1 = eval_j(JIndex::J1, p, 0.0, JMethod::Quadrature).unwrap();
        assert_relative_eq!(j1.value, 5.0 * PI / (2.0 * p as f64), epsilon = 1e-10);
    }
}

#[test]
fn tilde_j_identity_holds() {
    for p in 2..=5 {
        for t in [0.0, 0.01, 1.0] {
            assert!(eval_tilde_j(p, t).unwrap().identity_residual <= 1e-8);
        }
    }
}

#[test]
fn constants_are_consistent() {
    for p in 2..=8 {
        let pf = p as f64;
        let s = (PI / pf).sin();
        let s2 = (2.0 * PI / pf).sin();
        assert_relative_eq!(alpha(p), 9.0 * s * s * s2 / (2.0 * PI * PI * pf.powi(6)), max_relative = 1e-14);
        assert_relative_eq!(j_lattice_constant(p), 9.0 * s * s * s2 / (4.0 * pf.powi(8)), max_relative = 1e-14);
    }
}

#[test]
fn certificates_pass_at_small_p() {
    let set = lower_bound_certificates(2..=3, &default_t_grid(10.0, 20)).unwrap();
    for r in &set.reports {
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.table_row());
    }
}

#[test]
fn literal_j_constant_fails_for_larger_p() {
    let set = lower_bound_certificates([4], &default_t_grid(10.0, 20)).unwrap();
    let j = set.reports.iter().find(|r| r.id == "cert_j_lattice").unwrap();
    assert_eq!(j.verdict, Verdict::Fail);
    let corrected = set.reports.iter().find(|r| r.id == "cert_j_lattice_from_alpha").unwrap();
    assert_eq!(corrected.verdict, Verdict::Pass);
}

#[test]
fn ratio_suite_and_envelopes() {
    let reports = lemma_ratio_suite(2..=3, &SuiteConfig::new(64));
    assert!(reports.iter().all(|r| r.verdict == Verdict::Pass));
    let small = lemma_ratio_suite([2], &SuiteConfig::new(4));
    assert!(small.iter().all(|r| r.verdict != Verdict::Fail));
    assert!(small.iter().any(|r| r.verdict == Verdict::Inconclusive));
    assert!(envelope_suite(1e-3, 12).all_pass());
}

#[test]
fn sign_maps_have_no_mismatches() {
    for kind in ProductKind::ALL {
        let m = sign_map(kind, 2, 12).unwrap();
        assert!(m.mismatches().is_empty(), "{kind:?}");
        let mut out = Vec::new();
        m.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), m.cells.len() + 1);
    }
}

#[test]
fn ode_identities_at_p2() {
    let r = ode_identity_checks(2, &[0.1, 0.5, 1.0], 1e-3).unwrap();
    assert!(r.max_residual() <= 1e-6);
    assert!(r.max_zero_identity() <= 1e-9);
    assert!(r.positivity_holds());
    assert_relative_eq!(r.j24_initial, 11.0 * PI / 8.0, epsilon = 1e-8);
    assert_relative_eq!(r.g_initial, 27.0 * PI / 4.0, epsilon = 1e-8);
}

#[test]
fn reduction_matches_product_formula() {
    let params = ControlParams::new(2, [1.0, 0.0, 1.0], 16).unwrap();
    let r = reduction_check(&params, 0.1).unwrap();
    assert!(r.rel_spectral_vs_product <= 1e-3);
    let sym = ControlParams::new(2, [1.0, 1.0, 1.0], 16).unwrap();
    let s = reduction_check(&sym, 0.1).unwrap();
    assert!(s.lhs_spectral.abs() < 1e-6 * r.lhs_spectral.abs());
}
