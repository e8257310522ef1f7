use npe_core::control::{build_control, ControlParams};
use npe_core::npe::{classify, default_time_grid, phi_time_integral, solve_npe, Status};
use npe_core::spectral::{SpectralField3, DEFAULT_EPS_DIV};
use num_complex::Complex64;

fn single_mode() -> SpectralField3 {
    let v = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    SpectralField3::make_field(&[([1, 1, 0], v)], 4, DEFAULT_EPS_DIV).unwrap()
}

#[test]
fn single_mode_is_linear() {
    let y = single_mode();
    let (i, _) = phi_time_integral(&y, 5.0, 1e-8).unwrap();
    assert_eq!(i, 0.0);
    let traj = solve_npe(&y, &default_time_grid(5.0, 12), 1e-8).unwrap();
    assert_eq!(traj.status, Status::Decaying);
    let n0 = y.l2_norm();
    for r in &traj.rows {
        assert!((r.d - 1.0).abs() <= 1e-14);
        assert!((r.y_norm.unwrap() - n0 * (-2.0 * r.t).exp()).abs() <= 1e-12 * n0);
    }
    let c = classify(&y, 10.0, 5.0, 1e-8).unwrap();
    assert_eq!(c.b_value, 0.0);
    assert_eq!(c.status, Status::Decaying);
}

#[test]
fn control_threshold_separates_decay_and_blowup() {
    let u = build_control(&ControlParams::default()).unwrap();
    let (i_inf, _) = phi_time_integral(&u, 10.0, 1e-8).unwrap();
    assert!(i_inf > 0.0);
    let times = default_time_grid(10.0, 30);
    let low = solve_npe(&u.scale(0.5 / i_inf), &times, 1e-8).unwrap();
    assert_eq!(low.status, Status::Decaying);
    assert!(low.min_denominator() >= 0.5 - 1e-8);
    let high = solve_npe(&u.scale(2.0 / i_inf), &times, 1e-8).unwrap();
    assert!(matches!(high.status, Status::BlowupAt(t) if t > 0.0 && t < 10.0));
    let neg = solve_npe(&u.scale(-1.0), &times, 1e-8).unwrap();
    assert!(neg.rows.iter().skip(1).all(|r| r.d > 1.0));
}

#[test]
fn classification_of_control_direction() {
    let u = build_control(&ControlParams::default()).unwrap();
    let c = classify(&u, 1.0, 10.0, 1e-8).unwrap();
    assert!(c.b_value > 0.0);
    let mu = c.gamma_scale.unwrap();
    assert!(matches!(classify(&u, 2.0 * mu, 10.0, 1e-8).unwrap().status, Status::BlowupAt(_)));
    assert_eq!(classify(&u, 0.5 * mu, 10.0, 1e-8).unwrap().status, Status::Decaying);
}

#[test]
fn trajectory_csv_has_header() {
    let traj = solve_npe(&single_mode(), &default_time_grid(1.0, 4), 1e-8).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,S_norm,phi,I,D,y_norm,status"));
    assert_eq!(text.lines().count(), traj.rows.len() + 1);
}
