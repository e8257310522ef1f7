use std::sync::OnceLock;

use nalgebra::DVector;
use npe_core::feedback::{FeedbackSystem, ModeSet18, DEFAULT_SOLVER_TOL};
use npe_core::spectral::{mode_sq, random_field, SpectralField3, DEFAULT_EPS_DIV};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

fn system() -> &'static FeedbackSystem {
    static SYS: OnceLock<FeedbackSystem> = OnceLock::new();
    SYS.get_or_init(|| FeedbackSystem::assemble(2, 48, DEFAULT_SOLVER_TOL).unwrap())
}

#[test]
fn mode_set_matches_enumeration() {
    let m = ModeSet18::enumerate();
    assert_eq!(m.len(), 304);
    assert!(m.contains(&[1, 0, 0]));
    assert!(!m.contains(&[4, 1, 1]));
    assert!(m.modes().iter().all(|k| mode_sq(k) != 7));
}

#[test]
fn gram_matrix_is_hermitian_positive_definite() {
    let sys = system();
    assert!(sys.asymmetry() <= 1e-8);
    assert!(sys.spectrum().min_eigenvalue > 0.0);
}

#[test]
fn poisson_modes_vanish_outside_and_are_conjugate() {
    let sys = system();
    let (re, im) = sys.poisson_mode(&[1, 2, 0]).unwrap();
    let (re_n, im_n) = sys.poisson_mode(&[-1, -2, 0]).unwrap();
    let scale = re.iter().chain(&im).fold(0.0f64, |a, b| a.max(b.abs()));
    for i in 0..re.len() {
        assert!((re[i] - re_n[i]).abs() <= 1e-9 * scale);
        assert!((im[i] + im_n[i]).abs() <= 1e-9 * scale);
    }
    let full = sys.ball().extend(&re);
    assert!((0..full.len()).filter(|&f| !sys.ball().is_interior(f)).all(|f| full[f] == 0.0));
}

#[test]
fn quadratic_form_matches_energy() {
    let sys = system();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let modes = sys.modes();
    for _ in 0..10 {
        let mut c = DVector::<Complex64>::zeros(modes.len());
        for (j, k) in modes.modes().iter().enumerate() {
            if c[j] != Complex64::new(0.0, 0.0) {
                continue;
            }
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            c[j] = z;
            c[modes.index_of(&[-k[0], -k[1], -k[2]]).unwrap()] = z.conj();
        }
        let (quad, energy) = sys.energy_pair(&c).unwrap();
        assert!(quad > 0.0);
        assert!((quad - energy).abs() <= 1e-6 * energy, "{quad} vs {energy}");
    }
}

#[test]
fn feedback_cancels_low_modes() {
    let sys = system();
    for seed in 0..3 {
        let y = random_field(6, 30, seed).unwrap();
        let app = sys.apply(&y).unwrap();
        assert!(app.report.relative_low_mode_residual <= 1e-8, "{:?}", app.report);
        assert!(app.report.conjugacy_residual <= 1e-10 * app.report.c_norm);
        assert_eq!(app.report.outside_support_max, 0.0);
        let z = sys.corrected(&y, &app);
        assert!(sys.modes().modes().iter().all(|k| z.coeff(k).iter().all(|v| v.norm() <= 1e-8 * app.report.y_norm)));
    }
}

#[test]
fn high_mode_datum_has_zero_feedback() {
    let k = [4, 1, 1];
    let v = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let y = SpectralField3::make_field(&[(k, v)], 6, DEFAULT_EPS_DIV).unwrap();
    let app = system().apply(&y).unwrap();
    assert_eq!(app.report.c_norm, 0.0);
    assert_eq!(app.report.fy_norm, 0.0);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (a, hit_a) = FeedbackSystem::load_or_assemble(2, 32, 1e-10, Some(dir.path())).unwrap();
    let (b, hit_b) = FeedbackSystem::load_or_assemble(2, 32, 1e-10, Some(dir.path())).unwrap();
    assert!(!hit_a && hit_b);
    assert_eq!(a.matrix(), b.matrix());
    let y = random_field(4, 20, 9).unwrap();
    assert_eq!(a.apply(&y).unwrap().fy.coeffs, b.apply(&y).unwrap().fy.coeffs);
}

#[test]
fn small_grids_are_rejected() {
    assert!(FeedbackSystem::assemble(2, 30, 1e-10).is_err());
    assert!(FeedbackSystem::assemble(2, 33, 1e-10).is_err());
}
