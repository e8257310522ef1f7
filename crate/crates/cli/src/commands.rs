use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use npe_core::control::build_control;
use npe_core::feedback::FeedbackSystem;
use npe_core::npe::{default_time_grid, phi_time_integral, solve_npe, stabilize as run_stabilize, StabilizationConfig, LAMBDA_CAP};
use npe_core::series::certificates::default_t_grid;
use npe_core::series::coeffs::{coefficient_rows, write_coeff_csv};
use npe_core::series::odes::default_ode_grid;
use npe_core::series::{
    beta_empirical, envelope_suite, lemma_ratio_suite, lower_bound_certificates, ode_identity_checks, reduction_check, sign_map, BoundReport,
    ProductKind, SuiteConfig, Verdict,
};
use npe_core::spectral::{random_field, FieldJson, Lattice3, Mode, SpectralField3, DEFAULT_EPS_DIV};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::{Outcome, Suite};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub id: String,
    pub p: Option<usize>,
    pub verdict: Verdict,
    pub margin: f64,
    pub detail: String,
}

impl Check {
    fn from_report(suite: &'static str, r: &BoundReport) -> Self {
        Self { suite, id: r.id.clone(), p: r.p, verdict: r.verdict, margin: r.margin, detail: r.table_row() }
    }

    fn boolean(suite: &'static str, id: impl Into<String>, p: Option<usize>, ok: bool, margin: f64, detail: String) -> Self {
        Self { suite, id: id.into(), p, verdict: if ok { Verdict::Pass } else { Verdict::Fail }, margin, detail }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    body: T,
}

fn out_file(cfg: &ExperimentConfig, name: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    Ok(cfg.out_dir.join(name))
}

fn write_json<T: Serialize>(path: &Path, cfg: &ExperimentConfig, body: T) -> anyhow::Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(f), &Envelope { config: cfg, body })?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn coeffs(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let rows = coefficient_rows(cfg.p, 6 * cfg.p, cfg.tolerances.quadrature)?;
    let path = out_file(cfg, &format!("coeffs_p{}.csv", cfg.p))?;
    write_coeff_csv(&rows, BufWriter::new(File::create(&path)?))?;
    log::info!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(Outcome::Pass)
}

fn signs_suite(cfg: &ExperimentConfig) -> anyhow::Result<Vec<Check>> {
    let dir = cfg.out_dir.join("signs");
    fs::create_dir_all(&dir)?;
    let mut checks = Vec::new();
    for p in cfg.sign_p_range[0]..=cfg.sign_p_range[1] {
        for kind in ProductKind::ALL {
            let map = sign_map(kind, p, 6 * p)?;
            let path = dir.join(format!("{}_p{p}.csv", kind.name()));
            map.write_csv(BufWriter::new(File::create(&path)?))?;
            let bad = map.mismatches().len();
            checks.push(Check::boolean("signs", format!("sign_map_{}", kind.name()), Some(p), bad == 0, -(bad as f64), format!("{} cells, {bad} mismatches", map.cells.len())));
        }
    }
    Ok(checks)
}

fn ratios_suite(cfg: &ExperimentConfig) -> Vec<Check> {
    let mut checks: Vec<Check> = lemma_ratio_suite(cfg.p_values(), &SuiteConfig::new(cfg.a_cap)).iter().map(|r| Check::from_report("ratios", r)).collect();
    let env = envelope_suite(1e-3, 12);
    checks.extend(env.checks.iter().map(|r| Check::from_report("envelopes", r)));
    checks
}

fn odes_suite(cfg: &ExperimentConfig) -> anyhow::Result<Vec<Check>> {
    let mut checks = Vec::new();
    let r = ode_identity_checks(cfg.p, &default_ode_grid(), cfg.ode_dt)?;
    let res = r.max_residual();
    checks.push(Check::boolean("odes", "ode_residual", Some(cfg.p), res <= 1e-6, 1e-6 - res, format!("max residual {res:e} (dt = {})", cfg.ode_dt)));
    let z = r.max_zero_identity();
    checks.push(Check::boolean("odes", "zero_identities", Some(cfg.p), z <= 1e-9, 1e-9 - z, format!("max |zero integral| {z:e}")));
    checks.push(Check::boolean("odes", "rhs_positivity", Some(cfg.p), r.positivity_holds(), 0.0, "J2, ∫P S²(s2), [cos,cos,Mix] > 0 on the grid".into()));
    for p in cfg.p_values() {
        let r = ode_identity_checks(p, &default_ode_grid()[..2], cfg.ode_dt)?;
        let e1 = (r.j24_initial - r.j24_initial_expected).abs();
        let e2 = (r.g_initial - r.g_initial_expected).abs();
        checks.push(Check::boolean("odes", "j24_initial", Some(p), e1 <= 1e-8, 1e-8 - e1, format!("{} vs {}", r.j24_initial, r.j24_initial_expected)));
        checks.push(Check::boolean("odes", "g_initial", Some(p), e2 <= 1e-8, 1e-8 - e2, format!("{} vs {}", r.g_initial, r.g_initial_expected)));
    }
    Ok(checks)
}

fn certificates_suite(cfg: &ExperimentConfig) -> anyhow::Result<Vec<Check>> {
    let grid = default_t_grid(cfg.t_grid.t_max, cfg.t_grid.points);
    let set = lower_bound_certificates(cfg.p_values(), &grid)?;
    let mut checks: Vec<Check> = set.reports.iter().map(|r| Check::from_report("certificates", r)).collect();
    for (p, floor) in &set.j3_log_rate_floor {
        checks.push(Check::boolean("certificates", "j3_log_rate_floor", Some(*p), floor.is_finite(), *floor, format!("min log J3 + 6t = {floor}")));
    }
    let beta = beta_empirical(cfg.p, [cfg.a1, cfg.a2, cfg.a3], &default_t_grid(3.0, 20))?;
    checks.push(Check::boolean("certificates", "beta_empirical", Some(cfg.p), beta.beta_emp > 0.0, beta.beta_emp, format!("beta_emp = {:e} at t = {}", beta.beta_emp, beta.worst_t)));
    Ok(checks)
}

fn reduction_suite(cfg: &ExperimentConfig) -> anyhow::Result<(Vec<Check>, Vec<npe_core::series::ReductionReport>)> {
    let mut params = cfg.control();
    params.n = cfg.reduction_lattice;
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &t in &cfg.reduction_times {
        let r = reduction_check(&params, t)?;
        let rel = r.rel_spectral_vs_product;
        checks.push(Check::boolean("reduction", format!("spectral_vs_product_t{t}"), Some(params.p), rel <= 1e-3, 1e-3 - rel, format!("lhs {:e} vs product {:e}", r.lhs_spectral, r.product_formula)));
        let z = r.zero_family_one_max.max(r.zero_family_two_max);
        checks.push(Check::boolean("reduction", format!("zero_families_t{t}"), Some(params.p), z <= 1e-9, 1e-9 - z, format!("max {z:e}")));
        let worst_id = r.product_identities.iter().map(|i| i.residual / i.expected.abs().max(1e-300)).fold(0.0, f64::max);
        checks.push(Check::boolean("reduction", format!("product_identities_t{t}"), Some(params.p), worst_id <= 1e-9, 1e-9 - worst_id, format!("max relative residual {worst_id:e}")));
        let mut sym = params.clone();
        sym.a[1] = sym.a[2];
        let s = reduction_check(&sym, t)?;
        let ratio = s.lhs_spectral.abs() / r.lhs_spectral.abs().max(f64::MIN_POSITIVE);
        checks.push(Check::boolean("reduction", format!("equal_amplitudes_t{t}"), Some(params.p), ratio < 1e-6, 1e-6 - ratio, format!("|lhs(a2=a3)| / |lhs| = {ratio:e}")));
        reports.push(r);
    }
    Ok((checks, reports))
}

fn summarize(checks: &[Check]) -> Outcome {
    for c in checks {
        println!("{:<13} {:<34} p={:<3} {:<12} {}", c.suite, c.id, c.p.map(|p| p.to_string()).unwrap_or_else(|| "-".into()), format!("{:?}", c.verdict).to_uppercase(), c.detail);
    }
    let fails: Vec<&Check> = checks.iter().filter(|c| c.verdict == Verdict::Fail).collect();
    let inconclusive = checks.iter().filter(|c| c.verdict == Verdict::Inconclusive).count();
    println!("{} checks: {} pass, {} fail, {} inconclusive", checks.len(), checks.len() - fails.len() - inconclusive, fails.len(), inconclusive);
    if let Some(worst) = fails.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)) {
        return Outcome::Fail(format!("FAIL: {} check(s) failed; worst margin {} (p={:?}, margin {:e})", fails.len(), worst.id, worst.p, worst.margin));
    }
    if inconclusive > 0 {
        return Outcome::Fail(format!("INCONCLUSIVE: {inconclusive} check(s) could not be decided within the tail budget"));
    }
    Outcome::Pass
}

pub fn verify(cfg: &ExperimentConfig, suite: Suite) -> anyhow::Result<Outcome> {
    let mut checks = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Signs) {
        checks.extend(signs_suite(cfg)?);
    }
    if want(Suite::Ratios) {
        checks.extend(ratios_suite(cfg));
    }
    if want(Suite::Odes) {
        checks.extend(odes_suite(cfg)?);
    }
    if want(Suite::Certificates) {
        checks.extend(certificates_suite(cfg)?);
    }
    if want(Suite::Reduction) {
        checks.extend(reduction_suite(cfg)?.0);
    }
    let name = format!("{suite:?}").to_lowercase();
    #[derive(Serialize)]
    struct Body<'a> {
        suite: String,
        checks: &'a [Check],
    }
    write_json(&out_file(cfg, &format!("verify_{name}.json"))?, cfg, Body { suite: name.clone(), checks: &checks })?;
    Ok(summarize(&checks))
}

/// A real transverse single mode with amplitude one.
pub fn single_mode(k: Mode, radius: usize) -> anyhow::Result<SpectralField3> {
    let axis = if k[0] == 0 && k[1] == 0 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
    let kf = k.map(|v| v as f64);
    let v = [kf[1] * axis[2] - kf[2] * axis[1], kf[2] * axis[0] - kf[0] * axis[2], kf[0] * axis[1] - kf[1] * axis[0]];
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 {
        bail!("single mode needs k != 0");
    }
    Ok(SpectralField3::make_field(&[(k, v.map(|x| Complex64::new(x / len, 0.0)))], radius, DEFAULT_EPS_DIV)?)
}

fn parse_mode(s: &str) -> anyhow::Result<Mode> {
    let parts: Vec<i64> = s.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<_, _>>().with_context(|| format!("bad mode '{s}'"))?;
    match parts.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => bail!("mode '{s}' needs three integers"),
    }
}

fn load_field(path: &str) -> anyhow::Result<SpectralField3> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let j: FieldJson = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
    Ok(SpectralField3::from_json(&j).with_context(|| format!("validating {path}"))?)
}

fn datum(cfg: &ExperimentConfig, spec: &str) -> anyhow::Result<SpectralField3> {
    if spec == "control" {
        return Ok(build_control(&cfg.control())?);
    }
    if spec == "zero" {
        return Ok(SpectralField3::zero(Lattice3::new(cfg.lattice)?));
    }
    if spec == "random" {
        return Ok(random_field(cfg.lattice, 24, cfg.seed)?);
    }
    if let Some(k) = spec.strip_prefix("single-mode:") {
        return single_mode(parse_mode(k)?, cfg.lattice);
    }
    if let Some(p) = spec.strip_prefix("file:") {
        return load_field(p);
    }
    bail!("unknown initial datum '{spec}'")
}

fn threshold_scale(cfg: &ExperimentConfig, field: &SpectralField3, factor: f64) -> anyhow::Result<f64> {
    let (i_inf, err) = phi_time_integral(field, cfg.horizon, cfg.tolerances.phi)?;
    if !(i_inf > 0.0) {
        bail!("I(∞) = {i_inf:e} is not positive, so no blow-up threshold exists");
    }
    log::info!("I(∞) ≈ {i_inf:.10e} ± {err:.1e}; μ = {factor}/I(∞)");
    Ok(factor / i_inf)
}

pub fn simulate(cfg: &ExperimentConfig, initial: &str, mu: Option<f64>, factor: Option<f64>) -> anyhow::Result<Outcome> {
    let base = datum(cfg, initial)?;
    let scale = match (mu, factor) {
        (Some(_), Some(_)) => bail!("use either --mu or --threshold-factor"),
        (Some(m), None) => m,
        (None, Some(f)) => threshold_scale(cfg, &base, f)?,
        (None, None) => 1.0,
    };
    let omega0 = base.scale(scale);
    let times = default_time_grid(cfg.horizon, cfg.t_grid.points);
    let traj = solve_npe(&omega0, &times, cfg.tolerances.phi)?;
    let path = out_file(cfg, "trajectory.csv")?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "# initial={initial} mu={scale:e} status={} min_D={:e} alpha={:e}", traj.status.label(), traj.min_denominator(), traj.decay_constant)?;
    traj.write_csv(&mut w)?;
    w.flush()?;
    println!("status {} (min D = {:.6e})", traj.status.label(), traj.min_denominator());
    log::info!("wrote {}", path.display());
    Ok(Outcome::Pass)
}

pub fn stabilize(cfg: &ExperimentConfig, y0_spec: &str, cache_dir: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let params = cfg.control();
    let y0 = if y0_spec == "blowup" {
        let u = build_control(&params)?;
        let mu = threshold_scale(cfg, &u, cfg.blowup_factor)?;
        u.scale(mu)
    } else {
        datum(cfg, y0_spec)?
    };
    let dir = cache_dir.or_else(FeedbackSystem::cache_dir_from_env);
    let (sys, hit) = FeedbackSystem::load_or_assemble(params.p, cfg.n, cfg.tolerances.solver, dir.as_deref())?;
    if hit {
        log::info!("feedback assembly skipped (cache hit)");
    }
    let scfg = StabilizationConfig { horizon: cfg.horizon, lambda0: cfg.lambda0, lambda_cap: LAMBDA_CAP, tol: cfg.tolerances.phi.max(1e-10), grid_points: 120 };
    let report = run_stabilize(&y0, &params, &sys, &scfg)?;
    #[derive(Serialize)]
    struct Body<'a> {
        y0: &'a str,
        cache_hit: bool,
        report: &'a npe_core::npe::StabilizationReport,
    }
    write_json(&out_file(cfg, "stabilization.json")?, cfg, Body { y0: y0_spec, cache_hit: hit, report: &report })?;
    println!(
        "stabilization {}: λ = {:?}, min D = {:.6}, α_emp = {:.4}",
        if report.passed { "PASS" } else { "FAIL" },
        report.lambda,
        report.min_denominator,
        report.alpha_emp
    );
    if report.passed {
        Ok(Outcome::Pass)
    } else {
        let trace: Vec<String> = report.trace.iter().map(|t| format!("λ={} minD={:.4}", t.lambda, t.min_denominator)).collect();
        Ok(Outcome::Fail(format!("FAIL: λ cap reached without stabilization; trace: {}", trace.join(", "))))
    }
}

pub fn reduction(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (checks, reports) = reduction_suite(cfg)?;
    #[derive(Serialize)]
    struct Body<'a> {
        checks: &'a [Check],
        reports: &'a [npe_core::series::ReductionReport],
    }
    write_json(&out_file(cfg, "reduction.json")?, cfg, Body { checks: &checks, reports: &reports })?;
    Ok(summarize(&checks))
}
