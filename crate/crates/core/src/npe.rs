//! NPE trajectories from the explicit formula ω(t) = S(t)ω₀ / D(t),
//! D(t) = 1 − ∫₀ᵗ Φ(S(τ)ω₀) dτ; blow-up detection, classification and stabilization.

use std::io::Write;

use serde::Serialize;

use crate::control::{build_control, ControlParams};
use crate::feedback::{FeedbackReport, FeedbackSystem};
use crate::quad::{barycentric_eval, barycentric_weights, gauss_legendre, gk15_from_values, kronrod_nodes};
use crate::spectral::{psi_tensor, torus_volume, SpectralField3};
use crate::{Error, Result};

/// Denominator floor below which a trajectory counts as at blow-up.
pub const DELTA_BLOW: f64 = 1e-6;
/// Bisection width for blow-up times.
pub const BISECTION_TOL: f64 = 1e-8;
/// First geometric panel edge.
pub const FIRST_EDGE: f64 = 1e-4;
pub const MAX_REFINE: u32 = 5;
pub const LAMBDA_CAP: f64 = 1048576.0;

/// Φ-integrand data sampled once for a small basis of fields: at Kronrod
/// nodes τ it stores Ψ(S b_a, S b_b, S b_c) and the Gram entries ⟨S b_a, S b_b⟩,
/// so Φ(S(τ)Σ c_a b_a) is available for every coefficient vector c.
pub struct PhiSampler {
    basis: Vec<SpectralField3>,
    edges: Vec<f64>,
    /// Per panel: the 15 nodes and the corresponding samples.
    panels: Vec<Panel>,
    interp_weights: Vec<f64>,
    gl: (Vec<f64>, Vec<f64>),
}

struct Panel {
    a: f64,
    b: f64,
    nodes: [f64; 15],
    psi: Vec<Vec<Vec<Vec<f64>>>>,
    gram: Vec<Vec<Vec<f64>>>,
}

/// Panel edges 0, FIRST_EDGE, 2·FIRST_EDGE, … up to t_max, each split into `sub` parts.
fn panel_edges(t_max: f64, sub: usize) -> Vec<f64> {
    let mut coarse = vec![0.0];
    let mut e = FIRST_EDGE.min(t_max);
    while e < t_max {
        coarse.push(e);
        e *= 2.0;
    }
    coarse.push(t_max);
    let mut out = vec![0.0];
    for w in coarse.windows(2) {
        for s in 1..=sub {
            out.push(w[0] + (w[1] - w[0]) * s as f64 / sub as f64);
        }
    }
    out
}

impl PhiSampler {
    pub fn new(basis: Vec<SpectralField3>, t_max: f64, sub: usize) -> Result<Self> {
        if basis.is_empty() || basis.len() > 3 {
            return Err(Error::InvalidParameter("sampler basis needs one to three fields".into()));
        }
        if !(t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {t_max} must be positive")));
        }
        let edges = panel_edges(t_max, sub);
        let mut panels = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let nodes = kronrod_nodes(w[0], w[1]);
            let mut psi = Vec::with_capacity(15);
            let mut gram = Vec::with_capacity(15);
            for &tau in &nodes {
                let ev: Vec<SpectralField3> = basis.iter().map(|b| b.heat_evolve(tau)).collect();
                let refs: Vec<&SpectralField3> = ev.iter().collect();
                psi.push(psi_tensor(&refs)?);
                gram.push(ev.iter().map(|x| ev.iter().map(|y| x.inner(y)).collect()).collect());
            }
            panels.push(Panel { a: w[0], b: w[1], nodes, psi, gram });
        }
        let xs = kronrod_nodes(-1.0, 1.0);
        Ok(Self { basis, edges, panels, interp_weights: barycentric_weights(&xs), gl: gauss_legendre(15) })
    }

    pub fn basis(&self) -> &[SpectralField3] {
        &self.basis
    }

    pub fn horizon(&self) -> f64 {
        *self.edges.last().expect("non-empty")
    }

    pub fn evaluations(&self) -> usize {
        self.panels.len() * 15
    }

    fn phi_at(&self, panel: &Panel, i: usize, c: &[f64]) -> f64 {
        let m = c.len();
        let mut psi = 0.0;
        let mut nsq = 0.0;
        for a in 0..m {
            for b in 0..m {
                nsq += c[a] * c[b] * panel.gram[i][a][b];
                for d in 0..m {
                    psi += c[a] * c[b] * c[d] * panel.psi[i][a][b][d];
                }
            }
        }
        if nsq <= 1e-14 * torus_volume() {
            0.0
        } else {
            psi / nsq
        }
    }

    /// Ψ(S(τ)ω, S(τ)ω, S(τ)ω) at the first node, for diagnostics.
    pub fn tensor_at_start(&self) -> &Vec<Vec<Vec<f64>>> {
        &self.panels[0].psi[0]
    }

    /// The integral I(t) for the combination ω₀ = Σ c_a b_a.
    pub fn integral(&self, c: &[f64]) -> Result<PhiIntegral<'_>> {
        if c.len() != self.basis.len() {
            return Err(Error::InvalidParameter("coefficient count does not match basis".into()));
        }
        let mut cum = vec![0.0];
        let mut err = vec![0.0];
        let mut vals = Vec::with_capacity(self.panels.len());
        let mut abs_total = 0.0;
        for p in &self.panels {
            let v: [f64; 15] = std::array::from_fn(|i| self.phi_at(p, i, c));
            let (k, e) = gk15_from_values(p.a, p.b, &v);
            let abs: [f64; 15] = v.map(f64::abs);
            abs_total += gk15_from_values(p.a, p.b, &abs).0;
            cum.push(cum.last().unwrap() + k);
            err.push(err.last().unwrap() + e);
            vals.push(v);
        }
        Ok(PhiIntegral { sampler: self, cum, err, vals, abs_total })
    }
}

/// I(t) for one coefficient vector: panel sums plus interpolation inside panels.
pub struct PhiIntegral<'a> {
    sampler: &'a PhiSampler,
    cum: Vec<f64>,
    err: Vec<f64>,
    vals: Vec<[f64; 15]>,
    abs_total: f64,
}

impl PhiIntegral<'_> {
    fn panel_of(&self, t: f64) -> usize {
        let e = &self.sampler.edges;
        match e.binary_search_by(|x| x.partial_cmp(&t).expect("finite time")) {
            Ok(i) => i.min(e.len() - 2),
            Err(i) => i.saturating_sub(1).min(e.len() - 2),
        }
    }

    /// Φ(S(t)ω₀) from the panel interpolant.
    pub fn phi(&self, t: f64) -> f64 {
        let i = self.panel_of(t);
        let p = &self.sampler.panels[i];
        let x = (2.0 * t - p.a - p.b) / (p.b - p.a);
        let xs = kronrod_nodes(-1.0, 1.0);
        barycentric_eval(&xs, &self.vals[i], &self.sampler.interp_weights, x)
    }

    /// (I(t), error bound) for 0 ≤ t ≤ horizon.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.sampler.horizon());
        let i = self.panel_of(t);
        let p = &self.sampler.panels[i];
        if t <= p.a {
            return (self.cum[i], self.err[i]);
        }
        let (gx, gw) = &self.sampler.gl;
        let half = 0.5 * (t - p.a);
        let partial: f64 = gx.iter().zip(gw).map(|(&x, &w)| w * self.phi(p.a + half * (x + 1.0))).sum::<f64>() * half;
        let frac = (t - p.a) / (p.b - p.a);
        (self.cum[i] + partial, self.err[i] + frac * (self.err[i + 1] - self.err[i]))
    }

    pub fn total(&self) -> (f64, f64) {
        (*self.cum.last().unwrap(), *self.err.last().unwrap())
    }

    /// ∫₀^T |Φ| dτ, the scale against which the tolerance is relative.
    pub fn abs_total(&self) -> f64 {
        self.abs_total
    }

    fn converged(&self, tol: f64) -> bool {
        self.total().1 <= tol * self.abs_total.max(f64::MIN_POSITIVE)
    }
}

/// Builds a sampler, refining panels until the GK error of every combination in `cs`
/// is within `tol` relative to ∫|Φ|.
pub fn converged_sampler(basis: Vec<SpectralField3>, t_max: f64, tol: f64, cs: &[Vec<f64>]) -> Result<PhiSampler> {
    let mut sub = 1;
    for _ in 0..=MAX_REFINE {
        let s = PhiSampler::new(basis.clone(), t_max, sub)?;
        let mut ok = true;
        for c in cs {
            let i = s.integral(c)?;
            if !i.converged(tol) {
                ok = false;
            }
        }
        if ok {
            return Ok(s);
        }
        sub *= 2;
    }
    let s = PhiSampler::new(basis, t_max, sub / 2)?;
    let worst = cs.iter().map(|c| s.integral(c).map(|i| i.total().1)).collect::<Result<Vec<_>>>()?;
    Err(Error::QuadratureFailed { tol, evals: s.evaluations() * worst.len() })
}

/// (∫₀ᵗ Φ(S(τ)ω₀) dτ, error bound), tolerance relative to ∫|Φ|.
pub fn phi_time_integral(omega0: &SpectralField3, t: f64, tol: f64) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("time {t} must be non-negative")));
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let s = converged_sampler(vec![omega0.clone()], t, tol, &[vec![1.0]])?;
    let i = s.integral(&[1.0])?;
    Ok(i.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Status {
    Decaying,
    BlowupAt(f64),
    Growing,
    Undetermined(f64),
}

impl Status {
    pub fn label(&self) -> String {
        match self {
            Status::Decaying => "decaying".into(),
            Status::BlowupAt(t) => format!("blowup_at={t:.10}"),
            Status::Growing => "growing".into(),
            Status::Undetermined(t) => format!("undetermined_T={t}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub s_norm: f64,
    pub phi: f64,
    pub i: f64,
    pub i_err: f64,
    pub d: f64,
    /// ‖ω(t)‖, populated only where D > DELTA_BLOW.
    pub y_norm: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NpeTrajectory {
    pub rows: Vec<TrajectoryRow>,
    pub status: Status,
    /// sup ‖ω(t)‖eᵗ/‖ω₀‖ over rows with D > DELTA_BLOW.
    pub decay_constant: f64,
    /// The same with rate e^{−t/2}.
    pub decay_constant_half: f64,
    /// Bracket D(t₀ − δ) > 0 > D(t₀ + δ) at blow-up, when applicable.
    pub bracket: Option<(f64, f64)>,
}

impl NpeTrajectory {
    pub fn min_denominator(&self) -> f64 {
        self.rows.iter().map(|r| r.d).fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "S_norm", "phi", "I", "D", "y_norm", "status"])?;
        let label = self.status.label();
        for r in &self.rows {
            out.write_record([
                format!("{:.12e}", r.t),
                format!("{:.12e}", r.s_norm),
                format!("{:.12e}", r.phi),
                format!("{:.12e}", r.i),
                format!("{:.12e}", r.d),
                r.y_norm.map(|v| format!("{v:.12e}")).unwrap_or_default(),
                label.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// 0 together with `count` geometric points from 1e−4 to t_max.
pub fn default_time_grid(t_max: f64, count: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    let (lo, hi) = (1e-4f64.ln(), t_max.ln());
    for i in 0..count {
        g.push((lo + (hi - lo) * i as f64 / (count - 1) as f64).exp());
    }
    g
}

/// Trajectory of Σ c_a b_a on `times` using an existing sampler.
pub fn trajectory_from(sampler: &PhiSampler, c: &[f64], times: &[f64]) -> Result<NpeTrajectory> {
    if times.first() != Some(&0.0) {
        return Err(Error::InvalidParameter("time grid must start at 0".into()));
    }
    let integral = sampler.integral(c)?;
    let omega0 = combine(sampler.basis(), c)?;
    let norm0 = omega0.l2_norm();
    let d_at = |t: f64| 1.0 - integral.at(t).0;
    let mut rows = Vec::with_capacity(times.len());
    let mut status = None;
    let mut bracket = None;
    for (idx, &t) in times.iter().enumerate() {
        let (i, e) = integral.at(t);
        let d = 1.0 - i;
        let s_norm = omega0.heat_evolve(t).l2_norm();
        if d <= DELTA_BLOW && status.is_none() {
            let (mut lo, mut hi) = (times[idx.saturating_sub(1)], t);
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if d_at(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            bracket = Some((lo, hi));
            status = Some(Status::BlowupAt(0.5 * (lo + hi)));
        }
        let y_norm = if status.is_none() && d > DELTA_BLOW { Some(s_norm / d) } else { None };
        rows.push(TrajectoryRow { t, s_norm, phi: integral.phi(t), i, i_err: e, d, y_norm });
    }
    let live = rows.iter().filter_map(|r| r.y_norm.map(|y| (r.t, y)));
    let (mut alpha, mut alpha_half): (f64, f64) = (0.0, 0.0);
    for (t, y) in live {
        if norm0 > 0.0 {
            alpha = alpha.max(y * t.exp() / norm0);
            alpha_half = alpha_half.max(y * (0.5 * t).exp() / norm0);
        }
    }
    let status = status.unwrap_or_else(|| {
        let last = rows.last().expect("non-empty grid");
        let t_max = last.t;
        let min_d = rows.iter().map(|r| r.d).fold(f64::INFINITY, f64::min);
        let growth = last.y_norm.unwrap_or(0.0) / norm0.max(f64::MIN_POSITIVE);
        if last.phi > 0.0 && last.d > 0.0 && last.d < 0.1 && growth >= 10.0 {
            Status::Growing
        } else if min_d > DELTA_BLOW && (last.d >= 0.1 || last.phi <= 0.0 || last.phi.abs() * t_max < 1e-12) {
            Status::Decaying
        } else {
            Status::Undetermined(t_max)
        }
    });
    Ok(NpeTrajectory { rows, status, decay_constant: alpha, decay_constant_half: alpha_half, bracket })
}

fn combine(basis: &[SpectralField3], c: &[f64]) -> Result<SpectralField3> {
    let mut acc = basis[0].scale(c[0]);
    for (b, &ci) in basis.iter().zip(c).skip(1) {
        acc = acc.axpy(ci, b)?;
    }
    Ok(acc)
}

/// Solves the NPE for ω₀ on `times` (starting at 0).
pub fn solve_npe(omega0: &SpectralField3, times: &[f64], tol: f64) -> Result<NpeTrajectory> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if t_max == 0.0 {
        return Err(Error::InvalidParameter("time grid needs a positive time".into()));
    }
    let s = converged_sampler(vec![omega0.clone()], t_max, tol, &[vec![1.0]])?;
    trajectory_from(&s, &[1.0], times)
}

/// ω(t) = S(t)ω₀/D(t) for one trajectory row, or None past blow-up.
pub fn state_at(omega0: &SpectralField3, row: &TrajectoryRow) -> Option<SpectralField3> {
    row.y_norm.map(|_| omega0.heat_evolve(row.t).scale(1.0 / row.d))
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    /// b(v) = max_{t ≤ T} I_v(t) for v = ω/‖ω‖.
    pub b_value: f64,
    pub argmax_t: f64,
    /// 1/b(v) when b(v) > tol.
    pub gamma_scale: Option<f64>,
    /// Status of μv for the requested μ.
    pub mu: f64,
    pub status: Status,
}

/// Classifies μ·v/‖v‖ through b(v) = max_t ∫₀ᵗ Φ(S(τ)v) dτ on [0, t_max].
pub fn classify(v: &SpectralField3, mu: f64, t_max: f64, tol: f64) -> Result<Classification> {
    let norm = v.l2_norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("cannot classify the zero field".into()));
    }
    let unit = v.scale(1.0 / norm);
    let s = converged_sampler(vec![unit], t_max, tol, &[vec![1.0]])?;
    let integral = s.integral(&[1.0])?;
    let grid = dense_grid(&s);
    let (mut b, mut at) = (0.0, 0.0);
    for &t in &grid {
        let (i, _) = integral.at(t);
        if i > b {
            b = i;
            at = t;
        }
    }
    let gamma = (b > tol).then(|| 1.0 / b);
    let prod = mu * b;
    let status = if prod < 1.0 - tol {
        Status::Decaying
    } else if prod > 1.0 + tol {
        let mut lo = 0.0;
        let mut hi = at;
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if 1.0 - mu * integral.at(mid).0 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Status::BlowupAt(0.5 * (lo + hi))
    } else if (t_max - at) <= 1e-9 * t_max && integral.phi(t_max) > 0.0 {
        Status::Growing
    } else {
        Status::Undetermined(t_max)
    };
    Ok(Classification { b_value: b, argmax_t: at, gamma_scale: gamma, mu, status })
}

/// Kronrod nodes and panel edges of a sampler, sorted.
fn dense_grid(s: &PhiSampler) -> Vec<f64> {
    let mut g: Vec<f64> = s.edges.clone();
    for p in &s.panels {
        g.extend_from_slice(&p.nodes);
    }
    g.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    g
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaTrial {
    pub lambda: f64,
    pub min_denominator: f64,
    pub alpha_emp: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizationConfig {
    pub horizon: f64,
    pub lambda0: f64,
    pub lambda_cap: f64,
    pub tol: f64,
    pub grid_points: usize,
}

impl Default for StabilizationConfig {
    fn default() -> Self {
        Self { horizon: 10.0, lambda0: 1.0, lambda_cap: LAMBDA_CAP, tol: 1e-6, grid_points: 120 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizationReport {
    pub p: usize,
    pub lattice_radius: usize,
    pub poisson_grid: usize,
    pub solver_tol: f64,
    pub config: StabilizationConfig,
    pub lambda: Option<f64>,
    /// min over t ∈ (0, T] of D(t) for the accepted λ (or the last trial).
    pub min_denominator: f64,
    /// max over the grid of ‖y(t)‖eᵗ/‖y₀ + u₀‖.
    pub alpha_emp: f64,
    pub alpha_emp_half_rate: f64,
    pub y0_norm: f64,
    pub z0_norm: f64,
    /// max over 0 < |k|² < 18 of |ẑ₀(k)| after projection.
    pub z0_low_mode_max: f64,
    pub feedback: FeedbackReport,
    pub trace: Vec<LambdaTrial>,
    /// Ψ(z,z,z), Ψ terms linear, quadratic and cubic in λ at t = 0 (coefficients of −λ, λ², −λ³).
    pub psi_decomposition: [f64; 4],
    pub passed: bool,
}

/// Searches λ = λ₀, 2λ₀, … for a starting control u₀ = Fy₀ − λu that keeps D(t) > 1 on (0, T].
pub fn stabilize(y0: &SpectralField3, params: &ControlParams, sys: &FeedbackSystem, cfg: &StabilizationConfig) -> Result<StabilizationReport> {
    if sys.p() != params.p {
        return Err(Error::InvalidParameter(format!("feedback system built for p = {} but control uses p = {}", sys.p(), params.p)));
    }
    let y0 = y0.with_radius(params.n)?;
    let u = build_control(params)?;
    let app = sys.apply(&y0)?;
    let z0 = sys.corrected(&y0, &app);
    let z0_low = sys.modes().modes().iter().map(|k| crate::spectral::norm3(&z0.coeff(k))).fold(0.0, f64::max);
    let times = default_time_grid(cfg.horizon, cfg.grid_points);
    let mut lambdas = Vec::new();
    let mut lam = cfg.lambda0;
    while lam <= cfg.lambda_cap {
        lambdas.push(lam);
        lam *= 2.0;
    }
    let trial_coeffs: Vec<Vec<f64>> = lambdas.iter().map(|&l| vec![1.0, -l]).collect();
    let z_zero = z0.l2_norm_sq() == 0.0;
    let sampler = if z_zero {
        converged_sampler(vec![u.clone()], cfg.horizon, cfg.tol, &[vec![-1.0]])?
    } else {
        converged_sampler(vec![z0.clone(), u.clone()], cfg.horizon, cfg.tol, &trial_coeffs[..1])?
    };
    let t0 = sampler.tensor_at_start();
    let decomposition = if z_zero {
        [0.0, 0.0, 0.0, t0[0][0][0]]
    } else {
        [
            t0[0][0][0],
            t0[0][0][1] + t0[0][1][0] + t0[1][0][0],
            t0[0][1][1] + t0[1][0][1] + t0[1][1][0],
            t0[1][1][1],
        ]
    };
    let mut trace = Vec::new();
    let mut accepted = None;
    for &l in &lambdas {
        let c = if z_zero { vec![-l] } else { vec![1.0, -l] };
        let traj = trajectory_from(&sampler, &c, &times)?;
        let min_d = traj.rows.iter().skip(1).map(|r| r.d).fold(f64::INFINITY, f64::min);
        let passed = min_d > 1.0 && traj.decay_constant.is_finite() && traj.rows.iter().all(|r| r.y_norm.is_some());
        trace.push(LambdaTrial { lambda: l, min_denominator: min_d, alpha_emp: traj.decay_constant, passed });
        log::debug!("stabilize: λ = {l}, min D = {min_d:.6}, α = {:.4}", traj.decay_constant);
        if passed {
            accepted = Some((l, traj));
            break;
        }
    }
    let last = trace.last().cloned().expect("at least one trial");
    let (lambda, min_d, alpha, alpha_half) = match &accepted {
        Some((l, traj)) => (Some(*l), last.min_denominator, traj.decay_constant, traj.decay_constant_half),
        None => (None, last.min_denominator, last.alpha_emp, f64::NAN),
    };
    Ok(StabilizationReport {
        p: params.p,
        lattice_radius: params.n,
        poisson_grid: sys.n(),
        solver_tol: sys.tol(),
        config: cfg.clone(),
        lambda,
        min_denominator: min_d,
        alpha_emp: alpha,
        alpha_emp_half_rate: alpha_half,
        y0_norm: y0.l2_norm(),
        z0_norm: z0.l2_norm(),
        z0_low_mode_max: z0_low,
        feedback: app.report,
        trace,
        psi_decomposition: decomposition,
        passed: accepted.is_some(),
    })
}
