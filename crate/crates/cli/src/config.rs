use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use npe_core::control::ControlParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Adaptive quadrature oracle for coefficient tables.
    pub quadrature: f64,
    /// Conjugate-gradient relative residual for Poisson solves.
    pub solver: f64,
    /// Time integrals of Φ, relative to ∫|Φ|.
    pub phi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quadrature: 1e-12, solver: 1e-12, phi: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    /// Geometric points after t = 0.
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { t_max: 10.0, points: 40 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: usize,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// Fourier lattice radius.
    #[serde(rename = "N")]
    pub lattice: usize,
    /// Poisson grid resolution.
    pub n: usize,
    pub tolerances: Tolerances,
    /// Horizon of trajectories and stabilization.
    #[serde(rename = "T")]
    pub horizon: f64,
    pub t_grid: TimeGrid,
    pub lambda0: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Inclusive p range for the series suites.
    pub p_range: [usize; 2],
    pub sign_p_range: [usize; 2],
    pub a_cap: usize,
    pub ode_dt: f64,
    pub reduction_lattice: usize,
    pub reduction_times: Vec<f64>,
    /// Blow-up datum amplitude as a multiple of 1/I(∞).
    pub blowup_factor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: 2,
            a1: 1.0,
            a2: 0.0,
            a3: 1.0,
            lattice: 16,
            n: 64,
            tolerances: Tolerances::default(),
            horizon: 10.0,
            t_grid: TimeGrid::default(),
            lambda0: 1.0,
            seed: 7,
            out_dir: PathBuf::from("out"),
            p_range: [2, 8],
            sign_p_range: [2, 4],
            a_cap: 64,
            ode_dt: 1e-3,
            reduction_lattice: 32,
            reduction_times: vec![0.0, 0.1, 0.5],
            blowup_factor: 2.0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Self::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.p < 2 {
            bail!("p must be at least 2");
        }
        let tols = [self.tolerances.quadrature, self.tolerances.solver, self.tolerances.phi, self.ode_dt];
        if tols.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            bail!("tolerances and ode_dt must be positive");
        }
        if !(self.horizon > 0.0) || !(self.t_grid.t_max > 0.0) || self.t_grid.points < 2 {
            bail!("time horizon must be positive and the grid needs at least two points");
        }
        if !(self.lambda0 > 0.0) {
            bail!("lambda0 must be positive");
        }
        for r in [self.p_range, self.sign_p_range] {
            if r[0] < 2 || r[0] > r[1] {
                bail!("p ranges must satisfy 2 <= lo <= hi");
            }
        }
        if self.n < 32 || self.n % 2 != 0 || self.n <= 2 * self.lattice {
            bail!("Poisson grid n = {} must be even, at least 32 and above 2N = {}", self.n, 2 * self.lattice);
        }
        if self.a_cap < 2 {
            bail!("a_cap must be at least 2");
        }
        self.control().validate().map_err(anyhow::Error::from)?;
        Ok(())
    }

    pub fn control(&self) -> ControlParams {
        ControlParams { p: self.p, a: [self.a1, self.a2, self.a3], n: self.lattice }
    }

    pub fn p_values(&self) -> std::ops::RangeInclusive<usize> {
        self.p_range[0]..=self.p_range[1]
    }
}
