//! The compactly supported starting control u = curl curl(χ·w(p·), 0, 0),
//! assembled in Fourier space from exact 1D windowed coefficients.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::heat1d::{closed_form_coefficient, factors, Parity, TrigPoly};
use crate::spectral::{field_on_grid, CVec3, Mode, SpectralField3, DEFAULT_EPS_DIV};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    /// Window parameter: the control lives in [−π/p, π/p]³.
    pub p: usize,
    /// Amplitudes (a₁, a₂, a₃) of the three summands of w.
    pub a: [f64; 3],
    /// Lattice truncation radius.
    pub n: usize,
}

impl Default for ControlParams {
    fn default() -> Self {
        Self { p: 2, a: [1.0, 0.0, 1.0], n: 16 }
    }
}

impl ControlParams {
    pub fn new(p: usize, a: [f64; 3], n: usize) -> Result<Self> {
        let params = Self { p, a, n };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidParameter(format!("p = {} must be at least 2", self.p)));
        }
        if self.a.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParameter("all amplitudes are zero".into()));
        }
        if self.a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        if self.n < 3 * self.p {
            return Err(Error::TruncationTooSmall { k: self.n, min: 3 * self.p });
        }
        Ok(())
    }

    /// a₁(a₃² − a₂²), the prefactor whose sign decides positivity of Ψ along the control.
    pub fn sign_combination(&self) -> f64 {
        self.a[0] * (self.a[2] * self.a[2] - self.a[1] * self.a[1])
    }

    pub fn stabilizing(&self) -> bool {
        self.sign_combination() > 0.0
    }
}

/// scale · f₀(θ₀)·f₁(θ₁)·f₂(θ₂): one rank-1 term of a tensor-product function on 𝕋³.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1 {
    pub scale: f64,
    pub factors: [TrigPoly; 3],
}

impl Rank1 {
    pub fn eval(&self, theta: [f64; 3]) -> f64 {
        self.scale * (0..3).map(|i| self.factors[i].eval(theta[i])).product::<f64>()
    }

    /// Differentiates the factor on `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut factors = self.factors.clone();
        factors[axis] = factors[axis].derivative();
        Self { scale: self.scale, factors }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { scale: self.scale * s, factors: self.factors.clone() }
    }

    /// Builds a term from per-role factors placed on the given axes.
    pub fn placed(scale: f64, on: [(usize, TrigPoly); 3]) -> Self {
        let mut slots: [Option<TrigPoly>; 3] = [None, None, None];
        for (axis, f) in on {
            slots[axis] = Some(f);
        }
        let factors = slots.map(|f| f.expect("each axis receives one factor"));
        Self { scale, factors }
    }
}

pub fn eval_sum(terms: &[Rank1], theta: [f64; 3]) -> f64 {
    terms.iter().map(|t| t.eval(theta)).sum()
}

/// The three summands a_k(1+cos θ_k)s(θ_i)s(θ_j), s = sin + ½sin 2.
pub fn w_terms(a: [f64; 3]) -> Vec<Rank1> {
    [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
        .into_iter()
        .map(|(i, j, k)| {
            Rank1::placed(a[k], [(k, factors::one_plus_cos()), (i, factors::sin_half_sin2()), (j, factors::sin_half_sin2())])
        })
        .collect()
}

/// ∂_i∂_j w by termwise symbolic differentiation.
pub fn symbolic_second(a: [f64; 3], i: usize, j: usize) -> Vec<Rank1> {
    w_terms(a).iter().map(|t| t.derivative(i).derivative(j)).collect()
}

pub fn symbolic_first(a: [f64; 3], i: usize) -> Vec<Rank1> {
    w_terms(a).iter().map(|t| t.derivative(i)).collect()
}

/// a_k·[(cos+cos2) on i, (cos+cos2) on j, (1+cos) on k].
pub fn factor_a(a: [f64; 3], i: usize, j: usize, k: usize) -> Rank1 {
    Rank1::placed(a[k], [(i, factors::cos_cos2()), (j, factors::cos_cos2()), (k, factors::one_plus_cos())])
}

/// −a_i·[sin on i, (cos+cos2) on j, (sin+½sin2) on k].
pub fn factor_b(a: [f64; 3], i: usize, j: usize, k: usize) -> Rank1 {
    Rank1::placed(-a[i], [(i, factors::sin1()), (j, factors::cos_cos2()), (k, factors::sin_half_sin2())])
}

/// −a_i·[cos on i, (sin+½sin2) on j, (sin+½sin2) on k].
pub fn factor_c(a: [f64; 3], i: usize, j: usize, k: usize) -> Rank1 {
    Rank1::placed(-a[i], [(i, factors::cos1()), (j, factors::sin_half_sin2()), (k, factors::sin_half_sin2())])
}

/// −a_j·[(sin+2sin2) on i, (1+cos) on j, (sin+½sin2) on k].
pub fn factor_d(a: [f64; 3], i: usize, j: usize, k: usize) -> Rank1 {
    Rank1::placed(-a[j], [(i, factors::sin_two_sin2()), (j, factors::one_plus_cos()), (k, factors::sin_half_sin2())])
}

fn third(i: usize, j: usize) -> usize {
    3 - i - j
}

/// The second derivatives of w grouped into the A, B, C, D rank-1 families.
#[derive(Debug, Clone)]
pub struct TensorFactorization {
    pub a: [f64; 3],
    /// `second[i][j]` lists the rank-1 terms of ∂_i∂_j w (symmetric in i, j).
    pub second: [[Vec<Rank1>; 3]; 3],
}

impl TensorFactorization {
    pub fn new(a: [f64; 3]) -> Self {
        let mut second: [[Vec<Rank1>; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                second[i][j] = if i == j {
                    let (j2, k2) = match i {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    vec![factor_c(a, i, j2, k2), factor_d(a, i, j2, k2), factor_d(a, i, k2, j2)]
                } else {
                    let (lo, hi) = (i.min(j), i.max(j));
                    let k = third(lo, hi);
                    vec![factor_a(a, lo, hi, k), factor_b(a, lo, hi, k), factor_b(a, hi, lo, k)]
                };
            }
        }
        Self { a, second }
    }

    /// Max difference between grouped and symbolic ∂_i∂_j w on an m³ grid of [−π, π]³.
    pub fn grid_residual(&self, m: usize) -> f64 {
        let pts: Vec<f64> = (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let sym = symbolic_second(self.a, i, j);
                for &x in &pts {
                    for &y in &pts {
                        for &z in &pts {
                            let th = [x, y, z];
                            worst = worst.max((eval_sum(&self.second[i][j], th) - eval_sum(&sym, th)).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Max coefficient difference between grouped and symbolic ∂_i∂_j w.
    pub fn spectral_residual(&self, p: usize, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let grouped = scalar_spectrum(&self.second[i][j], p, n);
                let sym = scalar_spectrum(&symbolic_second(self.a, i, j), p, n);
                for (g, s) in grouped.iter().zip(&sym) {
                    worst = worst.max((g - s).norm());
                }
            }
        }
        worst
    }
}

/// Complex Fourier coefficients f̂(k), |k| ≤ n, of χ_{π/p}(ξ)f(pξ) on [−π, π]; index k + n.
pub fn complex_coeffs(f: &TrigPoly, p: usize, n: usize) -> Vec<Complex64> {
    let n_i = n as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for parity in [Parity::Cos, Parity::Sin] {
        let has = match parity {
            Parity::Cos => f.constant() != 0.0 || f.terms().iter().any(|t| t.parity == Parity::Cos),
            Parity::Sin => f.terms().iter().any(|t| t.parity == Parity::Sin),
        };
        if !has {
            continue;
        }
        for k in -n_i..=n_i {
            let c = closed_form_coefficient(f, parity, p, k.unsigned_abs() as usize);
            let z = match parity {
                Parity::Cos => Complex64::new(0.5 * c, 0.0),
                Parity::Sin => Complex64::new(0.0, -0.5 * c * k.signum() as f64),
            };
            out[(k + n_i) as usize] += z;
        }
    }
    out
}

/// Per-term 1D tables for every factor of a rank-1 sum.
fn term_tables(terms: &[Rank1], p: usize, n: usize) -> Vec<(f64, [Vec<Complex64>; 3])> {
    terms
        .iter()
        .map(|t| (t.scale, [0, 1, 2].map(|ax| complex_coeffs(&t.factors[ax], p, n))))
        .collect()
}

fn lattice_index(n: usize, k: &Mode) -> usize {
    let w = 2 * n + 1;
    let idx = |c: i64| (c + n as i64) as usize;
    (idx(k[0]) * w + idx(k[1])) * w + idx(k[2])
}

/// Dense coefficients of one scalar rank-1 sum over the cube |k|∞ ≤ n.
pub fn scalar_spectrum(terms: &[Rank1], p: usize, n: usize) -> Vec<Complex64> {
    let tables = term_tables(terms, p, n);
    let w = 2 * n + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); w * w * w];
    for (scale, [t0, t1, t2]) in &tables {
        for a in 0..w {
            if t0[a] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..w {
                let ab = t0[a] * t1[b];
                if ab == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = (a * w + b) * w;
                for c in 0..w {
                    out[row + c] += ab * t2[c] * *scale;
                }
            }
        }
    }
    out
}

/// Assembles a vector field from three scalar rank-1 sums (one per component).
pub fn vector_spectrum(components: &[Vec<Rank1>; 3], p: usize, n: usize) -> BTreeMap<Mode, CVec3> {
    let dense = [0, 1, 2].map(|c| scalar_spectrum(&components[c], p, n));
    let r = n as i64;
    let mut out = BTreeMap::new();
    for k0 in -r..=r {
        for k1 in -r..=r {
            for k2 in -r..=r {
                let k = [k0, k1, k2];
                let j = lattice_index(n, &k);
                let v = [dense[0][j], dense[1][j], dense[2][j]];
                if v.iter().any(|z| z.norm_sqr() > 0.0) && k != [0, 0, 0] {
                    out.insert(k, v);
                }
            }
        }
    }
    out
}

/// Scalar rank-1 components (before windowing) of u/p² = (−∂₂₂w−∂₃₃w, ∂₁₂w, ∂₁₃w).
pub fn control_components(a: [f64; 3]) -> [Vec<Rank1>; 3] {
    let f = TensorFactorization::new(a);
    let mut first: Vec<Rank1> = Vec::new();
    first.extend(f.second[1][1].iter().map(|t| t.scaled(-1.0)));
    first.extend(f.second[2][2].iter().map(|t| t.scaled(-1.0)));
    [first, f.second[0][1].clone(), f.second[0][2].clone()]
}

/// The starting control u = p²χ(−∂₂₂w−∂₃₃w, ∂₁₂w, ∂₁₃w)(p·).
pub fn build_control(params: &ControlParams) -> Result<SpectralField3> {
    params.validate()?;
    let p2 = (params.p * params.p) as f64;
    let comps = control_components(params.a).map(|c| c.iter().map(|t| t.scaled(p2)).collect::<Vec<_>>());
    let coeffs = vector_spectrum(&comps, params.p, params.n);
    let entries: Vec<(Mode, CVec3)> = coeffs.into_iter().collect();
    SpectralField3::make_field(&entries, params.n, DEFAULT_EPS_DIV)
}

/// Max coefficient gap between curl⁻¹u and pχ(0, ∂₃w, −∂₂w)(p·).
pub fn curl_inv_residual(params: &ControlParams, u: &SpectralField3) -> f64 {
    let pf = params.p as f64;
    let d3: Vec<Rank1> = symbolic_first(params.a, 2).iter().map(|t| t.scaled(pf)).collect();
    let d2: Vec<Rank1> = symbolic_first(params.a, 1).iter().map(|t| t.scaled(-pf)).collect();
    let expected = vector_spectrum(&[Vec::new(), d3, d2], params.p, params.n);
    let got = u.curl_inv();
    let zero = [Complex64::new(0.0, 0.0); 3];
    let mut worst: f64 = 0.0;
    for k in expected.keys().chain(got.coeffs().keys()) {
        let e = expected.get(k).copied().unwrap_or(zero);
        let g = got.coeff(k);
        for c in 0..3 {
            worst = worst.max((e[c] - g[c]).norm());
        }
    }
    worst
}

/// Maximum over modes of |k·û(k)| relative to ‖u‖.
pub fn divergence_residual(u: &SpectralField3) -> f64 {
    let norm = u.l2_norm().max(f64::MIN_POSITIVE);
    let max_div = u
        .coeffs()
        .iter()
        .map(|(k, v)| crate::spectral::dot_mode(k, v).norm())
        .fold(0.0, f64::max);
    max_div * (2.0 * PI).powf(1.5) / norm
}

/// Largest |û(k)| over modes with fewer than two nonzero components.
pub fn thin_mode_max(u: &SpectralField3) -> f64 {
    u.coeffs()
        .iter()
        .filter(|(k, _)| k.iter().filter(|&&c| c != 0).count() < 2)
        .map(|(_, v)| crate::spectral::norm3(v))
        .fold(0.0, f64::max)
}

/// Differences of (t₀t₁)t₂ against t₀(t₁t₂) when forming û from 1D tables.
pub fn associativity_residual(params: &ControlParams) -> f64 {
    let p2 = (params.p * params.p) as f64;
    let comps = control_components(params.a);
    let n = params.n;
    let mut worst: f64 = 0.0;
    for terms in &comps {
        let tables = term_tables(terms, params.p, n);
        let w = 2 * n + 1;
        for (scale, [t0, t1, t2]) in &tables {
            for a in 0..w {
                for b in 0..w {
                    for c in 0..w {
                        let left = (t0[a] * t1[b]) * t2[c];
                        let right = t0[a] * (t1[b] * t2[c]);
                        worst = worst.max(((left - right) * *scale * p2).norm());
                    }
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    pub grid: usize,
    pub outside_max: f64,
    pub inside_max: f64,
    pub ratio: f64,
    /// Max |u_grid − u_exact| over interior points at least `margin` grid cells from the window edge.
    pub interior_error: f64,
}

/// Samples u on an n³ grid and compares it with the exact windowed formula.
pub fn support_check(u: &SpectralField3, params: &ControlParams, grid: usize) -> Result<SupportReport> {
    if grid < 8 * params.p {
        return Err(Error::InvalidParameter(format!("grid {grid} must be at least 8p")));
    }
    if grid <= 2 * u.radius() {
        return Err(Error::InvalidParameter(format!("grid {grid} must exceed 2N")));
    }
    let vals = field_on_grid(u, grid);
    let pf = params.p as f64;
    let w = PI / pf;
    let comps = control_components(params.a);
    let xs: Vec<f64> = (0..grid).map(|j| -PI + 2.0 * PI * j as f64 / grid as f64).collect();
    let h = 2.0 * PI / grid as f64;
    let margin = 2.0 * h;
    let (mut outside, mut inside, mut err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (ia, &x) in xs.iter().enumerate() {
        for (ib, &y) in xs.iter().enumerate() {
            for (ic, &z) in xs.iter().enumerate() {
                let j = (ia * grid + ib) * grid + ic;
                let mag = (vals[0][j].powi(2) + vals[1][j].powi(2) + vals[2][j].powi(2)).sqrt();
                let tol = 1e-12;
                let in_cube = x.abs() <= w + tol && y.abs() <= w + tol && z.abs() <= w + tol;
                if in_cube {
                    inside = inside.max(mag);
                } else {
                    outside = outside.max(mag);
                }
                let deep = x.abs() < w - margin && y.abs() < w - margin && z.abs() < w - margin;
                if deep {
                    let th = [pf * x, pf * y, pf * z];
                    for c in 0..3 {
                        let exact = pf * pf * eval_sum(&comps[c], th);
                        err = err.max((exact - vals[c][j]).abs());
                    }
                }
            }
        }
    }
    let ratio = if inside > 0.0 { outside / inside } else { 0.0 };
    Ok(SupportReport { grid, outside_max: outside, inside_max: inside, ratio, interior_error: err })
}

/// Translation û(k) ↦ û(k)e^{−ik·s}.
pub fn coordinate_shift(y: &SpectralField3, shift: [f64; 3]) -> SpectralField3 {
    y.shifted(shift)
}
