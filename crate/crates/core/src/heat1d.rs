//! Windowed trig polynomials χ_{π/p}(ξ)·f(pξ) on [−π, π], their exact
//! Fourier coefficients and the 1D periodic heat solutions they generate.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::quad::adaptive_simpson;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub harmonic: u32,
    pub parity: Parity,
    pub amp: f64,
}

/// f(θ) = constant + Σ amp·cos(hθ) or amp·sin(hθ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    constant: f64,
    terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(constant: f64, terms: Vec<TrigTerm>) -> Result<Self> {
        if !constant.is_finite() || terms.iter().any(|t| !t.amp.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        for (i, a) in terms.iter().enumerate() {
            if a.harmonic == 0 {
                return Err(Error::InvalidParameter("harmonic 0 belongs in the constant".into()));
            }
            if terms[..i].iter().any(|b| b.harmonic == a.harmonic && b.parity == a.parity) {
                return Err(Error::InvalidParameter(format!(
                    "harmonic {} repeated with the same parity",
                    a.harmonic
                )));
            }
        }
        Ok(Self { constant, terms })
    }

    /// constant + Σ amp_h cos(hθ).
    pub fn cosines(constant: f64, amps: &[(u32, f64)]) -> Self {
        let terms = amps
            .iter()
            .map(|&(harmonic, amp)| TrigTerm { harmonic, parity: Parity::Cos, amp })
            .collect();
        Self::new(constant, terms).expect("valid cosine polynomial")
    }

    /// Σ amp_h sin(hθ).
    pub fn sines(amps: &[(u32, f64)]) -> Self {
        let terms = amps
            .iter()
            .map(|&(harmonic, amp)| TrigTerm { harmonic, parity: Parity::Sin, amp })
            .collect();
        Self::new(0.0, terms).expect("valid sine polynomial")
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn max_harmonic(&self) -> u32 {
        self.terms.iter().map(|t| t.harmonic).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.iter().all(|t| t.amp == 0.0)
    }

    /// `Some(parity)` when the polynomial is purely even or purely odd.
    pub fn parity(&self) -> Option<Parity> {
        let has_cos = self.constant != 0.0
            || self.terms.iter().any(|t| t.parity == Parity::Cos && t.amp != 0.0);
        let has_sin = self.terms.iter().any(|t| t.parity == Parity::Sin && t.amp != 0.0);
        match (has_cos, has_sin) {
            (true, true) => None,
            (false, true) => Some(Parity::Sin),
            _ => Some(Parity::Cos),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|t| {
                    let a = t.harmonic as f64 * theta;
                    t.amp * match t.parity {
                        Parity::Cos => a.cos(),
                        Parity::Sin => a.sin(),
                    }
                })
                .sum::<f64>()
    }

    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.amp != 0.0)
            .map(|t| {
                let h = t.harmonic as f64;
                match t.parity {
                    Parity::Cos => TrigTerm { harmonic: t.harmonic, parity: Parity::Sin, amp: -h * t.amp },
                    Parity::Sin => TrigTerm { harmonic: t.harmonic, parity: Parity::Cos, amp: h * t.amp },
                }
            })
            .collect();
        Self { constant: 0.0, terms }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            constant: self.constant * s,
            terms: self.terms.iter().map(|t| TrigTerm { amp: t.amp * s, ..*t }).collect(),
        }
    }

    /// Exact values f(π) and f(−π) (sines vanish, cos(hπ) = (−1)^h).
    pub fn endpoint_values(&self) -> (f64, f64) {
        let v = self.constant
            + self
                .terms
                .iter()
                .filter(|t| t.parity == Parity::Cos)
                .map(|t| if t.harmonic % 2 == 0 { t.amp } else { -t.amp })
                .sum::<f64>();
        (v, v)
    }

    /// True when f(±π) = 0 up to round-off relative to the amplitudes.
    pub fn vanishes_at_ends(&self) -> bool {
        let scale = self.constant.abs() + self.terms.iter().map(|t| t.amp.abs()).sum::<f64>();
        let (a, b) = self.endpoint_values();
        a.abs() <= 1e-14 * scale.max(1.0) && b.abs() <= 1e-14 * scale.max(1.0)
    }
}

/// The factor functions that build the control and its J-functionals.
pub mod factors {
    use super::TrigPoly;

    /// 1 + cos θ
    pub fn one_plus_cos() -> TrigPoly {
        TrigPoly::cosines(1.0, &[(1, 1.0)])
    }
    /// cos θ + cos 2θ
    pub fn cos_cos2() -> TrigPoly {
        TrigPoly::cosines(0.0, &[(1, 1.0), (2, 1.0)])
    }
    /// cos θ
    pub fn cos1() -> TrigPoly {
        TrigPoly::cosines(0.0, &[(1, 1.0)])
    }
    /// −cos 2θ
    pub fn neg_cos2() -> TrigPoly {
        TrigPoly::cosines(0.0, &[(2, -1.0)])
    }
    /// sin θ
    pub fn sin1() -> TrigPoly {
        TrigPoly::sines(&[(1, 1.0)])
    }
    /// sin θ + ½ sin 2θ
    pub fn sin_half_sin2() -> TrigPoly {
        TrigPoly::sines(&[(1, 1.0), (2, 0.5)])
    }
    /// sin θ + 2 sin 2θ
    pub fn sin_two_sin2() -> TrigPoly {
        TrigPoly::sines(&[(1, 1.0), (2, 2.0)])
    }
}

/// sin(kπ/p) with the argument reduced modulo 2π first; exactly 0 at multiples of p.
pub fn sin_pi_ratio(k: i64, p: i64) -> f64 {
    let r = k.rem_euclid(2 * p);
    if r % p == 0 {
        0.0
    } else {
        (PI * r as f64 / p as f64).sin()
    }
}

/// Coefficient of a single unit-amplitude term: (1/π)∫_{−π/p}^{π/p} g(hpξ)·basis(kξ) dξ.
fn term_coefficient(h: u32, parity: Parity, p: usize, k: usize) -> f64 {
    let (h, p, k) = (h as i64, p as i64, k as i64);
    if k == h * p {
        return 1.0 / p as f64;
    }
    if k % p == 0 {
        return 0.0;
    }
    let s = sin_pi_ratio(k, p);
    let sign = if h % 2 == 0 { -1.0 } else { 1.0 };
    let den = PI * ((h * p) * (h * p) - k * k) as f64;
    match parity {
        Parity::Cos => sign * 2.0 * k as f64 * s / den,
        Parity::Sin => sign * 2.0 * (h * p) as f64 * s / den,
    }
}

fn constant_coefficient(p: usize, k: usize) -> f64 {
    if k == 0 {
        2.0 / p as f64
    } else if k % p == 0 {
        0.0
    } else {
        2.0 * sin_pi_ratio(k as i64, p as i64) / (PI * k as f64)
    }
}

/// Closed-form coefficient of χ_{π/p}(ξ)f(pξ) at wavenumber k in the basis
/// {1/2, cos kξ} (even f) or {sin kξ} (odd f).
pub fn closed_form_coefficient(f: &TrigPoly, parity: Parity, p: usize, k: usize) -> f64 {
    let mut v = 0.0;
    if parity == Parity::Cos {
        v += f.constant * constant_coefficient(p, k);
    }
    for t in f.terms.iter().filter(|t| t.parity == parity) {
        if parity == Parity::Sin && k == 0 {
            continue;
        }
        v += t.amp * term_coefficient(t.harmonic, parity, p, k);
    }
    v
}

/// Quadrature oracle for [`closed_form_coefficient`]: adaptive Simpson on the window.
pub fn quadrature_coefficient(f: &TrigPoly, parity: Parity, p: usize, k: usize, tol: f64) -> Result<f64> {
    let pf = p as f64;
    let kf = k as f64;
    let w = PI / pf;
    let v = match parity {
        Parity::Cos => adaptive_simpson(|x| f.eval(pf * x) * (kf * x).cos(), -w, w, tol)?,
        Parity::Sin => adaptive_simpson(|x| f.eval(pf * x) * (kf * x).sin(), -w, w, tol)?,
    };
    Ok(v / PI)
}

/// |coeff(k)| ≤ c·k^(−q) for every k ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub c: f64,
    pub q: u32,
    /// Magnitude of the effective constant term (a₀/2); 0 for sine series.
    pub head: f64,
}

impl Envelope {
    pub fn bound(&self, k: f64) -> f64 {
        if k <= 0.0 {
            self.head
        } else {
            self.c * k.powi(-(self.q as i32))
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { c: self.c * s.abs(), q: self.q, head: self.head * s.abs() }
    }
}

fn build_envelope(f: &TrigPoly, parity: Parity, p: usize) -> Envelope {
    let pf = p as f64;
    let terms: Vec<&TrigTerm> = f.terms.iter().filter(|t| t.parity == parity && t.amp != 0.0).collect();
    let head = if parity == Parity::Cos { (f.constant * constant_coefficient(p, 0) / 2.0).abs() } else { 0.0 };
    let amp0 = if parity == Parity::Cos { f.constant } else { 0.0 };
    if terms.is_empty() && amp0 == 0.0 {
        return Envelope { c: 0.0, q: 1, head };
    }
    // Asymptotic expansion R(k) = (2/π) Σ_j ρ_j k^(−e_j) of the rational factor.
    let odd = usize::from(parity == Parity::Sin);
    let sign = |h: u32| if h % 2 == 0 { 1.0 } else { -1.0 };
    let rho = |j: usize| -> (f64, f64) {
        let pw = (2 * j + odd) as i32;
        let mut r = 0.0;
        let mut scale = 0.0;
        if j == 0 && parity == Parity::Cos {
            r += amp0;
            scale += amp0.abs();
        }
        for t in &terms {
            let hp = t.harmonic as f64 * pf;
            r += sign(t.harmonic) * t.amp * hp.powi(pw);
            scale += t.amp.abs() * hp.powi(pw);
        }
        (r, scale)
    };
    let expo = |j: usize| (2 * j + 1 + odd) as u32;
    let jmax = 8;
    let jstar = (0..jmax)
        .find(|&j| {
            let (r, s) = rho(j);
            r.abs() > 1e-12 * s
        })
        .unwrap_or(jmax);
    let q = expo(jstar);
    let jrem = jstar + 2;
    let hmax = f.max_harmonic() as usize;
    let k0 = (2 * p * hmax).max(1);
    let k0f = k0 as f64;
    let mut tail = 0.0;
    for j in jstar..jrem {
        tail += rho(j).0.abs() * k0f.powi(q as i32 - expo(j) as i32);
    }
    for t in &terms {
        let hp = t.harmonic as f64 * pf;
        tail += 4.0 / 3.0 * t.amp.abs() * hp.powi((2 * jrem + odd) as i32) * k0f.powi(q as i32 - expo(jrem) as i32);
    }
    tail *= 2.0 / PI;
    let head_c = (1..k0)
        .map(|k| closed_form_coefficient(f, parity, p, k).abs() * (k as f64).powi(q as i32))
        .fold(0.0, f64::max);
    Envelope { c: tail.max(head_c), q, head }
}

/// Exact Fourier coefficients of χ_{π/p}(ξ)·f(pξ) up to wavenumber K.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowedSeries {
    pub p: usize,
    pub parity: Parity,
    /// `coeff[k]`, k = 0..=K; for cosine series `coeff[0]` is a₀ (the basis function is 1/2).
    pub coeff: Vec<f64>,
    pub envelope: Envelope,
    pub source: TrigPoly,
}

/// Exact coefficients of the windowed polynomial; rejects K < 3p and mixed parity.
pub fn windowed_coeffs(f: &TrigPoly, p: usize, k_max: usize) -> Result<WindowedSeries> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 2")));
    }
    if k_max < 3 * p {
        return Err(Error::TruncationTooSmall { k: k_max, min: 3 * p });
    }
    let parity = f.parity().ok_or(Error::MixedParity)?;
    let coeff = (0..=k_max).map(|k| closed_form_coefficient(f, parity, p, k)).collect();
    Ok(WindowedSeries { p, parity, coeff, envelope: build_envelope(f, parity, p), source: f.clone() })
}

impl WindowedSeries {
    pub fn k_max(&self) -> usize {
        self.coeff.len() - 1
    }

    pub fn tail_exponent(&self) -> f64 {
        self.envelope.q as f64
    }

    /// Coefficient multiplying basis(kξ) in the series, i.e. a₀/2 at k = 0.
    pub fn effective(&self, k: usize) -> f64 {
        match (k, self.coeff.get(k)) {
            (_, None) => 0.0,
            (0, Some(&a0)) => 0.5 * a0,
            (_, Some(&c)) => c,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            p: self.p,
            parity: self.parity,
            coeff: self.coeff.iter().map(|c| c * s).collect(),
            envelope: self.envelope.scaled(s),
            source: self.source.scaled(s),
        }
    }

    pub fn solution(&self) -> Heat1DSolution {
        Heat1DSolution { series: self.clone() }
    }
}

/// A cosine or sine series Σ e_k·basis(kx), with the constant term already halved.
#[derive(Debug, Clone, PartialEq)]
pub struct Trig1D {
    pub parity: Parity,
    pub coeffs: Vec<f64>,
}

impl Trig1D {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let a = k as f64 * x;
                c * match self.parity {
                    Parity::Cos => a.cos(),
                    Parity::Sin => a.sin(),
                }
            })
            .sum()
    }

    pub fn dx(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| match self.parity {
                Parity::Cos => -(k as f64) * c,
                Parity::Sin => k as f64 * c,
            })
            .collect();
        let parity = match self.parity {
            Parity::Cos => Parity::Sin,
            Parity::Sin => Parity::Cos,
        };
        Self { parity, coeffs }
    }

    /// Values at x_j = −π + 2πj/n, j = 0..n (needs n > K).
    pub fn eval_grid(&self, n: usize) -> Vec<f64> {
        assert!(n > self.coeffs.len() - 1, "grid too coarse for the series");
        let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            buf[k] = Complex64::new(if k % 2 == 0 { c } else { -c }, 0.0);
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf.iter()
            .map(|z| match self.parity {
                Parity::Cos => z.re,
                Parity::Sin => z.im,
            })
            .collect()
    }
}

pub fn grid_points(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
}

/// S(t, x) = Σ coeff(k)·basis(kx)·e^{−k²t}, the periodic heat solution.
#[derive(Debug, Clone)]
pub struct Heat1DSolution {
    pub series: WindowedSeries,
}

impl Heat1DSolution {
    pub fn parity(&self) -> Parity {
        self.series.parity
    }

    pub fn p(&self) -> usize {
        self.series.p
    }

    pub fn at(&self, t: f64) -> Trig1D {
        let coeffs =
            (0..=self.series.k_max()).map(|k| self.series.effective(k) * (-((k * k) as f64) * t).exp()).collect();
        Trig1D { parity: self.series.parity, coeffs }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.at(t).eval(x)
    }

    pub fn eval_many(&self, t: f64, xs: &[f64]) -> Vec<f64> {
        let s = self.at(t);
        xs.iter().map(|&x| s.eval(x)).collect()
    }

    /// ∂ₜS as a series: −k²·coeff(k)·e^{−k²t}.
    pub fn dt(&self, t: f64) -> Trig1D {
        let mut s = self.at(t);
        for (k, c) in s.coeffs.iter_mut().enumerate() {
            *c *= -((k * k) as f64);
        }
        s
    }

    /// Green-function oracle ∫_{−π/p}^{π/p} G(t, x−ξ) f(pξ) dξ with G wrapped over `images` copies each side.
    pub fn eval_green(&self, t: f64, x: f64, images: i32) -> Result<f64> {
        assert!(t > 0.0, "the Green oracle needs t > 0");
        let p = self.series.p as f64;
        let f = &self.series.source;
        let norm = 1.0 / (2.0 * (PI * t).sqrt());
        let green = |y: f64| {
            (-images..=images)
                .map(|m| {
                    let z = y + 2.0 * PI * m as f64;
                    (-z * z / (4.0 * t)).exp()
                })
                .sum::<f64>()
                * norm
        };
        let w = PI / p;
        adaptive_simpson(|xi| green(x - xi) * f.eval(p * xi), -w, w, 1e-13)
    }

    /// ∫_{−π}^{π} S(t,x) dx, evaluated by the trapezoid rule (exact for trig polynomials).
    pub fn mass(&self, t: f64) -> f64 {
        let s = self.at(t);
        let n = 2 * s.coeffs.len() + 2;
        s.eval_grid(n).iter().sum::<f64>() * 2.0 * PI / n as f64
    }
}

/// Residuals of ∂ₓS(χφ(p·)) = p·S(χφ′(p·)) and ∂ₜS = p²·S(χφ″(p·)).
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub vanishes_at_ends: bool,
    pub derivative_vanishes_at_ends: bool,
    pub residual_x: f64,
    pub residual_t: f64,
    /// `true` when the hypotheses hold and both residuals are within 1e−10.
    pub consistent: bool,
}

pub fn derivative_identities(p: usize, f: &TrigPoly, t: f64, k_max: usize, grid: usize) -> Result<DerivativeReport> {
    let df = f.derivative();
    let ddf = df.derivative();
    let s = windowed_coeffs(f, p, k_max)?.solution();
    let pf = p as f64;
    let xs = grid_points(grid);
    let lhs_x = s.at(t).dx();
    let residual_x = if df.is_zero() {
        xs.iter().map(|&x| lhs_x.eval(x).abs()).fold(0.0, f64::max)
    } else {
        let rhs = windowed_coeffs(&df, p, k_max)?.solution().at(t);
        xs.iter().map(|&x| (lhs_x.eval(x) - pf * rhs.eval(x)).abs()).fold(0.0, f64::max)
    };
    let lhs_t = s.dt(t);
    let residual_t = if ddf.is_zero() {
        xs.iter().map(|&x| lhs_t.eval(x).abs()).fold(0.0, f64::max)
    } else {
        let rhs = windowed_coeffs(&ddf, p, k_max)?.solution().at(t);
        xs.iter().map(|&x| (lhs_t.eval(x) - pf * pf * rhs.eval(x)).abs()).fold(0.0, f64::max)
    };
    let vanishes_at_ends = f.vanishes_at_ends();
    let derivative_vanishes_at_ends = df.vanishes_at_ends();
    let consistent = vanishes_at_ends && derivative_vanishes_at_ends && residual_x <= 1e-10 && residual_t <= 1e-10;
    Ok(DerivativeReport { vanishes_at_ends, derivative_vanishes_at_ends, residual_x, residual_t, consistent })
}

/// ∫_{−π}^{π} S₁S₂S₃ dx from the coefficient resonance sum, with the grid check and a truncation tail bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TripleIntegral {
    pub value: f64,
    pub quadrature: f64,
    /// Upper bound on |value − (untruncated integral)|.
    pub tail: f64,
}

/// Resonance sum for cosine/sine series (constant term already halved).
fn resonance_sum(a: &Trig1D, b: &Trig1D, c: &Trig1D) -> f64 {
    let mut sines: Vec<&Trig1D> = Vec::new();
    let mut cosines: Vec<&Trig1D> = Vec::new();
    for s in [a, b, c] {
        match s.parity {
            Parity::Sin => sines.push(s),
            Parity::Cos => cosines.push(s),
        }
    }
    let get = |s: &Trig1D, k: usize| s.coeffs.get(k).copied().unwrap_or(0.0);
    let total = match (sines.len(), cosines.len()) {
        (0, 3) => {
            let (x, y, z) = (cosines[0], cosines[1], cosines[2]);
            let mut acc = 0.0;
            for (k, &xk) in x.coeffs.iter().enumerate() {
                if xk == 0.0 {
                    continue;
                }
                for (m, &ym) in y.coeffs.iter().enumerate() {
                    if ym == 0.0 {
                        continue;
                    }
                    let sum = get(z, k + m) * if k + m == 0 { 2.0 } else { 1.0 };
                    let diff = get(z, k.abs_diff(m)) * if k == m { 2.0 } else { 1.0 };
                    acc += xk * ym * (sum + diff);
                }
            }
            acc
        }
        (2, 1) => {
            let (x, y, z) = (sines[0], sines[1], cosines[0]);
            let mut acc = 0.0;
            for (k, &xk) in x.coeffs.iter().enumerate().skip(1) {
                if xk == 0.0 {
                    continue;
                }
                for (m, &ym) in y.coeffs.iter().enumerate().skip(1) {
                    if ym == 0.0 {
                        continue;
                    }
                    let diff = get(z, k.abs_diff(m)) * if k == m { 2.0 } else { 1.0 };
                    acc += xk * ym * (diff - get(z, k + m));
                }
            }
            acc
        }
        _ => 0.0,
    };
    0.5 * PI * total
}

/// Σ_{n>K} of monomials A·n^(−s)·(1+ln n)^λ, bounded by the integral from K.
fn power_log_tail(k: f64, monomials: &[(f64, i32, bool)]) -> f64 {
    monomials
        .iter()
        .map(|&(a, s, log)| {
            if a == 0.0 {
                return 0.0;
            }
            if s <= 1 {
                return f64::INFINITY;
            }
            let sm1 = (s - 1) as f64;
            let base = a * k.powf(-sm1);
            if log {
                base * ((1.0 + k.ln()) / sm1 + 1.0 / (sm1 * sm1))
            } else {
                base / sm1
            }
        })
        .sum()
}

/// Upper bound on the omitted part of the resonance sum.
pub fn triple_tail_bound(envs: [&Envelope; 3], k_min: usize, t: f64) -> f64 {
    let k = k_min as f64;
    let mut monomials = Vec::new();
    for r in 0..3 {
        let big = envs[r];
        let (x, y) = (envs[(r + 1) % 3], envs[(r + 2) % 3]);
        // conv(n) ≤ P_x·E_y(n/2) + E_x(n/2)·P_y, with partial sums P = head + c·Z(n).
        for (u, v) in [(x, y), (y, x)] {
            let ev = v.c * 2f64.powi(v.q as i32);
            let s = (big.q + v.q) as i32;
            let coef = big.c * ev;
            monomials.push((coef * u.head, s, false));
            if u.q > 1 {
                monomials.push((coef * u.c * u.q as f64 / (u.q as f64 - 1.0), s, false));
            } else {
                monomials.push((coef * u.c, s, true));
            }
        }
    }
    PI * (-(k + 1.0).powi(2) * t).exp() * power_log_tail(k, &monomials)
}

/// ∫_{−π}^{π} S₁(t)S₂(t)S₃(t) dx.
pub fn triple_product_integral(
    s1: &Heat1DSolution,
    s2: &Heat1DSolution,
    s3: &Heat1DSolution,
    t: f64,
) -> Result<TripleIntegral> {
    let (a, b, c) = (s1.at(t), s2.at(t), s3.at(t));
    let value = triple_of_series(&a, &b, &c)?;
    let k_min = [s1, s2, s3].iter().map(|s| s.series.k_max()).min().unwrap_or(0);
    let tail = triple_tail_bound([&s1.series.envelope, &s2.series.envelope, &s3.series.envelope], k_min, t);
    Ok(TripleIntegral { value: value.0, quadrature: value.1, tail })
}

/// Resonance sum and trapezoid value for three explicit series.
pub fn triple_of_series(a: &Trig1D, b: &Trig1D, c: &Trig1D) -> Result<(f64, f64)> {
    let value = resonance_sum(a, b, c);
    let n = a.coeffs.len() + b.coeffs.len() + c.coeffs.len();
    let n = n + n % 2;
    let (ga, gb, gc) = (a.eval_grid(n), b.eval_grid(n), c.eval_grid(n));
    let quadrature = ga.iter().zip(&gb).zip(&gc).map(|((x, y), z)| x * y * z).sum::<f64>() * 2.0 * PI / n as f64;
    if (value - quadrature).abs() > 1e-9 {
        return Err(Error::Consistency(format!(
            "resonance sum {value:e} disagrees with grid quadrature {quadrature:e}"
        )));
    }
    Ok((value, quadrature))
}

/// ∫_{−π/p}^{π/p} f₁(pξ)f₂(pξ)f₃(pξ) dξ: the triple integral of the initial data.
pub fn initial_triple(p: usize, f1: &TrigPoly, f2: &TrigPoly, f3: &TrigPoly) -> Result<f64> {
    let pf = p as f64;
    let w = PI / pf;
    adaptive_simpson(|x| f1.eval(pf * x) * f2.eval(pf * x) * f3.eval(pf * x), -w, w, 1e-13)
}
