//! The J-functionals: 1D triple integrals of heat-evolved windowed factors.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::coeffs::{big_a, big_b};
use crate::heat1d::{factors, initial_triple, triple_product_integral, windowed_coeffs, Heat1DSolution, TrigPoly};
use crate::{Error, Result};

/// The factor functions that appear inside J-functionals and the ODE identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Factor {
    /// 1 + cos
    OnePlusCos,
    /// cos + cos 2
    CosCos2,
    Cos,
    /// cos 2
    Cos2,
    /// −cos 2
    NegCos2,
    Sin,
    /// sin + ½ sin 2
    SinHalf,
    /// sin + 2 sin 2
    SinTwo,
    /// 30(1+cos) + 42(1−cos 2)
    Mix,
}

impl Factor {
    pub fn poly(self) -> TrigPoly {
        match self {
            Factor::OnePlusCos => factors::one_plus_cos(),
            Factor::CosCos2 => factors::cos_cos2(),
            Factor::Cos => factors::cos1(),
            Factor::Cos2 => TrigPoly::cosines(0.0, &[(2, 1.0)]),
            Factor::NegCos2 => factors::neg_cos2(),
            Factor::Sin => factors::sin1(),
            Factor::SinHalf => factors::sin_half_sin2(),
            Factor::SinTwo => factors::sin_two_sin2(),
            Factor::Mix => TrigPoly::cosines(72.0, &[(1, 30.0), (2, -42.0)]),
        }
    }
}

/// Truncation used at time t: enough modes that e^{−K²t} is negligible.
pub fn truncation_for(p: usize, t: f64) -> usize {
    let floor = (6 * p).max(64);
    if t <= 0.0 {
        return 2048;
    }
    ((60.0 / t).sqrt().ceil() as usize).clamp(floor, 4096)
}

/// Heat solutions of every factor at one truncation, built on demand.
#[derive(Debug, Clone)]
pub struct HeatBank {
    pub p: usize,
    pub k_max: usize,
    sols: HashMap<Factor, Heat1DSolution>,
}

impl HeatBank {
    pub fn new(p: usize, k_max: usize) -> Self {
        Self { p, k_max, sols: HashMap::new() }
    }

    pub fn sol(&mut self, f: Factor) -> Result<&Heat1DSolution> {
        if !self.sols.contains_key(&f) {
            let s = windowed_coeffs(&f.poly(), self.p, self.k_max)?.solution();
            self.sols.insert(f, s);
        }
        Ok(&self.sols[&f])
    }

    /// ∫S(f₁)S(f₂)S(f₃) with its tail bound.
    pub fn triple(&mut self, f: [Factor; 3], t: f64) -> Result<Bounded> {
        for x in f {
            self.sol(x)?;
        }
        let r = triple_product_integral(&self.sols[&f[0]], &self.sols[&f[1]], &self.sols[&f[2]], t)?;
        Ok(Bounded { value: r.value, error: r.tail, quadrature: r.quadrature })
    }
}

/// A value with an upper bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounded {
    pub value: f64,
    pub error: f64,
    /// The grid-quadrature value of the same truncated integrand.
    pub quadrature: f64,
}

impl Bounded {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0, quadrature: value }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    pub fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, error: self.error + o.error, quadrature: self.quadrature + o.quadrature }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { value: s * self.value, error: s.abs() * self.error, quadrature: s * self.quadrature }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JIndex {
    J1,
    J2,
    J3,
    J4,
}

impl JIndex {
    pub fn factors(self) -> [Factor; 3] {
        use Factor::*;
        match self {
            JIndex::J1 => [OnePlusCos, OnePlusCos, CosCos2],
            JIndex::J2 => [OnePlusCos, CosCos2, CosCos2],
            JIndex::J3 => [CosCos2, CosCos2, CosCos2],
            JIndex::J4 => [CosCos2, Sin, SinHalf],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JMethod {
    /// Coefficient sums (the three-part decomposition for J₁, the resonance sum otherwise).
    Series,
    /// Grid quadrature of the heat-evolved factors; at t = 0 the data integral itself.
    Quadrature,
}

/// One J-functional at time t.
pub fn eval_j(idx: JIndex, p: usize, t: f64, method: JMethod) -> Result<Bounded> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be non-negative")));
    }
    let k = truncation_for(p, t);
    let mut bank = HeatBank::new(p, k);
    eval_j_in(&mut bank, idx, t, method)
}

pub fn eval_j_in(bank: &mut HeatBank, idx: JIndex, t: f64, method: JMethod) -> Result<Bounded> {
    let f = idx.factors();
    match method {
        JMethod::Quadrature => {
            if t == 0.0 {
                let [a, b, c] = f.map(|x| x.poly());
                return Ok(Bounded { error: 1e-12, ..Bounded::exact(initial_triple(bank.p, &a, &b, &c)?) });
            }
            let r = bank.triple(f, t)?;
            Ok(Bounded { value: r.quadrature, ..r })
        }
        JMethod::Series => {
            let r = bank.triple(f, t)?;
            if idx == JIndex::J1 {
                let pieces = j1_pieces(bank.p, t, bank.k_max);
                return Ok(Bounded { value: pieces.assembled(bank.p), ..r });
            }
            Ok(r)
        }
    }
}

/// J₁₀, J₁₁, J₁₂ truncated to m, l, m+l ≤ K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct J1Pieces {
    pub j10: f64,
    pub j11: f64,
    pub j12: f64,
}

impl J1Pieces {
    /// (2π/p)J₁₀ + (π/2)(2J₁₁ + J₁₂).
    pub fn assembled(&self, p: usize) -> f64 {
        2.0 * PI / p as f64 * self.j10 + 0.5 * PI * (2.0 * self.j11 + self.j12)
    }
}

/// c(m)d(l)c(m+l)·e^{−2(m²+l²+ml)t}.
pub fn f11(c: &[f64], d: &[f64], m: usize, l: usize, t: f64) -> f64 {
    c[m] * d[l] * c[m + l] * pair_decay(m, l, t)
}

/// c(m)c(l)d(m+l)·e^{−2(m²+l²+ml)t}.
pub fn f12(c: &[f64], d: &[f64], m: usize, l: usize, t: f64) -> f64 {
    c[m] * c[l] * d[m + l] * pair_decay(m, l, t)
}

/// e^{−(m² + l² + (m+l)²)t}.
pub fn pair_decay(m: usize, l: usize, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let (m, l) = (m as f64, l as f64);
    (-2.0 * (m * m + l * l + m * l) * t).exp()
}

pub fn j1_pieces(p: usize, t: f64, k_max: usize) -> J1Pieces {
    let c: Vec<f64> = (0..=k_max).map(|k| super::coeffs::c_coef(p, k)).collect();
    let d: Vec<f64> = (0..=k_max).map(|k| super::coeffs::d_coef(p, k)).collect();
    let j10 = (1..=k_max).map(|m| c[m] * d[m] * (-2.0 * (m * m) as f64 * t).exp()).sum();
    let (mut j11, mut j12) = (0.0, 0.0);
    for m in 1..k_max {
        for l in 1..=(k_max - m) {
            j11 += f11(&c, &d, m, l, t);
            j12 += f12(&c, &d, m, l, t);
        }
    }
    J1Pieces { j10, j11, j12 }
}

/// A(k)A(k+l)B(l)·e^{−(k²+l²+(k+l)²)t}.
pub fn f1(p: usize, k: usize, l: usize, t: f64) -> f64 {
    big_a(p, k) * big_a(p, k + l) * big_b(p, l) * pair_decay(k, l, t)
}

/// −A(k)A(l)B(k+l)·e^{−(k²+l²+(k+l)²)t}.
pub fn f2(p: usize, k: usize, l: usize, t: f64) -> f64 {
    -big_a(p, k) * big_a(p, l) * big_b(p, k + l) * pair_decay(k, l, t)
}

/// Σ_{k,l ≥ 1, k+l ≤ K} (2F₁ + F₂).
pub fn j_lattice(p: usize, t: f64, k_max: usize) -> f64 {
    let a: Vec<f64> = (0..=k_max).map(|k| big_a(p, k)).collect();
    let b: Vec<f64> = (0..=k_max).map(|k| big_b(p, k)).collect();
    let mut acc = 0.0;
    for k in 1..k_max {
        for l in 1..=(k_max - k) {
            let w = pair_decay(k, l, t);
            if w == 0.0 {
                break;
            }
            acc += (2.0 * a[k] * a[k + l] * b[l] - a[k] * a[l] * b[k + l]) * w;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TildeJReport {
    pub p: usize,
    pub t: f64,
    pub k_max: usize,
    /// −∫S²(sin)S(cos 2) as a resonance sum.
    pub tilde_j: f64,
    /// The same integral on the grid.
    pub quadrature: f64,
    pub tail: f64,
    pub lattice: f64,
    /// |tildeJ − (4p²/π²)J| / |tildeJ|.
    pub identity_residual: f64,
}

pub fn eval_tilde_j(p: usize, t: f64) -> Result<TildeJReport> {
    let k = truncation_for(p, t);
    let mut bank = HeatBank::new(p, k);
    let r = bank.triple([Factor::Sin, Factor::Sin, Factor::NegCos2], t)?;
    let lattice = j_lattice(p, t, k);
    let pf = p as f64;
    let predicted = 4.0 * pf * pf / (PI * PI) * lattice;
    Ok(TildeJReport {
        p,
        t,
        k_max: k,
        tilde_j: r.value,
        quadrature: r.quadrature,
        tail: r.error,
        lattice,
        identity_residual: (r.value - predicted).abs() / r.value.abs(),
    })
}

/// −∫S²(sin)S(cos 2) at t = 0, from the data.
pub fn tilde_j_initial(p: usize) -> Result<f64> {
    initial_triple(p, &factors::sin1(), &factors::sin1(), &factors::neg_cos2())
}

/// 9p²k³sin²(πk/p)sin(2πk/p) / (2(p²−k²)³(p²−4k²)(4p²−k²)).
pub fn k_eq_l_closed(p: usize, k: usize) -> f64 {
    let (pf, kf) = (p as f64, k as f64);
    let s = (PI * kf / pf).sin();
    let s2 = (2.0 * PI * kf / pf).sin();
    9.0 * pf * pf * kf.powi(3) * s * s * s2
        / (2.0 * (pf * pf - kf * kf).powi(3) * (pf * pf - 4.0 * kf * kf) * (4.0 * pf * pf - kf * kf))
}

/// 2A(k)A(2k)B(k) − A(k)²B(2k).
pub fn k_eq_l_direct(p: usize, k: usize) -> f64 {
    2.0 * big_a(p, k) * big_a(p, 2 * k) * big_b(p, k) - big_a(p, k).powi(2) * big_b(p, 2 * k)
}
