//! Differential identities between the J-functionals and auxiliary triple integrals,
//! checked with fourth-order central differences.

use std::f64::consts::PI;

use serde::Serialize;

use super::jfun::{truncation_for, Factor, HeatBank};
use crate::heat1d::initial_triple;
use crate::Result;

use Factor::*;

const J2: [Factor; 3] = [OnePlusCos, CosCos2, CosCos2];
const J4: [Factor; 3] = [CosCos2, Sin, SinHalf];
/// ∫S²(sin)S(cos+cos2)
const QF: [Factor; 3] = [Sin, Sin, CosCos2];
/// ∫S(1+cos)S(cos)S(cos+cos2)
const RF: [Factor; 3] = [OnePlusCos, Cos, CosCos2];
const P_S2: [Factor; 3] = [OnePlusCos, SinTwo, SinTwo];
const CC_Q: [Factor; 3] = [Cos, Cos, CosCos2];
const CC_P: [Factor; 3] = [Cos, Cos, OnePlusCos];
const SS_C2: [Factor; 3] = [Sin, Sin, Cos2];
const CC_MIX: [Factor; 3] = [Cos, Cos, Mix];
const ZERO_SC: [Factor; 3] = [Sin, Sin, Cos];
const ZERO_QH: [Factor; 3] = [CosCos2, SinHalf, SinHalf];

#[derive(Debug, Clone, Serialize)]
pub struct OdeRow {
    pub t: f64,
    /// Residual of the J₂+J₄ equation.
    pub j24: f64,
    pub j4: f64,
    pub q: f64,
    pub r: f64,
    /// Residual of the g = 12R + 9Q equation.
    pub g: f64,
    /// Largest magnitude among the terms of the g equation, for scale.
    pub scale: f64,
    pub zero_sin_cos: f64,
    pub zero_q_h: f64,
    pub j2: f64,
    pub p_s2: f64,
    pub cc_mix: f64,
    pub g_value: f64,
    pub j24_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeReport {
    pub p: usize,
    pub dt: f64,
    pub k_max: usize,
    pub rows: Vec<OdeRow>,
    pub j24_initial: f64,
    pub j24_initial_expected: f64,
    pub g_initial: f64,
    pub g_initial_expected: f64,
}

impl OdeReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.j24.abs().max(r.j4.abs()).max(r.q.abs()).max(r.r.abs()).max(r.g.abs())).fold(0.0, f64::max)
    }

    pub fn max_zero_identity(&self) -> f64 {
        self.rows.iter().map(|r| r.zero_sin_cos.abs().max(r.zero_q_h.abs())).fold(0.0, f64::max)
    }

    pub fn positivity_holds(&self) -> bool {
        self.rows.iter().all(|r| r.j2 > 0.0 && r.p_s2 > 0.0 && r.cc_mix > 0.0)
    }
}

fn stencil(bank: &mut HeatBank, f: [Factor; 3], t: f64, h: f64) -> Result<f64> {
    let mut v = [0.0; 4];
    for (slot, off) in v.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
        *slot = bank.triple(f, t + off * h)?.value;
    }
    Ok((v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h))
}

/// Fourth-order difference residuals on `t_grid` (each t ≥ 2·dt).
pub fn ode_identity_checks(p: usize, t_grid: &[f64], dt: f64) -> Result<OdeReport> {
    let t_min = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let k = truncation_for(p, (t_min - 2.0 * dt).max(1e-3));
    let mut bank = HeatBank::new(p, k);
    let p2 = (p * p) as f64;
    let mut rows = Vec::new();
    for &t in t_grid {
        let mut at = |f: [Factor; 3]| bank.triple(f, t).map(|b| b.value);
        let (j2, j4, q, r) = (at(J2)?, at(J4)?, at(QF)?, at(RF)?);
        let (p_s2, cc_q, cc_p, ss_c2, cc_mix) = (at(P_S2)?, at(CC_Q)?, at(CC_P)?, at(SS_C2)?, at(CC_MIX)?);
        let (z1, z2) = (at(ZERO_SC)?, at(ZERO_QH)?);
        let d = |bank: &mut HeatBank, f| stencil(bank, f, t, dt);
        let (dj2, dj4, dq, dr) = (d(&mut bank, J2)?, d(&mut bank, J4)?, d(&mut bank, QF)?, d(&mut bank, RF)?);
        let j24 = dj2 + dj4 + 24.0 * p2 * (j2 + j4) - (8.0 * p2 * j2 + 9.0 * p2 * q + 2.0 * p2 * p_s2 + 12.0 * p2 * r);
        let j4_res = dj4 + 24.0 * p2 * j4 - 9.0 * p2 * q;
        let q_res = dq + 8.0 * p2 * q + 2.0 * p2 * cc_q;
        let r_res = dr + 8.0 * p2 * r - (6.0 * p2 * cc_p - 2.0 * p2 * cc_q - 4.0 * p2 * ss_c2);
        let g = 12.0 * r + 9.0 * q;
        let dg = 12.0 * dr + 9.0 * dq;
        let g_res = dg + 8.0 * p2 * g - (p2 * cc_mix - 48.0 * p2 * ss_c2);
        let scale = [dg, 8.0 * p2 * g, p2 * cc_mix, 48.0 * p2 * ss_c2].iter().map(|x| x.abs()).fold(0.0, f64::max);
        rows.push(OdeRow {
            t,
            j24,
            j4: j4_res,
            q: q_res,
            r: r_res,
            g: g_res,
            scale,
            zero_sin_cos: z1,
            zero_q_h: z2,
            j2,
            p_s2,
            cc_mix,
            g_value: g,
            j24_value: j2 + j4,
        });
    }
    let init = |f: [Factor; 3]| {
        let [a, b, c] = f.map(|x| x.poly());
        initial_triple(p, &a, &b, &c)
    };
    let pf = p as f64;
    Ok(OdeReport {
        p,
        dt,
        k_max: k,
        rows,
        j24_initial: init(J2)? + init(J4)?,
        j24_initial_expected: 11.0 * PI / (4.0 * pf),
        g_initial: 12.0 * init(RF)? + 9.0 * init(QF)?,
        g_initial_expected: 27.0 * PI / (2.0 * pf),
    })
}

/// The default evaluation times for the difference checks.
pub fn default_ode_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]
}
