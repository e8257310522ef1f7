//! Exponential lower bounds e^{6t}·F(t) > C on a time grid, with truncation tails subtracted.

use std::f64::consts::PI;

use serde::Serialize;

use super::coeffs::{c_coef, d_coef};
use super::jfun::{eval_j_in, j_lattice, tilde_j_initial, truncation_for, Bounded, Factor, HeatBank, JIndex, JMethod};
use super::ratios::{pair_decay_sum, BoundReport, Direction, RatioEval, Tracker};
use crate::heat1d::initial_triple;
use crate::Result;

/// 9 sin²(π/p) sin(2π/p) / (2π²p⁶).
pub fn alpha(p: usize) -> f64 {
    let pf = p as f64;
    let s = (PI / pf).sin();
    9.0 * s * s * (2.0 * PI / pf).sin() / (2.0 * PI * PI * pf.powi(6))
}

/// The constant of the lower bound for the lattice series J.
pub fn j_lattice_constant(p: usize) -> f64 {
    let pf = p as f64;
    let s = (PI / pf).sin();
    9.0 * s * s * (2.0 * PI / pf).sin() / (4.0 * pf.powi(8))
}

/// Constant of the first-triangle bound (half of [`j_lattice_constant`]).
pub fn first_triangle_constant(p: usize) -> f64 {
    j_lattice_constant(p) / 2.0
}

/// (π/2)(2c(1)d(1)c(2) + c(1)²d(2)).
pub fn c1_constant(p: usize) -> f64 {
    let (c1, c2, d1, d2) = (c_coef(p, 1), c_coef(p, 2), d_coef(p, 1), d_coef(p, 2));
    0.5 * PI * (2.0 * c1 * d1 * c2 + c1 * c1 * d2)
}

/// t = 0 together with a geometric grid from 1e−3 to `t_max`.
pub fn default_t_grid(t_max: f64, points: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    let (lo, hi) = (1e-3f64.ln(), t_max.ln());
    for i in 0..points {
        g.push((lo + (hi - lo) * i as f64 / (points - 1) as f64).exp());
    }
    g
}

/// Certified values of every functional that enters the bounds at time t.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub tilde_j: Bounded,
    pub j_lattice: Bounded,
    pub j1: Bounded,
    pub j2: Bounded,
    pub j3: Bounded,
    pub j4: Bounded,
    pub g: Bounded,
    pub p_s2: Bounded,
    pub cc_mix: Bounded,
}

fn data_value(p: usize, f: [Factor; 3]) -> Result<Bounded> {
    let [a, b, c] = f.map(|x| x.poly());
    Ok(Bounded { error: 1e-12, ..Bounded::exact(initial_triple(p, &a, &b, &c)?) })
}

pub fn snapshot(p: usize, t: f64) -> Result<Snapshot> {
    use Factor::*;
    let pf = p as f64;
    let to_lattice = PI * PI / (4.0 * pf * pf);
    if t == 0.0 {
        let tj = Bounded { error: 1e-12, ..Bounded::exact(tilde_j_initial(p)?) };
        let q = data_value(p, [Sin, Sin, CosCos2])?;
        let r = data_value(p, [OnePlusCos, Cos, CosCos2])?;
        return Ok(Snapshot {
            t,
            tilde_j: tj,
            j_lattice: tj.scale(to_lattice),
            j1: data_value(p, JIndex::J1.factors())?,
            j2: data_value(p, JIndex::J2.factors())?,
            j3: data_value(p, JIndex::J3.factors())?,
            j4: data_value(p, JIndex::J4.factors())?,
            g: r.scale(12.0).add(q.scale(9.0)),
            p_s2: data_value(p, [OnePlusCos, SinTwo, SinTwo])?,
            cc_mix: data_value(p, [Cos, Cos, Mix])?,
        });
    }
    let k = truncation_for(p, t);
    let mut bank = HeatBank::new(p, k);
    let tj = bank.triple([Sin, Sin, NegCos2], t)?;
    let lat = j_lattice(p, t, k);
    let j_lat = Bounded { value: lat, error: tj.error * to_lattice, quadrature: tj.quadrature * to_lattice };
    let mut j = |idx| eval_j_in(&mut bank, idx, t, JMethod::Series);
    let (j1, j2, j3, j4) = (j(JIndex::J1)?, j(JIndex::J2)?, j(JIndex::J3)?, j(JIndex::J4)?);
    let q = bank.triple([Sin, Sin, CosCos2], t)?;
    let r = bank.triple([OnePlusCos, Cos, CosCos2], t)?;
    Ok(Snapshot {
        t,
        tilde_j: tj,
        j_lattice: j_lat,
        j1,
        j2,
        j3,
        j4,
        g: r.scale(12.0).add(q.scale(9.0)),
        p_s2: bank.triple([OnePlusCos, SinTwo, SinTwo], t)?,
        cc_mix: bank.triple([Cos, Cos, Mix], t)?,
    })
}

fn lower(v: f64) -> RatioEval {
    RatioEval { value: v, rate_ok: true, sign_ok: true }
}

/// Σ over k, l ≤ p−1 with k + l < p or k = l of (2F₁ + F₂), times e^{6t}.
pub fn first_triangle_scaled(p: usize, t: f64) -> f64 {
    pair_decay_sum(p, t, |k, l| k + l < p || k == l) * (6.0 * t).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSet {
    pub reports: Vec<BoundReport>,
    /// min over t of log J₃(t) + 6t, per p.
    pub j3_log_rate_floor: Vec<(usize, f64)>,
}

pub fn lower_bound_certificates(p_range: impl IntoIterator<Item = usize>, t_grid: &[f64]) -> Result<CertificateSet> {
    use Direction::Above;
    let mut reports = Vec::new();
    let mut floors = Vec::new();
    for p in p_range {
        let pf = p as f64;
        let al = alpha(p);
        let alpha1 = al / (8.0 * pf * pf - 6.0);
        let names: [(&str, &str, f64); 11] = [
            ("cert_tilde_j", "e^{6t}·tildeJ(t)", al),
            ("cert_j_lattice", "e^{6t}·J(t)", j_lattice_constant(p)),
            ("cert_j_lattice_from_alpha", "e^{6t}·J(t) against π²α/(4p²)", PI * PI * al / (4.0 * pf * pf)),
            ("cert_j1", "e^{6t}·J1(t)", c1_constant(p)),
            ("cert_j3_positive", "e^{6t}·J3(t)", 0.0),
            ("cert_j24", "e^{6t}·(J2+J4)(t)", alpha1 / (24.0 * pf * pf - 6.0)),
            ("cert_g", "e^{6t}·(12R+9Q)(t)", alpha1),
            ("cert_j2_positive", "e^{6t}·J2(t)", 0.0),
            ("cert_p_s2_positive", "e^{6t}·∫S(1+cos)S²(sin+2sin2)", 0.0),
            ("cert_cc_mix_positive", "e^{6t}·∫S²(cos)S(30(1+cos)+42(1−cos2))", 0.0),
            ("cert_first_triangle", "e^{6t}·first-triangle part of J", first_triangle_constant(p)),
        ];
        let mut trackers: Vec<Tracker> = names.iter().map(|_| Tracker::new(Above)).collect();
        let mut floor = f64::INFINITY;
        for &t in t_grid {
            let s = snapshot(p, t)?;
            let e = (6.0 * t).exp();
            let j24 = s.j2.add(s.j4);
            let vals = [
                s.tilde_j.lower(),
                s.j_lattice.lower(),
                s.j_lattice.lower(),
                s.j1.lower(),
                s.j3.lower(),
                j24.lower(),
                s.g.lower(),
                s.j2.lower(),
                s.p_s2.lower(),
                s.cc_mix.lower(),
                first_triangle_scaled(p, t) / e,
            ];
            for (tr, v) in trackers.iter_mut().zip(vals) {
                tr.push(lower(v * e), || format!("t={t:.4e}"));
            }
            if s.j3.lower() > 0.0 {
                floor = floor.min(s.j3.lower().ln() + 6.0 * t);
            } else {
                floor = f64::NEG_INFINITY;
            }
        }
        let range = format!("p={p}; t in [{:.0e}, {:.0e}] ({} points)", t_grid[0], t_grid[t_grid.len() - 1], t_grid.len());
        for (tr, (id, desc, c)) in trackers.into_iter().zip(names) {
            reports.push(tr.finish(id, desc, range.clone(), Some(p), c, 0.0));
        }
        let mut lead = Tracker::new(Above);
        let v = 2.0 * super::coeffs::big_a(p, 1) * super::coeffs::big_a(p, 2) * super::coeffs::big_b(p, 1)
            - super::coeffs::big_a(p, 1).powi(2) * super::coeffs::big_b(p, 2);
        lead.push(lower(v), || "k=l=1".into());
        reports.push(lead.finish("cert_leading_diagonal", "2A(1)A(2)B(1) − A(1)²B(2)", format!("p={p}"), Some(p), first_triangle_constant(p), 0.0));
        floors.push((p, floor));
    }
    Ok(CertificateSet { reports, j3_log_rate_floor: floors })
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaReport {
    pub p: usize,
    pub a: [f64; 3],
    /// min over t of the certified lower bound of e^{18t}·Ψ(S(t)u).
    pub beta_emp: f64,
    pub worst_t: f64,
    pub samples: Vec<(f64, f64)>,
}

/// e^{18t}·(3/4)p⁶(a₃²−a₂²)a₁·J₁J₃(J₂+J₄) from certified lower bounds of each factor.
pub fn beta_empirical(p: usize, a: [f64; 3], t_grid: &[f64]) -> Result<BetaReport> {
    let pre = 0.75 * (p as f64).powi(6) * (a[2] * a[2] - a[1] * a[1]) * a[0];
    let mut samples = Vec::new();
    let (mut best, mut at) = (f64::INFINITY, 0.0);
    for &t in t_grid {
        let s = snapshot(p, t)?;
        let lo = s.j1.lower().max(0.0) * s.j3.lower().max(0.0) * s.j2.add(s.j4).lower().max(0.0);
        let v = pre * lo * (18.0 * t).exp();
        samples.push((t, v));
        if v < best {
            best = v;
            at = t;
        }
    }
    Ok(BetaReport { p, a, beta_emp: best, worst_t: at, samples })
}
