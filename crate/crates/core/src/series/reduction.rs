//! Reduction of Ψ along the heat-evolved control to 1D triple integrals.

use serde::Serialize;

use super::jfun::{eval_j_in, HeatBank, JIndex, JMethod};
use crate::control::{build_control, factor_a, factor_b, factor_c, factor_d, ControlParams, Rank1, TensorFactorization};
use crate::heat1d::{triple_of_series, windowed_coeffs, Heat1DSolution, TrigPoly};
use crate::spectral::{psi_trilinear, PsiMethod};
use crate::Result;

/// Heat solutions of arbitrary windowed factors at one truncation.
pub struct FactorCache {
    p: usize,
    k_max: usize,
    entries: Vec<(TrigPoly, Heat1DSolution)>,
}

impl FactorCache {
    pub fn new(p: usize, k_max: usize) -> Self {
        Self { p, k_max, entries: Vec::new() }
    }

    fn index(&mut self, f: &TrigPoly) -> Result<usize> {
        if let Some(i) = self.entries.iter().position(|(g, _)| g == f) {
            return Ok(i);
        }
        let s = windowed_coeffs(f, self.p, self.k_max)?.solution();
        self.entries.push((f.clone(), s));
        Ok(self.entries.len() - 1)
    }

    /// ∫_{𝕋³} S(X)S(Y)S(Z) for rank-1 X, Y, Z, as a product of 1D triple integrals.
    pub fn triple3(&mut self, x: &Rank1, y: &Rank1, z: &Rank1, t: f64) -> Result<f64> {
        let mut v = x.scale * y.scale * z.scale;
        for ax in 0..3 {
            let (i, j, k) = (self.index(&x.factors[ax])?, self.index(&y.factors[ax])?, self.index(&z.factors[ax])?);
            let (a, b, c) = (self.entries[i].1.at(t), self.entries[j].1.at(t), self.entries[k].1.at(t));
            v *= triple_of_series(&a, &b, &c)?.0;
            if v == 0.0 {
                break;
            }
        }
        Ok(v)
    }

    /// ∫ (ΣX)(ΣY)(ΣZ) expanded termwise.
    pub fn triple_sums(&mut self, xs: &[Rank1], ys: &[Rank1], zs: &[Rank1], t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for x in xs {
            for y in ys {
                for z in zs {
                    acc += self.triple3(x, y, z, t)?;
                }
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Identity {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub p: usize,
    pub n: usize,
    pub t: f64,
    pub a: [f64; 3],
    /// Ψ(S(t)u) from the 3D pseudo-spectral evaluation.
    pub lhs_spectral: f64,
    /// p⁶∫(S₁₂² − S₁₃²)S₂₃ + S₁₂S₁₃(S₃₃ − S₂₂) from 1D factors.
    pub lhs_factorized: f64,
    /// p⁶ times the twelve-summand expression.
    pub summands: f64,
    /// (3/4)p⁶(a₃²−a₂²)a₁·J₁J₃(J₂+J₄) at the same truncation.
    pub product_formula: f64,
    /// The same formula with J's converged in the truncation.
    pub product_converged: f64,
    /// (5/4)(a₃²−a₂²)a₁·J₁J₃(J₂+J₄) without the p⁶ factor, for comparison.
    pub literal_formula: f64,
    pub rel_spectral_vs_product: f64,
    pub rel_factorized_vs_product: f64,
    pub rel_summands_vs_product: f64,
    pub product_identities: Vec<Identity>,
    pub zero_family_one_max: f64,
    pub zero_family_two_max: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// 0-based index triple from a 1-based label like 231.
fn ix(label: u32) -> (usize, usize, usize) {
    ((label / 100 - 1) as usize, ((label / 10) % 10 - 1) as usize, (label % 10 - 1) as usize)
}

pub fn reduction_check(params: &ControlParams, t: f64) -> Result<ReductionReport> {
    params.validate()?;
    let (p, n, a) = (params.p, params.n, params.a);
    let pf = p as f64;
    let p6 = pf.powi(6);

    let u = build_control(params)?;
    let su = u.heat_evolve(t);
    let lhs_spectral = psi_trilinear(&su, &su, &su, PsiMethod::PseudoSpectral)?;

    let mut cache = FactorCache::new(p, n);
    let fz = TensorFactorization::new(a);
    let s = &fz.second;
    let neg = |v: &[Rank1]| v.iter().map(|r| r.scaled(-1.0)).collect::<Vec<_>>();
    let mut d = neg(&s[1][1]);
    d.extend(s[2][2].iter().cloned());
    let lhs = cache.triple_sums(&s[0][1], &s[0][1], &s[1][2], t)? - cache.triple_sums(&s[0][2], &s[0][2], &s[1][2], t)?
        + cache.triple_sums(&s[0][1], &s[0][2], &d, t)?;
    let lhs_factorized = p6 * lhs;

    let fa = |l| {
        let (i, j, k) = ix(l);
        factor_a(a, i, j, k)
    };
    let fb = |l| {
        let (i, j, k) = ix(l);
        factor_b(a, i, j, k)
    };
    let fd = |l| {
        let (i, j, k) = ix(l);
        factor_d(a, i, j, k)
    };
    let mut tr = |x: &Rank1, y: &Rank1, z: &Rank1| cache.triple3(x, y, z, t);
    let terms = [
        ("A231*A123^2", tr(&fa(231), &fa(123), &fa(123))?),
        ("B321*A123*B123", tr(&fb(321), &fa(123), &fb(123))?),
        ("A231*A132^2", tr(&fa(231), &fa(132), &fa(132))?),
        ("B231*A132*B132", tr(&fb(231), &fa(132), &fb(132))?),
        ("B123*A132*D321", tr(&fb(123), &fa(132), &fd(321))?),
        ("B213*A132*D312", tr(&fb(213), &fa(132), &fd(312))?),
        ("B213*B132*D321", tr(&fb(213), &fb(132), &fd(321))?),
        ("A123*B132*D231", tr(&fa(123), &fb(132), &fd(231))?),
        ("A123*B312*D213", tr(&fa(123), &fb(312), &fd(213))?),
        ("B123*B312*D231", tr(&fb(123), &fb(312), &fd(231))?),
    ];
    let v = |i: usize| terms[i].1;
    let sum12 = (v(0) + 2.0 * v(1)) - (v(2) + 2.0 * v(3)) + (v(4) + v(5) + v(6)) - (v(7) + v(8) + v(9));
    let summands = p6 * sum12;

    let mut bank = HeatBank::new(p, n);
    let j = |bank: &mut HeatBank, idx| eval_j_in(bank, idx, t, JMethod::Series).map(|b| b.value);
    let (j1, j2, j3, j4) = (j(&mut bank, JIndex::J1)?, j(&mut bank, JIndex::J2)?, j(&mut bank, JIndex::J3)?, j(&mut bank, JIndex::J4)?);
    let (a1, a2, a3) = (a[0], a[1], a[2]);
    let expected = [
        a1 * a3 * a3 * j1 * j2 * j3,
        0.5 * a1 * a3 * a3 * j1 * j3 * j4,
        a1 * a2 * a2 * j1 * j2 * j3,
        0.5 * a1 * a2 * a2 * j1 * j3 * j4,
        0.5 * a1 * a2 * a2 * j1 * j3 * j4,
        0.25 * a1 * a2 * a2 * j1 * j2 * j3,
        -0.25 * a1 * a2 * a2 * j1 * j3 * j4,
        0.5 * a1 * a3 * a3 * j1 * j3 * j4,
        0.25 * a1 * a3 * a3 * j1 * j2 * j3,
        -0.25 * a1 * a3 * a3 * j1 * j3 * j4,
    ];
    let product_identities = terms
        .iter()
        .zip(expected)
        .map(|(&(name, value), expected)| Identity { name: name.to_string(), value, expected, residual: (value - expected).abs() })
        .collect();
    let prefactor = (a3 * a3 - a2 * a2) * a1;
    let core = j1 * j3 * (j2 + j4);
    let product_formula = 0.75 * p6 * prefactor * core;

    let k_conv = super::jfun::truncation_for(p, t);
    let mut conv = HeatBank::new(p, k_conv);
    let jc = |idx| eval_j_in(&mut conv, idx, t, JMethod::Series).map(|b| b.value);
    let mut jc = jc;
    let (c1, c2, c3, c4) = (jc(JIndex::J1)?, jc(JIndex::J2)?, jc(JIndex::J3)?, jc(JIndex::J4)?);
    let product_converged = 0.75 * p6 * prefactor * c1 * c3 * (c2 + c4);
    let literal_formula = 1.25 * prefactor * core;

    let (zero_family_one_max, zero_family_two_max) = zero_families(&mut cache, a, t)?;

    Ok(ReductionReport {
        p,
        n,
        t,
        a,
        lhs_spectral,
        lhs_factorized,
        summands,
        product_formula,
        product_converged,
        literal_formula,
        rel_spectral_vs_product: rel(lhs_spectral, product_formula),
        rel_factorized_vs_product: rel(lhs_factorized, product_formula),
        rel_summands_vs_product: rel(summands, product_formula),
        product_identities,
        zero_family_one_max,
        zero_family_two_max,
    })
}

/// Max |·| over all permutations of the two vanishing families of triple products.
pub fn zero_families(cache: &mut FactorCache, a: [f64; 3], t: f64) -> Result<(f64, f64)> {
    let (mut one, mut two): (f64, f64) = (0.0, 0.0);
    for [i, j, k] in PERMS {
        let aa = factor_a(a, i, j, k);
        let b = |x, y, z| factor_b(a, x, y, z);
        let fam1 = [
            cache.triple3(&aa, &b(i, k, j), &b(i, k, j), t)?,
            cache.triple3(&aa, &b(k, i, j), &b(k, i, j), t)?,
            cache.triple3(&aa, &b(j, k, i), &b(j, k, i), t)?,
            cache.triple3(&aa, &b(k, j, i), &b(k, j, i), t)?,
            cache.triple3(&b(i, j, k), &b(i, k, j), &b(k, i, j), t)?,
        ];
        let fam2 = [
            cache.triple3(&aa, &b(i, k, j), &factor_c(a, k, i, j), t)?,
            cache.triple3(&aa, &b(k, i, j), &factor_d(a, k, i, j), t)?,
            cache.triple3(&b(i, j, k), &b(i, k, j), &factor_d(a, j, i, k), t)?,
            cache.triple3(&b(i, j, k), &b(j, k, i), &factor_c(a, i, j, k), t)?,
        ];
        one = fam1.iter().fold(one, |m, v| m.max(v.abs()));
        two = fam2.iter().fold(two, |m, v| m.max(v.abs()));
    }
    Ok((one, two))
}
