//! Quadrature rules: adaptive Simpson (coefficient oracle), Gauss–Kronrod
//! 7/15 panels (time integrals) and Gauss–Legendre nodes.

use crate::{Error, Result};

const MAX_DEPTH: u32 = 60;
/// Levels that are always refined, so symmetric integrands cannot fool the first estimates.
const MIN_DEPTH: u32 = 6;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 3usize;
    let mut ok = true;
    let v = simpson_rec(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut evals, &mut ok);
    if ok {
        Ok(v)
    } else {
        Err(Error::QuadratureFailed { tol, evals })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Below this width the panel is at round-off level and further splitting is noise.
    if depth == 0 || (b - a).abs() < 1e-12 {
        if delta.abs() > 15.0 * tol && depth == 0 {
            *ok = false;
        }
        return left + right + delta / 15.0;
    }
    if MAX_DEPTH - depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, ok)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, ok)
}

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
pub const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 Kronrod nodes mapped to `[a, b]`, in increasing order.
pub fn kronrod_nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 15];
    for i in 0..7 {
        out[i] = c - h * XGK[i];
        out[14 - i] = c + h * XGK[i];
    }
    out[7] = c;
    out
}

/// Gauss–Kronrod 7/15 estimate from values at [`kronrod_nodes`].
/// Returns `(kronrod value, |kronrod − gauss|)`.
pub fn gk15_from_values(a: f64, b: f64, vals: &[f64; 15]) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let mut k = WGK[7] * vals[7];
    let mut g = WG[3] * vals[7];
    for i in 0..7 {
        let pair = vals[i] + vals[14 - i];
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// One Gauss–Kronrod 7/15 panel.
pub fn gk15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> (f64, f64) {
    let nodes = kronrod_nodes(a, b);
    let mut vals = [0.0; 15];
    for (v, &x) in vals.iter_mut().zip(nodes.iter()) {
        *v = f(x);
    }
    gk15_from_values(a, b, &vals)
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on Pₙ).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Barycentric Lagrange interpolation through `(xs, ys)`.
pub fn barycentric_eval(xs: &[f64], ys: &[f64], weights: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xi, &yi), &wi) in xs.iter().zip(ys).zip(weights) {
        let d = x - xi;
        if d == 0.0 {
            return yi;
        }
        let t = wi / d;
        num += t * yi;
        den += t;
    }
    num / den
}

/// Barycentric weights for arbitrary distinct nodes.
pub fn barycentric_weights(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let prod: f64 = xs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| xi - xj)
                .product();
            1.0 / prod
        })
        .collect()
}
