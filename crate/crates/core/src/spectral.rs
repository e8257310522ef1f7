//! Truncated Fourier calculus on 𝕋³: real, zero-mean, divergence-free
//! fields stored sparsely by mode, with curl, curl⁻¹, Leray projection,
//! the heat propagator, the trilinear form Ψ and the functional Φ.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::{Error, Result};

pub type Mode = [i64; 3];
pub type CVec3 = [Complex64; 3];

pub const DEFAULT_EPS_DIV: f64 = 1e-10;
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// (2π)³, the torus volume.
pub fn torus_volume() -> f64 {
    (2.0 * PI).powi(3)
}

/// Modes with |k|∞ ≤ N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice3 {
    radius: usize,
}

impl Lattice3 {
    pub fn new(radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidParameter("lattice radius must be at least 1".into()));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn contains(&self, k: &Mode) -> bool {
        k.iter().all(|c| c.unsigned_abs() as usize <= self.radius)
    }

    /// Smallest 5-smooth grid size on which the trapezoid rule integrates any
    /// triple product of lattice fields exactly (n ≥ 3N + 1).
    pub fn dealiased_grid(&self) -> usize {
        smooth_size_at_least(3 * self.radius + 1)
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> {
        let r = self.radius as i64;
        (-r..=r).flat_map(move |a| (-r..=r).flat_map(move |b| (-r..=r).map(move |c| [a, b, c])))
    }
}

pub fn smooth_size_at_least(n: usize) -> usize {
    (n..)
        .find(|&m| {
            let mut x = m;
            for f in [2, 3, 5] {
                while x % f == 0 {
                    x /= f;
                }
            }
            x == 1
        })
        .expect("unbounded search")
}

pub fn dot_mode(k: &Mode, v: &CVec3) -> Complex64 {
    v[0] * k[0] as f64 + v[1] * k[1] as f64 + v[2] * k[2] as f64
}

pub fn norm3(v: &CVec3) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

pub fn mode_sq(k: &Mode) -> i64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

fn neg(k: &Mode) -> Mode {
    [-k[0], -k[1], -k[2]]
}

fn conj3(v: &CVec3) -> CVec3 {
    [v[0].conj(), v[1].conj(), v[2].conj()]
}

/// k × v for an integer vector k.
fn cross(k: &Mode, v: &CVec3) -> CVec3 {
    let (k0, k1, k2) = (k[0] as f64, k[1] as f64, k[2] as f64);
    [v[2] * k1 - v[1] * k2, v[0] * k2 - v[2] * k0, v[1] * k0 - v[0] * k1]
}

/// True for the representative of each ±k pair: first nonzero component positive.
pub fn is_representative(k: &Mode) -> bool {
    k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Reality-symmetric coefficients without the transversality requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct RawField {
    pub lattice: Lattice3,
    pub coeffs: BTreeMap<Mode, CVec3>,
}

impl RawField {
    pub fn max_divergence(&self) -> f64 {
        self.coeffs.iter().map(|(k, v)| dot_mode(k, v).norm()).fold(0.0, f64::max)
    }
}

/// A truncated real, zero-mean, divergence-free vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField3 {
    lattice: Lattice3,
    eps_div: f64,
    coeffs: BTreeMap<Mode, CVec3>,
    mean_zeroed: bool,
}

impl SpectralField3 {
    pub fn zero(lattice: Lattice3) -> Self {
        Self { lattice, eps_div: DEFAULT_EPS_DIV, coeffs: BTreeMap::new(), mean_zeroed: false }
    }

    /// Builds a field from entries; −k is filled with the conjugate, û(0) is zeroed.
    pub fn make_field(entries: &[(Mode, CVec3)], radius: usize, eps_div: f64) -> Result<Self> {
        let lattice = Lattice3::new(radius)?;
        let mut coeffs: BTreeMap<Mode, CVec3> = BTreeMap::new();
        let mut mean_zeroed = false;
        let floor = 64.0 * f64::EPSILON * entries.iter().map(|(_, v)| norm3(v)).fold(0.0, f64::max);
        for (k, v) in entries {
            if !lattice.contains(k) {
                return Err(Error::ModeOutOfRange { k: *k, n: radius });
            }
            if *k == [0, 0, 0] {
                if norm3(v) != 0.0 {
                    mean_zeroed = true;
                    log::warn!("mean mode supplied; set to zero");
                }
                continue;
            }
            let nv = norm3(v);
            let residual = dot_mode(k, v).norm();
            if residual > (eps_div * nv + floor) * (mode_sq(k) as f64).sqrt() {
                return Err(Error::Transversality { k: *k, residual, tol: eps_div });
            }
            for (kk, vv) in [(*k, *v), (neg(k), conj3(v))] {
                if let Some(old) = coeffs.get(&kk) {
                    let diff = norm3(&[old[0] - vv[0], old[1] - vv[1], old[2] - vv[2]]);
                    if diff > 1e-14 * nv.max(norm3(old)) {
                        return Err(Error::ConflictingMode { k: kk });
                    }
                }
                coeffs.insert(kk, vv);
            }
        }
        Ok(Self { lattice, eps_div, coeffs, mean_zeroed })
    }

    /// Internal constructor for operator outputs; checks every invariant.
    fn checked(lattice: Lattice3, eps_div: f64, coeffs: BTreeMap<Mode, CVec3>) -> Self {
        Self::checked_at(lattice, eps_div, coeffs, 0.0)
    }

    /// As `checked`, with round-off measured against inputs of magnitude `input_scale`.
    fn checked_at(lattice: Lattice3, eps_div: f64, coeffs: BTreeMap<Mode, CVec3>, input_scale: f64) -> Self {
        let f = Self { lattice, eps_div, coeffs, mean_zeroed: false };
        debug_assert!(f.violation_at(input_scale).is_none(), "{:?}", f.violation_at(input_scale));
        f
    }

    /// Description of the first violated invariant, if any.
    pub fn invariant_violation(&self) -> Option<String> {
        self.violation_at(0.0)
    }

    fn max_coeff(&self) -> f64 {
        self.coeffs.values().map(norm3).fold(0.0, f64::max)
    }

    fn violation_at(&self, input_scale: f64) -> Option<String> {
        let floor = 64.0 * f64::EPSILON * self.max_coeff().max(input_scale);
        for (k, v) in &self.coeffs {
            if *k == [0, 0, 0] {
                return Some("nonzero mean".into());
            }
            if !self.lattice.contains(k) {
                return Some(format!("mode {k:?} outside lattice"));
            }
            let Some(w) = self.coeffs.get(&neg(k)) else {
                return Some(format!("mode {k:?} lacks its conjugate"));
            };
            let scale = norm3(v).max(1e-300);
            if norm3(&[w[0] - v[0].conj(), w[1] - v[1].conj(), w[2] - v[2].conj()]) > 1e-12 * scale {
                return Some(format!("reality broken at {k:?}"));
            }
            if dot_mode(k, v).norm() > (self.eps_div * norm3(v) + floor) * (mode_sq(k) as f64).sqrt() * (1.0 + 1e-6) + 1e-300 {
                return Some(format!("transversality broken at {k:?}"));
            }
        }
        None
    }

    pub fn lattice(&self) -> Lattice3 {
        self.lattice
    }

    pub fn radius(&self) -> usize {
        self.lattice.radius
    }

    pub fn eps_div(&self) -> f64 {
        self.eps_div
    }

    pub fn mean_was_zeroed(&self) -> bool {
        self.mean_zeroed
    }

    pub fn coeff(&self, k: &Mode) -> CVec3 {
        self.coeffs.get(k).copied().unwrap_or([ZERO; 3])
    }

    pub fn coeffs(&self) -> &BTreeMap<Mode, CVec3> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn map_modes<F: Fn(&Mode, &CVec3) -> CVec3>(&self, f: F) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, v)| (*k, f(k, v))).collect();
        Self::checked(self.lattice, self.eps_div, coeffs)
    }

    /// Coefficient i·k×v̂(k).
    pub fn curl(&self) -> Self {
        self.map_modes(|k, v| cross(k, v).map(|c| I * c))
    }

    /// Coefficient i·(k×ŵ(k))/|k|².
    pub fn curl_inv(&self) -> Self {
        self.map_modes(|k, v| {
            let k2 = mode_sq(k) as f64;
            cross(k, v).map(|c| I * c / k2)
        })
    }

    /// Coefficient v̂(k)·exp(−|k|²t).
    pub fn heat_evolve(&self, t: f64) -> Self {
        assert!(t >= 0.0, "heat propagator needs t ≥ 0");
        self.map_modes(|k, v| {
            let f = (-(mode_sq(k) as f64) * t).exp();
            v.map(|c| c * f)
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, v| v.map(|c| c * s))
    }

    /// Multiplies û(k) by exp(−i k·s), a translation by s.
    pub fn shifted(&self, s: [f64; 3]) -> Self {
        self.map_modes(|k, v| {
            let ph = -(k[0] as f64 * s[0] + k[1] as f64 * s[1] + k[2] as f64 * s[2]);
            let z = Complex64::from_polar(1.0, ph);
            v.map(|c| c * z)
        })
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch(self.radius(), other.radius()));
        }
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            let e = coeffs.entry(*k).or_insert([ZERO; 3]);
            for i in 0..3 {
                e[i] += v[i] * a;
            }
        }
        let eps = self.eps_div.max(other.eps_div);
        let scale = self.max_coeff().max(a.abs() * other.max_coeff());
        Ok(Self::checked_at(self.lattice, eps, coeffs, scale))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    /// ‖v‖² = (2π)³ Σ|v̂(k)|².
    pub fn l2_norm_sq(&self) -> f64 {
        torus_volume() * self.coeffs.values().map(|v| norm3(v).powi(2)).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// (2π)³ Σ Re v̂(k)·conj(ŵ(k)).
    pub fn inner(&self, other: &Self) -> f64 {
        torus_volume()
            * self
                .coeffs
                .iter()
                .map(|(k, v)| {
                    let w = other.coeff(k);
                    (v[0] * w[0].conj() + v[1] * w[1].conj() + v[2] * w[2].conj()).re
                })
                .sum::<f64>()
    }

    /// Keeps only modes with `keep(k)` true.
    pub fn filtered<F: Fn(&Mode) -> bool>(&self, keep: F) -> Self {
        let coeffs = self.coeffs.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, *v)).collect();
        Self::checked(self.lattice, self.eps_div, coeffs)
    }

    /// Re-embeds the field in a lattice of another radius (modes outside are dropped).
    pub fn with_radius(&self, radius: usize) -> Result<Self> {
        let lattice = Lattice3::new(radius)?;
        let coeffs = self.coeffs.iter().filter(|(k, _)| lattice.contains(k)).map(|(k, v)| (*k, *v)).collect();
        Ok(Self::checked(lattice, self.eps_div, coeffs))
    }

    pub fn to_raw(&self) -> RawField {
        RawField { lattice: self.lattice, coeffs: self.coeffs.clone() }
    }

    pub fn to_json(&self) -> FieldJson {
        let modes = self
            .coeffs
            .iter()
            .filter(|(k, _)| is_representative(k))
            .map(|(k, v)| ModeRecord { k: *k, re: v.map(|c| c.re), im: v.map(|c| c.im) })
            .collect();
        FieldJson { n: self.radius(), eps_div: self.eps_div, modes }
    }

    pub fn from_json(j: &FieldJson) -> Result<Self> {
        let entries: Vec<(Mode, CVec3)> = j
            .modes
            .iter()
            .map(|m| (m.k, [0, 1, 2].map(|i| Complex64::new(m.re[i], m.im[i]))))
            .collect();
        Self::make_field(&entries, j.n, j.eps_div)
    }
}

/// Leray projection v̂ − k(k·v̂)/|k|² of the real part of `raw`, dropping the mean mode.
pub fn leray_project(raw: &RawField, eps_div: f64) -> SpectralField3 {
    let zero = [Complex64::new(0.0, 0.0); 3];
    let coeffs = raw
        .coeffs
        .keys()
        .flat_map(|k| [*k, neg(k)])
        .filter(|k| *k != [0, 0, 0])
        .collect::<std::collections::BTreeSet<Mode>>()
        .into_iter()
        .map(|k| {
            let a = raw.coeffs.get(&k).unwrap_or(&zero);
            let b = raw.coeffs.get(&neg(&k)).unwrap_or(&zero);
            let v = [0, 1, 2].map(|i| (a[i] + b[i].conj()) * 0.5);
            let kd = dot_mode(&k, &v) / mode_sq(&k) as f64;
            (k, [v[0] - kd * k[0] as f64, v[1] - kd * k[1] as f64, v[2] - kd * k[2] as f64])
        })
        .collect();
    SpectralField3::checked(raw.lattice, eps_div, coeffs)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModeRecord {
    pub k: Mode,
    pub re: [f64; 3],
    pub im: [f64; 3],
}

/// JSON form: one record per conjugate pair.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps_div: f64,
    pub modes: Vec<ModeRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiMethod {
    PseudoSpectral,
    DirectSum,
}

/// A cubic grid of n³ complex samples with 3D FFT helpers.
pub struct Grid3 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Grid3 {
    pub fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(n);
        Self { n, fft }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// In-place inverse transform: out[j] = Σ_k a[k] e^{i k·x_j}, x_j = 2πj/n.
    pub fn inverse(&self, data: &mut [Complex64]) {
        let n = self.n;
        let mut scratch = vec![ZERO; self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(data, &mut scratch);
        let mut line = vec![ZERO; n];
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    line[b] = data[(a * n + b) * n + c];
                }
                self.fft.process_with_scratch(&mut line, &mut scratch);
                for b in 0..n {
                    data[(a * n + b) * n + c] = line[b];
                }
            }
        }
        for b in 0..n {
            for c in 0..n {
                for a in 0..n {
                    line[a] = data[(a * n + b) * n + c];
                }
                self.fft.process_with_scratch(&mut line, &mut scratch);
                for a in 0..n {
                    data[(a * n + b) * n + c] = line[a];
                }
            }
        }
    }

    /// Scatters coefficients into an n³ spectrum buffer.
    pub fn spectrum<F: Fn(&Mode) -> Complex64>(&self, modes: &[Mode], f: F) -> Vec<Complex64> {
        let n = self.n;
        let mut buf = vec![ZERO; n * n * n];
        for k in modes {
            let j = (self.idx(k[0]) * n + self.idx(k[1])) * n + self.idx(k[2]);
            buf[j] += f(k);
        }
        buf
    }

    /// Physical values of two real fields given by coefficient maps, packed as f + i g.
    pub fn pair_to_physical<F, G>(&self, modes: &[Mode], f: F, g: G) -> (Vec<f64>, Vec<f64>)
    where
        F: Fn(&Mode) -> Complex64,
        G: Fn(&Mode) -> Complex64,
    {
        let mut buf = self.spectrum(modes, |k| f(k) + I * g(k));
        self.inverse(&mut buf);
        buf.iter().map(|z| (z.re, z.im)).unzip()
    }
}

/// Velocity and velocity-gradient samples of y and ∇curl⁻¹y on a grid.
struct PhysicalSet {
    vel: [Vec<f64>; 3],
    /// grad[i][j] = ∂_j v_i with v = curl⁻¹ y.
    grad: [[Vec<f64>; 3]; 3],
}

fn physical_set(grid: &Grid3, y: &SpectralField3, need_grad: bool) -> PhysicalSet {
    let modes: Vec<Mode> = y.coeffs.keys().copied().collect();
    let v = y.curl_inv();
    let mut reals: Vec<Vec<f64>> = Vec::with_capacity(12);
    let vel_pair = |a: usize, b: usize| grid.pair_to_physical(&modes, |k| y.coeff(k)[a], |k| y.coeff(k)[b]);
    let (v0, v1) = vel_pair(0, 1);
    reals.push(v0);
    reals.push(v1);
    if need_grad {
        // Components 2 and grad[0][0] share one transform.
        let (v2, g00) = grid.pair_to_physical(&modes, |k| y.coeff(k)[2], |k| I * k[0] as f64 * v.coeff(k)[0]);
        reals.push(v2);
        reals.push(g00);
        let pairs: [((usize, usize), (usize, usize)); 4] =
            [((0, 1), (0, 2)), ((1, 0), (1, 1)), ((1, 2), (2, 0)), ((2, 1), (2, 2))];
        for ((i1, j1), (i2, j2)) in pairs {
            let (a, b) = grid.pair_to_physical(
                &modes,
                |k| I * k[j1] as f64 * v.coeff(k)[i1],
                |k| I * k[j2] as f64 * v.coeff(k)[i2],
            );
            reals.push(a);
            reals.push(b);
        }
        let mut it = reals.into_iter();
        let vel = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
        let g00 = it.next().unwrap();
        let g01 = it.next().unwrap();
        let g02 = it.next().unwrap();
        let g10 = it.next().unwrap();
        let g11 = it.next().unwrap();
        let g12 = it.next().unwrap();
        let g20 = it.next().unwrap();
        let g21 = it.next().unwrap();
        let g22 = it.next().unwrap();
        PhysicalSet { vel, grad: [[g00, g01, g02], [g10, g11, g12], [g20, g21, g22]] }
    } else {
        let (v2, _) = grid.pair_to_physical(&modes, |k| y.coeff(k)[2], |_| ZERO);
        let mut it = reals.into_iter();
        let vel = [it.next().unwrap(), it.next().unwrap(), v2];
        PhysicalSet { vel, grad: Default::default() }
    }
}

fn psi_from_sets(a: &PhysicalSet, b: &PhysicalSet, c: &PhysicalSet, n: usize) -> f64 {
    let len = n * n * n;
    let mut acc = 0.0;
    for x in 0..len {
        let mut s = 0.0;
        for i in 0..3 {
            let adv = a.vel[0][x] * b.grad[i][0][x] + a.vel[1][x] * b.grad[i][1][x] + a.vel[2][x] * b.grad[i][2][x];
            s += adv * c.vel[i][x];
        }
        acc += s;
    }
    acc * (2.0 * PI / n as f64).powi(3)
}

/// Ψ(y₁,y₂,y₃) = ∫((y₁·∇)curl⁻¹y₂)·y₃ dx.
pub fn psi_trilinear(y1: &SpectralField3, y2: &SpectralField3, y3: &SpectralField3, method: PsiMethod) -> Result<f64> {
    for y in [y2, y3] {
        if y.lattice != y1.lattice {
            return Err(Error::LatticeMismatch(y1.radius(), y.radius()));
        }
    }
    match method {
        PsiMethod::DirectSum => Ok(psi_direct(y1, y2, y3)),
        PsiMethod::PseudoSpectral => {
            let grid = Grid3::new(y1.lattice.dealiased_grid());
            let a = physical_set(&grid, y1, false);
            let b = physical_set(&grid, y2, true);
            let c = physical_set(&grid, y3, false);
            Ok(psi_from_sets(&a, &b, &c, grid.n()))
        }
    }
}

fn psi_direct(y1: &SpectralField3, y2: &SpectralField3, y3: &SpectralField3) -> f64 {
    let v2 = y2.curl_inv();
    let mut acc = ZERO;
    for (k, a) in &y1.coeffs {
        for (m, b) in &v2.coeffs {
            let q = [-k[0] - m[0], -k[1] - m[1], -k[2] - m[2]];
            let Some(c) = y3.coeffs.get(&q) else { continue };
            let am = I * dot_mode(m, a);
            let bc = b[0] * c[0] + b[1] * c[1] + b[2] * c[2];
            acc += am * bc;
        }
    }
    acc.re * torus_volume()
}

/// All 27 values Ψ(f_a, f_b, f_c) for a ≤ 3 fields, sharing one set of transforms.
pub fn psi_tensor(fields: &[&SpectralField3]) -> Result<Vec<Vec<Vec<f64>>>> {
    let first = fields.first().ok_or_else(|| Error::InvalidParameter("no fields".into()))?;
    for f in fields {
        if f.lattice != first.lattice {
            return Err(Error::LatticeMismatch(first.radius(), f.radius()));
        }
    }
    let grid = Grid3::new(first.lattice.dealiased_grid());
    let sets: Vec<PhysicalSet> = fields.iter().map(|f| physical_set(&grid, f, true)).collect();
    let m = fields.len();
    let mut out = vec![vec![vec![0.0; m]; m]; m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                out[a][b][c] = psi_from_sets(&sets[a], &sets[b], &sets[c], grid.n());
            }
        }
    }
    Ok(out)
}

/// Φ(ω) = Ψ(ω,ω,ω)/‖ω‖², or 0 below the zero-field threshold.
pub fn phi_functional(omega: &SpectralField3) -> f64 {
    let nsq = omega.l2_norm_sq();
    if nsq <= 1e-14 * torus_volume() {
        return 0.0;
    }
    let psi = psi_trilinear(omega, omega, omega, PsiMethod::PseudoSpectral).expect("single lattice");
    psi / nsq
}

/// Samples a field on the centered grid x_j = −π + 2πj/n (n > 2N).
pub fn field_on_grid(y: &SpectralField3, n: usize) -> [Vec<f64>; 3] {
    assert!(n > 2 * y.radius(), "grid must resolve the lattice");
    let grid = Grid3::new(n);
    let modes: Vec<Mode> = y.coeffs.keys().copied().collect();
    let sign = |k: &Mode| if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (a, b) = grid.pair_to_physical(&modes, |k| y.coeff(k)[0] * sign(k), |k| y.coeff(k)[1] * sign(k));
    let (c, _) = grid.pair_to_physical(&modes, |k| y.coeff(k)[2] * sign(k), |_| ZERO);
    [a, b, c]
}

/// Random real divergence-free field with Gaussian coefficients on modes 0 < |k|² ≤ max_sq,
/// deterministic in `seed`.
pub fn random_field(radius: usize, max_sq: i64, seed: u64) -> Result<SpectralField3> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let lattice = Lattice3::new(radius)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for k in lattice.modes() {
        if !is_representative(&k) || mode_sq(&k) > max_sq {
            continue;
        }
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let v: CVec3 = std::array::from_fn(|_| Complex64::new(draw(), draw()));
        let kd = dot_mode(&k, &v) / mode_sq(&k) as f64;
        entries.push((k, [0, 1, 2].map(|i| v[i] - kd * k[i] as f64)));
    }
    SpectralField3::make_field(&entries, radius, DEFAULT_EPS_DIV)
}
