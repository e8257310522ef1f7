//! Low-mode feedback: Poisson solves on a ball Ω = {|x| < π/p}, the Gram matrix
//! M and the operator F with (y + Fy)^(k) = 0 for 0 < |k|² < 18.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::{Cholesky, DMatrix, DVector, LU};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{dot_mode, is_representative, leray_project, mode_sq, norm3, CVec3, Grid3, Lattice3, Mode, RawField, SpectralField3};
use crate::{Error, Result};

/// Modes are cancelled strictly below this squared length.
pub const LOW_MODE_BOUND: i64 = 18;
/// Environment variable naming the directory that caches assembled systems.
pub const CACHE_ENV: &str = "NPE_CACHE_DIR";
pub const DEFAULT_SOLVER_TOL: f64 = 1e-12;
const CG_MAX_ITERS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSet18 {
    modes: Vec<Mode>,
}

impl ModeSet18 {
    /// All k with 0 < |k|² < 18, ordered by (|k|², k₁, k₂, k₃).
    pub fn enumerate() -> Self {
        let mut modes = Vec::new();
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=4 {
                    let k = [a, b, c];
                    let s = mode_sq(&k);
                    if s > 0 && s < LOW_MODE_BOUND {
                        modes.push(k);
                    }
                }
            }
        }
        modes.sort_by_key(|k| (mode_sq(k), k[0], k[1], k[2]));
        Self { modes }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn index_of(&self, k: &Mode) -> Option<usize> {
        self.modes.iter().position(|m| m == k)
    }

    pub fn contains(&self, k: &Mode) -> bool {
        let s = mode_sq(k);
        s > 0 && s < LOW_MODE_BOUND
    }
}

/// Uniform centred grid x = −π + 2πi/n restricted to the open ball |x| < ρ.
#[derive(Debug, Clone)]
pub struct BallGrid {
    n: usize,
    rho: f64,
    /// Flat n³ indices of interior nodes.
    nodes: Vec<usize>,
    /// Interior position of each flat index, or usize::MAX outside.
    slot: Vec<usize>,
    /// Six neighbour slots per interior node (usize::MAX for exterior neighbours).
    nbrs: Vec<[usize; 6]>,
}

impl BallGrid {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("p = {p} must be at least 2")));
        }
        if n < 32 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("Poisson grid n = {n} must be even and at least 32")));
        }
        let rho = PI / p as f64;
        let h = 2.0 * PI / n as f64;
        let coord = |i: usize| -PI + h * i as f64;
        let mut nodes = Vec::new();
        let mut slot = vec![usize::MAX; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let r2 = coord(a).powi(2) + coord(b).powi(2) + coord(c).powi(2);
                    if r2 < rho * rho {
                        let f = (a * n + b) * n + c;
                        slot[f] = nodes.len();
                        nodes.push(f);
                    }
                }
            }
        }
        let nbrs = nodes
            .iter()
            .map(|&f| {
                let (a, b, c) = (f / (n * n), (f / n) % n, f % n);
                let at = |a: usize, b: usize, c: usize| slot[(a * n + b) * n + c];
                // the ball sits well inside the box, so a ± 1 never wraps for interior nodes
                [at(a - 1, b, c), at(a + 1, b, c), at(a, b - 1, c), at(a, b + 1, c), at(a, b, c - 1), at(a, b, c + 1)]
            })
            .collect();
        Ok(Self { n, rho, nodes, slot, nbrs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn interior_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn position(&self, slot: usize) -> [f64; 3] {
        let n = self.n;
        let f = self.nodes[slot];
        let h = self.spacing();
        [(f / (n * n)) as f64, ((f / n) % n) as f64, (f % n) as f64].map(|i| -PI + h * i)
    }

    /// −Δ_h with zero Dirichlet data outside the ball.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let ih2 = 1.0 / self.spacing().powi(2);
        for (i, nb) in self.nbrs.iter().enumerate() {
            let mut s = 6.0 * v[i];
            for &j in nb {
                if j != usize::MAX {
                    s -= v[j];
                }
            }
            out[i] = s * ih2;
        }
    }

    /// Conjugate gradients for −Δ_h v = rhs to ‖r‖ ≤ tol·‖rhs‖.
    pub fn solve(&self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        let m = rhs.len();
        let mut x = vec![0.0; m];
        let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = rhs.to_vec();
        let mut d = r.clone();
        let mut ad = vec![0.0; m];
        let mut rr = bnorm * bnorm;
        for _ in 0..CG_MAX_ITERS {
            if rr.sqrt() <= tol * bnorm {
                return Ok(x);
            }
            self.apply(&d, &mut ad);
            let alpha = rr / d.iter().zip(&ad).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..m {
                x[i] += alpha * d[i];
                r[i] -= alpha * ad[i];
            }
            let rr_new = r.iter().map(|v| v * v).sum::<f64>();
            let beta = rr_new / rr;
            for i in 0..m {
                d[i] = r[i] + beta * d[i];
            }
            rr = rr_new;
        }
        Err(Error::SolverStalled { residual: rr.sqrt() / bnorm, iters: CG_MAX_ITERS })
    }

    /// Max-norm residual ‖−Δ_h v − rhs‖∞ over interior nodes.
    pub fn residual(&self, v: &[f64], rhs: &[f64]) -> f64 {
        let mut out = vec![0.0; v.len()];
        self.apply(v, &mut out);
        out.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Σ over grid edges of |Δv|²/h², counting edges to exterior zeros: equals ⟨−Δ_h v, v⟩.
    pub fn dirichlet_energy(&self, v: &[Complex64]) -> f64 {
        let ih2 = 1.0 / self.spacing().powi(2);
        let mut e = 0.0;
        for (i, nb) in self.nbrs.iter().enumerate() {
            for (dir, &j) in nb.iter().enumerate() {
                if j == usize::MAX {
                    e += v[i].norm_sqr();
                } else if dir % 2 == 1 {
                    e += (v[i] - v[j]).norm_sqr();
                }
            }
        }
        e * ih2
    }

    /// Scatters interior values into an n³ buffer (zero outside the ball).
    pub fn extend(&self, v: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n.pow(3)];
        for (&f, &x) in self.nodes.iter().zip(v) {
            full[f] = x;
        }
        full
    }

    pub fn is_interior(&self, flat: usize) -> bool {
        self.slot[flat] != usize::MAX
    }

    /// Real and imaginary parts of e^{i k·x} at interior nodes.
    pub fn plane_wave(&self, k: &Mode) -> (Vec<f64>, Vec<f64>) {
        (0..self.nodes.len())
            .map(|s| {
                let x = self.position(s);
                let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                (ph.cos(), ph.sin())
            })
            .unzip()
    }
}

/// Serialized form of an assembled system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeedbackCache {
    pub p: usize,
    pub n: usize,
    pub tol: f64,
    pub modes: Vec<Mode>,
    /// Row-major real and imaginary parts of the Hermitian part of M.
    pub m_re: Vec<f64>,
    pub m_im: Vec<f64>,
    pub asymmetry: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub condition: f64,
}

/// The Gram system in the real basis cos(j·x), sin(j·x) over representatives j.
///
/// With C = QR the real Gram matrix is n⁻³ RᵀHR, H = QᵀGQ, where G is the discrete
/// Dirichlet Green operator of the ball. Solves go through R and the well-conditioned
/// H, so the large coefficient vector c is never needed to form Fy.
#[derive(Debug, Clone)]
pub struct FeedbackSystem {
    p: usize,
    n: usize,
    tol: f64,
    modes: ModeSet18,
    ball: BallGrid,
    /// reps[r] = index in `modes` of the r-th representative; negs[r] of its negative.
    reps: Vec<usize>,
    negs: Vec<usize>,
    r: DMatrix<f64>,
    h_lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    /// G Q: Poisson solutions for the orthonormal basis columns.
    gq: DMatrix<f64>,
    /// Hermitian part of m_{k,j}.
    m: DMatrix<Complex64>,
    asymmetry: f64,
    spectrum: SpectrumSummary,
}

fn cache_paths(dir: &Path, p: usize, n: usize, tol: f64) -> (PathBuf, PathBuf) {
    let stem = format!("feedback_p{p}_n{n}_tol{tol:e}");
    (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.bin")))
}

/// rows, cols as u64 then column-major f64, all little-endian.
fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for v in m.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let bytes = std::fs::read(path)?;
    let word = |i: usize| -> Option<[u8; 8]> { bytes.get(8 * i..8 * i + 8).and_then(|s| s.try_into().ok()) };
    let bad = || Error::InvalidParameter(format!("malformed matrix file {}", path.display()));
    let rows = u64::from_le_bytes(word(0).ok_or_else(bad)?) as usize;
    let cols = u64::from_le_bytes(word(1).ok_or_else(bad)?) as usize;
    if bytes.len() != 8 * (2 + rows * cols) {
        return Err(bad());
    }
    Ok(DMatrix::from_iterator(rows, cols, (0..rows * cols).map(|i| f64::from_le_bytes(word(2 + i).expect("length checked")))))
}

struct RealBasis {
    reps: Vec<usize>,
    negs: Vec<usize>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

fn real_basis(ball: &BallGrid, modes: &ModeSet18) -> RealBasis {
    let reps: Vec<usize> = (0..modes.len()).filter(|&i| is_representative(&modes.modes()[i])).collect();
    let negs = reps
        .iter()
        .map(|&i| {
            let k = modes.modes()[i];
            modes.index_of(&[-k[0], -k[1], -k[2]]).expect("mode set is closed under negation")
        })
        .collect();
    let half = reps.len();
    let mut c = DMatrix::<f64>::zeros(ball.interior_count(), 2 * half);
    for (col, &i) in reps.iter().enumerate() {
        let (re, im) = ball.plane_wave(&modes.modes()[i]);
        c.set_column(col, &DVector::from_vec(re));
        c.set_column(half + col, &DVector::from_vec(im));
    }
    let qr = c.qr();
    RealBasis { reps, negs, q: qr.q(), r: qr.r() }
}

impl FeedbackSystem {
    /// Assembles m_{k,j} = n⁻³ Σ_x v_j(x) e^{−i k·x} with −Δ_h v_j = e^{i j·x} on Ω.
    pub fn assemble(p: usize, n: usize, tol: f64) -> Result<Self> {
        let ball = BallGrid::new(p, n)?;
        let modes = ModeSet18::enumerate();
        let basis = real_basis(&ball, &modes);
        let dim = basis.q.ncols();
        let mut gq = DMatrix::<f64>::zeros(ball.interior_count(), dim);
        for col in 0..dim {
            let v = ball.solve(basis.q.column(col).as_slice(), tol)?;
            gq.set_column(col, &DVector::from_vec(v));
        }
        let h = basis.q.transpose() * &gq;
        log::debug!("assembled feedback system p={p} n={n}: {} modes, {} interior nodes", modes.len(), ball.interior_count());
        Self::from_parts(p, n, tol, modes, ball, basis, h, gq)
    }

    fn from_parts(p: usize, n: usize, tol: f64, modes: ModeSet18, ball: BallGrid, basis: RealBasis, h_raw: DMatrix<f64>, gq: DMatrix<f64>) -> Result<Self> {
        let scale = 1.0 / (n as f64).powi(3);
        let m_real = basis.r.transpose() * &h_raw * &basis.r * scale;
        let raw = complex_gram(&m_real, &basis.reps, &basis.negs, modes.len());
        let asymmetry = (&raw - raw.adjoint()).norm() / raw.norm();
        let m = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        let h_sym = (&h_raw + h_raw.transpose()) * 0.5;
        let h_chol = Cholesky::new(h_sym).ok_or_else(|| Error::SingularGram("discrete Green operator is not positive definite".into()))?;
        // M = 2 n⁻³ BᵀB with B = LᵀR up to a unitary change of basis, so eigenvalues come from singular values of B.
        let b = h_chol.l().transpose() * &basis.r;
        let sv = b.singular_values();
        let (smin, smax) = (sv.min(), sv.max());
        let min = 2.0 * scale * smin * smin;
        let max = 2.0 * scale * smax * smax;
        if !(min > 0.0) || !(smin > 1e3 * f64::EPSILON * smax) {
            return Err(Error::SingularGram(format!("minimum eigenvalue {min:e}")));
        }
        Ok(Self {
            p,
            n,
            tol,
            modes,
            ball,
            reps: basis.reps,
            negs: basis.negs,
            r: basis.r,
            h_lu: h_raw.lu(),
            gq,
            m,
            asymmetry,
            spectrum: SpectrumSummary { min_eigenvalue: min, max_eigenvalue: max, condition: max / min },
        })
    }

    /// Loads a cached system from `dir` when present, otherwise assembles and stores it.
    /// Returns the system and whether the cache was hit.
    pub fn load_or_assemble(p: usize, n: usize, tol: f64, dir: Option<&Path>) -> Result<(Self, bool)> {
        let Some(dir) = dir else {
            return Ok((Self::assemble(p, n, tol)?, false));
        };
        let (meta, bin) = cache_paths(dir, p, n, tol);
        if meta.exists() && bin.exists() {
            let cache: FeedbackCache = serde_json::from_reader(BufReader::new(File::open(&meta)?))?;
            let gq = read_matrix(&bin)?;
            log::info!("feedback cache hit: {}", meta.display());
            return Ok((Self::from_cache(&cache, gq)?, true));
        }
        let sys = Self::assemble(p, n, tol)?;
        std::fs::create_dir_all(dir)?;
        write_matrix(&bin, &sys.gq)?;
        serde_json::to_writer(BufWriter::new(File::create(&meta)?), &sys.to_cache())?;
        log::info!("feedback cache stored: {}", meta.display());
        Ok((sys, false))
    }

    /// Cache directory from the environment, if set.
    pub fn cache_dir_from_env() -> Option<PathBuf> {
        std::env::var_os(CACHE_ENV).map(PathBuf::from)
    }

    /// Metadata and M for the JSON cache; G Q is stored separately (see [`FeedbackSystem::green_columns`]).
    pub fn to_cache(&self) -> FeedbackCache {
        let nm = self.modes.len();
        let mut m_re = Vec::with_capacity(nm * nm);
        let mut m_im = Vec::with_capacity(nm * nm);
        for i in 0..nm {
            for j in 0..nm {
                m_re.push(self.m[(i, j)].re);
                m_im.push(self.m[(i, j)].im);
            }
        }
        FeedbackCache { p: self.p, n: self.n, tol: self.tol, modes: self.modes.modes().to_vec(), m_re, m_im, asymmetry: self.asymmetry }
    }

    /// Rebuilds a system from cached metadata and the G Q block.
    pub fn from_cache(c: &FeedbackCache, gq: DMatrix<f64>) -> Result<Self> {
        let modes = ModeSet18::enumerate();
        if modes.modes() != c.modes.as_slice() {
            return Err(Error::InvalidParameter("cached mode ordering does not match".into()));
        }
        let nm = modes.len();
        if c.m_re.len() != nm * nm || c.m_im.len() != nm * nm {
            return Err(Error::InvalidParameter("cached matrix has the wrong size".into()));
        }
        let ball = BallGrid::new(c.p, c.n)?;
        if gq.nrows() != ball.interior_count() || gq.ncols() != nm {
            return Err(Error::InvalidParameter(format!("cached Green block is {}×{}, expected {}×{nm}", gq.nrows(), gq.ncols(), ball.interior_count())));
        }
        let basis = real_basis(&ball, &modes);
        let h = basis.q.transpose() * &gq;
        let sys = Self::from_parts(c.p, c.n, c.tol, modes, ball, basis, h, gq)?;
        let stored = DMatrix::from_fn(nm, nm, |i, j| Complex64::new(c.m_re[i * nm + j], c.m_im[i * nm + j]));
        if (&stored - &sys.m).norm() > 1e-10 * sys.m.norm() {
            return Err(Error::Consistency("cached M does not match the cached Green block".into()));
        }
        Ok(sys)
    }

    /// G Q: one Poisson solution per orthonormal basis column.
    pub fn green_columns(&self) -> &DMatrix<f64> {
        &self.gq
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn modes(&self) -> &ModeSet18 {
        &self.modes
    }

    pub fn ball(&self) -> &BallGrid {
        &self.ball
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// ‖M − M*‖/‖M‖ before symmetrization.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn spectrum(&self) -> &SpectrumSummary {
        &self.spectrum
    }

    /// v_j on interior nodes (real and imaginary parts), solved on demand.
    pub fn poisson_mode(&self, j: &Mode) -> Result<(Vec<f64>, Vec<f64>)> {
        let (c, s) = self.ball.plane_wave(j);
        Ok((self.ball.solve(&c, self.tol)?, self.ball.solve(&s, self.tol)?))
    }

    /// ⟨Mc, c⟩ and the Dirichlet energy n⁻³⟨−Δ_h V, V⟩ of V = Σ c_j v_j.
    pub fn energy_pair(&self, c: &DVector<Complex64>) -> Result<(f64, f64)> {
        let quad = (c.adjoint() * &self.m * c)[(0, 0)].re;
        let (re, im) = self.combined_rhs(c.as_slice());
        let v_re = self.ball.solve(&re, self.tol)?;
        let v_im = self.ball.solve(&im, self.tol)?;
        let v: Vec<Complex64> = v_re.iter().zip(&v_im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        Ok((quad, self.ball.dirichlet_energy(&v) / (self.n as f64).powi(3)))
    }

    /// Σ_j c_j e^{i j·x} at interior nodes, split into real and imaginary parts.
    fn combined_rhs(&self, c: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let nb = self.ball.interior_count();
        let mut re = vec![0.0; nb];
        let mut im = vec![0.0; nb];
        for s in 0..nb {
            let x = self.ball.position(s);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, cj) in self.modes.modes().iter().zip(c) {
                let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                acc += cj * Complex64::from_polar(1.0, ph);
            }
            re[s] = acc.re;
            im[s] = acc.im;
        }
        (re, im)
    }

    /// For target low-mode coefficients f(k) (one component), returns V = Σ_j c_j v_j
    /// on interior nodes and c with M c = f.
    fn synthesize(&self, f: impl Fn(&Mode) -> Complex64) -> Result<(Vec<f64>, Vec<Complex64>)> {
        let half = self.reps.len();
        let mut rhs = DVector::<f64>::zeros(2 * half);
        for (r, &i) in self.reps.iter().enumerate() {
            let fk = f(&self.modes.modes()[i]);
            rhs[r] = fk.re;
            rhs[half + r] = -fk.im;
        }
        let z = self
            .r
            .tr_solve_upper_triangular(&rhs)
            .ok_or_else(|| Error::SingularGram("triangular factor is singular".into()))?;
        let w = self.h_lu.solve(&z).ok_or_else(|| Error::SingularGram("Green factor is singular".into()))? * (self.n as f64).powi(3);
        let v = &self.gq * &w;
        let theta = self.r.solve_upper_triangular(&w).ok_or_else(|| Error::SingularGram("triangular factor is singular".into()))?;
        let mut c = vec![Complex64::new(0.0, 0.0); self.modes.len()];
        for r in 0..half {
            c[self.reps[r]] = Complex64::new(theta[r], -theta[half + r]) * 0.5;
            c[self.negs[r]] = Complex64::new(theta[r], theta[half + r]) * 0.5;
        }
        Ok((v.as_slice().to_vec(), c))
    }

    /// Computes Fy = Σ_j c_j v_j with M c^{(m)} = −ŷ^{(m)} for each component m.
    pub fn apply(&self, y: &SpectralField3) -> Result<FeedbackApplication> {
        let n = self.n;
        let out_radius = y.radius().max(1);
        if n <= 2 * out_radius {
            return Err(Error::InvalidParameter(format!("Poisson grid n = {n} cannot resolve lattice radius {out_radius}")));
        }
        let mut coeffs: [Vec<Complex64>; 3] = Default::default();
        let mut grids: [Vec<f64>; 3] = Default::default();
        for comp in 0..3 {
            let (v, c) = self.synthesize(|k| -y.coeff(k)[comp])?;
            grids[comp] = self.ball.extend(&v);
            coeffs[comp] = c;
        }
        let spectra = grids.clone().map(|g| forward_transform(&g, n));
        let lattice = Lattice3::new(out_radius)?;
        let mut fy = BTreeMap::new();
        for k in lattice.modes() {
            if k == [0, 0, 0] {
                continue;
            }
            let v: CVec3 = [0, 1, 2].map(|c| spectra[c](&k));
            fy.insert(k, v);
        }
        let fy = RawField { lattice, coeffs: fy };

        let y_norm = y.coeffs().values().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt();
        let low_residual = self
            .modes
            .modes()
            .iter()
            .map(|k| {
                let f = fy.coeffs.get(k).copied().unwrap_or([Complex64::new(0.0, 0.0); 3]);
                let yk = y.coeff(k);
                norm3(&[0, 1, 2].map(|i| yk[i] + f[i]))
            })
            .fold(0.0, f64::max);
        let c_norm = coeffs.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut transversal: f64 = 0.0;
        let mut conj: f64 = 0.0;
        for (j, k) in self.modes.modes().iter().enumerate() {
            let cj: CVec3 = [0, 1, 2].map(|c| coeffs[c][j]);
            transversal = transversal.max(dot_mode(k, &cj).norm());
            let neg = self.modes.index_of(&[-k[0], -k[1], -k[2]]).expect("closed under negation");
            let cn: CVec3 = [0, 1, 2].map(|c| coeffs[c][neg]);
            conj = conj.max(norm3(&[0, 1, 2].map(|i| cn[i] - cj[i].conj())));
        }
        if c_norm > 0.0 && transversal > 1e-6 * c_norm {
            log::debug!("feedback coefficients are not transversal: max |c_j·j| = {transversal:e}, ‖c‖ = {c_norm:e}");
        }
        let fy_norm = fy.coeffs.values().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt();
        let divergence = fy.max_divergence();
        let outside = (0..n.pow(3))
            .filter(|&f| !self.ball.is_interior(f))
            .map(|f| grids.iter().map(|g| g[f].abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        Ok(FeedbackApplication {
            report: FeedbackReport {
                y_norm,
                fy_norm,
                c_norm,
                low_mode_residual: low_residual,
                relative_low_mode_residual: if y_norm > 0.0 { low_residual / y_norm } else { low_residual },
                transversality_residual: transversal,
                conjugacy_residual: conj,
                max_divergence: divergence,
                relative_divergence: if fy_norm > 0.0 { divergence / fy_norm } else { 0.0 },
                outside_support_max: outside,
            },
            coefficients: coeffs,
            grid: grids,
            fy,
        })
    }

    /// z₀ = y + Fy, Leray-projected onto divergence-free fields on y's lattice.
    pub fn corrected(&self, y: &SpectralField3, app: &FeedbackApplication) -> SpectralField3 {
        let mut sum = app.fy.coeffs.clone();
        for (k, v) in y.coeffs() {
            let e = sum.entry(*k).or_insert([Complex64::new(0.0, 0.0); 3]);
            for i in 0..3 {
                e[i] += v[i];
            }
        }
        leray_project(&RawField { lattice: app.fy.lattice, coeffs: sum }, y.eps_div())
    }
}

/// m_{k,j} from the real Gram matrix over [cos(j·x) | sin(j·x)]: e_{±j} = cos ± i sin.
fn complex_gram(m_real: &DMatrix<f64>, reps: &[usize], negs: &[usize], nm: usize) -> DMatrix<Complex64> {
    let half = reps.len();
    let mut t = DMatrix::<Complex64>::zeros(2 * half, nm);
    for r in 0..half {
        t[(r, reps[r])] = Complex64::new(1.0, 0.0);
        t[(half + r, reps[r])] = Complex64::new(0.0, 1.0);
        t[(r, negs[r])] = Complex64::new(1.0, 0.0);
        t[(half + r, negs[r])] = Complex64::new(0.0, -1.0);
    }
    let mc = m_real.map(|v| Complex64::new(v, 0.0));
    t.adjoint() * mc * t
}

/// Returns k ↦ n⁻³ Σ_x g(x) e^{−i k·x} on the centred grid.
fn forward_transform(g: &[f64], n: usize) -> impl Fn(&Mode) -> Complex64 {
    let grid = Grid3::new(n);
    let mut buf: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.inverse(&mut buf);
    let scale = 1.0 / (n as f64).powi(3);
    move |k: &Mode| {
        let idx = |c: i64| c.rem_euclid(n as i64) as usize;
        let sign = if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        buf[(idx(k[0]) * n + idx(k[1])) * n + idx(k[2])].conj() * sign * scale
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeedbackReport {
    /// ℓ² norm of the coefficients of y.
    pub y_norm: f64,
    pub fy_norm: f64,
    pub c_norm: f64,
    /// max over low modes of ‖ŷ(k) + F̂y(k)‖.
    pub low_mode_residual: f64,
    pub relative_low_mode_residual: f64,
    /// max_j |c_j·j|.
    pub transversality_residual: f64,
    /// max_j ‖c_{−j} − conj(c_j)‖.
    pub conjugacy_residual: f64,
    /// max_k |k·F̂y(k)|.
    pub max_divergence: f64,
    pub relative_divergence: f64,
    /// max |Fy| at grid nodes outside Ω.
    pub outside_support_max: f64,
}

#[derive(Debug, Clone)]
pub struct FeedbackApplication {
    pub report: FeedbackReport,
    /// c^{(m)}_j in mode-set order, per component.
    pub coefficients: [Vec<Complex64>; 3],
    /// Fy on the n³ grid, per component.
    pub grid: [Vec<f64>; 3],
    /// Fourier coefficients of Fy on y's lattice.
    pub fy: RawField,
}
