use thiserror::Error;

/// Errors raised by constructors and numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {k:?} lies outside the lattice of radius {n}")]
    ModeOutOfRange { k: [i64; 3], n: usize },
    #[error("mode {k:?}: transversality violated, |k·û| = {residual:e} > ({tol:e}·‖û‖ + 64ε·max‖û‖)·|k|")]
    Transversality { k: [i64; 3], residual: f64, tol: f64 },
    #[error("mode {k:?} supplied twice with conflicting values")]
    ConflictingMode { k: [i64; 3] },
    #[error("fields live on different lattices ({0} vs {1})")]
    LatticeMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("truncation K = {k} is below 3p = {min}")]
    TruncationTooSmall { k: usize, min: usize },
    #[error("trig polynomial mixes cosine and sine parity")]
    MixedParity,
    #[error("quadrature did not reach tolerance {tol:e} within {evals} evaluations")]
    QuadratureFailed { tol: f64, evals: usize },
    #[error("iterative solver stalled: residual {residual:e} after {iters} iterations")]
    SolverStalled { residual: f64, iters: usize },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("Gram matrix is not positive definite: {0}")]
    SingularGram(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
