use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix data has {found} entries, expected {expected} for a square matrix")]
    InvalidShape { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace of product has imaginary part {0:e}, expected a real value")]
    ComplexTrace(f64),

    #[error("local dimensions must be a non-empty list of positive integers")]
    InvalidLocalDims,

    #[error("amplitude vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("local index {index} at site {site} exceeds local dimension {dim}")]
    LocalIndexOutOfRange { site: usize, index: usize, dim: usize },

    #[error("state has {0} sites, expected a bipartite state")]
    NotBipartite(usize),

    #[error("invalid site subset: {0}")]
    InvalidSubset(&'static str),

    #[error("operation requires equal local dimensions")]
    UnequalLocalDims,

    #[error("density matrix trace {found} differs from declared trace {expected}")]
    TraceMismatch { expected: f64, found: f64 },

    #[error("density matrix carries no multipartite structure")]
    MissingLocalDims,

    #[error("expected {expected} observables, got {found}")]
    ObservableCount { expected: usize, found: usize },

    #[error("mixing weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("search re-validation mismatch: optimizer reported {reported:e}, skew evaluation gives {recomputed:e}")]
    Unsound { reported: f64, recomputed: f64 },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
