use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chain length {0} is even; frustrated boundary conditions need an odd number of sites")]
    EvenChain(usize),
    #[error("chain length {n} is outside the supported range 3..={max}")]
    ChainSize { n: usize, max: usize },
    #[error("coupling ratio J/h = {0} sits on a critical point and has no phase label")]
    CriticalPoint(f64),
    #[error("transverse field must be positive, got h = {0}")]
    NonPositiveField(f64),
    #[error("non-finite model parameter")]
    NonFinite,
    #[error("eigensolver failed to converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("unknown gate generator kind {0}; expected 1..=6")]
    UnknownGateKind(usize),
    #[error("site or bond index {index} out of range for {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },
    #[error("invalid block: start {start}, length {length} on {n_sites} sites")]
    InvalidBlock { start: usize, length: usize, n_sites: usize },
    #[error("state dimension {len} is not 2^{n_sites}")]
    DimensionMismatch { len: usize, n_sites: usize },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("Renyi index must be non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("purity {purity:e} is below the physical floor for {n_sites} sites")]
    PurityUnderflow { purity: f64, n_sites: usize },
    #[error("concurrence needs two distinct sites, got {0} twice")]
    SameSite(usize),
    #[error("invalid cooling configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("{remaining} eigenvalues remain after dropping; at least 3 are needed")]
    TooFewEigenvalues { remaining: usize },
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("density argument must be non-negative, got {0}")]
    NegativeRatio(f64),
    #[error("exponential fit needs at least two points")]
    TooFewPoints,
    #[error("exponential fit needs positive ordinates, got {0}")]
    NonPositiveOrdinate(f64),
    #[error("trajectory {index} failed: {cause}")]
    Trajectory { index: usize, cause: alloc::boxed::Box<Error> },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
