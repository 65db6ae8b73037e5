use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum QchaosError {
    /// A precondition on operation arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or vector dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// A dense-solver dimension guard was exceeded.
    #[error("dimension guard exceeded: {0}")]
    Guard(String),

    /// Generic numerical failure (non-finite values, failed convergence).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// An ODE or master-equation integration violated its invariants.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A trajectory left the finite phase-space region.
    #[error("trajectory escaped to non-finite values at t = {t}")]
    TrajectoryEscape { t: f64 },

    /// The Liouvillian null space is degenerate; candidate eigenvalue moduli attached.
    #[error("degenerate steady state: {0} null-space candidates within tolerance")]
    SteadyStateMultiplicity(usize),

    /// Too few eigenvalues or samples for the requested statistic.
    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),

    #[error(transparent)]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, QchaosError>;

impl QchaosError {
    pub fn domain(msg: impl Into<String>) -> Self {
        QchaosError::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        QchaosError::Numeric(msg.into())
    }
}
