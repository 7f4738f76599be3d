use thiserror::Error;

/// Errors produced by the simulation and spectral-analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Lattice definition violates its own constraints.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A caller-supplied argument is outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The dense eigensolver failed to converge.
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    /// Operands of incompatible dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Spectral width is undefined for a single-level system.
    #[error("spectral width undefined for dimension {dim}")]
    SpectralWidthUndefined { dim: usize },

    /// The spectral decomposition carries a quality flag and must not be
    /// consumed by the mode expansion; fall back to direct iteration.
    #[error("decomposition flagged ({0}); fall back to direct iteration")]
    FlaggedDecomposition(String),

    /// The fixed point of the measurement map is not unique.
    #[error("unit eigenspace is {dim}-fold degenerate; stationary state not unique")]
    DegenerateUnitEigenspace { dim: usize },

    /// Too few chain sites crossed the occupation threshold to fit a front.
    #[error("front not detected: only {crossed} sites in the fit window crossed the threshold")]
    FrontNotDetected { crossed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
