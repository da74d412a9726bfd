use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an argument contract (bad index, rank mismatch,
    /// unknown selector, non-positive tolerance, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value that must be invertible or inside a function domain is not
    /// (singular metric, division by a jet with zero constant term, sqrt of
    /// a non-positive constant term).
    #[error("singular value: {0}")]
    Singular(String),

    /// The requested computation needs derivatives beyond the configured
    /// jet order.
    #[error("jet order too low: {0}")]
    Capability(String),

    /// A point lies outside the declared chart domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A field evaluation produced a non-finite component.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A suite precondition failed hard (as opposed to checks that report
    /// themselves not-applicable).
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// Neither branch of a proved dichotomy held numerically; this signals
    /// an implementation bug or an invalid model, never a property of a
    /// valid input.
    #[error("dichotomy violated: {0}")]
    TheoremViolation(String),

    /// A gated candidate model failed its own admission checks.
    #[error("model rejected: {0}")]
    ModelRejected(String),

    /// Random-model generation could not satisfy its invariants.
    #[error("generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
