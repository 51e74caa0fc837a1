use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map onto the CLI exit codes: [`Error::ResourceGuard`] is a
/// guard violation, everything else is an input, parameter, or hypothesis
/// problem.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),

    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The input lies outside the domain on which the operation is defined,
    /// e.g. asking for intersection points of a family that is not intersecting.
    #[error("domain error: {0}")]
    Domain(String),

    /// A theorem's hypothesis does not hold for the supplied parameters.
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    /// A reduction step found its input or its own output in a state that
    /// the underlying argument rules out.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Param(msg.into()))
}
