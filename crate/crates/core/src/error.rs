use alloc::string::String;

/// Errors produced by the core algorithms.
///
/// Variants are grouped by the kind of failure so the CLI can map them onto
/// its exit codes: `Data*`-style problems come from inputs, `Numeric` from
/// degenerate computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("vocabulary is empty after filtering")]
    EmptyVocabulary,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("document {id} is dated before the week origin")]
    BeforeOrigin { id: String },
    #[error("fingerprint mismatch: model expects {expected}, got {got}")]
    FingerprintMismatch { expected: String, got: String },
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by degenerate numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_) | Error::NonFinite(_))
    }
}
