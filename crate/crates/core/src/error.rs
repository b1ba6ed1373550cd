use thiserror::Error;

/// Errors raised anywhere in the compiler pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("structural violation in basis element {index}: {reason}")]
    StructuralViolation { index: usize, reason: String },

    #[error("pair map inconsistent: {0}")]
    PairMap(String),

    #[error("expected {expected} angles, got {got}")]
    AngleCount { expected: usize, got: usize },

    #[error("invalid symbol {0:?} in I/Z string")]
    InvalidSymbol(char),

    #[error("circuit still contains multiplexed-rotation macros; lower it first")]
    MacroPresent,

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("missing segment metadata: {0}")]
    MissingMetadata(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
