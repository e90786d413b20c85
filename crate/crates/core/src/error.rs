use thiserror::Error;

/// Errors raised by the algebra kernel and the procedures built on it.
///
/// Every variant belongs to one of the exit-code classes used by the CLI and
/// the C ABI (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("coefficient fields differ: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("characteristic {0} is not supported here (requires characteristic 0 or > 3)")]
    UnsupportedCharacteristic(u64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("Jacobian rank {0} exceeds 2")]
    RankTooLarge(usize),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("field too small: {0}")]
    FieldTooSmall(String),

    #[error("open case: {0}")]
    OpenCase(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error class.
    ///
    /// `1` i/o, `2` parse, `3` hypothesis violation, `4` theorem violation,
    /// `5` resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Parse { .. } => 2,
            Error::Dimension(_)
            | Error::FieldMismatch { .. }
            | Error::VariableOutOfRange { .. }
            | Error::UnsupportedCharacteristic(_)
            | Error::Hypothesis(_)
            | Error::RankTooLarge(_)
            | Error::NotNilpotent
            | Error::FieldTooSmall(_)
            | Error::OpenCase(_) => 3,
            Error::TheoremViolation(_) => 4,
            Error::ResourceCap(_) => 5,
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
