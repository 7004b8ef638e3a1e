use thiserror::Error;

/// Errors raised anywhere in the rating engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value violated a type invariant at construction time.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown player `{0}`")]
    UnknownPlayer(String),

    /// The observed outcome has zero probability under the configured model,
    /// e.g. a draw with a zero draw threshold.
    #[error("degenerate likelihood: {0}")]
    DegenerateLikelihood(String),

    #[error("model mismatch: {model} model cannot consume a {outcome} outcome")]
    ModelMismatch {
        model: &'static str,
        outcome: &'static str,
    },

    /// Time indices in a game log must be strictly increasing.
    #[error("log order error at record {position}: time index {found} does not follow {previous}")]
    LogOrder {
        position: usize,
        previous: u64,
        found: u64,
    },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// A malformed line in a game log or other text input.
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
