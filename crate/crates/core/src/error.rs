use thiserror::Error;

/// Everything that can go wrong in the library and the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degrees of freedom mismatch: {left} vs {right}")]
    DofMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for {dof} degrees of freedom")]
    IndexOutOfRange { index: usize, dof: usize },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("hbar -> 0 limit undefined: term with hbar^{0}")]
    LimitUndefined(i32),

    #[error("parse error at line {line}, column {column}: {message}; expected one of: {}", expected.join(", "))]
    Parse { line: usize, column: usize, message: String, expected: Vec<String> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::InternalConsistency(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
