use thiserror::Error;

/// Errors raised anywhere in the compiler or the interpreters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported feature at {line}:{col}: {feature}")]
    Unsupported { line: usize, col: usize, feature: String },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("ambiguous column `{0}`")]
    AmbiguousColumn(String),
    #[error("duplicate output name `{0}`")]
    DuplicateOutput(String),
    #[error("ill-formed query: {0}")]
    IllFormed(String),
    #[error("reserved label `{0}`")]
    ReservedLabel(String),
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("read of uninitialized variable `{0}`")]
    Uninitialized(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("invalid program: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors caused by the user's input rather than the compiler.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Unsupported { .. }
                | Error::UnknownTable(_)
                | Error::UnknownColumn(_)
                | Error::AmbiguousColumn(_)
                | Error::DuplicateOutput(_)
                | Error::IllFormed(_)
                | Error::ReservedLabel(_)
                | Error::Instance(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn type_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Type(msg.into()))
}
