use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown quantifier `{0}`")]
    UnknownQuantifier(String),

    #[error("arity mismatch for `{symbol}`: expected {expected}, found {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),

    #[error("construct not allowed in {dialect}: {construct}")]
    Dialect {
        dialect: &'static str,
        construct: String,
    },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("{what} exceeds cap: {count} > {cap}")]
    CapExceeded { what: String, count: u128, cap: u128 },

    #[error("quantifier `{name}` is not monotone on universes of size {size}")]
    NotMonotone { name: String, size: usize },

    #[error("quantifier `{name}` is undefined on universes of size {size}")]
    UndefinedSize { name: String, size: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed input at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: impl Into<String>, count: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            count,
            cap,
        }
    }

    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
