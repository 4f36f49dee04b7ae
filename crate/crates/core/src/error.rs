use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("word must be nonempty")]
    EmptyWord,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid rank bound {0}")]
    InvalidRank(i64),
    #[error("{what} has {size} elements, the supported maximum is {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("inconsistent constraint at call `{call}`: {detail}")]
    Inconsistent { call: String, detail: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("time limit exceeded")]
    Timeout,
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
