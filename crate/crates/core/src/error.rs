use std::path::PathBuf;

/// Errors raised by the tokenization toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed token stream at token {index}: {message}")]
    MalformedStream { index: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("duplicate token {token:?} on line {line}")]
    DuplicateToken { token: String, line: usize },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("segmentation does not match sentence: {0}")]
    SegmentationMismatch(String),

    #[error("invalid paradigm: {0}")]
    InvalidParadigm(String),

    #[error("corpus contains no words")]
    EmptyCorpus,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
