use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong while reading a proof script or statement.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("proof of `{0}` is not closed before end of input")]
    UnterminatedProof(String),
    #[error("lemma sentence has no name")]
    MalformedStatement,
    #[error("duplicate lemma name `{0}`")]
    DuplicateLemmaName(String),
    #[error("empty proof step")]
    EmptyStep,
    #[error("unbalanced delimiters")]
    UnbalancedDelimiters,
    #[error("empty statement")]
    EmptyStatement,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("lemma `{0}` has no proof steps")]
    NoProofBody(String),
    #[error("invalid trace record: {0}")]
    InvalidTrace(String),
}

/// A parse failure located at a 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, kind: ParseErrorKind) -> Self {
        Self { line, kind }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.kind)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{}: {}", path.display(), source.line, source.kind)]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("lemma `{0}` has no proof steps")]
    NoProofBody(String),
    #[error("lemma `{0}` is defined more than once")]
    DuplicateLemmaName(String),
    #[error("asked for {clusters} clusters but only {points} points were given")]
    TooFewPoints { clusters: usize, points: usize },
    #[error("at least 2 lemmas are needed to cluster, found {0}")]
    TooFewLemmas(usize),
    #[error("lemma `{0}` is not in the corpus")]
    UnknownLemma(String),
    #[error("unsupported format version `{found}` (expected `{expected}`)")]
    VersionMismatch { found: String, expected: String },
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Syntax(_) | Error::NoProofBody(_) => 2,
            Error::DuplicateLemmaName(_) => 2,
            Error::TooFewLemmas(_) | Error::TooFewPoints { .. } | Error::EmptyCorpus => 4,
            Error::InvalidConfig(_) => 1,
            _ => 3,
        }
    }
}
