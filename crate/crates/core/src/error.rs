use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed corpus: {0}")]
    MalformedCorpus(String),

    #[error("no units in corpus")]
    NoUnits,

    #[error("duplicate unit id `{0}`")]
    DuplicateUnit(String),

    #[error("dangling alignment reference in {paragraph}: {detail}")]
    DanglingAlignment { paragraph: String, detail: String },

    #[error("unknown unit id `{0}`")]
    UnknownUnit(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unit `{unit_id}` has {found} word rows but the corpus has {expected} words")]
    WordCountMismatch {
        unit_id: String,
        expected: usize,
        found: usize,
    },

    #[error("missing `{measure}` values for unit `{unit_id}` at word indices {indices:?}")]
    MissingWordValues {
        unit_id: String,
        measure: String,
        indices: Vec<usize>,
    },

    #[error("duplicate score for unit `{0}`")]
    DuplicateScore(String),

    #[error("invalid trial {participant}/{unit_id}: {message}")]
    InvalidTrial {
        participant: String,
        unit_id: String,
        message: String,
    },

    #[error("no trials left after filtering for {0}")]
    NoTrials(String),

    #[error("`{0}` requires at least one word and one sentence")]
    EmptyUnit(String),

    #[error("word has no letters: `{0}`")]
    NoLetters(String),

    #[error("easy-word list is empty")]
    EmptyWordList,

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid statistical input: {0}")]
    InvalidInput(String),

    #[error("{0}")]
    Degenerate(String),

    #[error("level missing: {0}")]
    MissingLevel(String),

    #[error("unknown method `{id}`; known methods: {known}")]
    UnknownMethod { id: String, known: String },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("completeness audit failed: {0}")]
    Audit(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl AsRef<std::path::Path>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by configuration rather than input data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownMethod { .. } | Error::UnknownMeasure(_)
        )
    }
}
