use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("manifest {path}, line {line}: {msg}")]
    Manifest {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("duplicate document id {id:?} in manifest")]
    DuplicateDocumentId { id: String },

    #[error("document {id:?}: year {year} outside the slicing scheme")]
    YearOutOfRange { id: String, year: i32 },

    #[error("invalid slicing scheme: {0}")]
    InvalidScheme(String),

    #[error("slice {slice:?}: vocabulary is empty after min-count filtering")]
    EmptySlice { slice: String },

    #[error("invalid training config: {0}")]
    InvalidTrainingConfig(String),

    #[error("word {word:?} not in vocabulary")]
    OutOfVocabulary { word: String },

    #[error("word {word:?} missing from slice {slice:?}")]
    MissingInSlice { word: String, slice: String },

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("only {found} words shared between slice and base vocabularies; need at least {need}")]
    TooFewAnchors { found: usize, need: usize },

    #[error("anchor matrix is rank deficient: effective rank {rank}, need {need}")]
    RankDeficient { rank: usize, need: usize },

    #[error("triple ({target:?}, {c1:?}, {c2:?}) has repeated words")]
    DegenerateTriple {
        target: String,
        c1: String,
        c2: String,
    },

    #[error("trend fit needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("{0}")]
    EmptySample(String),

    #[error("least-squares line is undefined when all x values are equal")]
    ConstantAbscissa,

    #[error("principal component analysis: {0}")]
    PcaInput(String),

    #[error("triple sets differ between the two fit collections")]
    MismatchedTriples,

    #[error("configuration: {0}")]
    Config(String),

    #[error("bad file format in {path}: {msg}")]
    FileFormat { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an I/O failure with the path it struck.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach the name of the pipeline stage that produced this error.
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for errors that indicate bad user input rather than a failure
    /// while processing (drives the CLI exit code split).
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_validation(),
            _ => matches!(
                self,
                Error::Manifest { .. }
                    | Error::DuplicateDocumentId { .. }
                    | Error::InvalidScheme(_)
                    | Error::InvalidTrainingConfig(_)
                    | Error::DegenerateTriple { .. }
                    | Error::Config(_)
            ),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
