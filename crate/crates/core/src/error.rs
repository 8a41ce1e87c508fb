use std::path::PathBuf;

/// Errors produced anywhere in the retrieval engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("malformed line {line_no}: {reason}")]
    MalformedLine { line_no: usize, reason: String },
    #[error("duplicate passage id {0:?}")]
    DuplicateId(String),
    #[error("unknown passage id {0:?}")]
    UnknownPassageId(String),

    #[error("expected 10 tab-separated columns on line: {0:?}")]
    MalformedColumnCount(String),
    #[error("malformed token field: {0}")]
    MalformedToken(String),
    #[error("head links contain a cycle")]
    CyclicHeads,
    #[error("more than one token attaches to the root")]
    MultipleRoots,
    #[error("no token attaches to the root")]
    NoRoot,
    #[error("unbalanced parentheses at byte {0}")]
    UnbalancedParens(usize),
    #[error("empty node in bracketed tree")]
    EmptyNode,
    #[error("tree has no leaves")]
    EmptyTree,

    #[error("labels contain a single class")]
    SingleClassLabels,
    #[error("requested {k} features but only {available} exist")]
    KTooLarge { k: usize, available: usize },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("fact set is empty")]
    EmptyFactSet,
    #[error("fact source passage {0:?} is not in the corpus")]
    UnknownSourcePassage(String),
    #[error("entity {0:?} is not in the graph")]
    EntityNotInGraph(String),
    #[error("entity {0:?} has no occurrence edges")]
    ZeroOccurrence(String),
    #[error("personalized pagerank did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid thresholds: tau_low={tau_low}, tau_high={tau_high}")]
    InvalidThresholds { tau_low: f64, tau_high: f64 },
    #[error("no parse available for query {0:?}")]
    MissingParse(String),
    #[error("index not built: {0}")]
    IndexNotBuilt(&'static str),

    #[error("no query has gold passages")]
    EmptyDenominator,
    #[error("judge unavailable: {0}")]
    JudgeUnavailable(String),
    #[error("external process failed: {0}")]
    External(String),
    #[error("validation set is empty")]
    EmptyValidation,
    #[error("record set is empty")]
    EmptyRecords,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
