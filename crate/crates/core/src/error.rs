use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("header mismatch in {file}: missing required columns {missing:?}")]
    HeaderMismatch { file: String, missing: Vec<String> },

    #[error("ragged row at line {line}: expected {expected} cells, found {found}")]
    RaggedRow { line: u64, expected: usize, found: usize },

    #[error("type coercion failed at row {row}, column '{column}': {value:?}")]
    TypeCoercion { row: usize, column: String, value: String },

    #[error("join produced no matched rows")]
    EmptyJoin,

    #[error("row {row}: production {production} with zero area")]
    ZeroArea { row: usize, production: f64 },

    #[error("missing production fraction {fraction:.4} is not below the {threshold} limit")]
    TooMuchMissing { fraction: f64, threshold: f64 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("zero variance{}", context_suffix(.0))]
    ZeroVariance(Option<String>),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("column '{column}' has missing values at row {row}")]
    MissingValue { column: String, row: usize },

    #[error("unknown season '{0}'")]
    UnknownSeason(String),

    #[error("dataset is not temporally sorted (row {0})")]
    NotSorted(usize),

    #[error("column '{0}' is not numeric")]
    NonNumericColumn(String),

    #[error("training set is empty")]
    EmptyTraining,

    #[error("unknown label '{0}'")]
    UnknownLabel(String),

    #[error("node has no samples")]
    EmptyNode,

    #[error("input is empty")]
    EmptyInput,

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("arity mismatch: expected {expected} features, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("only one class present")]
    SingleClass,

    #[error("unsupported model format version {found} (this build reads up to {supported})")]
    VersionMismatch { found: u32, supported: u32 },

    #[error("corrupt model file: {0}")]
    CorruptFile(String),

    #[error("bad fold count k={k} for {n} rows")]
    BadK { k: usize, n: usize },

    #[error("split leaves the {0} side empty")]
    EmptySide(&'static str),

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("confidence level {0} is outside (0, 1)")]
    BadLevel(f64),

    #[error("protocol misuse: {0}")]
    ProtocolMisuse(String),

    #[error("bad synthetic spec: {0}")]
    BadSpec(String),

    #[error("incomplete input, missing fields: {0:?}")]
    IncompleteInput(Vec<String>),

    #[error("invalid config at '{key}': {message}")]
    ConfigInvalid { key: String, message: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn context_suffix(context: &Option<String>) -> String {
    match context {
        Some(c) => format!(" in {c}"),
        None => String::new(),
    }
}

impl Error {
    /// Stable variant name, used for machine-parsable CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "MissingFile",
            Error::HeaderMismatch { .. } => "HeaderMismatch",
            Error::RaggedRow { .. } => "RaggedRow",
            Error::TypeCoercion { .. } => "TypeCoercion",
            Error::EmptyJoin => "EmptyJoin",
            Error::ZeroArea { .. } => "ZeroArea",
            Error::TooMuchMissing { .. } => "TooMuchMissing",
            Error::EmptyDataset => "EmptyDataset",
            Error::TooFewValues { .. } => "TooFewValues",
            Error::ZeroVariance(_) => "ZeroVariance",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::RankDeficient => "RankDeficient",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::UnknownColumn(_) => "UnknownColumn",
            Error::MissingValue { .. } => "MissingValue",
            Error::UnknownSeason(_) => "UnknownSeason",
            Error::NotSorted(_) => "NotSorted",
            Error::NonNumericColumn(_) => "NonNumericColumn",
            Error::EmptyTraining => "EmptyTraining",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::EmptyNode => "EmptyNode",
            Error::EmptyInput => "EmptyInput",
            Error::BadParams(_) => "BadParams",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::SingleClass => "SingleClass",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::CorruptFile(_) => "CorruptFile",
            Error::BadK { .. } => "BadK",
            Error::EmptySide(_) => "EmptySide",
            Error::EmptyMatrix => "EmptyMatrix",
            Error::BadLevel(_) => "BadLevel",
            Error::ProtocolMisuse(_) => "ProtocolMisuse",
            Error::BadSpec(_) => "BadSpec",
            Error::IncompleteInput(_) => "IncompleteInput",
            Error::ConfigInvalid { .. } => "ConfigInvalid",
            Error::Csv(_) => "Csv",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
