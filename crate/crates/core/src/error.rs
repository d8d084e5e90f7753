//! Error type shared by the offline modules.

use crate::ingest::Label;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label class {0} is absent from the dataset")]
    MissingClass(Label),

    #[error("invalid split spec: {0}")]
    InvalidSplitSpec(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("fitted vocabulary is empty (no term satisfies the document-frequency rules)")]
    EmptyVocabulary,

    #[error("training error: {0}")]
    Training(String),

    #[error("optimizer diverged: {0}")]
    Divergence(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("model load error: {0}")]
    ModelLoad(String),

    #[error("evaluation on empty input")]
    EmptyEval,

    #[error("grid search failed on every point; first error: {0}")]
    GridExhausted(String),
}
