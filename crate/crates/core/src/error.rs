use thiserror::Error;

use crate::kg::EntityType;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing required column `{0}` in header")]
    MissingColumn(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown {etype} `{key}`")]
    UnknownEntity { etype: EntityType, key: String },

    #[error("graph has no mobility labels attached")]
    LabelsNotAttached,

    #[error("malformed graph file at line {line}: {reason}")]
    GraphFormat { line: usize, reason: String },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
