use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset has {0} object(s); at least 2 are needed for normalization statistics")]
    DatasetTooSmall(usize),

    #[error("cannot build an index over an empty dataset")]
    EmptyDataset,

    #[error("duplicate object id `{0}`")]
    DuplicateId(String),

    #[error("fdim is only defined for positive inputs (got {0}, {1})")]
    NonPositiveInput(f64, f64),

    #[error("entry {0} is not an internal node")]
    NotInternalNode(String),

    #[error("invalid tree layout: {0}")]
    InvalidLayout(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
