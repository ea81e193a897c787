use std::path::PathBuf;

use thiserror::Error;

use crate::graph_store::NodeId;

/// Errors produced anywhere in the engine pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("line {line}: duplicate record for url {url}")]
    DuplicateUrl { line: usize, url: String },

    #[error("snapshot contains no records")]
    EmptySnapshot,

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("empty query")]
    EmptyQuery,

    #[error("query has {0} distinct terms, at most 64 are supported")]
    QueryTooLong(usize),

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("tip selection table is empty")]
    EmptyTable,

    #[error("tip {0} does not exist")]
    UnknownTip(u32),

    #[error("tip {0} has already been expanded")]
    AlreadyExpanded(u32),

    #[error("tip {0} is at the depth cap")]
    DepthCapped(u32),

    #[error("no starting points given")]
    NoStartingPoints,

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("store {path}: {message}")]
    Store { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
