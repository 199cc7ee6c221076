use std::path::PathBuf;

use thiserror::Error;

use crate::instance::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("nodes {0} and {1} are not connectable (same side of the bipartition)")]
    NonConnectable(NodeId, NodeId),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("node {node} has degree {degree}, expected 2")]
    Degree { node: NodeId, degree: usize },

    /// Edge set decomposes into several cycles; sizes are given in pairs.
    #[error("edge set contains subtours with pair counts {0:?}")]
    Subtour(Vec<usize>),

    #[error("no feasible solution: {0}")]
    Infeasible(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate reduction: {0}")]
    Degenerate(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
