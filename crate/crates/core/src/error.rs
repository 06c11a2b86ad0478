use std::io;

use crate::VertexId;

/// Errors surfaced by graph construction, traversal entry points and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph parameters: {0}")]
    InvalidParams(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("vertex {vertex} out of range for graph with {num_vertices} vertices")]
    VertexOutOfRange { vertex: u64, num_vertices: usize },

    #[error("malformed edge-list file: {0}")]
    BadFormat(String),

    #[error("only {available} eligible source vertices, {requested} requested")]
    InsufficientSources { requested: usize, available: usize },

    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),

    #[error("statistic undefined on empty input")]
    EmptyInput,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_vertex(v: VertexId, n: usize) -> Result<()> {
    if (v as usize) < n {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange { vertex: v as u64, num_vertices: n })
    }
}
