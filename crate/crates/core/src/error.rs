use thiserror::Error;

use crate::embedded::{Dart, DiCycle, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid rotation system at dart {dart}: {msg}")]
    InvalidDart { dart: Dart, msg: String },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("odd Euler characteristic defect in component containing {0}")]
    EulerDefect(VertexId),

    #[error("not a directed cycle of the map: {0}")]
    NotACycle(String),

    #[error("dicycle {0} has no finite-cost vertex and cannot be hit")]
    Unhittable(DiCycle),

    #[error("cutting-plane LP exceeded {rounds} rounds with a pool of {pool} cycles")]
    IterationCap { rounds: usize, pool: usize },

    #[error("instance has {size} vertices, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("{0} exceeds the exact cycle-enumeration limit")]
    TooManyCycles(usize),

    #[error("integer scale overflow while weighing LP values")]
    ScaleOverflow,

    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("topology assertion failed: {0}")]
    Topology(String),

    #[error("recursion made no progress: {0}")]
    NoProgress(String),

    #[error("invalid instance parameters: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
