//! Approximation algorithms for directed feedback vertex set on digraphs
//! embedded on orientable surfaces.
//!
//! The pipeline: an LP relaxation solved by cutting planes, a primal-dual
//! pass over face-bounding dicycles, threshold rounding of heavy LP
//! vertices, and layered separators around a tight cycle, all driven by a
//! recursion that shrinks genus or size. An exact oracle and an instance
//! harness sit alongside for checking.

pub mod cost;
pub mod embedded;
pub mod error;
pub mod facial;
pub mod harness;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod separator;
pub mod solver;

pub use cost::Cost;
pub use embedded::{ArcId, Dart, DiCycle, EmbeddedDigraph, VertexId};
pub use error::{Error, Result};
