//! Direction-optimizing breadth-first search with a sixteen-lane vectorized
//! bottom-up kernel.
//!
//! The crate covers the whole benchmark pipeline: Kronecker edge generation
//! ([`generator`]), CSR construction ([`csr`]), bitmap frontiers
//! ([`frontier`]), scalar and vector layer kernels ([`bfs_scalar`],
//! [`bfs_vector`] over [`lanes`]), the per-layer direction controller
//! ([`hybrid`]) and a Graph500-style harness with tree validation
//! ([`harness`]). TEPS statistics in [`stats`] are generic over the float type.

pub mod bfs_scalar;
pub mod bfs_vector;
pub mod csr;
pub mod error;
pub mod frontier;
pub mod generator;
pub mod harness;
pub mod hybrid;
pub mod lanes;
pub mod stats;

/// Vertex identifier. Thirty-two bits, one vector lane each.
pub type VertexId = u32;

/// Durations and TEPS values reported by the harness.
pub type Real = f64;

pub type TepsSummary = stats::Summary<Real>;
pub type TepsSummary32 = stats::Summary<f32>;

pub use bfs_scalar::{bfs_reference, UNREACHED};
pub use bfs_vector::{VecConfig, VecStats};
pub use csr::CsrGraph;
pub use error::{Error, Result};
pub use frontier::{BfsTree, Bitmap, Half, LayerCounters, NIL};
pub use generator::{EdgeList, GraphParams};
pub use harness::{BenchmarkReport, Mode, RunResult};
pub use hybrid::{hybrid_bfs, CounterMode, Direction, HeuristicParams, LayerTraceRow};
pub use lanes::{Backend, LaneMask, LaneVector};
