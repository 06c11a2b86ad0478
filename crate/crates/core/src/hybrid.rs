//! Per-layer direction controller.
//!
//! Before each layer the controller compares the frontier size against two
//! thresholds: `f = e_u / alpha` switches to bottom-up when exceeded, and
//! `g = n / beta` switches back to top-down when undercut. When neither fires
//! the previous direction is kept.

use std::fmt;
use std::time::Instant;

use crate::bfs_scalar::{bottom_up_layer, top_down_layer};
use crate::bfs_vector::{bottom_up_multiple_set, top_down_chunked, VecConfig, VecStats};
use crate::csr::CsrGraph;
use crate::error::{check_vertex, Error, Result};
use crate::frontier::{BfsTree, Bitmap, LayerCounters};
use crate::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    TopDown,
    BottomUp,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::TopDown => "top-down",
            Direction::BottomUp => "bottom-up",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Scalar,
    Simd,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Scalar => "scalar",
            Kernel::Simd => "simd",
        })
    }
}

/// What `e_u` counts when it feeds the `f` threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum CounterMode {
    /// Unvisited vertices.
    #[default]
    Vertex,
    /// Arcs attached to unvisited vertices.
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicParams {
    pub alpha: u64,
    pub beta: u64,
    pub counter_mode: CounterMode,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams { alpha: 1024, beta: 64, counter_mode: CounterMode::Vertex }
    }
}

impl HeuristicParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0 || self.beta == 0 {
            return Err(Error::InvalidParams("alpha and beta must be at least 1".into()));
        }
        Ok(())
    }
}

/// Bottom-up trigger: `floor(e_u / alpha)`.
pub fn f_threshold(p: &HeuristicParams, _n: u64, c: &LayerCounters) -> u64 {
    c.e_u / p.alpha
}

/// Top-down return: `floor(n / beta)`.
pub fn g_threshold(p: &HeuristicParams, n: u64, _c: &LayerCounters) -> u64 {
    n / p.beta
}

pub fn decide(p: &HeuristicParams, current: Direction, frontier_size: u64, n: u64, c: &LayerCounters) -> Direction {
    if frontier_size > f_threshold(p, n, c) {
        Direction::BottomUp
    } else if frontier_size < g_threshold(p, n, c) {
        Direction::TopDown
    } else {
        current
    }
}

/// How the direction of each layer is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Steering {
    Heuristic(HeuristicParams),
    Fixed(Direction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTraceRow {
    pub layer: u32,
    pub direction: Direction,
    pub kernel: Kernel,
    /// Counters entering the layer; `e_u` follows the configured counter mode.
    pub v_f: u64,
    pub e_f: u64,
    pub e_u: u64,
    pub f_value: u64,
    pub g_value: u64,
    pub elapsed: f64,
    pub fallback_count: u64,
    pub gather_count: u64,
}

/// Direction-optimizing BFS from `source`.
///
/// With `use_simd` the bottom-up layers run [`bottom_up_multiple_set`] and the
/// top-down layers [`top_down_chunked`]; otherwise the scalar kernels.
pub fn hybrid_bfs(
    g: &CsrGraph,
    source: VertexId,
    p: &HeuristicParams,
    cfg: &VecConfig,
    use_simd: bool,
) -> Result<(BfsTree, Vec<LayerTraceRow>)> {
    traverse(g, source, Steering::Heuristic(*p), cfg, use_simd)
}

pub fn traverse(
    g: &CsrGraph,
    source: VertexId,
    steering: Steering,
    cfg: &VecConfig,
    use_simd: bool,
) -> Result<(BfsTree, Vec<LayerTraceRow>)> {
    let n = g.num_vertices();
    check_vertex(source, n)?;
    cfg.validate()?;
    let mode = match steering {
        Steering::Heuristic(p) => {
            p.validate()?;
            p.counter_mode
        }
        Steering::Fixed(_) => CounterMode::default(),
    };

    let tree = BfsTree::new(n, source)?;
    let mut frontier = Bitmap::new(n);
    let visited = Bitmap::new(n);
    let mut next = Bitmap::new(n);
    frontier.insert(source);
    visited.insert(source);

    let source_degree = g.degree_unchecked(source);
    let mut counters = LayerCounters { e_f: source_degree, v_f: 1, e_u: g.num_arcs() - source_degree };
    let mut unvisited = n as u64 - 1;
    let mut direction = Direction::TopDown;
    let kernel = if use_simd { Kernel::Simd } else { Kernel::Scalar };
    let mut trace = Vec::new();

    while counters.v_f != 0 {
        let view = LayerCounters {
            e_u: match mode {
                CounterMode::Vertex => unvisited,
                CounterMode::Edge => counters.e_u,
            },
            ..counters
        };
        let (f_value, g_value, chosen) = match steering {
            Steering::Heuristic(p) => (
                f_threshold(&p, n as u64, &view),
                g_threshold(&p, n as u64, &view),
                decide(&p, direction, counters.v_f, n as u64, &view),
            ),
            Steering::Fixed(d) => (0, 0, d),
        };
        direction = chosen;

        let start = Instant::now();
        let (after, stats) = match (direction, use_simd) {
            (Direction::TopDown, false) => {
                (top_down_layer(g, &frontier, &visited, &next, &tree, counters), VecStats::default())
            }
            (Direction::BottomUp, false) => {
                (bottom_up_layer(g, &frontier, &visited, &next, &tree, counters), VecStats::default())
            }
            (Direction::TopDown, true) => top_down_chunked(g, &frontier, &visited, &next, &tree, counters, cfg.backend),
            (Direction::BottomUp, true) => bottom_up_multiple_set(g, &frontier, &visited, &next, &tree, counters, cfg),
        };
        let elapsed = start.elapsed().as_secs_f64();

        trace.push(LayerTraceRow {
            layer: trace.len() as u32 + 1,
            direction,
            kernel,
            v_f: view.v_f,
            e_f: view.e_f,
            e_u: view.e_u,
            f_value,
            g_value,
            elapsed,
            fallback_count: stats.fallbacks,
            gather_count: stats.gathers,
        });

        unvisited -= after.v_f;
        counters = after;
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    Ok((tree, trace))
}
