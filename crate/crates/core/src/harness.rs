//! Benchmark driver: source sampling, timed runs, tree validation and CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::bfs_scalar::{bfs_reference, UNREACHED};
use crate::bfs_vector::VecConfig;
use crate::csr::CsrGraph;
use crate::error::{check_vertex, Error, Result};
use crate::frontier::{BfsTree, NIL};
use crate::generator::{generate, GraphParams};
use crate::hybrid::{traverse, Direction, HeuristicParams, LayerTraceRow, Steering};
use crate::stats::{self, Summary};
use crate::{Real, TepsSummary, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    ScalarTopDown,
    ScalarBottomUp,
    #[default]
    ScalarHybrid,
    SimdHybrid,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::ScalarTopDown, Mode::ScalarBottomUp, Mode::ScalarHybrid, Mode::SimdHybrid];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ScalarTopDown => "scalar-td",
            Mode::ScalarBottomUp => "scalar-bu",
            Mode::ScalarHybrid => "scalar-hybrid",
            Mode::SimdHybrid => "simd-hybrid",
        }
    }

    pub fn steering(self, heuristic: HeuristicParams) -> Steering {
        match self {
            Mode::ScalarTopDown => Steering::Fixed(Direction::TopDown),
            Mode::ScalarBottomUp => Steering::Fixed(Direction::BottomUp),
            Mode::ScalarHybrid | Mode::SimdHybrid => Steering::Heuristic(heuristic),
        }
    }

    pub fn uses_simd(self) -> bool {
        self == Mode::SimdHybrid
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown mode {s:?}")))
    }
}

/// Runs one traversal of `g` from `source` in the given mode.
pub fn run_mode(
    g: &CsrGraph,
    source: VertexId,
    mode: Mode,
    heuristic: &HeuristicParams,
    cfg: &VecConfig,
) -> Result<(BfsTree, Vec<LayerTraceRow>)> {
    traverse(g, source, mode.steering(*heuristic), cfg, mode.uses_simd())
}

/// `count` distinct vertices drawn with a seeded generator. Unless
/// `allow_isolated` is set only vertices with at least one neighbour qualify.
pub fn sample_sources(g: &CsrGraph, count: usize, seed: u64, allow_isolated: bool) -> Result<Vec<VertexId>> {
    let n = g.num_vertices();
    let eligible: Vec<VertexId> =
        (0..n as VertexId).filter(|&v| allow_isolated || !g.neighbors(v).is_empty()).collect();
    if eligible.len() < count {
        return Err(Error::InsufficientSources { requested: count, available: eligible.len() });
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    Ok(sample(&mut rng, eligible.len(), count).into_iter().map(|i| eligible[i]).collect())
}

/// A broken tree property, numbered as in the Graph500 validation rules:
/// 1 root, 2 parent edges, 3 level chain, 4 edge level span, 5 reachability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: u8,
    pub witness: VertexId,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} violated at vertex {}: {}", self.rule, self.witness, self.detail)
    }
}

impl std::error::Error for Violation {}

fn violation(rule: u8, witness: VertexId, detail: String) -> Violation {
    Violation { rule, witness, detail }
}

pub fn validate_tree(g: &CsrGraph, source: VertexId, tree: &BfsTree) -> Result<(), Violation> {
    let n = g.num_vertices();
    if check_vertex(source, n).is_err() || tree.len() != n {
        return Err(violation(1, source, format!("tree of {} slots for a graph of {n} vertices", tree.len())));
    }
    let parents = tree.parents();
    if parents[source as usize] != source {
        return Err(violation(1, source, format!("source parent is {}", parents[source as usize])));
    }

    for (v, &p) in parents.iter().enumerate() {
        let v = v as VertexId;
        if p != NIL && v != source && ((p as usize) >= n || !g.has_arc(p, v)) {
            return Err(violation(2, v, format!("parent {p} is not a neighbour")));
        }
    }

    let (_, reference) = bfs_reference(g, source).expect("source checked above");
    for (v, (&p, &level)) in parents.iter().zip(&reference).enumerate() {
        if (p != NIL) != (level != UNREACHED) {
            let what = if p == NIL { "reachable but not visited" } else { "visited but unreachable" };
            return Err(violation(5, v as VertexId, what.into()));
        }
    }

    let levels = tree.depths().map_err(|w| violation(3, w, "parent chain does not reach the source".into()))?;

    for u in 0..n as VertexId {
        let lu = levels[u as usize];
        if lu == UNREACHED {
            continue;
        }
        for &w in g.neighbors(u) {
            let lw = levels[w as usize];
            if lw != UNREACHED && lu.abs_diff(lw) > 1 {
                return Err(violation(4, u, format!("edge ({u},{w}) spans levels {lu} and {lw}")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub source: VertexId,
    pub seconds: Real,
    pub teps: Real,
    pub valid: bool,
    pub violation: Option<Violation>,
    pub trace: Vec<LayerTraceRow>,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub params: GraphParams,
    pub mode: Mode,
    pub heuristic: HeuristicParams,
    pub vector: VecConfig,
    pub runs: usize,
    /// Worker threads for generation and the kernels; 0 uses rayon's default.
    pub threads: usize,
    pub allow_isolated_sources: bool,
    /// Whether each tree is checked with [`validate_tree`].
    pub validate: bool,
}

impl BenchConfig {
    pub fn new(params: GraphParams, mode: Mode) -> BenchConfig {
        BenchConfig {
            params,
            mode,
            heuristic: HeuristicParams::default(),
            vector: VecConfig::default(),
            runs: 64,
            threads: 0,
            allow_isolated_sources: false,
            validate: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub params: GraphParams,
    pub mode: Mode,
    /// TEPS numerator: undirected input edges of the graph.
    pub edges: u64,
    pub runs: Vec<RunResult>,
    /// Over the runs with positive TEPS; `None` when there are none.
    pub teps: Option<TepsSummary>,
    pub zero_teps_runs: usize,
    pub seconds: Summary<Real>,
}

impl BenchmarkReport {
    pub fn all_valid(&self) -> bool {
        self.runs.iter().all(|r| r.valid)
    }

    pub fn harmonic_mean_teps(&self) -> Option<Real> {
        self.teps.map(|s| s.harmonic_mean)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_report_csv(w, &self.runs)
    }

    /// Traces of every run, concatenated in run order.
    pub fn write_trace_csv<W: Write>(&self, w: W) -> Result<()> {
        write_trace_csv(w, self.runs.iter().flat_map(|r| &r.trace))
    }
}

/// Generates and builds the graph once, then times `runs` traversals.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchmarkReport> {
    cfg.params.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    pool.install(|| {
        let g = CsrGraph::build(&generate(cfg.params)?)?;
        run_on_graph(&g, cfg)
    })
}

/// The timed part of [`run_benchmark`] on an already built graph, in the
/// current rayon pool.
pub fn run_on_graph(g: &CsrGraph, cfg: &BenchConfig) -> Result<BenchmarkReport> {
    cfg.heuristic.validate()?;
    cfg.vector.validate()?;
    let sources = sample_sources(g, cfg.runs, cfg.params.seed, cfg.allow_isolated_sources)?;
    let edges = g.in_edges_total();

    let mut runs = Vec::with_capacity(sources.len());
    for &source in &sources {
        let start = Instant::now();
        let (tree, trace) = run_mode(g, source, cfg.mode, &cfg.heuristic, &cfg.vector)?;
        let seconds = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        let violation = if cfg.validate { validate_tree(g, source, &tree).err() } else { None };
        let traversed = if tree.num_visited() > 1 { edges } else { 0 };
        runs.push(RunResult {
            source,
            seconds,
            teps: stats::teps(traversed, seconds)?,
            valid: violation.is_none(),
            violation,
            trace,
        });
    }

    let positive: Vec<Real> = runs.iter().map(|r| r.teps).filter(|&t| t > 0.0).collect();
    let times: Vec<Real> = runs.iter().map(|r| r.seconds).collect();
    Ok(BenchmarkReport {
        params: cfg.params,
        mode: cfg.mode,
        edges,
        zero_teps_runs: runs.len() - positive.len(),
        teps: if positive.is_empty() { None } else { Some(Summary::of(&positive)?) },
        seconds: Summary::of(&times)?,
        runs,
    })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

#[derive(Serialize)]
struct ReportRecord {
    source: VertexId,
    seconds: Real,
    teps: Real,
    valid: bool,
}

#[derive(Serialize)]
struct TraceRecord {
    layer: u32,
    direction: String,
    kernel: String,
    v_f: u64,
    e_f: u64,
    e_u: u64,
    f: u64,
    g: u64,
    seconds: f64,
    fallbacks: u64,
    gathers: u64,
}

pub fn write_report_csv<W: Write>(w: W, runs: &[RunResult]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["source", "seconds", "teps", "valid"])?;
    for r in runs {
        out.serialize(ReportRecord { source: r.source, seconds: r.seconds, teps: r.teps, valid: r.valid })?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace_csv<'a, W: Write>(w: W, rows: impl IntoIterator<Item = &'a LayerTraceRow>) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "layer",
        "direction",
        "kernel",
        "v_f",
        "e_f",
        "e_u",
        "f",
        "g",
        "seconds",
        "fallbacks",
        "gathers",
    ])?;
    for r in rows {
        out.serialize(TraceRecord {
            layer: r.layer,
            direction: r.direction.to_string(),
            kernel: r.kernel.to_string(),
            v_f: r.v_f,
            e_f: r.e_f,
            e_u: r.e_u,
            f: r.f_value,
            g: r.g_value,
            seconds: r.elapsed,
            fallbacks: r.fallback_count,
            gathers: r.gather_count,
        })?;
    }
    out.flush()?;
    Ok(())
}
