use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hybrid_bfs::harness::{run_benchmark, BenchConfig};
use hybrid_bfs::{Backend, GraphParams, HeuristicParams, Mode, VecConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    #[value(name = "scalar-td")]
    ScalarTd,
    #[value(name = "scalar-bu")]
    ScalarBu,
    #[value(name = "scalar-hybrid")]
    ScalarHybrid,
    #[value(name = "simd-hybrid")]
    SimdHybrid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::ScalarTd => Mode::ScalarTopDown,
            ModeArg::ScalarBu => Mode::ScalarBottomUp,
            ModeArg::ScalarHybrid => Mode::ScalarHybrid,
            ModeArg::SimdHybrid => Mode::SimdHybrid,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Simd,
    Emulate,
}

/// Kronecker-graph BFS benchmark with timed runs, validation and TEPS statistics.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    #[arg(long, default_value_t = 16)]
    scale: u32,
    #[arg(long, default_value_t = 16)]
    edgefactor: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "simd-hybrid")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1024)]
    alpha: u64,
    #[arg(long, default_value_t = 64)]
    beta: u64,
    #[arg(long, default_value_t = hybrid_bfs::bfs_vector::DEFAULT_MAX_POS)]
    max_pos: u32,
    #[arg(long, value_enum, default_value = "simd")]
    backend: BackendArg,
    #[arg(long, default_value_t = 64)]
    runs: usize,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    allow_isolated_sources: bool,
    /// Per-run CSV: source,seconds,teps,valid.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-layer CSV of every run.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

fn run(args: Args) -> hybrid_bfs::Result<bool> {
    let mut cfg = BenchConfig::new(GraphParams::new(args.scale, args.edgefactor, args.seed), args.mode.into());
    cfg.heuristic = HeuristicParams { alpha: args.alpha, beta: args.beta, ..Default::default() };
    cfg.vector = VecConfig {
        max_pos: args.max_pos,
        backend: match args.backend {
            BackendArg::Simd => Backend::HardwareSimd,
            BackendArg::Emulate => Backend::ScalarEmulation,
        },
    };
    cfg.runs = args.runs;
    cfg.threads = args.threads;
    cfg.allow_isolated_sources = args.allow_isolated_sources;

    let report = run_benchmark(&cfg)?;
    if let Some(path) = &args.out {
        report.write_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &args.trace_out {
        report.write_trace_csv(BufWriter::new(File::create(path)?))?;
    }

    let invalid: Vec<_> = report.runs.iter().filter_map(|r| r.violation.as_ref().map(|v| (r.source, v))).collect();
    println!(
        "scale {} edgefactor {} mode {} backend {:?}",
        args.scale,
        args.edgefactor,
        report.mode,
        cfg.vector.backend.resolve()
    );
    println!("teps denominator {} undirected edges", report.edges);
    println!(
        "runs {} valid {} zero-teps {}",
        report.runs.len(),
        report.runs.len() - invalid.len(),
        report.zero_teps_runs
    );
    match report.teps {
        Some(t) => println!(
            "teps harmonic {:.4e} mean {:.4e} min {:.4e} max {:.4e}",
            t.harmonic_mean, t.arithmetic_mean, t.min, t.max
        ),
        None => println!("teps n/a"),
    }
    println!(
        "seconds mean {:.6} min {:.6} max {:.6}",
        report.seconds.arithmetic_mean, report.seconds.min, report.seconds.max
    );
    for (source, v) in &invalid {
        eprintln!("source {source}: {v}");
    }
    Ok(invalid.is_empty())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
