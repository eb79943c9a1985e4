//! Command-line front end: solve an instance, benchmark dynamic maintenance
//! against static recomputation, and generate graphs/batches.
//!
//! Exit codes: 0 success, 1 file or data errors, 2 usage errors (clap),
//! 3 verification mismatch.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use dynflow::{
    apply_updates, io, oracle_maxflow, solve_dynamic_pp, solve_dynamic_pr, solve_static,
    verify_certificate, workload, BatchKind, BiCsrGraph, Engine, FlowResult, FlowState, Schedule,
    SolveOptions, UpdateBatch,
};

#[derive(Parser)]
#[command(name = "dynflow", version, about = "parallel dynamic max-flow engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the flow value.
    Solve(SolveArgs),
    /// Timed solve/update/re-solve pipeline emitting CSV rows.
    Bench(BenchArgs),
    /// Generate a random graph in DIMACS max format.
    GenGraph(GenGraphArgs),
    /// Generate an update batch for an existing graph.
    GenBatch(GenBatchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Rebuild the updated graph and solve from scratch.
    Static,
    /// Dynamic push-relabel repair.
    DynPr,
    /// Dynamic push-pull repair.
    DynPp,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Static => write!(f, "static"),
            Mode::DynPr => write!(f, "dyn-pr"),
            Mode::DynPp => write!(f, "dyn-pp"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Topology,
    Data,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Schedule {
        match s {
            ScheduleArg::Topology => Schedule::TopologyDriven,
            ScheduleArg::Data => Schedule::DataDriven,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Inc,
    Dec,
    Mix,
}

impl From<KindArg> for BatchKind {
    fn from(k: KindArg) -> BatchKind {
        match k {
            KindArg::Inc => BatchKind::Incremental,
            KindArg::Dec => BatchKind::Decremental,
            KindArg::Mix => BatchKind::Mixed,
        }
    }
}

#[derive(Args)]
struct CommonSolveArgs {
    /// Graph file (DIMACS max or plain format).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Data)]
    schedule: ScheduleArg,
    /// Push/relabel repetitions per vertex per kernel phase
    /// (default: average degree |E|/|V|).
    #[arg(long)]
    kernel_cycles: Option<u32>,
    /// Executor count (default: available hardware parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Check results against the sequential oracle; mismatch exits 3.
    #[arg(long)]
    verify: bool,
    /// Append result rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonSolveArgs,
    /// Update batch to apply after the initial static solve.
    #[arg(long)]
    updates: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Static)]
    mode: Mode,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonSolveArgs,
    /// Update batch file; mutually exclusive with --batches.
    #[arg(long, conflicts_with = "batches")]
    updates: Option<PathBuf>,
    /// Generate this many cumulative batches instead of reading one file.
    #[arg(long)]
    batches: Option<u32>,
    #[arg(long, value_enum, default_value_t = Mode::DynPr)]
    mode: Mode,
    /// Batch size as a percentage of |E| (generated batches).
    #[arg(long, default_value_t = 1.0)]
    percent: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Mix)]
    kind: KindArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sampling weight for edges leaving the source or entering the sink.
    #[arg(long, default_value_t = 10)]
    bias: u64,
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    cap_max: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path (DIMACS max format).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenBatchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    percent: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Mix)]
    kind: KindArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    bias: u64,
    /// Output path (batch format).
    #[arg(long)]
    out: PathBuf,
}

struct CsvRow<'a> {
    dataset: &'a str,
    mode: String,
    schedule: Schedule,
    batch_pct: f64,
    batch_kind: String,
    seed: u64,
    flow: i64,
    time: Duration,
    result: &'a FlowResult,
}

fn append_csv(path: &Path, row: &CsvRow) -> dynflow::Result<()> {
    let fresh = !path.exists();
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(
            f,
            "dataset,mode,schedule,batch_pct,batch_kind,seed,flow,time_ms,rounds,pushes,relabels,invalid_removed"
        )?;
    }
    let stats = &row.result.stats;
    writeln!(
        f,
        "{},{},{},{},{},{},{},{:.3},{},{},{},{}",
        row.dataset,
        row.mode,
        row.schedule,
        row.batch_pct,
        row.batch_kind,
        row.seed,
        row.flow,
        row.time.as_secs_f64() * 1e3,
        stats.rounds,
        stats.pushes,
        stats.total_relabels(),
        stats.invalid_edges_removed,
    )?;
    Ok(())
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn make_engine(threads: Option<usize>) -> Engine {
    match threads {
        Some(t) => Engine::with_threads(t),
        None => Engine::new(),
    }
}

fn print_result(label: &str, result: &FlowResult, elapsed: Duration) {
    println!("flow {}", result.flow_value);
    let s = &result.stats;
    eprintln!(
        "{label}: {:.3} ms, rounds {}, pushes {} ({} saturating), relabels {}, invalid removed {}",
        elapsed.as_secs_f64() * 1e3,
        s.rounds,
        s.pushes,
        s.saturating_pushes,
        s.total_relabels(),
        s.invalid_edges_removed,
    );
}

/// Static rebuild reference: fresh graph with the state's current
/// capacities, solved from scratch.
fn static_rebuild(
    engine: &Engine,
    graph: &BiCsrGraph,
    capacities: Vec<i64>,
    options: &SolveOptions,
) -> (FlowResult, Duration, BiCsrGraph) {
    let rebuilt = graph.with_capacities(capacities);
    let mut state = FlowState::new(&rebuilt);
    let t0 = Instant::now();
    let result = solve_static(engine, &rebuilt, &mut state, options);
    (result, t0.elapsed(), rebuilt)
}

fn run_solve(args: SolveArgs) -> Result<(), MainError> {
    let engine = make_engine(args.common.threads);
    let graph = io::read_graph(&args.common.graph)?;
    let options = SolveOptions {
        schedule: args.common.schedule.into(),
        kernel_cycles: args.common.kernel_cycles,
        audit: false,
    };
    let dataset = dataset_name(&args.common.graph);

    let mut state = FlowState::new(&graph);
    let t0 = Instant::now();
    let mut result = solve_static(&engine, &graph, &mut state, &options);
    let mut elapsed = t0.elapsed();
    let mut mode = Mode::Static;
    let mut batch_pct = 0.0;
    let mut batch_kind = String::from("none");

    if let Some(updates) = &args.updates {
        let batch = io::read_batch(updates)?;
        batch_pct = 100.0 * batch.len() as f64 / graph.edge_count().max(1) as f64;
        batch_kind = batch.kind.to_string();
        mode = args.mode;
        let prev_h = state.h_plus_snapshot();
        apply_updates(&engine, &graph, &mut state, &batch)?;
        match args.mode {
            Mode::Static => {
                let (r, dt, _) =
                    static_rebuild(&engine, &graph, state.capacity_snapshot(), &options);
                result = r;
                elapsed = dt;
            }
            Mode::DynPr => {
                let t0 = Instant::now();
                result = solve_dynamic_pr(&engine, &graph, &mut state, &options);
                elapsed = t0.elapsed();
            }
            Mode::DynPp => {
                let t0 = Instant::now();
                result = solve_dynamic_pp(&engine, &graph, &mut state, &prev_h, &options);
                elapsed = t0.elapsed();
            }
        }
        if args.common.verify {
            let rebuilt = graph.with_capacities(state.capacity_snapshot());
            let expected = oracle_maxflow(&rebuilt).value;
            if expected != result.flow_value {
                return Err(MainError::Verification(format!(
                    "flow {} does not match oracle {expected}",
                    result.flow_value
                )));
            }
        }
    } else if args.common.verify {
        let expected = oracle_maxflow(&graph).value;
        if expected != result.flow_value {
            return Err(MainError::Verification(format!(
                "flow {} does not match oracle {expected}",
                result.flow_value
            )));
        }
        verify_certificate(&graph, &state, &result)
            .map_err(|e| MainError::Verification(e.to_string()))?;
    }

    print_result(&mode.to_string(), &result, elapsed);
    if args.common.verify {
        eprintln!("verify: ok");
    }
    if let Some(csv) = &args.common.csv {
        append_csv(
            csv,
            &CsvRow {
                dataset: &dataset,
                mode: mode.to_string(),
                schedule: options.schedule,
                batch_pct,
                batch_kind,
                seed: 0,
                flow: result.flow_value,
                time: elapsed,
                result: &result,
            },
        )?;
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), MainError> {
    let engine = make_engine(args.common.threads);
    let graph = io::read_graph(&args.common.graph)?;
    let options = SolveOptions {
        schedule: args.common.schedule.into(),
        kernel_cycles: args.common.kernel_cycles,
        audit: false,
    };
    let dataset = dataset_name(&args.common.graph);

    // Initial static solve establishes the state the dynamic modes repair.
    let mut state = FlowState::new(&graph);
    let t0 = Instant::now();
    let initial = solve_static(&engine, &graph, &mut state, &options);
    let initial_time = t0.elapsed();
    print_result("initial static", &initial, initial_time);
    if let Some(csv) = &args.common.csv {
        append_csv(
            csv,
            &CsvRow {
                dataset: &dataset,
                mode: "static".into(),
                schedule: options.schedule,
                batch_pct: 0.0,
                batch_kind: "none".into(),
                seed: args.seed,
                flow: initial.flow_value,
                time: initial_time,
                result: &initial,
            },
        )?;
    }

    let batches: Vec<UpdateBatch> = if let Some(updates) = &args.updates {
        vec![io::read_batch(updates)?]
    } else {
        let count = args.batches.unwrap_or(1);
        (0..count)
            .map(|i| {
                workload::generate_batch(
                    &graph,
                    args.percent,
                    args.kind.into(),
                    args.seed + i as u64,
                    args.bias,
                )
            })
            .collect::<dynflow::Result<_>>()?
    };

    for (i, batch) in batches.iter().enumerate() {
        let batch_pct = 100.0 * batch.len() as f64 / graph.edge_count().max(1) as f64;
        let prev_h = state.h_plus_snapshot();
        let (result, elapsed) = match args.mode {
            Mode::Static => {
                apply_updates(&engine, &graph, &mut state, batch)?;
                let (r, dt, rebuilt) =
                    static_rebuild(&engine, &graph, state.capacity_snapshot(), &options);
                // Keep the dynamic state aligned for the next batch.
                let mut fresh = FlowState::new(&rebuilt);
                solve_static(&engine, &rebuilt, &mut fresh, &options);
                state = fresh;
                (r, dt)
            }
            Mode::DynPr => {
                let t0 = Instant::now();
                apply_updates(&engine, &graph, &mut state, batch)?;
                let r = solve_dynamic_pr(&engine, &graph, &mut state, &options);
                (r, t0.elapsed())
            }
            Mode::DynPp => {
                let t0 = Instant::now();
                apply_updates(&engine, &graph, &mut state, batch)?;
                let r = solve_dynamic_pp(&engine, &graph, &mut state, &prev_h, &options);
                (r, t0.elapsed())
            }
        };

        if args.common.verify {
            let rebuilt = graph.with_capacities(state.capacity_snapshot());
            let expected = oracle_maxflow(&rebuilt).value;
            if expected != result.flow_value {
                return Err(MainError::Verification(format!(
                    "batch {i}: flow {} does not match oracle {expected}",
                    result.flow_value
                )));
            }
        }
        print_result(&format!("batch {i} ({})", args.mode), &result, elapsed);
        if args.common.verify {
            eprintln!("verify: ok");
        }
        if let Some(csv) = &args.common.csv {
            append_csv(
                csv,
                &CsvRow {
                    dataset: &dataset,
                    mode: args.mode.to_string(),
                    schedule: options.schedule,
                    batch_pct,
                    batch_kind: batch.kind.to_string(),
                    seed: args.seed + i as u64,
                    flow: result.flow_value,
                    time: elapsed,
                    result: &result,
                },
            )?;
        }
    }
    Ok(())
}

fn run_gen_graph(args: GenGraphArgs) -> Result<(), MainError> {
    let graph = workload::generate_random_graph(args.n, args.m, args.cap_max, args.seed)?;
    io::write_dimacs(&args.out, &graph)?;
    eprintln!(
        "wrote {} ({} vertices, {} edges, source {}, sink {})",
        args.out.display(),
        graph.vertex_count(),
        graph.edge_count(),
        graph.source() + 1,
        graph.sink() + 1,
    );
    Ok(())
}

fn run_gen_batch(args: GenBatchArgs) -> Result<(), MainError> {
    let graph = io::read_graph(&args.graph)?;
    let batch =
        workload::generate_batch(&graph, args.percent, args.kind.into(), args.seed, args.bias)?;
    io::write_batch(&args.out, &batch)?;
    eprintln!(
        "wrote {} ({} entries, kind {})",
        args.out.display(),
        batch.len(),
        batch.kind,
    );
    Ok(())
}

enum MainError {
    Data(dynflow::Error),
    Verification(String),
}

impl From<dynflow::Error> for MainError {
    fn from(e: dynflow::Error) -> Self {
        MainError::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
        Command::GenGraph(args) => run_gen_graph(args),
        Command::GenBatch(args) => run_gen_batch(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(MainError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(MainError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}
