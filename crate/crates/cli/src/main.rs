//! `a2a`: plan, cost, verify, and simulate all-to-all reconfiguration
//! strategies.
//!
//! Exit codes: 0 success, 2 invalid input or failed check, 3 internal error.
//! Errors are printed to stderr as `{"error": {"kind": ..., "message": ...}}`.

mod io;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use a2a_core::cost::{gap_csv, gap_rows, strategy_cost, verify_decomposition};
use a2a_core::schedule::{check_strategy, round_table};
use a2a_core::sim::{simulate, trace_csv, SimConfig};
use a2a_core::strategize::{default_r_grid, PlanRequest, Planner};
use a2a_core::topology::{shift_power_sums, ShiftOrder};
use a2a_core::workload::{gen_traffic, WorkloadKind, WorkloadSpec, DEFAULT_ZIPF_FACTOR};
use a2a_core::{CostModel, NetworkParams, Strategy, TrafficMatrix};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::io::{read_json, write_output, CliError};

#[derive(Parser)]
#[command(name = "a2a", version, about = "Reconfiguration strategies for all-to-all on photonic scale-up networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic demand matrix as JSON.
    GenTraffic(GenTrafficArgs),
    /// Pick the reconfiguration count and strategy for one delay.
    Plan(PlanArgs),
    /// Cost the best strategy over a grid of reconfiguration delays (CSV).
    Sweep(SweepArgs),
    /// Degree-1 lower bound next to the shift-sequence hop totals (CSV).
    LowerBound(LowerBoundArgs),
    /// Check a strategy for contention and exact demand coverage.
    Verify(VerifyArgs),
    /// Replay a strategy chunk by chunk.
    Simulate(SimulateArgs),
    /// Recompute the reference results and print a pass/fail table.
    Reproduce(reproduce::ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Random,
    Zipf,
}

#[derive(Args)]
struct GenTrafficArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    mean_chunks: u64,
    #[arg(long, default_value_t = DEFAULT_ZIPF_FACTOR)]
    zipf_factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Link model. Defaults: 500 ns latency, 800 Gb/s, 4 MiB chunks.
#[derive(Args, Clone)]
struct CostArgs {
    /// Per-hop latency in seconds.
    #[arg(long, default_value_t = a2a_core::params::DEFAULT_LINK_LATENCY_S)]
    alpha: f64,
    /// Seconds per byte.
    #[arg(long, default_value_t = 8.0 / a2a_core::params::DEFAULT_LINK_BANDWIDTH_BPS)]
    beta: f64,
    #[arg(long, default_value_t = a2a_core::params::DEFAULT_CHUNK_BYTES)]
    chunk_bytes: f64,
    /// Per-chunk per-hop time in seconds, replacing alpha/beta/chunk-bytes.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Reconfiguration delay in seconds.
    #[arg(long = "R", conflicts_with = "r_in_t")]
    r: Option<f64>,
    /// Reconfiguration delay in multiples of the per-hop time.
    #[arg(long = "R-in-T")]
    r_in_t: Option<f64>,
}

impl CostArgs {
    fn model(&self) -> Result<CostModel, CliError> {
        let base = match self.t {
            Some(t) => CostModel::from_t(t, 0.0),
            None => CostModel { alpha: self.alpha, beta: self.beta, chunk_bytes: self.chunk_bytes, reconfig_delay: 0.0 },
        };
        let r = match (self.r, self.r_in_t) {
            (_, Some(x)) => x * base.t(),
            (Some(r), None) => r,
            (None, None) => 0.0,
        };
        let cm = base.with_reconfig_delay(r);
        cm.validate()?;
        Ok(cm)
    }
}

#[derive(Args)]
struct DemandArgs {
    /// Traffic JSON; unit all-to-all over `--n` nodes when omitted.
    #[arg(long)]
    traffic: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    /// Candidate reconfiguration counts, e.g. `1,2,7`; all useful counts by
    /// default.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    cost: CostArgs,
}

impl DemandArgs {
    fn request(&self) -> Result<PlanRequest, CliError> {
        let traffic = match (&self.traffic, self.n) {
            (Some(path), _) => read_json::<TrafficMatrix>(path)?,
            (None, Some(n)) => TrafficMatrix::uniform(n, 1),
            (None, None) => return Err(CliError::usage("either --traffic or --n is required")),
        };
        if let Some(n) = self.n {
            if n != traffic.n() {
                return Err(CliError::usage(format!("--n {n} disagrees with the {0}x{0} traffic matrix", traffic.n())));
            }
        }
        let params = NetworkParams::new(traffic.n(), self.k)?;
        let mut req = PlanRequest::new(params, traffic, self.cost.model()?)?.with_seed(self.seed);
        if !self.d.is_empty() {
            req = req.with_d_candidates(self.d.clone())?;
        }
        Ok(req)
    }
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    demand: DemandArgs,
    /// Strategy JSON output; embedded in the stdout summary when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also print the round table to stderr.
    #[arg(long)]
    table: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    demand: DemandArgs,
    /// Delays in seconds; 25 log-spaced points from 100 ns to 100 ms when
    /// omitted.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerBoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d_min: usize,
    /// Defaults to n - 1.
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    strategy: PathBuf,
    #[arg(long)]
    traffic: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    strategy: PathBuf,
    #[arg(long)]
    traffic: PathBuf,
    #[command(flatten)]
    cost: CostArgs,
    /// First come, first served at links instead of lowest chunk index first.
    #[arg(long)]
    fifo: bool,
    /// Per-event trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn gen_traffic_cmd(args: GenTrafficArgs) -> Result<(), CliError> {
    let kind = match args.kind {
        Kind::Uniform => WorkloadKind::Uniform,
        Kind::Random => WorkloadKind::Random,
        Kind::Zipf => WorkloadKind::Zipf,
    };
    let spec = WorkloadSpec { kind, n: args.n, mean_chunks: args.mean_chunks, zipf_factor: args.zipf_factor, seed: args.seed };
    let a = gen_traffic(&spec)?;
    write_output(args.out.as_deref(), &serde_json::to_string_pretty(&a)?)
}

fn plan_cmd(args: PlanArgs) -> Result<(), CliError> {
    let req = args.demand.request()?;
    let cm = req.cost_model;
    let planner = Planner::new(req)?;
    let (chosen, _) = planner.select_at(cm.reconfig_delay);
    let cost = strategy_cost(&chosen.strategy, &cm)?;
    if args.table {
        eprint!("{}", round_table(&chosen.strategy));
    }
    let mut summary = json!({
        "d": chosen.strategy.d(),
        "family": chosen.family,
        "cost": cost,
        "totalInT": cost.total_seconds / cm.t(),
    });
    match &args.out {
        Some(path) => {
            write_output(Some(path), &serde_json::to_string_pretty(&chosen.strategy)?)?;
            summary["strategyFile"] = json!(path);
        }
        None => summary["strategy"] = serde_json::to_value(&chosen.strategy)?,
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn sweep_cmd(args: SweepArgs) -> Result<(), CliError> {
    let req = args.demand.request()?;
    let grid = if args.grid.is_empty() { default_r_grid() } else { args.grid.clone() };
    let sweep = Planner::new(req)?.sweep(&grid)?;
    write_output(args.out.as_deref(), &sweep.to_csv())
}

fn lower_bound_cmd(args: LowerBoundArgs) -> Result<(), CliError> {
    NetworkParams::new(args.n, 1)?;
    let d_max = args.d_max.unwrap_or(args.n - 1);
    if args.d_min == 0 || args.d_min > d_max || d_max > args.n - 1 {
        return Err(CliError::usage(format!("d range [{}, {d_max}] outside [1, {}]", args.d_min, args.n - 1)));
    }
    let sums = shift_power_sums(args.n, ShiftOrder::Greedy);
    let rows = gap_rows(args.n, &sums)?;
    let rows: Vec<_> = rows.into_iter().filter(|r| (args.d_min..=d_max).contains(&r.d)).collect();
    write_output(args.out.as_deref(), &gap_csv(&rows))
}

fn verify_cmd(args: VerifyArgs) -> Result<(), CliError> {
    let strategy: Strategy = read_json(&args.strategy)?;
    let a: TrafficMatrix = read_json(&args.traffic)?;
    let contention = check_strategy(&strategy);
    if !contention.is_clean() {
        return Err(CliError::check("contention", serde_json::to_value(&contention)?));
    }
    let decomposition = verify_decomposition(&strategy, &a)?;
    let report = json!({
        "ok": true,
        "n": strategy.n,
        "k": strategy.k,
        "d": strategy.d(),
        "rounds": strategy.round_count(),
        "powerSum": strategy.power_sum(),
        "slots": strategy.slots(),
        "decompositionTerms": decomposition.terms.len(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn simulate_cmd(args: SimulateArgs) -> Result<(), CliError> {
    let strategy: Strategy = read_json(&args.strategy)?;
    let a: TrafficMatrix = read_json(&args.traffic)?;
    let cfg = SimConfig { cost_model: args.cost.model()?, chunk_priority: !args.fifo, record_trace: args.trace.is_some() };
    let mut report = simulate(&strategy, &a, &cfg)?;
    if let Some(path) = &args.trace {
        write_output(Some(path), &trace_csv(&report))?;
        report.trace.clear();
    }
    write_output(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenTraffic(a) => gen_traffic_cmd(a),
        Command::Plan(a) => plan_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::LowerBound(a) => lower_bound_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Reproduce(a) => reproduce::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
