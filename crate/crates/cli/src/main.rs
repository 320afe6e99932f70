//! `cfstp`: generate instances, run solvers, validate schedules and run sweeps.
//!
//! Exit codes: 0 ok, 1 validation failures (or every benchmark run failed),
//! 2 input or output error, 3 solver interrupted by its budget, 4 instance
//! refused by the exact solver's size guard.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use cfstp::bench::{self, compute_metrics, GenParams, MetricsRow};
use cfstp::model::{read_instance, read_schedule, validate_schedule, write_instance, write_schedule};
use cfstp::{solve, Algorithm, Instance64, OracleError, SolveOptions, TieBreak};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERRUPTED: u8 = 3;
const EXIT_GUARD: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "cfstp", version, about = "Coalition formation with spatial and temporal constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve an instance and write the schedule.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate(ValidateArgs),
    /// Run a solver sweep and write CSV and SVG results.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GeneratorFlags {
    #[arg(long, default_value_t = 300)]
    tasks: usize,
    #[arg(long, default_value_t = 50)]
    grid: u32,
    #[arg(long, default_value_t = 5)]
    deadline_min: u32,
    #[arg(long, default_value_t = 600)]
    deadline_max: u32,
    #[arg(long, default_value_t = 10)]
    workload_min: u32,
    #[arg(long, default_value_t = 50)]
    workload_max: u32,
    #[arg(long, default_value_t = 1.0)]
    k_min: f64,
    #[arg(long, default_value_t = 2.0)]
    k_max: f64,
}

impl GeneratorFlags {
    fn params(&self) -> GenParams {
        GenParams {
            grid_size: self.grid,
            task_count: self.tasks,
            deadline_range: (self.deadline_min, self.deadline_max),
            workload_range: (self.workload_min, self.workload_max),
            k_range: (self.k_min, self.k_max),
            ..GenParams::default()
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 10)]
    agents: usize,
    /// Random when omitted; the chosen value is printed to stderr.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    generator: GeneratorFlags,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(short, long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Wall-clock budget in milliseconds.
    #[arg(long)]
    budget: Option<u64>,
    /// Break CFLA/CFLA2 degree ties randomly from this seed instead of by smallest id.
    #[arg(long)]
    tie_seed: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
    /// Print the CSV header before the metrics line.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    instance: PathBuf,
    schedule: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Agent counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = GenParams::default().agent_counts)]
    agents: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "cfla,cfla2,ccf")]
    solvers: Vec<Algorithm>,
    /// Per-run wall-clock budget in milliseconds.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, env = bench::THREADS_ENV)]
    threads: Option<usize>,
    #[command(flatten)]
    generator: GeneratorFlags,
    #[arg(short, long)]
    output: PathBuf,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance64, Failure> {
    let file = File::open(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    read_instance(BufReader::new(file)).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_gen(args: &GenArgs) -> Result<u8, Failure> {
    let seed = args.seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    });
    let params = args.generator.params();
    let instance: Instance64 =
        bench::generate_instance(&params, args.agents, seed).map_err(|e| Failure::input(e.to_string()))?;
    let mut out = create(&args.output)?;
    write_instance(&instance, &mut out)
        .and_then(|()| out.flush().map_err(Into::into))
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", args.output.display())))?;
    Ok(0)
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let instance = load_instance(&args.instance)?;
    let mut options = SolveOptions::default();
    if let Some(ms) = args.budget {
        options = options.with_budget(Duration::from_millis(ms));
    }
    if let Some(seed) = args.tie_seed {
        options = options.tie_break(TieBreak::Seeded(seed));
    }
    let outcome = solve(&instance, args.algorithm, &options).map_err(|e| match e {
        OracleError::LimitExceeded { .. } => Failure { code: EXIT_GUARD, message: e.to_string() },
    })?;
    let mut out = create(&args.output)?;
    write_schedule(&outcome.schedule, &mut out)
        .and_then(|()| out.flush().map_err(Into::into))
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", args.output.display())))?;
    if args.header {
        println!("{}", MetricsRow::CSV_HEADER);
    }
    println!("{}", compute_metrics(&instance, &outcome).labelled(args.algorithm, None).csv_line());
    Ok(if outcome.interrupted { EXIT_INTERRUPTED } else { 0 })
}

fn cmd_validate(args: &ValidateArgs) -> Result<u8, Failure> {
    let instance = load_instance(&args.instance)?;
    let file = File::open(&args.schedule)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.schedule.display())))?;
    let schedule =
        read_schedule(BufReader::new(file)).map_err(|e| Failure::input(format!("{}: {e}", args.schedule.display())))?;
    let report = validate_schedule(&instance, &instance.linear_value(), &schedule);
    for v in &report.structural_violations {
        println!("structural: {v}");
    }
    for v in &report.spatial_violations {
        println!("spatial: {v}");
    }
    println!("degree: {}", report.degree());
    if report.is_feasible() {
        println!("feasible");
        Ok(0)
    } else {
        Ok(EXIT_VIOLATIONS)
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, Failure> {
    let started = Instant::now();
    let params = GenParams {
        agent_counts: args.agents.clone(),
        instances_per_config: args.instances,
        seed: args.seed,
        ..args.generator.params()
    };
    let mut options = SolveOptions::default();
    if let Some(ms) = args.budget {
        options = options.with_budget(Duration::from_millis(ms));
    }
    let result = bench::run_benchmark(&params, &args.solvers, &options, args.threads)
        .map_err(|e| Failure::input(e.to_string()))?;
    bench::write_outputs(&result, &args.output)
        .map_err(|e| Failure::input(format!("cannot write to {}: {e}", args.output.display())))?;
    let failures = result.failures();
    if failures > 0 {
        eprintln!("{failures} of {} runs failed; see runs.csv", result.runs.len());
    }
    println!("total wall-clock: {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(if !result.runs.is_empty() && failures == result.runs.len() { EXIT_VIOLATIONS } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
