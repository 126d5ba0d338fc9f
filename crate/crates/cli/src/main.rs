use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sqaoa_core::experiments::{
    calibrate_topology, run_comparison_tables, run_dual_heatmap, run_noise_scan,
    run_reduction_table, ExperimentReport, HeatmapConfig, NoiseConfig, TablesConfig, Truncation,
};
use std::path::PathBuf;
use std::process::ExitCode;

mod solve;

const MAX_BUDGET: usize = sqaoa_core::qaoa::MAX_BUDGET;

#[derive(Parser, Debug)]
#[command(name = "sqaoa", version, about = "Constraint-preserving QAOA for multi-channel allocation")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "SQAOA_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print instance statistics and search-space sizes.
    Info {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Solve one instance with a classical or QAOA method.
    Solve(SolveArgs),
    /// Run a canned experiment and write its artifacts.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Exact,
    Greedy,
    Standard,
    DickeXy,
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Topology {
    Complete,
    Ring,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub method: SolveMethod,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[arg(long, default_value_t = 1024)]
    pub shots: usize,
    #[arg(long, default_value_t = sqaoa_core::rng::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = sqaoa_core::model::DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = 80)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = Topology::Complete)]
    pub topology: Topology,
    /// Break greedy ties at random using the seed.
    #[arg(long)]
    pub random_ties: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExperimentName {
    Reduction,
    Calibrate,
    Tables,
    DualHeatmap,
    Noise,
}

impl ExperimentName {
    fn label(self) -> &'static str {
        match self {
            ExperimentName::Reduction => "reduction",
            ExperimentName::Calibrate => "calibrate",
            ExperimentName::Tables => "tables",
            ExperimentName::DualHeatmap => "dual-heatmap",
            ExperimentName::Noise => "noise",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TruncationArg {
    Path,
    ClosedRing,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    #[arg(long, default_value_t = sqaoa_core::rng::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shots per evaluation (tables: 1024, dual-heatmap: 2048).
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long, default_value_t = 80)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = sqaoa_core::model::DEFAULT_LAMBDA)]
    lambda: f64,
    /// Grid points per axis for the heatmap.
    #[arg(long, default_value_t = 9)]
    grid: usize,
    /// Optimizer restarts per QAOA method in the tables.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Noise trajectories per error rate.
    #[arg(long, default_value_t = 2000)]
    trajectories: usize,
    /// Comma-separated depolarizing error rates.
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.02,0.03,0.04,0.05")]
    noise_levels: Vec<f64>,
    #[arg(long, value_enum, default_value_t = TruncationArg::ClosedRing)]
    truncation: TruncationArg,
    /// Exit with status 2 when any acceptance check fails.
    #[arg(long)]
    strict: bool,
}

fn check_common(depth: usize, shots: Option<usize>, budget: usize, lambda: f64) -> Result<()> {
    if depth == 0 {
        bail!("--depth must be at least 1");
    }
    if shots == Some(0) {
        bail!("--shots must be at least 1");
    }
    if budget == 0 || budget > MAX_BUDGET {
        bail!("--budget must be in [1, {MAX_BUDGET}]");
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        bail!("--lambda must be a finite non-negative number");
    }
    Ok(())
}

fn cmd_info(path: &PathBuf) -> Result<()> {
    let inst = sqaoa_core::ProblemInstance::from_json_file(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let stats = sqaoa_core::model::search_space_stats(&inst);
    println!("name: {}", inst.name());
    println!("n: {}", inst.n());
    println!("m: {}", inst.m());
    println!("k: {:?}", inst.demands());
    println!("edges: {:?}", inst.edges());
    match stats.full_dim {
        Some(d) => println!("full_dim: {d}"),
        None => println!("full_dim: 2^{}", stats.log2_full_dim),
    }
    match stats.feasible_count {
        Some(c) => println!("feasible_count: {c}"),
        None => println!("feasible_count: 2^{:.3}", stats.log2_feasible_count),
    }
    println!("reduction_factor: {:.4}", stats.reduction_factor);
    if let Some(caps) = inst.capacities() {
        println!("capacities: {caps:?}");
        let basis = sqaoa_core::combinatorics::enumerate_dual_basis(&inst)?;
        println!("dual_basis_size: {}", basis.size());
    }
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<bool> {
    check_common(args.depth, args.shots, args.budget, args.lambda)?;
    if args.grid < 2 {
        bail!("--grid must be at least 2");
    }
    if args.restarts == 0 || args.trajectories == 0 {
        bail!("--restarts and --trajectories must be at least 1");
    }
    if args.noise_levels.iter().any(|p| !(0.0..=1.0).contains(p)) {
        bail!("--noise-levels must lie in [0, 1]");
    }
    let truncation = match args.truncation {
        TruncationArg::Path => Truncation::Path,
        TruncationArg::ClosedRing => Truncation::ClosedRing,
    };
    let calibration = calibrate_topology(truncation)?;
    let family = calibration.family;
    let seed = args.seed;
    let mut report = match args.name {
        ExperimentName::Reduction => run_reduction_table(&family)?.report(seed)?,
        ExperimentName::Calibrate => {
            let mut r = ExperimentReport::new("calibrate", seed);
            let mut table = calibration.table(seed);
            let other = match truncation {
                Truncation::Path => Truncation::ClosedRing,
                Truncation::ClosedRing => Truncation::Path,
            };
            table.rows.extend(calibrate_topology(other)?.table(seed).rows);
            r.csv("calibration.csv", &table)?;
            r
        }
        ExperimentName::Tables => {
            let cfg = TablesConfig {
                seed,
                restarts: args.restarts,
                budget: args.budget,
                shots: args.shots.unwrap_or(1024),
                depth: args.depth,
                lambda: args.lambda,
                ..TablesConfig::default()
            };
            run_comparison_tables(&family, &cfg)?.report()?
        }
        ExperimentName::DualHeatmap => {
            let cfg = HeatmapConfig {
                seed,
                steps: args.grid,
                shots: args.shots.unwrap_or(2048),
            };
            run_dual_heatmap(&family, &cfg)?.report()?
        }
        ExperimentName::Noise => {
            let cfg = NoiseConfig {
                seed,
                levels: args.noise_levels.clone(),
                trajectories: args.trajectories,
                budget: args.budget,
                shots: args.shots.unwrap_or(1024),
                depth: args.depth,
                lambda: args.lambda,
                ..NoiseConfig::default()
            };
            run_noise_scan(&family, &cfg)?.report()?
        }
    };
    if args.name != ExperimentName::Calibrate {
        report.csv("calibration.csv", &calibration.table(seed))?;
    }
    let dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("sqaoa-out/{}-seed{seed}", args.name.label())));
    report.write_to(&dir)?;
    println!("experiment {} (seed {seed})", args.name.label());
    println!(
        "family chords {:?}, truncation {}, calibrated: {}",
        family.chords, family.truncation, calibration.exact_match
    );
    for a in &report.artifacts {
        println!("wrote {}", dir.join(&a.file_name).display());
    }
    for c in &report.checks {
        println!("{c}");
    }
    Ok(report.all_passed())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Info { instance } => cmd_info(&instance)?,
        Command::Solve(args) => {
            check_common(args.depth, Some(args.shots), args.budget, args.lambda)?;
            solve::cmd_solve(&args)?;
        }
        Command::Experiment(args) => {
            let passed = cmd_experiment(&args)?;
            if args.strict && !passed {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
