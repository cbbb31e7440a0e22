use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use fear_sim::engine::Placement;
use fear_sim::experiments::{
    parse_config, read_csv, run_scenario, summarize, sweep, write_csv, ExperimentError, ScenarioConfig,
    SummaryOptions, SweepGrid,
};
use fear_sim::protocol::ProtocolKind;

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser)]
#[command(name = "fearsim", version, about = "Fuzzy energy-aware routing simulator for wireless sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics row.
    Run(RunArgs),
    /// Run the Cartesian product of node counts, placements, protocols and seeds.
    Sweep(SweepArgs),
    /// Print seed-averaged comparisons from a results file.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    protocol: Option<ProtocolKind>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated node counts, e.g. 200,300,500.
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<usize>,
    /// Comma-separated placements: random, uniform.
    #[arg(long, value_delimiter = ',', required = true)]
    placements: Vec<Placement>,
    /// Comma-separated protocols: d-fear, s-fear, seer.
    #[arg(long, value_delimiter = ',', required = true)]
    protocols: Vec<ProtocolKind>,
    /// Inclusive range `A..B` or a comma-separated list.
    #[arg(long, value_parser = parse_seeds)]
    seeds: SeedList,
    #[arg(long)]
    out: PathBuf,
    /// Also print the summary report.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Count runs without a sink-neighbor failure as failing at this time.
    #[arg(long, value_name = "SECONDS")]
    censor: Option<f64>,
    /// Relative Test 4 gap reported as no visible difference.
    #[arg(long, default_value_t = 0.10)]
    parity: f64,
}

#[derive(Clone, Debug)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad seed range start `{a}`"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad seed range end `{b}`"))?;
        if a > b {
            return Err(format!("empty seed range {a}..{b}"));
        }
        return Ok(SeedList((a..=b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad seed `{t}`")))
        .collect::<Result<Vec<u64>, String>>()
        .map(SeedList)
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(c) => Failure::Config(c.to_string()),
            other => Failure::Io(other.to_string()),
        }
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn print_rows(rows: &[fear_sim::experiments::MetricsRow]) -> Result<(), Failure> {
    fear_sim::experiments::write_rows(rows, std::io::stdout().lock()).map_err(Failure::from)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut config = load_config(&args.config)?;
    if let Some(p) = args.protocol {
        config.protocol = p;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    info!("running {} with {} nodes, seed {}", config.protocol, config.node_count, config.seed);
    let row = run_scenario(&config).map_err(|e| Failure::Config(e.to_string()))?;
    let rows = [row];
    match args.out {
        Some(path) => write_csv(&rows, &path)?,
        None => print_rows(&rows)?,
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let base = load_config(&args.config)?;
    let grid = SweepGrid {
        node_counts: args.nodes,
        placements: args.placements,
        protocols: args.protocols,
        seeds: args.seeds.0,
    };
    info!("sweeping {} scenarios", grid.node_counts.len() * grid.placements.len() * grid.protocols.len() * grid.seeds.len());
    let rows = sweep(&base, &grid).map_err(|e| Failure::Config(e.to_string()))?;
    write_csv(&rows, &args.out)?;
    if args.summary {
        let opts = SummaryOptions { censor_time: Some(base.simulation_time), ..SummaryOptions::default() };
        print!("{}", summarize(&rows, &opts));
    }
    Ok(())
}

fn run_summarize(args: SummarizeArgs) -> Result<(), Failure> {
    let rows = read_csv(&args.input)?;
    let opts = SummaryOptions { censor_time: args.censor, parity_tolerance: args.parity };
    print!("{}", summarize(&rows, &opts));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Summarize(a) => run_summarize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
