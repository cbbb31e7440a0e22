//! Scenarios, lifetime metrics, sweeps and result files.
//!
//! A scenario run reports four network-lifetime measurements:
//!
//! 1. the time the first direct neighbor of the sink fails,
//! 2. how many non-sink nodes failed,
//! 3. the percentage of the sink's direct neighbors still alive at the end,
//! 4. the mean remaining energy over all non-sink nodes.
//!
//! A node counts as failed once its remaining energy cannot pay for one data
//! transmission.

mod config;
mod report;
mod results;
mod sweep;

use std::io;

pub use config::{parse_config, ScenarioConfig};
pub use report::{group_means, summarize, GroupSummary, ProtocolMeans, SummaryOptions};
pub use results::{read_csv, read_rows, write_csv, write_rows, CSV_HEADER};
pub use sweep::{sweep, sweep_outcomes, SweepGrid};

use crate::engine::{EnergyAudit, EngineConfig, Placement, RunStats, Simulation, Topology};
use crate::fuzzy::{FuzzyParams, Gate};
use crate::maxhop::MaxHopStrategy;
use crate::protocol::ProtocolKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("missing required key {0}")]
    MissingKey(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("scenario ({cell}): {source}")]
    Scenario { cell: String, source: Box<ConfigError> },
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed results file: {0}")]
    Format(String),
}

/// One scenario's metrics plus the configuration that identifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub protocol: ProtocolKind,
    pub placement: Placement,
    pub node_count: usize,
    pub seed: u64,
    /// Failure time of the first sink neighbor to fail, if any did.
    pub test1_first_sink_neighbor_fail_time: Option<f64>,
    pub test2_failed_node_count: usize,
    pub test3_active_sink_neighbor_pct: f64,
    pub test4_avg_remaining_energy: f64,
    pub delivered: u64,
    pub dropped: u64,
    pub avg_path_hops: f64,
}

/// Everything a run produced, for callers that need more than the row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub row: MetricsRow,
    pub audit: EnergyAudit,
    pub stats: RunStats,
    pub initial_ttl: u32,
}

/// Builds the topology, runs the engine to `simulation_time` and computes the
/// metrics.
pub fn run_scenario(config: &ScenarioConfig) -> Result<MetricsRow, ConfigError> {
    run_scenario_detailed(config).map(|o| o.row)
}

pub fn run_scenario_detailed(config: &ScenarioConfig) -> Result<ScenarioOutcome, ConfigError> {
    config.validate()?;
    let topology =
        Topology::place(config.node_count, &config.terrain, config.placement, config.sink_placement, config.seed)
            .map_err(invalid)?;
    let mut sim = Simulation::new(topology, engine_config(config)?).map_err(invalid)?;
    sim.schedule_sources(config.source_count, config.seed, config.activation_window * config.simulation_time)
        .map_err(invalid)?;
    sim.run(config.simulation_time);
    Ok(ScenarioOutcome {
        row: metrics(config, &sim),
        audit: sim.audit(),
        stats: sim.stats().clone(),
        initial_ttl: sim.config().initial_ttl,
    })
}

pub fn engine_config(config: &ScenarioConfig) -> Result<EngineConfig, ConfigError> {
    let gate = if config.strict_gate { Gate::Strict } else { Gate::Inclusive };
    let fuzzy = FuzzyParams::for_max_energy(config.energy.max_energy()).map_err(invalid)?.with_gate(gate);
    let strategy =
        MaxHopStrategy::resolve(config.maxhop_kind(), &config.terrain, config.node_count).map_err(invalid)?;
    Ok(EngineConfig {
        protocol: config.protocol,
        fuzzy,
        strategy,
        energy: config.energy,
        payload_bits: config.payload_bits,
        flood_bits: config.flood_bits,
        initial_ttl: config.initial_ttl(),
        refresh_period: config.refresh_period,
        seed: config.seed,
    })
}

/// Computes the four lifetime metrics from a finished simulation.
pub fn metrics(config: &ScenarioConfig, sim: &Simulation) -> MetricsRow {
    let topo = sim.topology();
    let sink = topo.sink();
    let sink_neighbors = topo.neighbors(sink);

    let test1 = sink_neighbors
        .iter()
        .filter_map(|&n| sim.node(n).failed_at)
        .min_by(f64::total_cmp);
    let sensors: Vec<_> = sim.nodes().iter().filter(|n| !n.is_sink).collect();
    let test2 = sensors.iter().filter(|n| n.failed).count();
    let test3 = if sink_neighbors.is_empty() {
        100.0
    } else {
        let alive = sink_neighbors.iter().filter(|&&n| !sim.node(n).failed).count();
        100.0 * alive as f64 / sink_neighbors.len() as f64
    };
    let test4 = sensors.iter().map(|n| sim.energy_of(n.id)).sum::<f64>() / sensors.len() as f64;

    let stats = sim.stats();
    MetricsRow {
        protocol: config.protocol,
        placement: config.placement,
        node_count: config.node_count,
        seed: config.seed,
        test1_first_sink_neighbor_fail_time: test1,
        test2_failed_node_count: test2,
        test3_active_sink_neighbor_pct: test3,
        test4_avg_remaining_energy: test4,
        delivered: stats.delivered,
        dropped: stats.dropped,
        avg_path_hops: stats.avg_path_hops(),
    }
}

fn invalid(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}
