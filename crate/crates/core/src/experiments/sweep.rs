use rayon::prelude::*;

use super::{run_scenario_detailed, ConfigError, MetricsRow, ScenarioConfig, ScenarioOutcome};
use crate::engine::Placement;
use crate::protocol::ProtocolKind;

/// Axes of a sweep. Every other setting comes from the base configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub node_counts: Vec<usize>,
    pub placements: Vec<Placement>,
    pub protocols: Vec<ProtocolKind>,
    pub seeds: Vec<u64>,
}

impl SweepGrid {
    /// All cells, ordered by (protocol, placement, node_count, seed).
    pub fn cells(&self, base: &ScenarioConfig) -> Result<Vec<ScenarioConfig>, ConfigError> {
        for (name, empty) in [
            ("node count", self.node_counts.is_empty()),
            ("placement", self.placements.is_empty()),
            ("protocol", self.protocols.is_empty()),
            ("seed", self.seeds.is_empty()),
        ] {
            if empty {
                return Err(ConfigError::Invalid(format!("sweep needs at least one {name}")));
            }
        }
        let mut protocols = self.protocols.clone();
        let mut placements = self.placements.clone();
        let mut nodes = self.node_counts.clone();
        let mut seeds = self.seeds.clone();
        protocols.sort();
        protocols.dedup();
        placements.sort();
        placements.dedup();
        nodes.sort_unstable();
        nodes.dedup();
        seeds.sort_unstable();
        seeds.dedup();

        let mut cells = Vec::with_capacity(protocols.len() * placements.len() * nodes.len() * seeds.len());
        for &protocol in &protocols {
            for &placement in &placements {
                for &node_count in &nodes {
                    for &seed in &seeds {
                        cells.push(ScenarioConfig { protocol, placement, node_count, seed, ..base.clone() });
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Runs every cell of the grid concurrently. Output order follows
/// [`SweepGrid::cells`] regardless of completion order.
pub fn sweep(base: &ScenarioConfig, grid: &SweepGrid) -> Result<Vec<MetricsRow>, ConfigError> {
    Ok(sweep_outcomes(base, grid)?.into_iter().map(|o| o.row).collect())
}

pub fn sweep_outcomes(base: &ScenarioConfig, grid: &SweepGrid) -> Result<Vec<ScenarioOutcome>, ConfigError> {
    let cells = grid.cells(base)?;
    cells
        .par_iter()
        .map(|cfg| {
            run_scenario_detailed(cfg).map_err(|e| ConfigError::Scenario {
                cell: format!(
                    "protocol={}, placement={}, nodes={}, seed={}",
                    cfg.protocol, cfg.placement, cfg.node_count, cfg.seed
                ),
                source: Box::new(e),
            })
        })
        .collect()
}
