use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EngineError;
use crate::maxhop::TerrainConfig;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    Random,
    Uniform,
}

impl Placement {
    pub fn name(self) -> &'static str {
        match self {
            Placement::Random => "random",
            Placement::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Placement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Placement::Random),
            "uniform" => Ok(Placement::Uniform),
            _ => Err(format!("unknown placement `{s}` (allowed: RANDOM, UNIFORM)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SinkPlacement {
    #[default]
    Center,
    Corner,
}

impl FromStr for SinkPlacement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "center" | "centre" => Ok(SinkPlacement::Center),
            "corner" => Ok(SinkPlacement::Corner),
            _ => Err(format!("unknown sink placement `{s}` (allowed: CENTER, CORNER)")),
        }
    }
}

/// Node positions and the unit-disk adjacency they induce. Node 0 is the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<(f64, f64)>,
    radio_range: f64,
    adjacency: Vec<Vec<NodeId>>,
}

impl Topology {
    pub const SINK: NodeId = NodeId(0);

    /// Builds the adjacency for explicit positions; `positions[0]` is the sink.
    pub fn from_positions(positions: Vec<(f64, f64)>, radio_range: f64) -> Self {
        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        for u in 0..n {
            for v in (u + 1)..n {
                let (a, b) = (positions[u], positions[v]);
                if (a.0 - b.0).hypot(a.1 - b.1) <= radio_range {
                    adjacency[u].push(NodeId(v as u32));
                    adjacency[v].push(NodeId(u as u32));
                }
            }
        }
        Self { positions, radio_range, adjacency }
    }

    /// Places the sink plus `count - 1` sensors on the terrain.
    ///
    /// `Random` draws sensor coordinates uniformly from a generator seeded with
    /// `seed`. `Uniform` puts sensors at the cell centers of a near-square
    /// `⌈√m⌉ × ⌈m/⌈√m⌉⌉` grid (`m = count - 1`), filled row by row.
    pub fn place(
        count: usize,
        terrain: &TerrainConfig,
        placement: Placement,
        sink_at: SinkPlacement,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if count < 3 {
            return Err(EngineError::TooFewNodes(count));
        }
        let sensors = count - 1;
        let (w, h) = (terrain.x_extent, terrain.y_extent);
        let mut positions = Vec::with_capacity(count);
        positions.push(match sink_at {
            SinkPlacement::Center => (w / 2.0, h / 2.0),
            SinkPlacement::Corner => (0.0, 0.0),
        });
        match placement {
            Placement::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..sensors {
                    positions.push((rng.gen_range(0.0..w), rng.gen_range(0.0..h)));
                }
            }
            Placement::Uniform => {
                let cols = (sensors as f64).sqrt().ceil() as usize;
                let rows = sensors.div_ceil(cols);
                let (dx, dy) = (w / cols as f64, h / rows as f64);
                for i in 0..sensors {
                    let (c, r) = (i % cols, i / cols);
                    positions.push(((c as f64 + 0.5) * dx, (r as f64 + 0.5) * dy));
                }
            }
        }
        let topo = Self::from_positions(positions, terrain.radio_range);
        let reachable = topo.reachable_from_sink();
        if reachable < count {
            log::warn!("{} of {count} nodes are disconnected from the sink", count - reachable);
        }
        Ok(topo)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn sink(&self) -> NodeId {
        Self::SINK
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn position(&self, id: NodeId) -> (f64, f64) {
        self.positions[id.index()]
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency[id.index()].len()
    }

    /// Nodes (sink included) connected to the sink.
    pub fn reachable_from_sink(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([Self::SINK]);
        seen[0] = true;
        let mut count = 0;
        while let Some(u) = queue.pop_front() {
            count += 1;
            for &v in self.neighbors(u) {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    queue.push_back(v);
                }
            }
        }
        count
    }
}
