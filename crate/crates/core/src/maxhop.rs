//! Estimates of the longest route in the network ("MaxHop"), which normalizes
//! the hop-count membership function.
//!
//! Static estimates are fixed at scenario start from terrain geometry or node
//! count. The dynamic estimate is recomputed from the forwarding node's own
//! neighbor table before every decision.

use crate::{NeighborEntry, RoutingError};

/// Quotients within this distance above an integer are treated as that
/// integer before taking the ceiling.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainConfig {
    pub x_extent: f64,
    pub y_extent: f64,
    pub radio_range: f64,
}

impl TerrainConfig {
    pub fn new(x_extent: f64, y_extent: f64, radio_range: f64) -> Result<Self, RoutingError> {
        let terrain = Self { x_extent, y_extent, radio_range };
        terrain.validate()?;
        Ok(terrain)
    }

    pub fn validate(&self) -> Result<(), RoutingError> {
        for (name, v) in [("x extent", self.x_extent), ("y extent", self.y_extent), ("radio range", self.radio_range)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(RoutingError::InvalidTerrain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.radio_range > self.diagonal() {
            return Err(RoutingError::InvalidTerrain(format!(
                "radio range {} exceeds terrain diagonal {:.3}",
                self.radio_range,
                self.diagonal()
            )));
        }
        Ok(())
    }

    pub fn diagonal(&self) -> f64 {
        self.x_extent.hypot(self.y_extent)
    }
}

fn ceil_at_least_one(q: f64) -> u32 {
    ((q - CEIL_SLACK).ceil().max(1.0)) as u32
}

/// `⌈√(X² + Y²) / R⌉`: the terrain diagonal covered in full-range hops.
pub fn static_diagonal(terrain: &TerrainConfig) -> u32 {
    ceil_at_least_one(terrain.diagonal() / terrain.radio_range)
}

/// `⌈√(X² + Y²) / (R/2)⌉`: assumes each hop only makes half a radio range of
/// progress.
pub fn static_half_range(terrain: &TerrainConfig) -> u32 {
    ceil_at_least_one(terrain.diagonal() / (terrain.radio_range / 2.0))
}

/// `N - 2`: the longest simple path between two of `n` nodes that avoids the
/// sink.
pub fn static_node_bound(n: usize) -> Result<u32, RoutingError> {
    if n < 3 {
        return Err(RoutingError::InvalidNodeCount(n));
    }
    Ok((n - 2) as u32)
}

/// Biggest hop count in the table, plus one.
pub fn dynamic_maxhop(table: &[NeighborEntry]) -> Result<u32, RoutingError> {
    table
        .iter()
        .map(|e| e.hop_count)
        .max()
        .map(|h| h + 1)
        .ok_or(RoutingError::EmptyNeighborSet)
}

/// Caps a neighbor's hop count at `max_hop` when clamping is on.
pub fn effective_hop(hop_count: u32, max_hop: u32, clamp: bool) -> u32 {
    if clamp {
        hop_count.min(max_hop)
    } else {
        hop_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxHopKind {
    StaticDiagonal,
    StaticHalfRange,
    StaticNodeBound,
    Dynamic,
}

impl MaxHopKind {
    pub fn name(self) -> &'static str {
        match self {
            MaxHopKind::StaticDiagonal => "diagonal",
            MaxHopKind::StaticHalfRange => "half-range",
            MaxHopKind::StaticNodeBound => "node-bound",
            MaxHopKind::Dynamic => "dynamic",
        }
    }
}

/// A resolved MaxHop strategy. Static kinds carry their precomputed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxHopStrategy {
    StaticDiagonal(u32),
    StaticHalfRange(u32),
    StaticNodeBound(u32),
    Dynamic,
}

impl MaxHopStrategy {
    pub fn resolve(kind: MaxHopKind, terrain: &TerrainConfig, node_count: usize) -> Result<Self, RoutingError> {
        Ok(match kind {
            MaxHopKind::StaticDiagonal => MaxHopStrategy::StaticDiagonal(static_diagonal(terrain)),
            MaxHopKind::StaticHalfRange => MaxHopStrategy::StaticHalfRange(static_half_range(terrain)),
            MaxHopKind::StaticNodeBound => MaxHopStrategy::StaticNodeBound(static_node_bound(node_count)?),
            MaxHopKind::Dynamic => MaxHopStrategy::Dynamic,
        })
    }

    pub fn kind(&self) -> MaxHopKind {
        match self {
            MaxHopStrategy::StaticDiagonal(_) => MaxHopKind::StaticDiagonal,
            MaxHopStrategy::StaticHalfRange(_) => MaxHopKind::StaticHalfRange,
            MaxHopStrategy::StaticNodeBound(_) => MaxHopKind::StaticNodeBound,
            MaxHopStrategy::Dynamic => MaxHopKind::Dynamic,
        }
    }

    pub fn cached_value(&self) -> Option<u32> {
        match *self {
            MaxHopStrategy::StaticDiagonal(v)
            | MaxHopStrategy::StaticHalfRange(v)
            | MaxHopStrategy::StaticNodeBound(v) => Some(v),
            MaxHopStrategy::Dynamic => None,
        }
    }

    /// MaxHop to use for a decision over `table`.
    pub fn max_hop_for(&self, table: &[NeighborEntry]) -> Result<u32, RoutingError> {
        match self.cached_value() {
            Some(v) => Ok(v),
            None => dynamic_maxhop(table),
        }
    }
}
