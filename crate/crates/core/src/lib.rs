//! Deterministic discrete-event simulator for flat wireless sensor networks
//! running the FEAR fuzzy energy-aware routing protocol.
//!
//! The crate is layered bottom-up:
//!
//! - [`fuzzy`]: membership grading, the mean-based alpha threshold, alpha-cut
//!   filtering and the product decision score used to pick a next hop.
//! - [`maxhop`]: the static and dynamic estimates of the longest route, plus
//!   the hop clamp used by the static variant.
//! - [`protocol`]: per-node state machines for neighbor discovery flooding,
//!   fuzzy forwarding, overhearing energy updates and a minimum-hop baseline.
//! - [`engine`]: topology generation, the event queue, the idealized
//!   broadcast medium and integer energy accounting.
//! - [`experiments`]: scenario configuration, the four lifetime metrics,
//!   sweeps, CSV output and the text report.
//!
//! A single scenario is a pure function of its [`experiments::ScenarioConfig`]:
//!
//! ```
//! use fear_sim::experiments::{run_scenario, ScenarioConfig};
//!
//! let mut config = ScenarioConfig::default();
//! config.node_count = 60;
//! config.source_count = 10;
//! let a = run_scenario(&config).unwrap();
//! let b = run_scenario(&config).unwrap();
//! assert_eq!(a, b);
//! ```

pub mod engine;
pub mod experiments;
pub mod fuzzy;
pub mod maxhop;
mod neighbor;
pub mod protocol;

pub use neighbor::{NeighborEntry, NodeId};

/// Errors raised by the routing mathematics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RoutingError {
    #[error("neighbor set is empty")]
    EmptyNeighborSet,
    #[error("MaxHop must be at least 1, got {0}")]
    InvalidMaxHop(u32),
    #[error("node-count bound needs at least 3 nodes, got {0}")]
    InvalidNodeCount(usize),
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("invalid terrain: {0}")]
    InvalidTerrain(String),
}
