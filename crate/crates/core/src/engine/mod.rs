//! Discrete-event simulation core.
//!
//! One [`Simulation`] owns every node of a scenario and processes events in
//! `(time, seq)` order on a single thread. The radio is an idealized, lossless
//! unit-disk broadcast medium with a constant per-hop latency (plus optional
//! jitter): every transmission reaches every node within radio range.

mod energy;
mod event;
mod sim;
mod topology;

pub use energy::{EnergyAudit, EnergyModel};
pub use event::{Event, EventKind, EventQueue};
pub use sim::{EngineConfig, RunStats, Simulation};
pub use topology::{Placement, SinkPlacement, Topology};

/// Errors from building or driving a simulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("need at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("requested {requested} sources but only {available} non-sink nodes exist")]
    TooManySources { requested: usize, available: usize },
    #[error("node {0} cannot transmit: it has failed or cannot pay for the packet")]
    FailedBeforeTransmit(crate::NodeId),
    #[error("invalid energy model: {0}")]
    InvalidEnergy(String),
    #[error("simulation already started")]
    AlreadyStarted,
}
