use std::fmt;

/// Identifier of a node in the network. The sink is conventionally node 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// One row of a node's neighbor table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborEntry {
    pub id: NodeId,
    /// Last energy level piggybacked by this neighbor, in energy units.
    pub energy: f64,
    /// The neighbor's own hop distance to the sink.
    pub hop_count: u32,
}

impl NeighborEntry {
    pub fn new(id: NodeId, energy: f64, hop_count: u32) -> Self {
        Self { id, energy, hop_count }
    }
}
