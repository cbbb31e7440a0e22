//! Per-node protocol logic.
//!
//! Handlers here are pure state transitions on a [`NodeState`]: they update the
//! neighbor table and return an [`Action`] for the engine to carry out. The
//! engine owns the radio and the energy ledger, so packets leaving a handler
//! carry a placeholder energy field that the engine stamps at transmit time
//! with the sender's post-deduction energy.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use log::debug;

use crate::fuzzy::{self, FuzzyParams, HopDecision};
use crate::maxhop::{effective_hop, MaxHopKind, MaxHopStrategy};
use crate::{NeighborEntry, NodeId, RoutingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProtocolKind {
    /// FEAR with MaxHop recomputed from the local table at every hop.
    DFear,
    /// FEAR with a constant half-range MaxHop and hop clamping.
    SFear,
    /// Minimum-hop baseline: fewest hops, then most energy, then lowest id.
    SeerLike,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::DFear, ProtocolKind::SFear, ProtocolKind::SeerLike];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::DFear => "d-fear",
            ProtocolKind::SFear => "s-fear",
            ProtocolKind::SeerLike => "seer",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::DFear => "D-FEAR",
            ProtocolKind::SFear => "S-FEAR",
            ProtocolKind::SeerLike => "SeerLike",
        }
    }

    /// MaxHop strategy the protocol uses unless overridden.
    pub fn default_maxhop(self) -> MaxHopKind {
        match self {
            ProtocolKind::DFear => MaxHopKind::Dynamic,
            ProtocolKind::SFear | ProtocolKind::SeerLike => MaxHopKind::StaticHalfRange,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d-fear" | "dfear" => Ok(ProtocolKind::DFear),
            "s-fear" | "sfear" => Ok(ProtocolKind::SFear),
            "seer" | "seer-like" | "seerlike" => Ok(ProtocolKind::SeerLike),
            _ => Err(format!("unknown protocol `{s}` (allowed: d-fear, s-fear, seer)")),
        }
    }
}

/// Neighbor-discovery flood, rewritten at every hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloodBroadcast {
    pub source: NodeId,
    pub hop_count: u32,
    pub energy: f64,
    pub round: u32,
}

/// A data packet travelling towards the sink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPacket {
    pub origin: NodeId,
    pub sender: NodeId,
    /// Sender's energy right after paying for this transmission.
    pub sender_energy: f64,
    pub next_hop: NodeId,
    pub ttl: u32,
    pub payload_bits: u32,
    pub seq: u64,
    /// Transmissions made so far, including the one carrying it now.
    pub hops: u32,
    pub created_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Packet {
    Flood(FloodBroadcast),
    Data(DataPacket),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DropReason {
    /// No neighbor survived candidate filtering.
    NoRoute,
    TtlExpired,
    /// The source had already failed when its event fired.
    SourceFailed,
    /// The addressed next hop had failed.
    ReceiverFailed,
    /// The holder could not pay for the transmission.
    InsufficientEnergy,
}

impl DropReason {
    pub const ALL: [DropReason; 5] = [
        DropReason::NoRoute,
        DropReason::TtlExpired,
        DropReason::SourceFailed,
        DropReason::ReceiverFailed,
        DropReason::InsufficientEnergy,
    ];
}

/// What a handler asks the engine to do with a data packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Send(DataPacket),
    Deliver(DataPacket),
    Drop(DataPacket, DropReason),
}

/// Per-scenario routing parameters shared by all nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoutingContext {
    pub kind: ProtocolKind,
    pub fuzzy: FuzzyParams,
    pub strategy: MaxHopStrategy,
    pub sink: NodeId,
    pub initial_ttl: u32,
}

/// Flood that starts a discovery round at the sink.
pub fn sink_initiate(sink: NodeId, round: u32, sink_energy: f64) -> FloodBroadcast {
    FloodBroadcast { source: sink, hop_count: 0, energy: sink_energy, round }
}

#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: NodeId,
    pub position: (f64, f64),
    /// Remaining transmit budget in energy credits (one credit pays for one bit).
    pub energy: u64,
    pub own_hop: Option<u32>,
    pub is_sink: bool,
    /// Last flood round this node rebroadcast.
    pub rebroadcast_round: Option<u32>,
    pub failed: bool,
    pub failed_at: Option<f64>,
    table: BTreeMap<NodeId, NeighborEntry>,
}

impl NodeState {
    pub fn new(id: NodeId, position: (f64, f64), energy: u64, is_sink: bool) -> Self {
        Self {
            id,
            position,
            energy,
            own_hop: if is_sink { Some(0) } else { None },
            is_sink,
            rebroadcast_round: None,
            failed: false,
            failed_at: None,
            table: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> impl Iterator<Item = &NeighborEntry> {
        self.table.values()
    }

    pub fn neighbor(&self, id: NodeId) -> Option<&NeighborEntry> {
        self.table.get(&id)
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn insert_neighbor(&mut self, entry: NeighborEntry) {
        self.table.insert(entry.id, entry);
    }

    pub fn mark_failed(&mut self, now: f64) {
        if !self.failed {
            self.failed = true;
            self.failed_at = Some(now);
        }
    }

    /// Records the flood in the table and returns the rewritten packet if this
    /// node has not yet rebroadcast in the packet's round.
    pub fn handle_broadcast(&mut self, pkt: &FloodBroadcast) -> Option<FloodBroadcast> {
        if self.failed || self.is_sink {
            return None;
        }
        match self.rebroadcast_round {
            Some(current) if pkt.round < current => {
                debug!("{} ignoring stale flood round {} (current {})", self.id, pkt.round, current);
                return None;
            }
            // New round: neighbors that stay silent this round drop out.
            Some(current) if pkt.round > current => self.table.clear(),
            _ => {}
        }

        self.table
            .entry(pkt.source)
            .and_modify(|e| {
                e.hop_count = e.hop_count.min(pkt.hop_count);
                e.energy = pkt.energy;
            })
            .or_insert(NeighborEntry::new(pkt.source, pkt.energy, pkt.hop_count));

        if self.rebroadcast_round.is_some_and(|r| r >= pkt.round) {
            return None;
        }
        let own_hop = pkt.hop_count + 1;
        self.own_hop = Some(own_hop);
        self.rebroadcast_round = Some(pkt.round);
        Some(FloodBroadcast { source: self.id, hop_count: own_hop, energy: 0.0, round: pkt.round })
    }

    /// Piggyback update from an overheard data packet.
    pub fn overhear(&mut self, pkt: &DataPacket) {
        if self.failed {
            return;
        }
        if let Some(entry) = self.table.get_mut(&pkt.sender) {
            entry.energy = pkt.sender_energy;
        }
    }

    /// Chooses the next hop, never returning `exclude`.
    pub fn route_select(&self, ctx: &RoutingContext, exclude: Option<NodeId>) -> Result<HopDecision, RoutingError> {
        if self.table.is_empty() {
            return Err(RoutingError::EmptyNeighborSet);
        }
        if exclude != Some(ctx.sink) && self.table.contains_key(&ctx.sink) {
            return Ok(HopDecision::Forward(ctx.sink));
        }
        match ctx.kind {
            ProtocolKind::SeerLike => Ok(self
                .table
                .values()
                .filter(|e| e.energy > 0.0 && Some(e.id) != exclude)
                .min_by(|a, b| {
                    a.hop_count
                        .cmp(&b.hop_count)
                        .then(b.energy.total_cmp(&a.energy))
                        .then(a.id.cmp(&b.id))
                })
                .map_or(HopDecision::NoViableHop, |e| HopDecision::Forward(e.id))),
            ProtocolKind::DFear | ProtocolKind::SFear => {
                let table: Vec<NeighborEntry> = self.table.values().copied().collect();
                let max_hop = ctx.strategy.max_hop_for(&table)?;
                let clamp = ctx.strategy.cached_value().is_some();
                let graded: Vec<NeighborEntry> = table
                    .into_iter()
                    .map(|e| NeighborEntry { hop_count: effective_hop(e.hop_count, max_hop, clamp), ..e })
                    .collect();
                fuzzy::select_next_hop_excluding(&graded, &ctx.fuzzy, max_hop, exclude)
            }
        }
    }

    /// Starts a new data packet at this node.
    pub fn originate_data(&mut self, ctx: &RoutingContext, payload_bits: u32, seq: u64, now: f64) -> Action {
        let pkt = DataPacket {
            origin: self.id,
            sender: self.id,
            sender_energy: 0.0,
            next_hop: self.id,
            ttl: ctx.initial_ttl,
            payload_bits,
            seq,
            hops: 0,
            created_at: now,
        };
        if self.failed {
            return Action::Drop(pkt, DropReason::SourceFailed);
        }
        match self.route_select(ctx, None) {
            Ok(HopDecision::Forward(next_hop)) => Action::Send(DataPacket { next_hop, hops: 1, ..pkt }),
            Ok(HopDecision::NoViableHop) | Err(_) => Action::Drop(pkt, DropReason::NoRoute),
        }
    }

    /// Handles a data packet addressed to this node.
    pub fn handle_data(&mut self, ctx: &RoutingContext, pkt: &DataPacket) -> Action {
        if self.failed {
            return Action::Drop(*pkt, DropReason::ReceiverFailed);
        }
        self.overhear(pkt);
        if self.is_sink {
            return Action::Deliver(*pkt);
        }
        if pkt.ttl == 0 {
            return Action::Drop(*pkt, DropReason::TtlExpired);
        }
        match self.route_select(ctx, Some(pkt.sender)) {
            Ok(HopDecision::Forward(next_hop)) => Action::Send(DataPacket {
                sender: self.id,
                sender_energy: 0.0,
                next_hop,
                ttl: pkt.ttl - 1,
                hops: pkt.hops + 1,
                ..*pkt
            }),
            Ok(HopDecision::NoViableHop) | Err(_) => Action::Drop(*pkt, DropReason::NoRoute),
        }
    }
}
