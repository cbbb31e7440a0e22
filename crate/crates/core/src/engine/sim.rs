use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EnergyAudit, EnergyModel, EngineError, EventKind, EventQueue, Topology};
use crate::fuzzy::FuzzyParams;
use crate::maxhop::MaxHopStrategy;
use crate::protocol::{sink_initiate, Action, DataPacket, DropReason, NodeState, Packet, ProtocolKind, RoutingContext};
use crate::NodeId;

const SOURCE_STREAM: u64 = 1;
const JITTER_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub protocol: ProtocolKind,
    pub fuzzy: FuzzyParams,
    pub strategy: MaxHopStrategy,
    pub energy: EnergyModel,
    pub payload_bits: u32,
    pub flood_bits: u32,
    pub initial_ttl: u32,
    /// Interval between sink discovery rounds; `None` floods once at t = 0.
    pub refresh_period: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub originated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub drops_by_reason: BTreeMap<DropReason, u64>,
    /// Sum of transmissions over delivered packets.
    pub delivered_hops: u64,
    /// Most transmissions any terminated packet made.
    pub max_packet_hops: u32,
    /// Packets that made more than `initial_ttl + 1` transmissions.
    pub ttl_overruns: u64,
    pub total_latency: f64,
    pub data_transmissions: u64,
    pub flood_transmissions: u64,
    pub events_processed: u64,
    /// Attempts to schedule an event before the current time.
    pub causality_violations: u64,
    /// The queue drained before the requested end time.
    pub ended_early: bool,
    pub end_time: f64,
    /// FNV-1a digest over every processed event.
    pub trace_digest: u64,
}

impl RunStats {
    pub fn in_flight(&self) -> u64 {
        self.originated - self.delivered - self.dropped
    }

    pub fn avg_path_hops(&self) -> f64 {
        if self.delivered == 0 {
            0.0
        } else {
            self.delivered_hops as f64 / self.delivered as f64
        }
    }
}

pub struct Simulation {
    config: EngineConfig,
    ctx: RoutingContext,
    topology: Topology,
    nodes: Vec<NodeState>,
    data_tx: Vec<u32>,
    queue: EventQueue,
    now: f64,
    jitter_rng: ChaCha8Rng,
    audit: EnergyAudit,
    stats: RunStats,
    next_packet: u64,
    started: bool,
}

impl Simulation {
    /// Creates the nodes and queues the initial sink flood at t = 0.
    pub fn new(topology: Topology, config: EngineConfig) -> Result<Self, EngineError> {
        config.energy.validate().map_err(EngineError::InvalidEnergy)?;
        if topology.len() < 3 {
            return Err(EngineError::TooFewNodes(topology.len()));
        }
        let credits = config.energy.initial_credits();
        let sink = topology.sink();
        let nodes: Vec<NodeState> = topology
            .positions()
            .iter()
            .enumerate()
            .map(|(i, &pos)| {
                let id = NodeId(i as u32);
                let mut node = NodeState::new(id, pos, credits, id == sink);
                if id != sink && credits < u64::from(config.payload_bits) {
                    node.mark_failed(0.0);
                }
                node
            })
            .collect();
        let batteries = (nodes.len() - 1) as u64;
        let mut jitter_rng = ChaCha8Rng::seed_from_u64(config.seed);
        jitter_rng.set_stream(JITTER_STREAM);
        let mut sim = Self {
            ctx: RoutingContext {
                kind: config.protocol,
                fuzzy: config.fuzzy,
                strategy: config.strategy,
                sink,
                initial_ttl: config.initial_ttl,
            },
            data_tx: vec![0; nodes.len()],
            nodes,
            topology,
            queue: EventQueue::new(),
            now: 0.0,
            jitter_rng,
            audit: EnergyAudit { initial: credits * batteries, remaining: credits * batteries, deducted: 0 },
            stats: RunStats { trace_digest: FNV_OFFSET, ..RunStats::default() },
            next_packet: 0,
            started: false,
            config,
        };
        sim.schedule(0.0, EventKind::SinkFlood { round: 0 });
        Ok(sim)
    }

    /// Overrides one node's starting budget, in credits.
    pub fn set_initial_energy(&mut self, node: NodeId, credits: u64) -> Result<(), EngineError> {
        if self.started {
            return Err(EngineError::AlreadyStarted);
        }
        let state = &mut self.nodes[node.index()];
        if !state.is_sink {
            self.audit.initial = self.audit.initial - state.energy + credits;
            self.audit.remaining = self.audit.remaining - state.energy + credits;
        }
        state.energy = credits;
        state.failed = false;
        state.failed_at = None;
        if !state.is_sink && credits < u64::from(self.config.payload_bits) {
            state.mark_failed(0.0);
        }
        Ok(())
    }

    /// Queues one data packet to be originated by `node` at `time`.
    pub fn schedule_activation(&mut self, node: NodeId, time: f64) {
        let seq = self.next_packet;
        self.next_packet += 1;
        self.schedule(time, EventKind::SourceActivation { node, seq });
    }

    /// Picks `count` distinct non-sink sources and activation times uniform over
    /// `[0, window)`, all from a generator seeded with `seed`.
    pub fn schedule_sources(&mut self, count: usize, seed: u64, window: f64) -> Result<Vec<(NodeId, f64)>, EngineError> {
        let candidates: Vec<NodeId> = (0..self.nodes.len() as u32)
            .map(NodeId)
            .filter(|&id| id != self.topology.sink())
            .collect();
        if count > candidates.len() {
            return Err(EngineError::TooManySources { requested: count, available: candidates.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SOURCE_STREAM);
        let picks = index::sample(&mut rng, candidates.len(), count);
        let schedule: Vec<(NodeId, f64)> = picks
            .iter()
            .map(|i| {
                let t = if window > 0.0 { rng.gen_range(0.0..window) } else { 0.0 };
                (candidates[i], t)
            })
            .collect();
        for &(node, t) in &schedule {
            self.schedule_activation(node, t);
        }
        Ok(schedule)
    }

    /// Processes events up to `until` (inclusive).
    pub fn run(&mut self, until: f64) -> &RunStats {
        if !self.started {
            self.started = true;
            if let Some(period) = self.config.refresh_period.filter(|p| *p > 0.0) {
                let mut round = 1u32;
                while f64::from(round) * period < until {
                    self.schedule(f64::from(round) * period, EventKind::SinkFlood { round });
                    round += 1;
                }
            }
            self.schedule(until, EventKind::SimEnd);
        }
        loop {
            match self.queue.peek_time() {
                None => {
                    self.stats.ended_early = true;
                    break;
                }
                Some(t) if t > until => break,
                Some(_) => {}
            }
            let Some(event) = self.queue.pop() else { break };
            self.now = event.time;
            self.stats.events_processed += 1;
            self.digest(event.time, event.seq, &event.kind);
            match event.kind {
                EventKind::SimEnd => break,
                EventKind::SinkFlood { round } => {
                    let sink = self.topology.sink();
                    let pkt = sink_initiate(sink, round, self.config.energy.max_energy());
                    // The sink is never short of energy.
                    let _ = self.transmit(sink, Packet::Flood(pkt));
                }
                EventKind::SourceActivation { node, seq } => {
                    self.stats.originated += 1;
                    let action =
                        self.nodes[node.index()].originate_data(&self.ctx, self.config.payload_bits, seq, self.now);
                    self.apply(node, action);
                }
                EventKind::PacketArrival { target, packet } => self.arrive(target, packet),
            }
        }
        self.stats.end_time = self.now;
        &self.stats
    }

    fn arrive(&mut self, target: NodeId, packet: Packet) {
        match packet {
            Packet::Flood(b) => {
                if let Some(out) = self.nodes[target.index()].handle_broadcast(&b) {
                    // A node that cannot pay for its rebroadcast stays silent.
                    let _ = self.transmit(target, Packet::Flood(out));
                }
            }
            Packet::Data(d) if d.next_hop == target => {
                let action = self.nodes[target.index()].handle_data(&self.ctx, &d);
                self.apply(target, action);
            }
            Packet::Data(d) => self.nodes[target.index()].overhear(&d),
        }
    }

    fn apply(&mut self, actor: NodeId, action: Action) {
        match action {
            Action::Send(d) => {
                if self.transmit(actor, Packet::Data(d)).is_err() {
                    self.finish(&d, Some(DropReason::InsufficientEnergy));
                }
            }
            Action::Deliver(d) => self.finish(&d, None),
            Action::Drop(d, reason) => self.finish(&d, Some(reason)),
        }
    }

    fn finish(&mut self, d: &DataPacket, drop: Option<DropReason>) {
        match drop {
            None => {
                self.stats.delivered += 1;
                self.stats.delivered_hops += u64::from(d.hops);
                self.stats.total_latency += self.now - d.created_at;
            }
            Some(reason) => {
                self.stats.dropped += 1;
                *self.stats.drops_by_reason.entry(reason).or_default() += 1;
            }
        }
        self.stats.max_packet_hops = self.stats.max_packet_hops.max(d.hops);
        if d.hops > self.config.initial_ttl + 1 {
            self.stats.ttl_overruns += 1;
        }
    }

    /// Deducts the packet's cost from `sender`, stamps its post-deduction energy
    /// on the packet and schedules one arrival per neighbor.
    pub fn transmit(&mut self, sender: NodeId, packet: Packet) -> Result<usize, EngineError> {
        let bits = u64::from(match packet {
            Packet::Flood(_) => self.config.flood_bits,
            Packet::Data(d) => d.payload_bits,
        });
        let one_data_tx = u64::from(self.config.payload_bits);
        let max_energy = self.config.energy.max_energy();
        let node = &mut self.nodes[sender.index()];
        if node.failed {
            return Err(EngineError::FailedBeforeTransmit(sender));
        }
        let stamped = if node.is_sink {
            max_energy
        } else {
            if node.energy < bits {
                node.mark_failed(self.now);
                return Err(EngineError::FailedBeforeTransmit(sender));
            }
            node.energy -= bits;
            self.audit.remaining -= bits;
            self.audit.deducted += bits;
            let left = node.energy;
            if left < one_data_tx {
                node.mark_failed(self.now);
            }
            self.config.energy.to_units(left)
        };

        let packet = match packet {
            Packet::Flood(b) => {
                self.stats.flood_transmissions += 1;
                Packet::Flood(crate::protocol::FloodBroadcast { energy: stamped, ..b })
            }
            Packet::Data(d) => {
                self.stats.data_transmissions += 1;
                self.data_tx[sender.index()] += 1;
                Packet::Data(DataPacket { sender_energy: stamped, ..d })
            }
        };

        let latency = self.config.energy.per_hop_latency;
        let jitter = self.config.energy.jitter;
        let fanout = self.topology.degree(sender);
        for i in 0..fanout {
            let target = self.topology.neighbors(sender)[i];
            let extra = if jitter > 0.0 { self.jitter_rng.gen_range(0.0..jitter) } else { 0.0 };
            self.schedule(self.now + latency + extra, EventKind::PacketArrival { target, packet });
        }
        Ok(fanout)
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        if time < self.now {
            self.stats.causality_violations += 1;
            debug_assert!(false, "event scheduled in the past: {time} < {}", self.now);
        }
        self.queue.push(time, kind);
    }

    fn digest(&mut self, time: f64, seq: u64, kind: &EventKind) {
        let (tag, node) = match kind {
            EventKind::PacketArrival { target, packet: Packet::Flood(_) } => (1u64, target.0),
            EventKind::PacketArrival { target, packet: Packet::Data(_) } => (2, target.0),
            EventKind::SourceActivation { node, .. } => (3, node.0),
            EventKind::SinkFlood { round } => (4, *round),
            EventKind::SimEnd => (5, 0),
        };
        let mut h = self.stats.trace_digest;
        for word in [time.to_bits(), seq, tag, u64::from(node)] {
            for byte in word.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(FNV_PRIME);
            }
        }
        self.stats.trace_digest = h;
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn context(&self) -> &RoutingContext {
        &self.ctx
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[id.index()]
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn audit(&self) -> EnergyAudit {
        self.audit
    }

    /// Data packets `node` has transmitted (originated or relayed).
    pub fn data_transmissions_of(&self, node: NodeId) -> u32 {
        self.data_tx[node.index()]
    }

    /// Remaining energy of `node` in energy units.
    pub fn energy_of(&self, node: NodeId) -> f64 {
        self.config.energy.to_units(self.nodes[node.index()].energy)
    }

    pub fn pending_events(&self) -> usize {
        self.queue.len()
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxhop::{MaxHopKind, TerrainConfig};

    fn config(protocol: ProtocolKind) -> EngineConfig {
        let terrain = TerrainConfig::new(1000.0, 1000.0, 250.0).unwrap();
        let energy = EnergyModel { initial_energy: 1.0, tx_cost_per_bit: 1.0 / 2048.0, ..EnergyModel::default() };
        EngineConfig {
            protocol,
            fuzzy: FuzzyParams::for_max_energy(energy.max_energy()).unwrap(),
            strategy: MaxHopStrategy::resolve(MaxHopKind::Dynamic, &terrain, 10).unwrap(),
            energy,
            payload_bits: 512,
            flood_bits: 64,
            initial_ttl: 24,
            refresh_period: None,
            seed: 3,
        }
    }

    /// sink(0) - relay(1) - source(2), 200 m apart.
    fn chain() -> Topology {
        Topology::from_positions(vec![(0.0, 0.0), (200.0, 0.0), (400.0, 0.0)], 250.0)
    }

    #[test]
    fn flood_only_costs_one_broadcast_each() {
        let mut sim = Simulation::new(chain(), config(ProtocolKind::DFear)).unwrap();
        sim.run(10.0);
        assert_eq!(sim.stats().flood_transmissions, 3);
        assert_eq!(sim.node(NodeId(1)).energy, 2048 - 64);
        assert_eq!(sim.node(NodeId(2)).energy, 2048 - 64);
        assert_eq!(sim.node(NodeId(2)).own_hop, Some(2));
        assert!(sim.audit().is_balanced());
    }

    #[test]
    fn chain_delivers_through_relay() {
        let mut sim = Simulation::new(chain(), config(ProtocolKind::SeerLike)).unwrap();
        sim.schedule_activation(NodeId(2), 1.0);
        let stats = sim.run(10.0).clone();
        assert_eq!(stats.delivered, 1);
        assert_eq!(stats.delivered_hops, 2);
        assert_eq!(sim.data_transmissions_of(NodeId(1)), 1);
        assert_eq!(sim.node(NodeId(1)).energy, 2048 - 64 - 512);
        // Source and sink both overheard the relay's piggybacked energy.
        let expected = sim.energy_of(NodeId(1));
        assert_eq!(sim.node(NodeId(2)).neighbor(NodeId(1)).unwrap().energy, expected);
    }

    #[test]
    fn transmit_fans_out_to_every_neighbor() {
        let topo = Topology::from_positions(vec![(0.0, 0.0), (100.0, 0.0), (0.0, 100.0), (-100.0, 0.0)], 150.0);
        let mut sim = Simulation::new(topo, config(ProtocolKind::DFear)).unwrap();
        sim.queue = EventQueue::new();
        let pkt = sink_initiate(NodeId(0), 0, 1.0);
        assert_eq!(sim.transmit(NodeId(0), Packet::Flood(pkt)), Ok(3));
        let mut times = Vec::new();
        while let Some(e) = sim.queue.pop() {
            times.push(e.time);
        }
        assert_eq!(times, vec![0.001; 3]);
    }

    #[test]
    fn exact_budget_transmits_then_fails() {
        let mut sim = Simulation::new(chain(), config(ProtocolKind::DFear)).unwrap();
        sim.set_initial_energy(NodeId(2), 512).unwrap();
        let d = DataPacket {
            origin: NodeId(2),
            sender: NodeId(2),
            sender_energy: 0.0,
            next_hop: NodeId(1),
            ttl: 3,
            payload_bits: 512,
            seq: 0,
            hops: 1,
            created_at: 0.0,
        };
        assert_eq!(sim.transmit(NodeId(2), Packet::Data(d)), Ok(1));
        assert_eq!(sim.node(NodeId(2)).energy, 0);
        assert!(sim.node(NodeId(2)).failed);
        assert_eq!(sim.transmit(NodeId(2), Packet::Data(d)), Err(EngineError::FailedBeforeTransmit(NodeId(2))));
        assert!(sim.audit().is_balanced());
    }

    #[test]
    fn too_many_sources() {
        let mut sim = Simulation::new(chain(), config(ProtocolKind::DFear)).unwrap();
        assert_eq!(
            sim.schedule_sources(3, 1, 10.0),
            Err(EngineError::TooManySources { requested: 3, available: 2 })
        );
        assert!(sim.schedule_sources(0, 1, 10.0).unwrap().is_empty());
    }

    #[test]
    fn empty_queue_ends_early_only_after_sim_end_is_consumed() {
        let mut sim = Simulation::new(chain(), config(ProtocolKind::DFear)).unwrap();
        let stats = sim.run(5.0);
        assert!(!stats.ended_early);
        assert_eq!(stats.end_time, 5.0);
        let stats = sim.run(6.0);
        assert!(stats.ended_early);
    }
}
