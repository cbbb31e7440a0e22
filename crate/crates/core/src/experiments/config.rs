//! Scenario configuration and its `KEY value...` file format.
//!
//! Keys follow the simulation-settings table (`SIMULATION-TIME`,
//! `TERRAIN-DIMENSIONS`, `NUMBER-OF-NODES`, `NODE-PLACEMENT`, ...), plus a few
//! simulator-specific keys. Radio and MAC keys such as `RADIO-TX-POWER` are
//! accepted for compatibility but have no effect: the medium is an ideal unit
//! disk.

use std::collections::HashSet;
use std::str::FromStr;

use crate::engine::{EnergyModel, Placement, SinkPlacement};
use crate::maxhop::{static_half_range, MaxHopKind, TerrainConfig};
use crate::protocol::ProtocolKind;

use super::ConfigError;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub simulation_time: f64,
    pub terrain: TerrainConfig,
    /// All nodes, the sink included.
    pub node_count: usize,
    pub placement: Placement,
    pub sink_placement: SinkPlacement,
    pub protocol: ProtocolKind,
    /// Overrides the protocol's own MaxHop strategy.
    pub maxhop: Option<MaxHopKind>,
    pub source_count: usize,
    pub payload_bits: u32,
    pub flood_bits: u32,
    pub energy: EnergyModel,
    pub seed: u64,
    pub refresh_period: Option<f64>,
    pub strict_gate: bool,
    /// Packet TTL is this multiple of the half-range MaxHop estimate.
    pub ttl_factor: u32,
    /// Sources fire uniformly over this fraction of the simulation time.
    pub activation_window: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            simulation_time: 1200.0,
            terrain: TerrainConfig { x_extent: 1000.0, y_extent: 1000.0, radio_range: 250.0 },
            node_count: 200,
            placement: Placement::Random,
            sink_placement: SinkPlacement::Center,
            protocol: ProtocolKind::DFear,
            maxhop: None,
            source_count: 100,
            payload_bits: 512,
            flood_bits: 64,
            energy: EnergyModel::default(),
            seed: 1,
            refresh_period: None,
            strict_gate: false,
            ttl_factor: 2,
            activation_window: 0.8,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.simulation_time.is_finite() && self.simulation_time > 0.0) {
            return invalid(format!("simulation time must be positive, got {}", self.simulation_time));
        }
        self.terrain.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.node_count < 3 {
            return invalid(format!("need at least 3 nodes, got {}", self.node_count));
        }
        if self.source_count > self.node_count - 1 {
            return invalid(format!(
                "{} sources requested but only {} non-sink nodes exist",
                self.source_count,
                self.node_count - 1
            ));
        }
        if self.payload_bits == 0 || self.flood_bits == 0 {
            return invalid("packet sizes must be positive".into());
        }
        self.energy.validate().map_err(ConfigError::Invalid)?;
        if let Some(p) = self.refresh_period {
            if !(p.is_finite() && p > 0.0) {
                return invalid(format!("refresh period must be positive, got {p}"));
            }
        }
        if self.ttl_factor == 0 {
            return invalid("TTL factor must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.activation_window) {
            return invalid(format!("activation window must be in [0, 1], got {}", self.activation_window));
        }
        Ok(())
    }

    pub fn maxhop_kind(&self) -> MaxHopKind {
        self.maxhop.unwrap_or(self.protocol.default_maxhop())
    }

    pub fn initial_ttl(&self) -> u32 {
        self.ttl_factor * static_half_range(&self.terrain)
    }
}

const REQUIRED: [&str; 4] = ["SIMULATION-TIME", "TERRAIN-DIMENSIONS", "NUMBER-OF-NODES", "NODE-PLACEMENT"];

/// Settings-table keys that describe the radio or MAC layer. They are
/// accepted and ignored.
const INFORMATIONAL: [&str; 9] = [
    "TEMPERATURE",
    "RADIO-BANDWIDTH",
    "RADIO-TX-POWER",
    "ENERGY-TRANSMIT-LEVEL",
    "MAC-PROTOCOL",
    "NETWORK-PROTOCOL",
    "PROPAGATION-PATHLOSS",
    "RADIO-TYPE",
    "RADIO-RX-TYPE",
];

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    key: Token<'a>,
    values: Vec<Token<'a>>,
}

impl Line<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> ConfigError {
        ConfigError::Parse { line: self.number, column, message: message.into() }
    }

    fn arity(&self, n: usize) -> Result<(), ConfigError> {
        if self.values.len() == n {
            return Ok(());
        }
        let column = self.values.get(n).map_or(self.key.column + self.key.text.len(), |t| t.column);
        Err(self.err(column, format!("{} expects {n} value(s), got {}", self.key.text, self.values.len())))
    }

    fn single(&self) -> Result<&Token<'_>, ConfigError> {
        self.arity(1)?;
        Ok(&self.values[0])
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T, ConfigError> {
        let tok = self.single()?;
        tok.text
            .parse()
            .map_err(|_| self.err(tok.column, format!("{} expects {what}, got `{}`", self.key.text, tok.text)))
    }

    fn parse_with<T>(&self, f: impl FnOnce(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        let tok = self.single()?;
        f(tok.text).map_err(|m| self.err(tok.column, m))
    }

    /// A number with an optional trailing unit token, e.g. `1200 SECOND`.
    fn seconds(&self) -> Result<f64, ConfigError> {
        if self.values.len() == 2 {
            let unit = &self.values[1];
            if !matches!(unit.text.to_ascii_uppercase().as_str(), "S" | "SEC" | "SECOND" | "SECONDS") {
                return Err(self.err(unit.column, format!("unknown time unit `{}`", unit.text)));
            }
            let tok = &self.values[0];
            return tok.text.parse().map_err(|_| self.err(tok.column, format!("expected seconds, got `{}`", tok.text)));
        }
        self.parse("seconds")
    }
}

fn tokenize(raw: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                tokens.push(Token { text: &raw[s..i], column: raw[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    tokens
}

fn parse_flag(s: &str) -> Result<bool, String> {
    match s.to_ascii_uppercase().as_str() {
        "TRUE" | "YES" | "ON" | "1" => Ok(true),
        "FALSE" | "NO" | "OFF" | "0" => Ok(false),
        _ => Err(format!("expected a flag (TRUE/FALSE), got `{s}`")),
    }
}

fn parse_maxhop(s: &str) -> Result<MaxHopKind, String> {
    match s.to_ascii_uppercase().as_str() {
        "DYNAMIC" => Ok(MaxHopKind::Dynamic),
        "DIAGONAL" => Ok(MaxHopKind::StaticDiagonal),
        "HALF-RANGE" => Ok(MaxHopKind::StaticHalfRange),
        "NODE-BOUND" => Ok(MaxHopKind::StaticNodeBound),
        _ => Err(format!("unknown MaxHop strategy `{s}` (allowed: DYNAMIC, DIAGONAL, HALF-RANGE, NODE-BOUND)")),
    }
}

/// Accepts `1000 1000`, `1000*1000`, `1000x1000` and `1000m*1000m`.
fn parse_dimensions(line: &Line<'_>) -> Result<(f64, f64), ConfigError> {
    let parts: Vec<(&str, usize)> = match line.values.len() {
        1 => {
            let tok = &line.values[0];
            let sep = tok.text.find(['*', 'x', 'X']).ok_or_else(|| {
                line.err(tok.column, format!("expected `X Y` dimensions, got `{}`", tok.text))
            })?;
            vec![(&tok.text[..sep], tok.column), (&tok.text[sep + 1..], tok.column + sep + 1)]
        }
        2 => line.values.iter().map(|t| (t.text, t.column)).collect(),
        _ => return Err(line.err(line.key.column, "TERRAIN-DIMENSIONS expects two values")),
    };
    let mut out = [0.0; 2];
    for (slot, (text, column)) in out.iter_mut().zip(parts) {
        let trimmed = text.trim_end_matches(['m', 'M']);
        *slot = trimmed
            .parse()
            .map_err(|_| line.err(column, format!("expected a length in meters, got `{text}`")))?;
    }
    Ok((out[0], out[1]))
}

/// Parses a scenario file. Unset optional keys keep their defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut dims: Option<(f64, f64)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        let key = tokens.remove(0);
        let line = Line { number: idx + 1, key, values: tokens };
        let name = line.key.text.to_ascii_uppercase();
        if !seen.insert(name.clone()) {
            return Err(line.err(line.key.column, format!("duplicate key {name}")));
        }

        match name.as_str() {
            "SIMULATION-TIME" => cfg.simulation_time = line.seconds()?,
            "TERRAIN-DIMENSIONS" => dims = Some(parse_dimensions(&line)?),
            "NUMBER-OF-NODES" => cfg.node_count = line.parse("a node count")?,
            "NODE-PLACEMENT" => cfg.placement = line.parse_with(Placement::from_str)?,
            "NUMBER-OF-EVENTS" | "NUMBER-OF-SOURCES" => cfg.source_count = line.parse("a source count")?,
            "MOBILITY" => {
                let tok = line.single()?;
                if !tok.text.eq_ignore_ascii_case("NONE") {
                    return Err(line.err(tok.column, "only MOBILITY NONE is supported"));
                }
            }
            "RADIO-RANGE" => cfg.terrain.radio_range = line.parse("a range in meters")?,
            "PROTOCOL" => cfg.protocol = line.parse_with(ProtocolKind::from_str)?,
            "SEED" => cfg.seed = line.parse("an unsigned integer")?,
            "INITIAL-ENERGY" => cfg.energy.initial_energy = line.parse("an energy value")?,
            "TX-COST-PER-BIT" => cfg.energy.tx_cost_per_bit = line.parse("an energy value")?,
            "PER-HOP-LATENCY" => cfg.energy.per_hop_latency = line.seconds()?,
            "JITTER" => cfg.energy.jitter = line.seconds()?,
            "TTL-FACTOR" => cfg.ttl_factor = line.parse("a positive integer")?,
            "REFRESH-PERIOD" => {
                let tok = line.single()?;
                cfg.refresh_period = if tok.text.eq_ignore_ascii_case("NONE") {
                    None
                } else {
                    Some(line.parse("seconds or NONE")?)
                };
            }
            "STRICT-GATE" => cfg.strict_gate = line.parse_with(parse_flag)?,
            "PAYLOAD-BITS" => cfg.payload_bits = line.parse("a bit count")?,
            "FLOOD-BITS" => cfg.flood_bits = line.parse("a bit count")?,
            "SINK-PLACEMENT" => cfg.sink_placement = line.parse_with(SinkPlacement::from_str)?,
            "ACTIVATION-WINDOW" => cfg.activation_window = line.parse("a fraction")?,
            "MAXHOP-STRATEGY" => cfg.maxhop = Some(line.parse_with(parse_maxhop)?),
            k if INFORMATIONAL.contains(&k) => {
                if line.values.is_empty() {
                    return Err(line.err(line.key.column, format!("{k} expects a value")));
                }
            }
            _ => return Err(line.err(line.key.column, format!("unknown key {}", line.key.text))),
        }
    }

    if let Some(missing) = REQUIRED.iter().find(|k| !seen.contains(**k)) {
        return Err(ConfigError::MissingKey(missing));
    }
    if let Some((x, y)) = dims {
        cfg.terrain.x_extent = x;
        cfg.terrain.y_extent = y;
    }
    cfg.validate()?;
    Ok(cfg)
}
