/// Energy parameters. Energy is kept in abstract units.
///
/// Internally every budget is an integer number of credits, one credit being
/// the cost of transmitting one bit, so accounting is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub initial_energy: f64,
    pub tx_cost_per_bit: f64,
    /// Seconds between a transmission and its reception.
    pub per_hop_latency: f64,
    /// Upper bound of a uniform extra delay per reception, in seconds.
    pub jitter: f64,
}

impl Default for EnergyModel {
    /// One unit of energy, enough for 400 transmissions of 512 bits.
    fn default() -> Self {
        Self {
            initial_energy: 1.0,
            tx_cost_per_bit: 1.0 / (512.0 * 400.0),
            per_hop_latency: 0.001,
            jitter: 0.0,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.initial_energy.is_finite() && self.initial_energy > 0.0) {
            return Err(format!("initial energy must be positive, got {}", self.initial_energy));
        }
        if !(self.tx_cost_per_bit.is_finite() && self.tx_cost_per_bit > 0.0) {
            return Err(format!("tx cost per bit must be positive, got {}", self.tx_cost_per_bit));
        }
        if !(self.per_hop_latency.is_finite() && self.per_hop_latency > 0.0) {
            return Err(format!("per-hop latency must be positive, got {}", self.per_hop_latency));
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(format!("jitter must be non-negative, got {}", self.jitter));
        }
        if self.initial_credits() == 0 {
            return Err("initial energy does not cover a single bit".into());
        }
        Ok(())
    }

    /// Whole credits a fresh node starts with.
    pub fn initial_credits(&self) -> u64 {
        (self.initial_energy / self.tx_cost_per_bit + 1e-6).floor() as u64
    }

    pub fn credits_for_energy(&self, energy: f64) -> u64 {
        (energy / self.tx_cost_per_bit + 1e-6).floor() as u64
    }

    pub fn to_units(&self, credits: u64) -> f64 {
        credits as f64 * self.tx_cost_per_bit
    }

    /// Energy of a fresh node, in units.
    pub fn max_energy(&self) -> f64 {
        self.to_units(self.initial_credits())
    }
}

/// Running totals over all battery-powered nodes, in credits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnergyAudit {
    pub initial: u64,
    pub remaining: u64,
    pub deducted: u64,
}

impl EnergyAudit {
    pub fn is_balanced(&self) -> bool {
        self.initial == self.remaining + self.deducted
    }
}
