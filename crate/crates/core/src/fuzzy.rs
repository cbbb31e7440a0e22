//! Fuzzy next-hop decision.
//!
//! Two fuzzy sets are built over a node's neighbor table: one grading the
//! neighbors' energy levels (`λ·e`), one grading their hop distance to the sink
//! (`1 - h/MaxHop`). Neighbors whose energy grade falls below the table mean
//! are cut away, the survivors are scored by the product of both grades, and
//! the highest score wins.
//!
//! Floating-point comparisons against the threshold and between scores use
//! [`TIE_EPSILON`], so values that are equal in exact arithmetic behave as
//! equal here regardless of summation order.

use crate::{NeighborEntry, NodeId, RoutingError};

/// Absolute tolerance for threshold and score comparisons. Grades and scores
/// live in `[0, 1]`.
pub const TIE_EPSILON: f64 = 1e-9;

/// A degree of membership, always inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct MembershipGrade(f64);

impl MembershipGrade {
    /// Clamps `value` into the unit interval. NaN maps to 0.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            return Self(0.0);
        }
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// How the decision score treats a neighbor whose energy grade sits exactly
/// on the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gate {
    /// `λe ≥ α` keeps the neighbor, same as the alpha-cut itself.
    #[default]
    Inclusive,
    /// `λe > α` keeps the neighbor; a table of equal energies scores all zero.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyParams {
    lambda: f64,
    gate: Gate,
}

impl FuzzyParams {
    pub fn new(lambda: f64) -> Result<Self, RoutingError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(RoutingError::InvalidLambda(lambda));
        }
        Ok(Self { lambda, gate: Gate::Inclusive })
    }

    /// `λ = 1 / e_max`, so a node at full energy grades exactly 1.
    pub fn for_max_energy(e_max: f64) -> Result<Self, RoutingError> {
        Self::new(1.0 / e_max)
    }

    pub fn with_gate(mut self, gate: Gate) -> Self {
        self.gate = gate;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gate(&self) -> Gate {
        self.gate
    }

    /// Whether `λ·e_max` stays inside the unit interval.
    pub fn fits_energy(&self, e_max: f64) -> bool {
        self.lambda * e_max <= 1.0 + TIE_EPSILON
    }
}

/// Neighbors that survived the alpha-cut, with the threshold that cut them.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub alpha: f64,
    pub entries: Vec<NeighborEntry>,
}

impl CandidateSet {
    pub fn contains(&self, id: NodeId) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionScore {
    pub neighbor: NodeId,
    pub score: f64,
}

/// Outcome of next-hop selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopDecision {
    Forward(NodeId),
    NoViableHop,
}

impl HopDecision {
    pub fn next_hop(self) -> Option<NodeId> {
        match self {
            HopDecision::Forward(id) => Some(id),
            HopDecision::NoViableHop => None,
        }
    }
}

pub fn energy_membership(energy: f64, params: &FuzzyParams) -> MembershipGrade {
    MembershipGrade::new(params.lambda * energy)
}

/// Mean of the grades. Bounded to `[min, max]` of its input so rounding in the
/// sum can never push the threshold past the best grade.
pub fn energy_threshold(grades: &[MembershipGrade]) -> Result<f64, RoutingError> {
    if grades.is_empty() {
        return Err(RoutingError::EmptyNeighborSet);
    }
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for g in grades {
        lo = lo.min(g.value());
        hi = hi.max(g.value());
        sum += g.value();
    }
    Ok((sum / grades.len() as f64).clamp(lo, hi))
}

/// Threshold over the entries that still have energy, `None` if there are none.
fn live_threshold(table: &[NeighborEntry], params: &FuzzyParams) -> Option<f64> {
    let grades: Vec<MembershipGrade> = table
        .iter()
        .filter(|e| e.energy > 0.0)
        .map(|e| energy_membership(e.energy, params))
        .collect();
    energy_threshold(&grades).ok()
}

/// Keeps the neighbors whose energy grade is at least the mean grade.
///
/// Entries with no energy left are dropped before the mean is taken. A table
/// made only of such entries yields an empty set with `alpha = 0`.
pub fn alpha_cut(table: &[NeighborEntry], params: &FuzzyParams) -> Result<CandidateSet, RoutingError> {
    if table.is_empty() {
        return Err(RoutingError::EmptyNeighborSet);
    }
    let Some(alpha) = live_threshold(table, params) else {
        return Ok(CandidateSet { alpha: 0.0, entries: Vec::new() });
    };
    let entries = table
        .iter()
        .copied()
        .filter(|e| e.energy > 0.0 && energy_membership(e.energy, params).value() >= alpha - TIE_EPSILON)
        .collect();
    Ok(CandidateSet { alpha, entries })
}

pub fn hop_membership(hop_count: u32, max_hop: u32) -> Result<MembershipGrade, RoutingError> {
    if max_hop == 0 {
        return Err(RoutingError::InvalidMaxHop(max_hop));
    }
    Ok(MembershipGrade::new(1.0 - f64::from(hop_count) / f64::from(max_hop)))
}

/// One score per table entry, in table order. Entries outside the cut (or
/// failing the strict gate) score exactly 0.
pub fn decision_scores(
    table: &[NeighborEntry],
    params: &FuzzyParams,
    max_hop: u32,
) -> Result<Vec<DecisionScore>, RoutingError> {
    if max_hop == 0 {
        return Err(RoutingError::InvalidMaxHop(max_hop));
    }
    if table.is_empty() {
        return Err(RoutingError::EmptyNeighborSet);
    }
    let alpha = live_threshold(table, params).unwrap_or(0.0);
    table
        .iter()
        .map(|entry| {
            let grade = energy_membership(entry.energy, params).value();
            let retained = entry.energy > 0.0
                && match params.gate {
                    Gate::Inclusive => grade >= alpha - TIE_EPSILON,
                    Gate::Strict => grade > alpha + TIE_EPSILON,
                };
            let score = if retained {
                grade * hop_membership(entry.hop_count, max_hop)?.value()
            } else {
                0.0
            };
            Ok(DecisionScore { neighbor: entry.id, score })
        })
        .collect()
}

/// Highest positive score, ignoring `exclude`. Scores within [`TIE_EPSILON`]
/// of each other tie, and ties go to the lowest node id.
pub fn argmax_score(scores: &[DecisionScore], exclude: Option<NodeId>) -> HopDecision {
    let mut best: Option<DecisionScore> = None;
    for s in scores {
        if s.score <= 0.0 || Some(s.neighbor) == exclude {
            continue;
        }
        best = match best {
            None => Some(*s),
            Some(b) if s.score > b.score + TIE_EPSILON => Some(*s),
            Some(b) if (s.score - b.score).abs() <= TIE_EPSILON && s.neighbor < b.neighbor => Some(*s),
            keep => keep,
        };
    }
    best.map_or(HopDecision::NoViableHop, |b| HopDecision::Forward(b.neighbor))
}

pub fn select_next_hop(
    table: &[NeighborEntry],
    params: &FuzzyParams,
    max_hop: u32,
) -> Result<HopDecision, RoutingError> {
    select_next_hop_excluding(table, params, max_hop, None)
}

/// Like [`select_next_hop`], but `exclude` is removed after the cut: it still
/// contributes to the threshold, it just cannot be chosen.
pub fn select_next_hop_excluding(
    table: &[NeighborEntry],
    params: &FuzzyParams,
    max_hop: u32,
    exclude: Option<NodeId>,
) -> Result<HopDecision, RoutingError> {
    let scores = decision_scores(table, params, max_hop)?;
    Ok(argmax_score(&scores, exclude))
}
