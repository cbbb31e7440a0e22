//! Independent re-evaluations of the fuzzy decision rule and helpers shared by
//! the integration tests.
#![allow(dead_code)]

use fear_sim::{NeighborEntry, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

/// Energy scale for integer tables: energies are whole numbers in `0..=E_MAX`.
pub const E_MAX: u64 = 1000;

/// A neighbor with an integer energy, so the oracle can decide every
/// comparison exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntEntry {
    pub id: u32,
    pub energy: u64,
    pub hop: u32,
}

impl IntEntry {
    pub fn to_entry(self) -> NeighborEntry {
        NeighborEntry::new(NodeId(self.id), self.energy as f64, self.hop)
    }
}

/// Random table of 1..=20 entries with distinct ids in shuffled order,
/// energies in `0..=E_MAX` and hops in `0..=30`. A quarter of the tables draw
/// energies from a handful of levels so that exact ties are common.
pub fn random_table<R: Rng>(rng: &mut R) -> Vec<IntEntry> {
    let len = rng.gen_range(1..=20);
    let mut ids: Vec<u32> = (0..100).collect();
    ids.shuffle(rng);
    let coarse = rng.gen_bool(0.25);
    ids.truncate(len);
    ids.into_iter()
        .map(|id| {
            let energy = if coarse {
                [0, 250, 500, 750, 1000][rng.gen_range(0..5)]
            } else if rng.gen_bool(0.1) {
                0
            } else {
                rng.gen_range(0..=E_MAX)
            };
            IntEntry { id, energy, hop: rng.gen_range(0..=30) }
        })
        .collect()
}

/// Exact brute-force selection with the inclusive gate and λ = 1/E_MAX.
///
/// Dead entries (energy 0) are removed, an entry is retained when
/// `e_i >= mean(e)`, i.e. `n * e_i >= sum(e)`, and its score is
/// `(e_i / E_MAX) * max(0, 1 - h_i / max_hop)`, compared through the integer
/// numerator `e_i * (max_hop - h_i)`. Ties go to the lowest id; no positive
/// score means no route.
pub fn oracle_select(table: &[IntEntry], max_hop: u32) -> Option<u32> {
    let live: Vec<&IntEntry> = table.iter().filter(|e| e.energy > 0).collect();
    if live.is_empty() {
        return None;
    }
    let n = live.len() as u64;
    let sum: u64 = live.iter().map(|e| e.energy).sum();
    let mut best: Option<(u64, u32)> = None;
    for e in &live {
        if n * e.energy < sum {
            continue;
        }
        let numerator = e.energy * u64::from(max_hop.saturating_sub(e.hop));
        if numerator == 0 {
            continue;
        }
        best = match best {
            Some((b, id)) if b > numerator || (b == numerator && id < e.id) => Some((b, id)),
            _ => Some((numerator, e.id)),
        };
    }
    best.map(|(_, id)| id)
}

/// Ids retained by the exact inclusive cut.
pub fn oracle_cut(table: &[IntEntry]) -> Vec<u32> {
    let live: Vec<&IntEntry> = table.iter().filter(|e| e.energy > 0).collect();
    let n = live.len() as u64;
    let sum: u64 = live.iter().map(|e| e.energy).sum();
    live.iter().filter(|e| n * e.energy >= sum).map(|e| e.id).collect()
}

/// The decision equations evaluated literally in floating point, for tables
/// with continuous energies where exact ties do not occur.
pub fn literal_select(table: &[(u32, f64, u32)], lambda: f64, max_hop: u32) -> Option<u32> {
    let grade = |e: f64| (lambda * e).clamp(0.0, 1.0);
    let live: Vec<&(u32, f64, u32)> = table.iter().filter(|t| t.1 > 0.0).collect();
    if live.is_empty() {
        return None;
    }
    let alpha = live.iter().map(|t| grade(t.1)).sum::<f64>() / live.len() as f64;
    let mut best: Option<(f64, u32)> = None;
    for &&(id, e, h) in &live {
        if grade(e) < alpha {
            continue;
        }
        let c = grade(e) * (1.0 - f64::from(h) / f64::from(max_hop)).clamp(0.0, 1.0);
        if c <= 0.0 {
            continue;
        }
        best = match best {
            Some((b, bid)) if b > c || (b == c && bid < id) => Some((b, bid)),
            _ => Some((c, id)),
        };
    }
    best.map(|(_, id)| id)
}

/// Unit-disk adjacency computed with squared distances.
pub fn unit_disk_edges(positions: &[(f64, f64)], range: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let dx = positions[i].0 - positions[j].0;
            let dy = positions[i].1 - positions[j].1;
            if dx * dx + dy * dy <= range * range {
                edges.push((i, j));
            }
        }
    }
    edges
}
