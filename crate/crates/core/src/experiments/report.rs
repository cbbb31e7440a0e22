//! Seed-averaged comparison report.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::MetricsRow;
use crate::engine::Placement;
use crate::protocol::ProtocolKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryOptions {
    /// When set, runs in which no sink neighbor failed count as failing at
    /// this time in the Test 1 mean. Otherwise only runs with a failure are
    /// averaged.
    pub censor_time: Option<f64>,
    /// Relative Test 4 difference below which two protocols are reported as
    /// showing no visible difference.
    pub parity_tolerance: f64,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self { censor_time: None, parity_tolerance: 0.10 }
    }
}

/// Seed-averaged metrics of one protocol in one (node count, placement) group.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolMeans {
    pub protocol: ProtocolKind,
    pub runs: usize,
    /// `None` when no run had a sink-neighbor failure and nothing is censored.
    pub test1: Option<f64>,
    /// Runs in which a sink neighbor failed.
    pub test1_failures: usize,
    pub test2: f64,
    pub test3: f64,
    pub test4: f64,
    pub delivered: f64,
    pub avg_hops: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub node_count: usize,
    pub placement: Placement,
    pub protocols: Vec<ProtocolMeans>,
}

impl GroupSummary {
    pub fn get(&self, protocol: ProtocolKind) -> Option<&ProtocolMeans> {
        self.protocols.iter().find(|m| m.protocol == protocol)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Groups rows by (node count, placement) and averages each protocol over
/// its seeds.
pub fn group_means(rows: &[MetricsRow], opts: &SummaryOptions) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<(usize, Placement), BTreeMap<ProtocolKind, Vec<&MetricsRow>>> = BTreeMap::new();
    for row in rows {
        groups.entry((row.node_count, row.placement)).or_default().entry(row.protocol).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|((node_count, placement), by_protocol)| GroupSummary {
            node_count,
            placement,
            protocols: by_protocol
                .into_iter()
                .map(|(protocol, rs)| {
                    let avg = |f: fn(&MetricsRow) -> f64| mean(rs.iter().map(|r| f(r))).unwrap_or(0.0);
                    let test1 = match opts.censor_time {
                        Some(c) => mean(rs.iter().map(|r| r.test1_first_sink_neighbor_fail_time.unwrap_or(c))),
                        None => mean(rs.iter().filter_map(|r| r.test1_first_sink_neighbor_fail_time)),
                    };
                    ProtocolMeans {
                        protocol,
                        runs: rs.len(),
                        test1,
                        test1_failures: rs.iter().filter(|r| r.test1_first_sink_neighbor_fail_time.is_some()).count(),
                        test2: avg(|r| r.test2_failed_node_count as f64),
                        test3: avg(|r| r.test3_active_sink_neighbor_pct),
                        test4: avg(|r| r.test4_avg_remaining_energy),
                        delivered: avg(|r| r.delivered as f64),
                        avg_hops: avg(|r| r.avg_path_hops),
                    }
                })
                .collect(),
        })
        .collect()
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Relative difference of `a` from `b`.
fn relative(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b).abs() / b.abs()
    }
}

fn compare(out: &mut String, a: &ProtocolMeans, b: &ProtocolMeans, opts: &SummaryOptions) {
    let (la, lb) = (a.protocol.label(), b.protocol.label());
    let _ = write!(out, "  {la} vs {lb}:");

    match (a.test1, b.test1) {
        (Some(x), Some(y)) if same(x, y) => out.push_str(" test1 tie;"),
        (Some(x), Some(y)) => {
            let winner = if x > y { la } else { lb };
            let _ = write!(out, " test1 higher for {winner} (energy-balance advantage: {winner});");
        }
        _ => out.push_str(" test1 n/a;"),
    }

    if same(a.test2, b.test2) {
        out.push_str(" test2 tie;");
    } else {
        let _ = write!(out, " test2 fewer fails for {};", if a.test2 < b.test2 { la } else { lb });
    }

    if same(a.test3, b.test3) {
        out.push_str(" test3 tie;");
    } else {
        let _ = write!(out, " test3 more active sink neighbors for {};", if a.test3 > b.test3 { la } else { lb });
    }

    let rel = relative(a.test4, b.test4);
    if same(a.test4, b.test4) {
        out.push_str(" test4 tie");
    } else if rel <= opts.parity_tolerance {
        let _ = write!(out, " test4 no visible difference ({:.1}%)", rel * 100.0);
    } else {
        let _ = write!(
            out,
            " test4 higher remaining energy for {} ({:.1}%)",
            if a.test4 > b.test4 { la } else { lb },
            rel * 100.0
        );
    }
    out.push('\n');
}

/// Renders the per-group means and, when at least two protocols are present,
/// the pairwise direction of every metric.
pub fn summarize(rows: &[MetricsRow], opts: &SummaryOptions) -> String {
    let mut out = String::new();
    out.push_str("# Network lifetime summary\n");
    out.push_str("# test1: time until the first direct neighbor of the sink fails (s)\n");
    match opts.censor_time {
        Some(c) => {
            let _ = writeln!(out, "#        runs without such a failure count as {c} s");
        }
        None => out.push_str("#        averaged over runs in which such a failure occurred\n"),
    }
    out.push_str("# test2: failed nodes, counting every non-sink node whose energy cannot pay for one data transmission\n");
    out.push_str("# test3: percentage of the sink's direct neighbors alive at the end\n");
    out.push_str("# test4: mean remaining energy over all non-sink nodes\n");
    let _ = writeln!(
        out,
        "# test4 differences within {:.0}% relative are reported as no visible difference",
        opts.parity_tolerance * 100.0
    );

    for group in group_means(rows, opts) {
        let _ = writeln!(out, "\n[nodes={} placement={}]", group.node_count, group.placement);
        let _ = writeln!(
            out,
            "  {:<9} {:>5} {:>12} {:>9} {:>8} {:>8} {:>10} {:>10} {:>8}",
            "protocol", "runs", "test1_s", "failed", "test2", "test3", "test4", "delivered", "hops"
        );
        for m in &group.protocols {
            let test1 = m.test1.map_or_else(|| "n/a".to_string(), |t| format!("{t:.3}"));
            let _ = writeln!(
                out,
                "  {:<9} {:>5} {:>12} {:>9} {:>8.2} {:>8.2} {:>10.6} {:>10.2} {:>8.3}",
                m.protocol.label(),
                m.runs,
                test1,
                format!("{}/{}", m.test1_failures, m.runs),
                m.test2,
                m.test3,
                m.test4,
                m.delivered,
                m.avg_hops
            );
        }
        for (i, a) in group.protocols.iter().enumerate() {
            for b in &group.protocols[i + 1..] {
                compare(&mut out, a, b, opts);
            }
        }
    }
    out
}
