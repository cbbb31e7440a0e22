mod common;

use common::{literal_select, oracle_cut, oracle_select, random_table, IntEntry, E_MAX};
use fear_sim::fuzzy::{
    alpha_cut, decision_scores, energy_membership, energy_threshold, select_next_hop, FuzzyParams, Gate,
    HopDecision, MembershipGrade,
};
use fear_sim::maxhop::dynamic_maxhop;
use fear_sim::{NeighborEntry, NodeId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> FuzzyParams {
    FuzzyParams::for_max_energy(E_MAX as f64).unwrap()
}

fn entries(table: &[IntEntry]) -> Vec<NeighborEntry> {
    table.iter().map(|e| e.to_entry()).collect()
}

fn int_table() -> impl Strategy<Value = Vec<IntEntry>> {
    (1usize..=20)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::sample::subsequence((0u32..64).collect::<Vec<_>>(), n),
                proptest::collection::vec((0u64..=E_MAX, 0u32..=30), n),
            )
        })
        .prop_flat_map(|(_, ids, rest)| {
            let table: Vec<IntEntry> =
                ids.into_iter().zip(rest).map(|(id, (energy, hop))| IntEntry { id, energy, hop }).collect();
            Just(table).prop_shuffle()
        })
}

fn float_table() -> impl Strategy<Value = Vec<(u32, f64, u32)>> {
    proptest::collection::vec((0.0f64..1.0, 0u32..=30), 1..=20).prop_map(|v| {
        v.into_iter().enumerate().map(|(i, (e, h))| ((i as u32 * 7) % 23, e, h)).collect()
    })
}

fn chosen(d: HopDecision) -> Option<u32> {
    d.next_hop().map(|n| n.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn selection_matches_exact_oracle(table in int_table(), max_hop in 1u32..=31) {
        let got = select_next_hop(&entries(&table), &params(), max_hop).unwrap();
        prop_assert_eq!(chosen(got), oracle_select(&table, max_hop));
    }

    #[test]
    fn selection_matches_literal_oracle(raw in float_table(), max_hop in 1u32..=31) {
        // Distinct ids: drop later duplicates.
        let mut seen = std::collections::HashSet::new();
        let table: Vec<_> = raw.into_iter().filter(|t| seen.insert(t.0)).collect();
        let nt: Vec<NeighborEntry> = table.iter().map(|&(id, e, h)| NeighborEntry::new(NodeId(id), e, h)).collect();
        let p = FuzzyParams::new(1.0).unwrap();
        let got = select_next_hop(&nt, &p, max_hop).unwrap();
        prop_assert_eq!(chosen(got), literal_select(&table, 1.0, max_hop));
    }

    #[test]
    fn cut_matches_oracle_and_keeps_the_strongest(table in int_table()) {
        let cut = alpha_cut(&entries(&table), &params()).unwrap();
        let ids: Vec<u32> = cut.entries.iter().map(|e| e.id.0).collect();
        prop_assert_eq!(&ids, &oracle_cut(&table));
        if let Some(max) = table.iter().filter(|e| e.energy > 0).map(|e| e.energy).max() {
            prop_assert!(!cut.is_empty());
            prop_assert!(cut.entries.iter().any(|e| e.energy == max as f64));
            for e in &cut.entries {
                prop_assert!(energy_membership(e.energy, &params()).value() >= cut.alpha - 1e-9);
            }
        }
    }

    #[test]
    fn grades_and_scores_stay_in_unit_interval(x in -1e6f64..1e6, table in int_table(), max_hop in 1u32..=31) {
        let g = MembershipGrade::new(x).value();
        prop_assert!((0.0..=1.0).contains(&g));
        for s in decision_scores(&entries(&table), &params(), max_hop).unwrap() {
            prop_assert!((0.0..=1.0).contains(&s.score));
        }
    }

    #[test]
    fn threshold_lies_between_min_and_max(values in proptest::collection::vec(0.0f64..=1.0, 1..50)) {
        let grades: Vec<MembershipGrade> = values.iter().map(|&v| MembershipGrade::new(v)).collect();
        let a = energy_threshold(&grades).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= a && a <= hi);
    }

    #[test]
    fn scaling_energies_and_lambda_together_preserves_choice(table in int_table(), max_hop in 1u32..=31, k in 0u32..8) {
        let factor = f64::from(1u32 << k);
        let base = decision_scores(&entries(&table), &params(), max_hop).unwrap();
        let scaled_table: Vec<NeighborEntry> = table
            .iter()
            .map(|e| NeighborEntry::new(NodeId(e.id), e.energy as f64 * factor, e.hop))
            .collect();
        let scaled_params = FuzzyParams::for_max_energy(E_MAX as f64 * factor).unwrap();
        let scaled = decision_scores(&scaled_table, &scaled_params, max_hop).unwrap();
        prop_assert_eq!(&base, &scaled);
        prop_assert_eq!(
            select_next_hop(&entries(&table), &params(), max_hop).unwrap(),
            select_next_hop(&scaled_table, &scaled_params, max_hop).unwrap()
        );
    }

    #[test]
    fn lower_hop_never_lowers_a_retained_score(table in int_table(), max_hop in 1u32..=31, pick in any::<prop::sample::Index>()) {
        let i = pick.index(table.len());
        prop_assume!(table[i].hop > 0);
        let before = decision_scores(&entries(&table), &params(), max_hop).unwrap()[i].score;
        let mut better = table.clone();
        better[i].hop -= 1;
        let after = decision_scores(&entries(&better), &params(), max_hop).unwrap()[i].score;
        prop_assert!(after >= before);
    }

    #[test]
    fn more_energy_never_lowers_a_retained_score(table in int_table(), max_hop in 1u32..=31, pick in any::<prop::sample::Index>(), bump in 1u64..=200) {
        let scores = decision_scores(&entries(&table), &params(), max_hop).unwrap();
        let retained: Vec<usize> = (0..table.len()).filter(|&j| scores[j].score > 0.0).collect();
        prop_assume!(!retained.is_empty());
        let i = retained[pick.index(retained.len())];
        let mut richer = table.clone();
        richer[i].energy = (richer[i].energy + bump).min(E_MAX);
        let after = decision_scores(&entries(&richer), &params(), max_hop).unwrap()[i].score;
        prop_assert!(after >= scores[i].score);
    }

    #[test]
    fn dynamic_maxhop_exceeds_every_hop(hops in proptest::collection::vec(0u32..1000, 1..40)) {
        let table: Vec<NeighborEntry> = hops.iter().enumerate().map(|(i, &h)| NeighborEntry::new(NodeId(i as u32), 1.0, h)).collect();
        let m = dynamic_maxhop(&table).unwrap();
        prop_assert!(hops.iter().all(|&h| h < m));
        prop_assert_eq!(m, hops.iter().max().unwrap() + 1);
    }
}

#[test]
fn strict_gate_empties_equal_energy_tables() {
    let table = vec![
        NeighborEntry::new(NodeId(4), 500.0, 1),
        NeighborEntry::new(NodeId(2), 500.0, 2),
    ];
    let inclusive = select_next_hop(&table, &params(), 4).unwrap();
    let strict = select_next_hop(&table, &params().with_gate(Gate::Strict), 4).unwrap();
    assert_eq!(inclusive, HopDecision::Forward(NodeId(4)));
    assert_eq!(strict, HopDecision::NoViableHop);
}

#[test]
fn seeded_tables_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..2000 {
        let table = random_table(&mut rng);
        let m = dynamic_maxhop(&entries(&table)).unwrap();
        let got = select_next_hop(&entries(&table), &params(), m).unwrap();
        assert_eq!(chosen(got), oracle_select(&table, m), "table {table:?}");
    }
}
