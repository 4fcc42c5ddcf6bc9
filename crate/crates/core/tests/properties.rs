use a2a_core::cost::{strategy_cost, verify_decomposition};
use a2a_core::schedule::{check_strategy, cross_topology_assign, predicted_slots, realize};
use a2a_core::sim::{simulate, SimConfig};
use a2a_core::topology::shift_sequence_from;
use a2a_core::{CostModel, TrafficMatrix};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn demand(n: usize) -> impl Strategy<Value = TrafficMatrix> {
    proptest::collection::vec(0u64..5, n * n).prop_map(move |v| {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { v[i * n + j] }).collect()).collect();
        TrafficMatrix::from_rows(rows).unwrap()
    })
}

fn case() -> impl Strategy<Value = (TrafficMatrix, Vec<usize>, Vec<usize>)> {
    (3usize..12).prop_flat_map(|n| {
        let extra: Vec<usize> = (2..n).collect();
        (demand(n), subsequence(extra, 0..n - 2), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    // Any shift sequence and demand: contention-free, exactly conserving,
    // and replayed by the simulator in exactly the modeled time.
    #[test]
    fn assigned_strategies_are_sound((a, extra, _) in case()) {
        let mut shifts = vec![1];
        shifts.extend(extra);
        let s = cross_topology_assign(&shift_sequence_from(a.n(), &shifts).unwrap(), &a).unwrap();
        prop_assert!(check_strategy(&s).is_clean());
        verify_decomposition(&s, &a).unwrap();
        let cm = CostModel::from_t(1.0, 2.0);
        let sim = simulate(&s, &a, &SimConfig::new(cm)).unwrap();
        prop_assert_eq!(sim.total_seconds, strategy_cost(&s, &cm).unwrap().total_seconds);
        prop_assert!(sim.violations.is_empty());
    }

    // Relabeling prediction agrees with the schedule it stands for.
    #[test]
    fn prediction_matches_realization((a, extra, perm) in case()) {
        let mut shifts = vec![1];
        shifts.extend(extra);
        let template = cross_topology_assign(&shift_sequence_from(a.n(), &shifts).unwrap(), &TrafficMatrix::uniform(a.n(), 1)).unwrap();
        let built = realize(&template, &a.conjugated(&perm)).relabeled(&perm);
        prop_assert_eq!(predicted_slots(&template, &a, &perm), built.slots());
        verify_decomposition(&built, &a).unwrap();
    }
}
