//! Randomized cross-checks of the propagation engines against the naive
//! fixpoints, plus order independence and round trips.

use std::collections::BTreeSet;

use muse_core::combine::create_dag;
use muse_core::harness::{random_chain, random_muse, RandomShape};
use muse_core::io::{parse_muse, write_muse};
use muse_core::oracle::oracle_muse_pair_fixpoint;
use muse_core::search::extract_all_with;
use muse_core::{
    ac4, muse_ac1, muse_ac1_with, muse_pc1, muse_pc1_with, oracle_muse_arc_fixpoint, oracle_muse_path_fixpoint,
    verify_solution, Ac1Options, Discipline, MuseInstance, Pc1Options,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, max_nodes: usize, max_labels: usize, p: f64) -> MuseInstance {
    let shape = RandomShape {
        max_nodes,
        max_labels,
        max_segments: 4,
        p,
    };
    random_muse(&shape, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn is_subinstance(small: &MuseInstance, big: &MuseInstance) -> bool {
    (0..big.num_nodes()).all(|i| small.csp().domain(i).is_subset(big.csp().domain(i)))
}

fn probability() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.2, 0.5, 0.8])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arc_consistency_stays_within_the_segment_fixpoint(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 6, 4, p);
        let (ac, _) = muse_ac1(m.clone());
        let fix = oracle_muse_arc_fixpoint(m.clone());
        prop_assert!(is_subinstance(&ac, &fix));
        // The result satisfies the segment condition itself.
        prop_assert_eq!(oracle_muse_arc_fixpoint(ac.clone()), ac.clone());
        // No solution is lost.
        prop_assert_eq!(extract_all_with(&m, None).0, extract_all_with(&ac, None).0);
    }

    #[test]
    fn arc_consistency_matches_pair_admissibility(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 6, 4, p);
        let (ac, _) = muse_ac1(m.clone());
        prop_assert_eq!(ac, oracle_muse_pair_fixpoint(m));
    }

    #[test]
    fn arc_consistency_keeps_every_per_segment_survivor(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 6, 4, p);
        let (ac, _) = muse_ac1(m.clone());
        for seg in m.enumerate_segments() {
            let order = m.path_order(&seg);
            let sub = ac4(m.csp().restrict(&order));
            if sub.is_wiped_out() {
                continue;
            }
            for (x, &i) in order.iter().enumerate() {
                prop_assert!(sub.domain(x).is_subset(ac.csp().domain(i)));
            }
        }
    }

    #[test]
    fn path_consistency_matches_segment_fixpoint(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 5, 3, p);
        let (pc, _) = muse_pc1(m.clone());
        prop_assert_eq!(pc, oracle_muse_path_fixpoint(m));
    }

    #[test]
    fn single_segment_reduces_to_ac4(seed in any::<u64>(), p in probability()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=7);
        let l = rng.gen_range(1..=4);
        let m = random_chain(n, l, p, &mut rng);
        let (ac, _) = muse_ac1(m.clone());
        prop_assert_eq!(ac.csp(), &ac4(m.csp().clone()));
    }

    #[test]
    fn worklist_order_does_not_matter(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 6, 4, p);
        let fifo = muse_ac1_with(m.clone(), Ac1Options { discipline: Discipline::Fifo, trace: false }).0;
        let lifo = muse_ac1_with(m.clone(), Ac1Options { discipline: Discipline::Lifo, trace: false }).0;
        prop_assert_eq!(fifo, lifo);
        let fifo = muse_pc1_with(m.clone(), Pc1Options { discipline: Discipline::Fifo, trace: false }).0;
        let lifo = muse_pc1_with(m, Pc1Options { discipline: Discipline::Lifo, trace: false }).0;
        prop_assert_eq!(fifo, lifo);
    }

    #[test]
    fn guided_extraction_finds_the_same_solutions(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 6, 4, p);
        let (ac, st) = muse_ac1(m.clone());
        let (guided, gstats) = extract_all_with(&ac, Some(&st));
        let (plain, pstats) = extract_all_with(&ac, None);
        prop_assert_eq!(&guided, &plain);
        prop_assert!(gstats.nodes <= pstats.nodes);
        for s in &guided {
            prop_assert!(verify_solution(&m, s));
        }
    }

    #[test]
    fn instance_text_round_trips(seed in any::<u64>(), p in probability()) {
        let m = instance(seed, 6, 4, p);
        let text = write_muse(&m);
        prop_assert_eq!(parse_muse(&text).unwrap(), m);
    }

    #[test]
    fn merged_dag_paths_are_the_input_segments(
        family in prop::collection::vec(
            prop::collection::btree_set(0u8..8, 1..=6),
            1..=6,
        )
    ) {
        let segs: Vec<Vec<String>> = family
            .iter()
            .map(|s| s.iter().map(|x| format!("v{x}")).collect())
            .collect();
        let want: BTreeSet<BTreeSet<String>> = segs.iter().map(|s| s.iter().cloned().collect()).collect();
        let dag = create_dag(&segs);
        prop_assert_eq!(dag.path_family(), want);
    }
}
