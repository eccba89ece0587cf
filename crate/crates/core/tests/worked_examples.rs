//! Small instances whose AC-1 and PC-1 behavior is known step by step.

mod common;

use common::*;
use muse_core::combine::create_dag;
use muse_core::oracle::oracle_muse_pair_fixpoint;
use muse_core::{
    muse_ac1, muse_ac1_with, muse_ac_pc_fixpoint, muse_pc1, oracle_muse_arc_fixpoint, propagate_from, Ac1Event,
    Ac1Options, Endpoint, SupportState,
};
use std::collections::BTreeSet;

use Endpoint::{End, Node as N, Start};

#[test]
fn shortcut_dag_initial_support_sets() {
    let m = shortcut_dag();
    let st = SupportState::initialize(&m, Ac1Options::default());
    let prev = |i, j, a| st.prev_support(i, j, a).unwrap();
    let next = |i, j, a| st.next_support(i, j, a).unwrap();

    // Prev/Next-Support list the far endpoint x of each member (i,x).
    assert_eq!(prev(0, 1, A), vec![N(1)]);
    assert_eq!(next(0, 1, A), vec![N(2)]);
    assert_eq!(prev(0, 2, A), vec![N(1), N(2)]);
    assert_eq!(next(0, 2, A), vec![End]);
    assert_eq!(prev(0, 1, B), vec![N(1)]);
    assert_eq!(next(0, 1, B), vec![N(2)]);
    assert_eq!(prev(0, 2, B), vec![N(1), N(2)]);
    assert_eq!(next(0, 2, B), vec![End]);
    assert_eq!(prev(1, 0, C), vec![Start]);
    assert_eq!(next(1, 0, C), vec![N(0), N(2)]);
    assert_eq!(prev(1, 2, C), vec![N(0), N(2)]);
    assert_eq!(next(1, 2, C), vec![End]);
    assert_eq!(prev(2, 0, D), vec![Start]);
    assert_eq!(next(2, 0, D), vec![N(0), N(1)]);
    assert_eq!(prev(2, 1, D), vec![N(0)]);
    assert_eq!(next(2, 1, D), vec![N(1)]);

    assert_eq!(st.local_prev(0, A), vec![Start]);
    assert_eq!(st.local_next(0, A), vec![N(1), N(2)]);
    assert_eq!(st.local_prev(0, B), vec![Start]);
    assert_eq!(st.local_next(0, B), vec![N(1), N(2)]);
    assert_eq!(st.local_prev(1, C), vec![N(0)]);
    assert_eq!(st.local_next(1, C), vec![N(2)]);
    assert_eq!(st.local_prev(2, D), vec![N(0), N(1)]);
    assert_eq!(st.local_next(2, D), vec![End]);

    assert_eq!(st.pending(), 0);
    assert_eq!(st.counter(0, 1, A), Some(1));
    assert_eq!(st.counter(2, 0, D), Some(2));
}

#[test]
fn losing_the_arc_every_segment_shares_removes_the_label() {
    let mut m = shortcut_dag();
    let mut st = SupportState::initialize(&m, Ac1Options { trace: true, ..Default::default() });
    propagate_from(&mut m, &mut st, &[(0, 2, A)]).unwrap();
    assert_eq!(labels_at(&m, 0), vec![B]);
    assert_eq!(
        st.trace(),
        &[
            Ac1Event::Pop { i: 0, j: 2, a: A },
            Ac1Event::Pop { i: 0, j: 1, a: A },
            Ac1Event::Delete { i: 0, a: A },
        ]
    );
    assert_eq!(st.next_support(0, 1, A).unwrap(), vec![]);
    assert_eq!(st.local_next(0, A), vec![]);
    assert_eq!(st.local_prev(0, A), vec![Start]);
}

#[test]
fn losing_an_arc_only_one_segment_has_keeps_the_label() {
    let mut m = shortcut_dag();
    let mut st = SupportState::initialize(&m, Ac1Options::default());
    propagate_from(&mut m, &mut st, &[(0, 1, A)]).unwrap();
    assert_eq!(labels_at(&m, 0), vec![A, B]);
    assert_eq!(st.prev_support(0, 2, A).unwrap(), vec![N(2)]);
    assert_eq!(st.local_next(0, A), vec![N(2)]);
}

#[test]
fn label_unsupported_on_every_path_through_its_node_cascades() {
    let (m, st) = muse_ac1_with(fork_losing_support(), Ac1Options { trace: true, ..Default::default() });
    assert_eq!(labels_at(&m, 0), vec![B]);
    assert_eq!(labels_at(&m, 1), vec![D]);
    assert_eq!(labels_at(&m, 2), vec![E]);
    assert_eq!(labels_at(&m, 3), vec![F]);
    let deletions: Vec<_> = st
        .trace()
        .iter()
        .filter_map(|e| match *e {
            Ac1Event::Delete { i, a } => Some((i, a)),
            _ => None,
        })
        .collect();
    assert_eq!(deletions, vec![(1, C), (0, A)]);
    assert_eq!(m, oracle_muse_arc_fixpoint(fork_losing_support()));
}

#[test]
fn arc_consistency_alone_keeps_labels_supported_on_different_paths() {
    let original = fork_split_support();
    let (m, _) = muse_ac1(original.clone());
    assert_eq!(m, original);
    assert_eq!(oracle_muse_arc_fixpoint(original.clone()), original);
    assert_eq!(oracle_muse_pair_fixpoint(original.clone()), original);

    // Each path on its own is not arc consistent.
    let segs = original.enumerate_segments();
    assert_eq!(segs.len(), 2);
    for seg in &segs {
        let sub = muse_core::ac4(original.csp().restrict(&original.path_order(seg)));
        assert!(sub.total_labels() < original.csp().restrict(seg.nodes()).total_labels());
    }
}

#[test]
fn path_then_arc_consistency_removes_the_unsupported_pair() {
    let (ac, _) = muse_ac1(fork_split_support());
    let (pc, _) = muse_pc1(ac);
    assert!(!pc.csp().r2(0, A, 1, C));
    let (after, _) = muse_ac1(pc);
    assert_eq!(labels_at(&after, 0), vec![B]);
    assert_eq!(labels_at(&after, 1), vec![D]);

    let fix = muse_ac_pc_fixpoint(fork_split_support());
    assert_eq!(labels_at(&fix, 0), vec![B]);
    assert_eq!(labels_at(&fix, 1), vec![D]);
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn merged_dag_shares_the_common_node_without_extra_paths() {
    let segs = vec![strs(&["1", "2"]), strs(&["2", "3"])];
    let dag = create_dag(&segs);
    let family: BTreeSet<BTreeSet<String>> = segs.iter().map(|s| s.iter().cloned().collect()).collect();
    assert_eq!(dag.path_family(), family);
    assert!(!dag.fell_back);
    assert_eq!(dag.names.len(), 3, "node 2 is shared, not cloned: {:?}", dag.names);
    let two = dag.names.iter().position(|s| s == "2").unwrap();
    assert_eq!(dag.starts, vec![two]);
    assert!(!dag.ends.contains(&two));
    assert!(!dag.path_family().contains(&BTreeSet::from(["2".to_string()])));
}
