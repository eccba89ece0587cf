//! Small hand-built instances shared by the integration tests.
#![allow(dead_code)]

use muse_core::{build_muse, CspInstance, Domain, Label, MuseInstance, Node};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Instance with labels `a..` and nodes `1..`, every pair listed in `ok`
/// compatible and every other pair incompatible.
fn instance(
    n: usize,
    labels: &[&str],
    domains: &[&[Label]],
    ok: &[(Node, Label, Node, Label)],
    edges: &[(Node, Node)],
    starts: &[Node],
    ends: &[Node],
) -> MuseInstance {
    let l = labels.len();
    let mut csp = CspInstance::new(n, l);
    csp.set_label_names(names(labels));
    csp.set_node_names((1..=n).map(|i| i.to_string()).collect());
    for (i, d) in domains.iter().enumerate() {
        csp.set_domain(i, Domain::from_labels(l, d.iter().copied()));
    }
    for i in 0..n {
        for j in 0..n {
            for a in 0..l {
                for b in 0..l {
                    csp.set_r2(i, a, j, b, false);
                }
            }
        }
    }
    for &(i, a, j, b) in ok {
        csp.set_r2(i, a, j, b, true);
    }
    build_muse(csp, edges.iter().copied(), starts.iter().copied(), ends.iter().copied()).unwrap()
}

pub const A: Label = 0;
pub const B: Label = 1;
pub const C: Label = 2;
pub const D: Label = 3;
pub const E: Label = 4;
pub const F: Label = 5;

/// Edges 1→2, 1→3, 2→3, start 1, end 3. L1 = {a,b}, L2 = {c}, L3 = {d},
/// every pair compatible.
pub fn shortcut_dag() -> MuseInstance {
    let mut ok = Vec::new();
    for (i, a) in [(0, A), (0, B), (1, C), (2, D)] {
        for (j, b) in [(0, A), (0, B), (1, C), (2, D)] {
            if i != j {
                ok.push((i, a, j, b));
            }
        }
    }
    instance(
        3,
        &["a", "b", "c", "d"],
        &[&[A, B], &[C], &[D]],
        &ok,
        &[(0, 1), (0, 2), (1, 2)],
        &[0],
        &[2],
    )
}

/// Node 1 feeds node 2, which ends in node 3 or node 4. `c` at 2 is
/// supported by node 1 only, and `a` at 1 only by `c`.
pub fn fork_losing_support() -> MuseInstance {
    instance(
        4,
        &["a", "b", "c", "d", "e", "f"],
        &[&[A, B], &[C, D], &[E], &[F]],
        &[
            (0, A, 1, C),
            (0, B, 1, C),
            (0, B, 1, D),
            (0, A, 2, E),
            (0, A, 3, F),
            (0, B, 2, E),
            (0, B, 3, F),
            (1, D, 2, E),
            (1, D, 3, F),
        ],
        &[(0, 1), (1, 2), (1, 3)],
        &[0],
        &[2, 3],
    )
}

/// Same shape. `a` is supported on path 1-2-4 and `c` on path 1-2-3, but
/// the pair (a,c) has no common support on either path.
pub fn fork_split_support() -> MuseInstance {
    instance(
        4,
        &["a", "b", "c", "d", "e", "f"],
        &[&[A, B], &[C, D], &[E], &[F]],
        &[
            (0, A, 1, C),
            (0, B, 1, D),
            (0, A, 3, F),
            (0, B, 2, E),
            (0, B, 3, F),
            (1, C, 2, E),
            (1, D, 2, E),
            (1, D, 3, F),
        ],
        &[(0, 1), (1, 2), (1, 3)],
        &[0],
        &[2, 3],
    )
}

pub fn labels_at(m: &MuseInstance, i: Node) -> Vec<Label> {
    m.csp().domain(i).to_vec()
}
