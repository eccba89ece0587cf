//! Naive fixpoints of the MUSE consistency definitions, quantifying over
//! explicitly enumerated segments. Exponential; meant for small instances
//! and cross-checking the propagation engines.

use crate::csp::{CspInstance, Label, Node};
use crate::muse::{MuseInstance, Segment};

fn supports_in(csp: &CspInstance, i: Node, a: Label, seg: &Segment) -> bool {
    seg.nodes()
        .iter()
        .filter(|&&j| j != i)
        .all(|&j| csp.domain(j).iter().any(|b| csp.r2(i, a, j, b)))
}

/// Removes `a` from `L_i` while no segment through `i` supports it at every
/// other node, until nothing changes.
pub fn oracle_muse_arc_fixpoint(mut m: MuseInstance) -> MuseInstance {
    let segs: Vec<Segment> = m.enumerate_segments().into_iter().collect();
    let n = m.num_nodes();
    loop {
        let mut changed = false;
        for i in 0..n {
            for a in m.csp().domain(i).to_vec() {
                let alive = segs
                    .iter()
                    .any(|s| s.contains(i) && supports_in(m.csp(), i, a, s));
                if !alive {
                    m.csp_mut().remove_label(i, a);
                    changed = true;
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

fn path_supported(csp: &CspInstance, i: Node, a: Label, j: Node, b: Label, k: Node) -> bool {
    csp.domain(k)
        .iter()
        .any(|c| csp.r2(i, a, k, c) && csp.r2(k, c, j, b))
}

/// Falsifies `r2(i,a,j,b)` while every segment holding `i` and `j` has a
/// third node with no label compatible with both, until nothing changes.
/// Domains are left alone.
pub fn oracle_muse_path_fixpoint(mut m: MuseInstance) -> MuseInstance {
    let segs: Vec<Segment> = m.enumerate_segments().into_iter().collect();
    let pairs: Vec<(Node, Node)> = m.e_pairs().filter(|&(i, j)| i < j).collect();
    loop {
        let mut changed = false;
        for &(i, j) in &pairs {
            for a in m.csp().domain(i).to_vec() {
                for b in m.csp().domain(j).to_vec() {
                    let csp = m.csp();
                    if !csp.r2(i, a, j, b) {
                        continue;
                    }
                    let alive = segs.iter().any(|s| {
                        s.contains(i)
                            && s.contains(j)
                            && s.nodes()
                                .iter()
                                .filter(|&&k| k != i && k != j)
                                .all(|&k| path_supported(csp, i, a, j, b, k))
                    });
                    if !alive {
                        m.csp_mut().set_r2(i, a, j, b, false);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

/// Path consistency of a plain CSP over its complete graph.
pub fn oracle_path_fixpoint(mut csp: CspInstance) -> CspInstance {
    let n = csp.num_nodes();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                for a in csp.domain(i).to_vec() {
                    for b in csp.domain(j).to_vec() {
                        if csp.r2(i, a, j, b)
                            && !(0..n)
                                .filter(|&k| k != i && k != j)
                                .all(|k| path_supported(&csp, i, a, j, b, k))
                        {
                            csp.set_r2(i, a, j, b, false);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return csp;
        }
    }
}

/// Like [`oracle_muse_arc_fixpoint`], but a label `b` at `k` only counts as
/// support for `a` at `i` while `b` still has a segment through both `k`
/// and `i`. This pair-level admissibility is what the AC-1 counters track.
pub fn oracle_muse_pair_fixpoint(mut m: MuseInstance) -> MuseInstance {
    let segs: Vec<Segment> = m.enumerate_segments().into_iter().collect();
    let n = m.num_nodes();
    let l = m.csp().num_labels();
    let idx = |i: Node, j: Node, a: Label| (i * n + j) * l + a;
    let mut alive = vec![false; n * n * l];
    for (i, j) in m.e_pairs() {
        for a in m.csp().domain(i).iter() {
            alive[idx(i, j, a)] = true;
        }
    }
    let supported = |alive: &[bool], csp: &CspInstance, i: Node, a: Label, seg: &Segment| {
        seg.nodes().iter().filter(|&&k| k != i).all(|&k| {
            csp.domain(k)
                .iter()
                .any(|b| csp.r2(i, a, k, b) && alive[idx(k, i, b)])
        })
    };
    loop {
        let mut changed = false;
        for (i, j) in m.e_pairs().collect::<Vec<_>>() {
            for a in 0..l {
                if alive[idx(i, j, a)]
                    && !segs
                        .iter()
                        .any(|s| s.contains(i) && s.contains(j) && supported(&alive, m.csp(), i, a, s))
                {
                    alive[idx(i, j, a)] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        for a in m.csp().domain(i).to_vec() {
            if !segs
                .iter()
                .any(|s| s.contains(i) && supported(&alive, m.csp(), i, a, s))
            {
                m.csp_mut().remove_label(i, a);
            }
        }
    }
    m
}
