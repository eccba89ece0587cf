//! Solution extraction by depth-first search along DAG paths, optionally
//! pruned with the support sets left behind by MUSE AC-1.

use std::collections::BTreeSet;

use crate::ac::SupportState;
use crate::csp::{ac4, Domain, Label, Node};
use crate::error::{Error, Result};
use crate::muse::{Endpoint, MuseInstance, Segment};

/// Labels for every node of one segment, sorted by node id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub segment: Segment,
    pub binding: Vec<(Node, Label)>,
}

impl Assignment {
    pub fn new(binding: impl IntoIterator<Item = (Node, Label)>) -> Self {
        let mut binding: Vec<(Node, Label)> = binding.into_iter().collect();
        binding.sort_unstable();
        let segment = Segment::new(binding.iter().map(|&(i, _)| i));
        Assignment { segment, binding }
    }

    pub fn label_of(&self, i: Node) -> Option<Label> {
        self.binding
            .binary_search_by_key(&i, |&(j, _)| j)
            .ok()
            .map(|x| self.binding[x].1)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Label assignments attempted.
    pub nodes: usize,
}

/// The binding covers a real segment and satisfies every domain, unary and
/// pairwise constraint on it.
pub fn verify_solution(m: &MuseInstance, a: &Assignment) -> bool {
    if a.segment.is_empty() || !m.is_segment(&a.segment) {
        return false;
    }
    if a.binding.len() != a.segment.len()
        || a.binding.iter().zip(a.segment.nodes()).any(|(&(i, _), &j)| i != j)
    {
        return false;
    }
    let csp = m.csp();
    if a.binding
        .iter()
        .any(|&(i, x)| x >= csp.num_labels() || !csp.domain(i).contains(x) || !csp.r1(i, x))
    {
        return false;
    }
    a.binding.iter().enumerate().all(|(p, &(i, x))| {
        a.binding[p + 1..]
            .iter()
            .all(|&(j, y)| csp.r2(i, x, j, y))
    })
}

struct Searcher<'a> {
    m: &'a MuseInstance,
    guide: Option<&'a SupportState>,
    stats: SearchStats,
}

impl Searcher<'_> {
    fn admissible(&self, path: &[(Node, Label)], node: Node, b: Label, domains: Option<&[Domain]>) -> bool {
        let csp = self.m.csp();
        if let Some(d) = domains {
            if !d[node].contains(b) {
                return false;
            }
        }
        csp.r1(node, b) && path.iter().all(|&(p, pl)| csp.r2(p, pl, node, b))
    }

    /// Support-set test for `b` at `node`, given the next two path
    /// positions (`End` once the path is over).
    fn guided_ok(&self, node: Node, b: Label, next: Endpoint, after: Option<Endpoint>) -> bool {
        let Some(g) = self.guide else {
            return true;
        };
        if !g.local_next_contains(node, b, next) {
            return false;
        }
        match (next, after) {
            (Endpoint::Node(c), Some(d)) => g.next_support_contains(node, c, b, d),
            _ => true,
        }
    }

    fn segment_dfs(
        &mut self,
        order: &[Node],
        domains: Option<&[Domain]>,
        path: &mut Vec<(Node, Label)>,
    ) -> bool {
        let depth = path.len();
        if depth == order.len() {
            return true;
        }
        let node = order[depth];
        let at = |x: usize| order.get(x).map_or(Endpoint::End, |&v| Endpoint::Node(v));
        let next = at(depth + 1);
        let after = (depth + 1 < order.len()).then(|| at(depth + 2));
        for b in self.m.csp().domain(node).iter() {
            if !self.guided_ok(node, b, next, after) {
                continue;
            }
            self.stats.nodes += 1;
            if !self.admissible(path, node, b, domains) {
                continue;
            }
            path.push((node, b));
            if self.segment_dfs(order, domains, path) {
                return true;
            }
            path.pop();
        }
        false
    }

    fn path_dfs(&mut self, node: Node, path: &mut Vec<(Node, Label)>, out: &mut BTreeSet<Assignment>) {
        let m = self.m;
        if let (Some(g), Some(&(prev, pb))) = (self.guide, path.last()) {
            if !g.local_next_contains(prev, pb, Endpoint::Node(node)) {
                return;
            }
            if path.len() >= 2 {
                let (pp, ppb) = path[path.len() - 2];
                if !g.next_support_contains(pp, prev, ppb, Endpoint::Node(node)) {
                    return;
                }
            }
        }
        for b in m.csp().domain(node).iter() {
            self.stats.nodes += 1;
            if !self.admissible(path, node, b, None) {
                continue;
            }
            path.push((node, b));
            if m.is_end(node) {
                let closes = match (self.guide, path.len()) {
                    (None, _) => true,
                    (Some(g), len) => {
                        g.local_next_contains(node, b, Endpoint::End)
                            && (len < 2 || {
                                let (prev, pb) = path[len - 2];
                                g.next_support_contains(prev, node, pb, Endpoint::End)
                            })
                    }
                };
                if closes {
                    out.insert(Assignment::new(path.iter().copied()));
                }
            }
            for &next in m.successors(node) {
                self.path_dfs(next, path, out);
            }
            path.pop();
        }
    }
}

/// First solution on `segment`, searched in path order with support-set
/// pruning from `state`.
pub fn extract_one(m: &MuseInstance, state: &SupportState, segment: &Segment) -> Result<Option<Assignment>> {
    Ok(extract_one_with(m, Some(state), segment, false)?.0)
}

/// `guide = None` disables pruning. With `segment_ac4`, the segment's
/// sub-CSP is made arc consistent before searching.
pub fn extract_one_with(
    m: &MuseInstance,
    guide: Option<&SupportState>,
    segment: &Segment,
    segment_ac4: bool,
) -> Result<(Option<Assignment>, SearchStats)> {
    if !m.is_segment(segment) {
        return Err(Error::InvalidSpec(format!(
            "{:?} is not a segment of the graph",
            segment.nodes()
        )));
    }
    let order = m.path_order(segment);
    let reduced: Option<Vec<Domain>> = segment_ac4.then(|| {
        let sub = ac4(m.csp().restrict(&order));
        let mut doms: Vec<Domain> = m.csp().domains().to_vec();
        for (x, &i) in order.iter().enumerate() {
            doms[i] = sub.domain(x).clone();
        }
        doms
    });
    let mut s = Searcher {
        m,
        guide,
        stats: SearchStats::default(),
    };
    let mut path = Vec::new();
    let found = s
        .segment_dfs(&order, reduced.as_deref(), &mut path)
        .then(|| Assignment::new(path));
    Ok((found, s.stats))
}

/// First solution over segments taken in lexicographic order of node ids.
pub fn extract_first(m: &MuseInstance, state: &SupportState) -> Option<Assignment> {
    m.enumerate_segments()
        .iter()
        .find_map(|seg| extract_one(m, state, seg).ok().flatten())
}

/// Every solution on every segment.
pub fn extract_all(m: &MuseInstance, state: &SupportState) -> BTreeSet<Assignment> {
    extract_all_with(m, Some(state)).0
}

pub fn extract_all_with(m: &MuseInstance, guide: Option<&SupportState>) -> (BTreeSet<Assignment>, SearchStats) {
    let mut s = Searcher {
        m,
        guide,
        stats: SearchStats::default(),
    };
    let mut out = BTreeSet::new();
    let mut path = Vec::new();
    for start in m.starts() {
        s.path_dfs(start, &mut path, &mut out);
    }
    (out, s.stats)
}
