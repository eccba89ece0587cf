//! MUSE instances: a CSP whose segments are the start-to-end paths of a DAG.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::csp::{CspInstance, Node};
use crate::error::{Error, Result};

/// A DAG neighbor: a real node or one of the two dummy boundary nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Start,
    Node(Node),
    End,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Start => f.write_str("start"),
            Endpoint::End => f.write_str("end"),
            Endpoint::Node(i) => write!(f, "{i}"),
        }
    }
}

/// Node set of one start-to-end path, kept sorted by node id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment(Vec<Node>);

impl Segment {
    pub fn new(nodes: impl IntoIterator<Item = Node>) -> Self {
        let mut v: Vec<Node> = nodes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Segment(v)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.0
    }

    pub fn contains(&self, i: Node) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct MuseInstance {
    csp: CspInstance,
    edges: Vec<(Node, Node)>,
    adj: FixedBitSet,
    starts: FixedBitSet,
    ends: FixedBitSet,
    succ: Vec<Vec<Node>>,
    pred: Vec<Vec<Node>>,
    topo: Vec<Node>,
    topo_rank: Vec<usize>,
}

impl PartialEq for MuseInstance {
    fn eq(&self, other: &Self) -> bool {
        self.csp == other.csp
            && self.edges == other.edges
            && self.starts == other.starts
            && self.ends == other.ends
    }
}

impl Eq for MuseInstance {}

/// Validates the DAG and replaces `csp`'s arcs by the co-occurrence pairs.
pub fn build_muse(
    csp: CspInstance,
    g: impl IntoIterator<Item = (Node, Node)>,
    starts: impl IntoIterator<Item = Node>,
    ends: impl IntoIterator<Item = Node>,
) -> Result<MuseInstance> {
    let n = csp.num_nodes();
    let check = |i: Node| {
        if i < n {
            Ok(i)
        } else {
            Err(Error::NodeOutOfRange { node: i, n })
        }
    };
    let mut edges = Vec::new();
    for (i, j) in g {
        edges.push((check(i)?, check(j)?));
    }
    edges.sort_unstable();
    edges.dedup();
    let mut start_set = FixedBitSet::with_capacity(n);
    for i in starts {
        start_set.insert(check(i)?);
    }
    let mut end_set = FixedBitSet::with_capacity(n);
    for i in ends {
        end_set.insert(check(i)?);
    }
    if start_set.is_clear() || end_set.is_clear() {
        return Err(Error::NoBoundary);
    }

    let mut adj = FixedBitSet::with_capacity(n * n);
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for &(i, j) in &edges {
        if i == j {
            return Err(Error::Cycle(i));
        }
        adj.insert(i * n + j);
        succ[i].push(j);
        pred[j].push(i);
    }

    let mut indegree: Vec<usize> = pred.iter().map(Vec::len).collect();
    let mut topo: Vec<Node> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut head = 0;
    while head < topo.len() {
        let i = topo[head];
        head += 1;
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                topo.push(j);
            }
        }
    }
    if topo.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
        return Err(Error::Cycle(stuck));
    }
    let mut topo_rank = vec![0; n];
    for (r, &i) in topo.iter().enumerate() {
        topo_rank[i] = r;
    }

    let mut from_start = start_set.clone();
    for &i in &topo {
        if from_start.contains(i) {
            for &j in &succ[i] {
                from_start.insert(j);
            }
        }
    }
    let mut to_end = end_set.clone();
    for &i in topo.iter().rev() {
        if succ[i].iter().any(|&j| to_end.contains(j)) {
            to_end.insert(i);
        }
    }
    if let Some(bad) = (0..n).find(|&i| !from_start.contains(i) || !to_end.contains(i)) {
        return Err(Error::Unreachable(bad));
    }

    // Every node lies on a through-path, so two nodes share a segment
    // exactly when one reaches the other.
    let mut reach = vec![FixedBitSet::with_capacity(n); n];
    for &i in topo.iter().rev() {
        let mut r = FixedBitSet::with_capacity(n);
        for &j in &succ[i] {
            r.insert(j);
            r.union_with(&reach[j]);
        }
        reach[i] = r;
    }
    let mut csp = csp;
    let pairs: Vec<(Node, Node)> = (0..n)
        .flat_map(|i| reach[i].ones().map(move |j| (i, j)).collect::<Vec<_>>())
        .collect();
    csp.set_arcs(pairs);

    Ok(MuseInstance {
        csp,
        edges,
        adj,
        starts: start_set,
        ends: end_set,
        succ,
        pred,
        topo,
        topo_rank,
    })
}

impl MuseInstance {
    /// A single segment: the chain `0 -> 1 -> ... -> n-1`.
    pub fn chain(csp: CspInstance) -> Self {
        let n = csp.num_nodes();
        build_muse(csp, (1..n).map(|i| (i - 1, i)), [0], [n - 1])
            .expect("a chain is a valid segment graph")
    }

    pub fn csp(&self) -> &CspInstance {
        &self.csp
    }

    /// Mutable access to domains and relations. The arc set is derived from
    /// the DAG and must not be replaced through this handle.
    pub fn csp_mut(&mut self) -> &mut CspInstance {
        &mut self.csp
    }

    pub fn num_nodes(&self) -> usize {
        self.csp.num_nodes()
    }

    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    pub fn has_edge(&self, i: Node, j: Node) -> bool {
        self.adj.contains(i * self.num_nodes() + j)
    }

    pub fn is_start(&self, i: Node) -> bool {
        self.starts.contains(i)
    }

    pub fn is_end(&self, i: Node) -> bool {
        self.ends.contains(i)
    }

    pub fn starts(&self) -> impl Iterator<Item = Node> + '_ {
        self.starts.ones()
    }

    pub fn ends(&self) -> impl Iterator<Item = Node> + '_ {
        self.ends.ones()
    }

    pub fn successors(&self, i: Node) -> &[Node] {
        &self.succ[i]
    }

    pub fn predecessors(&self, i: Node) -> &[Node] {
        &self.pred[i]
    }

    pub fn topological_order(&self) -> &[Node] {
        &self.topo
    }

    pub fn topo_rank(&self, i: Node) -> usize {
        self.topo_rank[i]
    }

    /// Whether `i` and `j` lie together on some segment.
    pub fn co_occur(&self, i: Node, j: Node) -> bool {
        self.csp.has_arc(i, j)
    }

    pub fn e_pairs(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.csp.arcs()
    }

    /// Predecessors of `i`, with `Start` if `i` is a first node.
    pub fn prev_edge(&self, i: Node) -> Vec<Endpoint> {
        let mut v: Vec<Endpoint> = self.pred[i].iter().map(|&x| Endpoint::Node(x)).collect();
        if self.is_start(i) {
            v.insert(0, Endpoint::Start);
        }
        v
    }

    /// Successors of `i`, with `End` if `i` is a last node.
    pub fn next_edge(&self, i: Node) -> Vec<Endpoint> {
        let mut v: Vec<Endpoint> = self.succ[i].iter().map(|&x| Endpoint::Node(x)).collect();
        if self.is_end(i) {
            v.push(Endpoint::End);
        }
        v
    }

    /// Nodes of `seg` in path order.
    pub fn path_order(&self, seg: &Segment) -> Vec<Node> {
        let mut v = seg.nodes().to_vec();
        v.sort_by_key(|&i| self.topo_rank[i]);
        v
    }

    /// Whether the node set is exactly one start-to-end path.
    pub fn is_segment(&self, seg: &Segment) -> bool {
        let order = self.path_order(seg);
        let (Some(&first), Some(&last)) = (order.first(), order.last()) else {
            return false;
        };
        if order.iter().any(|&i| i >= self.num_nodes()) {
            return false;
        }
        self.is_start(first)
            && self.is_end(last)
            && order.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// Every start-to-end path as a node set. Exponential in general.
    pub fn enumerate_segments(&self) -> BTreeSet<Segment> {
        let mut out = BTreeSet::new();
        let mut path = Vec::new();
        for s in self.starts() {
            self.walk(s, &mut path, &mut out);
        }
        out
    }

    fn walk(&self, i: Node, path: &mut Vec<Node>, out: &mut BTreeSet<Segment>) {
        path.push(i);
        if self.is_end(i) {
            out.insert(Segment::new(path.iter().copied()));
        }
        for &j in &self.succ[i] {
            self.walk(j, path, out);
        }
        path.pop();
    }

    /// No segment has all of its domains nonempty.
    pub fn is_wiped_out(&self) -> bool {
        let n = self.num_nodes();
        let live = |i: Node| !self.csp.domain(i).is_empty();
        let mut reached = FixedBitSet::with_capacity(n);
        for &i in &self.topo {
            if !live(i) {
                continue;
            }
            if self.is_start(i) || self.pred[i].iter().any(|&p| reached.contains(p)) {
                if self.is_end(i) {
                    return false;
                }
                reached.insert(i);
            }
        }
        true
    }
}

pub fn enumerate_segments(m: &MuseInstance) -> BTreeSet<Segment> {
    m.enumerate_segments()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shortcut_dag() -> MuseInstance {
        build_muse(CspInstance::new(3, 1), [(0, 1), (0, 2), (1, 2)], [0], [2]).unwrap()
    }

    #[test]
    fn chain_pairs_are_complete() {
        let m = MuseInstance::chain(CspInstance::new(3, 1));
        assert_eq!(m.e_pairs().count(), 6);
        assert_eq!(m.enumerate_segments().len(), 1);
    }

    #[test]
    fn shortcut_dag_has_two_segments() {
        let m = shortcut_dag();
        let segs: Vec<_> = m.enumerate_segments().into_iter().collect();
        assert_eq!(segs, vec![Segment::new([0, 1, 2]), Segment::new([0, 2])]);
        assert!(m.co_occur(1, 2) && m.co_occur(0, 1));
        assert_eq!(m.prev_edge(0), vec![Endpoint::Start]);
        assert_eq!(m.next_edge(2), vec![Endpoint::End]);
    }

    #[test]
    fn parallel_nodes_do_not_co_occur() {
        let m = build_muse(CspInstance::new(2, 1), [], [0, 1], [0, 1]).unwrap();
        assert!(!m.co_occur(0, 1));
    }

    #[test]
    fn rejects_cycles_and_stranded_nodes() {
        let cyc = build_muse(CspInstance::new(2, 1), [(0, 1), (1, 0)], [0], [1]);
        assert!(matches!(cyc, Err(Error::Cycle(_))));
        let stranded = build_muse(CspInstance::new(3, 1), [(0, 1)], [0], [1]);
        assert_eq!(stranded.unwrap_err(), Error::Unreachable(2));
    }

    #[test]
    fn segment_recognition() {
        let m = shortcut_dag();
        assert!(m.is_segment(&Segment::new([0, 2])));
        assert!(!m.is_segment(&Segment::new([1, 2])));
        assert!(!m.is_segment(&Segment::new([])));
    }
}
