//! Finite-domain binary CSPs, node consistency and AC-4.

use fixedbitset::FixedBitSet;

use crate::worklist::{Discipline, Worklist};

pub type Node = usize;
pub type Label = usize;

/// A subset of the global label set, iterated in label-index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain(FixedBitSet);

impl Domain {
    pub fn full(l: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(l);
        bits.insert_range(..);
        Domain(bits)
    }

    pub fn empty(l: usize) -> Self {
        Domain(FixedBitSet::with_capacity(l))
    }

    pub fn from_labels(l: usize, labels: impl IntoIterator<Item = Label>) -> Self {
        let mut d = Self::empty(l);
        for a in labels {
            d.insert(a);
        }
        d
    }

    pub fn contains(&self, a: Label) -> bool {
        self.0.contains(a)
    }

    pub fn insert(&mut self, a: Label) {
        self.0.insert(a);
    }

    /// Returns whether the label was present.
    pub fn remove(&mut self, a: Label) -> bool {
        let was = self.0.contains(a);
        self.0.set(a, false);
        was
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<Label> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// Nodes `0..n`, a global label set `0..l`, per-node domains, a unary
/// relation and a symmetric binary relation stored as a dense bit table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    n: usize,
    l: usize,
    label_names: Vec<String>,
    node_names: Vec<String>,
    domains: Vec<Domain>,
    r1: FixedBitSet,
    r2: FixedBitSet,
    arcs: FixedBitSet,
}

impl CspInstance {
    /// Full domains, everything admissible, and the complete arc set.
    pub fn new(n: usize, l: usize) -> Self {
        let mut r1 = FixedBitSet::with_capacity(n * l);
        r1.insert_range(..);
        let mut r2 = FixedBitSet::with_capacity(n * n * l * l);
        r2.insert_range(..);
        let mut arcs = FixedBitSet::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    arcs.insert(i * n + j);
                }
            }
        }
        Self {
            n,
            l,
            label_names: (0..l).map(|a| a.to_string()).collect(),
            node_names: (0..n).map(|i| i.to_string()).collect(),
            domains: vec![Domain::full(l); n],
            r1,
            r2,
            arcs,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_labels(&self) -> usize {
        self.l
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, a: Label) -> &str {
        &self.label_names[a]
    }

    pub fn set_label_names(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.l, "one name per label");
        self.label_names = names;
    }

    pub fn label_by_name(&self, name: &str) -> Option<Label> {
        self.label_names.iter().position(|s| s == name)
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_name(&self, i: Node) -> &str {
        &self.node_names[i]
    }

    pub fn set_node_names(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.n, "one name per node");
        self.node_names = names;
    }

    pub fn domain(&self, i: Node) -> &Domain {
        &self.domains[i]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn set_domain(&mut self, i: Node, d: Domain) {
        self.domains[i] = d;
    }

    pub fn remove_label(&mut self, i: Node, a: Label) -> bool {
        self.domains[i].remove(a)
    }

    pub fn r1(&self, i: Node, a: Label) -> bool {
        self.r1.contains(i * self.l + a)
    }

    pub fn set_r1(&mut self, i: Node, a: Label, v: bool) {
        self.r1.set(i * self.l + a, v);
    }

    fn r2_index(&self, i: Node, a: Label, j: Node, b: Label) -> usize {
        ((i * self.n + j) * self.l + a) * self.l + b
    }

    pub fn r2(&self, i: Node, a: Label, j: Node, b: Label) -> bool {
        self.r2.contains(self.r2_index(i, a, j, b))
    }

    /// Sets both orientations.
    pub fn set_r2(&mut self, i: Node, a: Label, j: Node, b: Label, v: bool) {
        let x = self.r2_index(i, a, j, b);
        let y = self.r2_index(j, b, i, a);
        self.r2.set(x, v);
        self.r2.set(y, v);
    }

    pub fn has_arc(&self, i: Node, j: Node) -> bool {
        self.arcs.contains(i * self.n + j)
    }

    /// Replaces the arc set; pairs are symmetrized and self-pairs dropped.
    pub fn set_arcs(&mut self, pairs: impl IntoIterator<Item = (Node, Node)>) {
        self.arcs.clear();
        for (i, j) in pairs {
            if i != j {
                self.arcs.insert(i * self.n + j);
                self.arcs.insert(j * self.n + i);
            }
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        let n = self.n;
        self.arcs.ones().map(move |x| (x / n, x % n))
    }

    pub fn neighbors(&self, i: Node) -> impl Iterator<Item = Node> + '_ {
        (0..self.n).filter(move |&j| self.has_arc(i, j))
    }

    pub fn total_labels(&self) -> usize {
        self.domains.iter().map(Domain::len).sum()
    }

    /// Some domain is empty, so the CSP has no solution.
    pub fn is_wiped_out(&self) -> bool {
        self.domains.iter().any(Domain::is_empty)
    }

    pub fn all_domains_empty(&self) -> bool {
        self.domains.iter().all(Domain::is_empty)
    }

    /// Restriction to `nodes` (in the given order), renumbered `0..nodes.len()`.
    pub fn restrict(&self, nodes: &[Node]) -> CspInstance {
        let mut out = CspInstance::new(nodes.len(), self.l);
        out.label_names = self.label_names.clone();
        out.node_names = nodes.iter().map(|&i| self.node_names[i].clone()).collect();
        for (x, &i) in nodes.iter().enumerate() {
            out.domains[x] = self.domains[i].clone();
            for a in 0..self.l {
                out.set_r1(x, a, self.r1(i, a));
            }
        }
        for (x, &i) in nodes.iter().enumerate() {
            for (y, &j) in nodes.iter().enumerate().skip(x + 1) {
                for a in 0..self.l {
                    for b in 0..self.l {
                        out.set_r2(x, a, y, b, self.r2(i, a, j, b));
                    }
                }
            }
        }
        out
    }
}

/// One pass removing every label that fails the unary relation.
pub fn enforce_node_consistency(mut csp: CspInstance) -> CspInstance {
    for i in 0..csp.n {
        for a in csp.domains[i].to_vec() {
            if !csp.r1(i, a) {
                csp.domains[i].remove(a);
            }
        }
    }
    csp
}

/// Counters, support lists and removal flags of AC-4.
#[derive(Clone, Debug)]
pub struct AcState {
    n: usize,
    l: usize,
    counter: Vec<u32>,
    support: Vec<Vec<(Node, Label)>>,
    removed: FixedBitSet,
    pub pops: usize,
}

impl AcState {
    /// Number of labels of `j` compatible with `a` at `i`.
    pub fn counter(&self, i: Node, j: Node, a: Label) -> u32 {
        self.counter[(i * self.n + j) * self.l + a]
    }

    /// Pairs whose counters drop when `a` leaves `L_i`.
    pub fn supported(&self, i: Node, a: Label) -> &[(Node, Label)] {
        &self.support[i * self.l + a]
    }

    pub fn is_removed(&self, i: Node, a: Label) -> bool {
        self.removed.contains(i * self.l + a)
    }
}

pub fn ac4(csp: CspInstance) -> CspInstance {
    ac4_with(csp, Discipline::Fifo).0
}

pub fn ac4_with(mut csp: CspInstance, discipline: Discipline) -> (CspInstance, AcState) {
    let (n, l) = (csp.n, csp.l);
    let mut st = AcState {
        n,
        l,
        counter: vec![0; n * n * l],
        support: vec![Vec::new(); n * l],
        removed: FixedBitSet::with_capacity(n * l),
        pops: 0,
    };
    let mut list = Worklist::new(discipline);
    let arcs: Vec<(Node, Node)> = csp.arcs().collect();
    for &(i, j) in &arcs {
        for a in csp.domains[i].to_vec() {
            let mut total = 0;
            for b in csp.domains[j].iter() {
                if csp.r2(i, a, j, b) {
                    total += 1;
                    st.support[j * l + b].push((i, a));
                }
            }
            st.counter[(i * n + j) * l + a] = total;
            if total == 0 && !st.removed.contains(i * l + a) {
                csp.domains[i].remove(a);
                st.removed.insert(i * l + a);
                list.push((i, a));
            }
        }
    }
    while let Some((j, b)) = list.pop() {
        st.pops += 1;
        for k in 0..st.support[j * l + b].len() {
            let (i, a) = st.support[j * l + b][k];
            let c = &mut st.counter[(i * n + j) * l + a];
            *c -= 1;
            if *c == 0 && !st.removed.contains(i * l + a) {
                csp.domains[i].remove(a);
                st.removed.insert(i * l + a);
                list.push((i, a));
            }
        }
    }
    (csp, st)
}

/// Deletes labels lacking support on some arc until nothing changes.
pub fn oracle_arc_fixpoint(mut csp: CspInstance) -> CspInstance {
    loop {
        let mut changed = false;
        for i in 0..csp.n {
            for a in csp.domains[i].to_vec() {
                let unsupported = (0..csp.n).any(|j| {
                    csp.has_arc(i, j) && !csp.domains[j].iter().any(|b| csp.r2(i, a, j, b))
                });
                if unsupported {
                    csp.domains[i].remove(a);
                    changed = true;
                }
            }
        }
        if !changed {
            return csp;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coloring_triangle() -> CspInstance {
        let mut csp = CspInstance::new(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..3 {
                    if i != j {
                        csp.set_r2(i, a, j, a, false);
                    }
                }
            }
        }
        csp
    }

    #[test]
    fn triangle_coloring_is_arc_consistent() {
        let csp = coloring_triangle();
        assert_eq!(ac4(csp.clone()), csp);
    }

    #[test]
    fn mutual_wipe_out() {
        let mut csp = CspInstance::new(2, 2);
        csp.set_domain(0, Domain::from_labels(2, [0]));
        csp.set_domain(1, Domain::from_labels(2, [1]));
        csp.set_r2(0, 0, 1, 1, false);
        let out = ac4(csp.clone());
        assert!(out.all_domains_empty());
        assert_eq!(oracle_arc_fixpoint(csp), out);
    }

    #[test]
    fn node_consistency_identity_and_annihilator() {
        let csp = coloring_triangle();
        assert_eq!(enforce_node_consistency(csp.clone()), csp);
        let mut none = csp.clone();
        for i in 0..3 {
            for a in 0..3 {
                none.set_r1(i, a, false);
            }
        }
        assert!(enforce_node_consistency(none).all_domains_empty());
    }

    #[test]
    fn r2_is_symmetric() {
        let mut csp = CspInstance::new(3, 2);
        csp.set_r2(2, 1, 0, 0, false);
        assert!(!csp.r2(0, 0, 2, 1));
        assert!(csp.r2(0, 1, 2, 1));
    }

    #[test]
    fn counters_at_fixpoint_count_live_supports() {
        let csp = coloring_triangle();
        let (out, st) = ac4_with(csp, Discipline::Fifo);
        for (i, j) in out.arcs() {
            for a in out.domain(i).iter() {
                let live = out.domain(j).iter().filter(|&b| out.r2(i, a, j, b)).count();
                assert_eq!(st.counter(i, j, a) as usize, live);
            }
        }
    }
}
