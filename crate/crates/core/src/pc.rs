//! MUSE path consistency (PC-1). Keys are quintuples `((i,j),k,a,b)`: the
//! pair `a` at `i`, `b` at `j`, examined through a third node `k`.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::ac::muse_ac1;
use crate::csp::{Label, Node};
use crate::muse::MuseInstance;
use crate::sets::SetFamily;
use crate::worklist::{Discipline, Worklist};

const NO_PAIR: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default)]
pub struct Pc1Options {
    pub discipline: Discipline,
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pc1Event {
    Pop { i: Node, j: Node, k: Node, a: Label, b: Label },
    Falsify { i: Node, a: Label, j: Node, b: Label },
}

impl fmt::Display for Pc1Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Pc1Event::Pop { i, j, k, a, b } => write!(f, "POP ({i},{j}) {k} {a} {b}"),
            Pc1Event::Falsify { i, a, j, b } => write!(f, "FALSIFY {i} {a} {j} {b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pc1Stats {
    pub pops: usize,
    pub counter_decrements: usize,
    pub support_removals: usize,
    pub local_removals: usize,
}

type Quint = (Node, Node, Node, Label, Label);

#[derive(Clone, Debug)]
pub struct PathSupportState {
    n: usize,
    l: usize,
    pair_id: Vec<u32>,
    present: FixedBitSet,
    counter: Vec<u32>,
    s: Vec<Vec<Label>>,
    marked: FixedBitSet,
    popped: FixedBitSet,
    prev: SetFamily,
    next: SetFamily,
    local_prev: SetFamily,
    local_next: SetFamily,
    worklist: Worklist<Quint>,
    pub stats: Pc1Stats,
    trace: Option<Vec<Pc1Event>>,
}

impl PathSupportState {
    fn pid(&self, i: Node, j: Node) -> usize {
        let p = self.pair_id[i * self.n + j];
        debug_assert_ne!(p, NO_PAIR);
        p as usize
    }

    fn slot(&self, i: Node, j: Node, k: Node, a: Label, b: Label) -> usize {
        ((self.pid(i, j) * self.n + k) * self.l + a) * self.l + b
    }

    fn local_slot(&self, i: Node, j: Node, a: Label, b: Label) -> usize {
        (self.pid(i, j) * self.l + a) * self.l + b
    }

    fn key(&self, i: Node, j: Node, k: Node, a: Label, b: Label) -> Option<usize> {
        if [i, j, k].iter().any(|&x| x >= self.n) || a >= self.l || b >= self.l {
            return None;
        }
        if self.pair_id[i * self.n + j] == NO_PAIR {
            return None;
        }
        let key = self.slot(i, j, k, a, b);
        self.present.contains(key).then_some(key)
    }

    pub fn counter(&self, i: Node, j: Node, k: Node, a: Label, b: Label) -> Option<u32> {
        self.key(i, j, k, a, b).map(|x| self.counter[x])
    }

    pub fn is_marked(&self, i: Node, j: Node, k: Node, a: Label, b: Label) -> Option<bool> {
        self.key(i, j, k, a, b).map(|x| self.marked.contains(x))
    }

    pub fn trace(&self) -> &[Pc1Event] {
        self.trace.as_deref().unwrap_or(&[])
    }

    fn enqueue(&mut self, q: Quint) {
        let (i, j, k, a, b) = q;
        let key = self.slot(i, j, k, a, b);
        if !self.marked.put(key) {
            self.worklist.push(q);
        }
    }

    fn enqueue_both(&mut self, i: Node, j: Node, k: Node, a: Label, b: Label) {
        self.enqueue((i, j, k, a, b));
        self.enqueue((j, i, k, b, a));
    }

    fn initialize(m: &MuseInstance, opts: Pc1Options) -> Self {
        let csp = m.csp();
        let (n, l) = (csp.num_nodes(), csp.num_labels());
        let mut pair_id = vec![NO_PAIR; n * n];
        let mut count = 0u32;
        for (i, j) in m.e_pairs() {
            pair_id[i * n + j] = count;
            count += 1;
        }
        let keys = count as usize * n * l * l;
        let locals = count as usize * l * l;
        let stride = n + 2;
        let (start, end) = (n, n + 1);
        let mut st = PathSupportState {
            n,
            l,
            pair_id,
            present: FixedBitSet::with_capacity(keys),
            counter: vec![0; keys],
            s: vec![Vec::new(); keys],
            marked: FixedBitSet::with_capacity(keys),
            popped: FixedBitSet::with_capacity(keys),
            prev: SetFamily::new(keys, stride),
            next: SetFamily::new(keys, stride),
            local_prev: SetFamily::new(locals, stride),
            local_next: SetFamily::new(locals, stride),
            worklist: Worklist::new(opts.discipline),
            stats: Pc1Stats::default(),
            trace: opts.trace.then(Vec::new),
        };
        let pairs: Vec<(Node, Node)> = m.e_pairs().collect();

        // Every key must exist before S lists refer to it.
        for &(i, j) in &pairs {
            for a in csp.domain(i).iter() {
                for b in csp.domain(j).iter() {
                    if !csp.r2(i, a, j, b) {
                        continue;
                    }
                    for k in 0..n {
                        if m.co_occur(i, k) && m.co_occur(j, k) {
                            let key = st.slot(i, j, k, a, b);
                            st.present.insert(key);
                        }
                    }
                }
            }
        }

        for &(i, j) in &pairs {
            let joint = |x: Node| x == j || m.co_occur(j, x);
            let mut local_prev: Vec<usize> =
                m.predecessors(i).iter().copied().filter(|&x| joint(x)).collect();
            // Boundary dummies only where a segment can begin or stop with
            // the other nodes on the right side.
            let rank = |x: Node| m.topo_rank(x);
            if m.is_start(i) && rank(j) > rank(i) {
                local_prev.push(start);
            }
            let mut local_next: Vec<usize> =
                m.successors(i).iter().copied().filter(|&x| joint(x)).collect();
            if m.is_end(i) && rank(j) < rank(i) {
                local_next.push(end);
            }
            let thirds: Vec<Node> = (0..n)
                .filter(|&k| m.co_occur(i, k) && m.co_occur(j, k))
                .collect();
            let supports: Vec<(Vec<usize>, Vec<usize>)> = thirds
                .iter()
                .map(|&k| {
                    let mut prev = Vec::new();
                    for &x in m.predecessors(k) {
                        if x == i {
                            prev.push(k);
                        } else if m.co_occur(i, x) && joint(x) {
                            prev.push(x);
                        }
                    }
                    if m.is_start(k) && rank(i) > rank(k) && rank(j) > rank(k) {
                        prev.push(start);
                    }
                    let mut next = Vec::new();
                    for &x in m.successors(k) {
                        if x == i {
                            next.push(k);
                        } else if m.co_occur(i, x) && joint(x) {
                            next.push(x);
                        }
                    }
                    if m.is_end(k) && rank(i) < rank(k) && rank(j) < rank(k) {
                        next.push(end);
                    }
                    (prev, next)
                })
                .collect();

            for a in csp.domain(i).iter() {
                for b in csp.domain(j).iter() {
                    if !csp.r2(i, a, j, b) {
                        continue;
                    }
                    let local = st.local_slot(i, j, a, b);
                    for &x in &local_prev {
                        st.local_prev.insert(local, x);
                    }
                    for &x in &local_next {
                        st.local_next.insert(local, x);
                    }
                    for (&k, (prev, next)) in thirds.iter().zip(&supports) {
                        let key = st.slot(i, j, k, a, b);
                        let mut total = 0;
                        for c in csp.domain(k).iter() {
                            if csp.r2(i, a, k, c) && csp.r2(k, c, j, b) {
                                total += 1;
                                let other = st.slot(i, k, j, a, c);
                                st.s[other].push(b);
                            }
                        }
                        st.counter[key] = total;
                        if total == 0 {
                            st.enqueue((i, j, k, a, b));
                        }
                        for &x in prev {
                            st.prev.insert(key, x);
                        }
                        for &x in next {
                            st.next.insert(key, x);
                        }
                    }
                }
            }
        }
        st
    }

    fn propagate(&mut self, m: &mut MuseInstance) {
        while let Some((i, j, k, a, b)) = self.worklist.pop() {
            self.stats.pops += 1;
            if let Some(t) = &mut self.trace {
                t.push(Pc1Event::Pop { i, j, k, a, b });
            }
            let key = self.slot(i, j, k, a, b);
            self.popped.insert(key);
            for idx in 0..self.s[key].len() {
                let c = self.s[key][idx];
                // `b` at `j` stops supporting `(a at i, c at k)`. The same
                // loss is also reported by popping the quintuple for the
                // edge `(k,c)-(j,b)`; count it once.
                if self.popped.contains(self.slot(k, j, i, c, b)) {
                    continue;
                }
                let first = self.slot(i, k, j, a, c);
                let second = self.slot(k, i, j, c, a);
                self.counter[first] -= 1;
                self.counter[second] -= 1;
                self.stats.counter_decrements += 2;
                if self.counter[first] == 0 && !self.marked.contains(first) {
                    self.enqueue_both(i, k, j, a, c);
                }
            }
            self.update_support_sets(m, i, j, k, a, b);
        }
    }

    fn update_support_sets(
        &mut self,
        m: &mut MuseInstance,
        i: Node,
        j: Node,
        k: Node,
        a: Label,
        b: Label,
    ) {
        let (start, end) = (self.n, self.n + 1);
        let key = self.slot(i, j, k, a, b);

        for x in self.prev.members(key) {
            if x == j || x == k || x == start {
                continue;
            }
            self.prev.remove(key, x);
            let other = self.slot(i, j, x, a, b);
            self.next.remove(other, k);
            self.stats.support_removals += 2;
            if self.next.is_empty(other) && !self.marked.contains(other) {
                self.enqueue_both(i, j, x, a, b);
            }
        }
        for x in self.next.members(key) {
            if x == j || x == k || x == end {
                continue;
            }
            self.next.remove(key, x);
            let other = self.slot(i, j, x, a, b);
            self.prev.remove(other, k);
            self.stats.support_removals += 2;
            if self.prev.is_empty(other) && !self.marked.contains(other) {
                self.enqueue_both(i, j, x, a, b);
            }
        }

        let local = self.local_slot(i, j, a, b);
        if m.has_edge(k, i) && self.local_prev.remove(local, k) {
            self.stats.local_removals += 1;
        }
        if self.local_prev.is_empty(local) {
            self.falsify(m, i, a, j, b);
            for x in self.local_next.members(local) {
                if x == j || x == k || x == end {
                    continue;
                }
                self.local_next.remove(local, x);
                self.stats.local_removals += 1;
                self.enqueue_both(i, j, x, a, b);
            }
        }
        if m.has_edge(i, k) && self.local_next.remove(local, k) {
            self.stats.local_removals += 1;
        }
        if self.local_next.is_empty(local) {
            self.falsify(m, i, a, j, b);
            for x in self.local_prev.members(local) {
                if x == j || x == k || x == start {
                    continue;
                }
                self.local_prev.remove(local, x);
                self.stats.local_removals += 1;
                self.enqueue_both(i, j, x, a, b);
            }
        }
    }

    fn falsify(&mut self, m: &mut MuseInstance, i: Node, a: Label, j: Node, b: Label) {
        if m.csp().r2(i, a, j, b) {
            m.csp_mut().set_r2(i, a, j, b, false);
            if let Some(t) = &mut self.trace {
                t.push(Pc1Event::Falsify { i, a, j, b });
            }
        }
    }
}

pub fn muse_pc1(m: MuseInstance) -> (MuseInstance, PathSupportState) {
    muse_pc1_with(m, Pc1Options::default())
}

pub fn muse_pc1_with(mut m: MuseInstance, opts: Pc1Options) -> (MuseInstance, PathSupportState) {
    let mut st = PathSupportState::initialize(&m, opts);
    st.propagate(&mut m);
    (m, st)
}

/// Alternates arc and path consistency, arc first, until neither changes
/// the instance.
pub fn muse_ac_pc_fixpoint(m: MuseInstance) -> MuseInstance {
    alternate(m, false)
}

/// Same fixpoint, starting with path consistency.
pub fn muse_pc_ac_fixpoint(m: MuseInstance) -> MuseInstance {
    alternate(m, true)
}

fn alternate(mut m: MuseInstance, pc_first: bool) -> MuseInstance {
    if pc_first {
        m = muse_pc1(m).0;
    }
    loop {
        let after_ac = muse_ac1(m).0;
        let after_pc = muse_pc1(after_ac.clone()).0;
        if after_pc == after_ac {
            return after_ac;
        }
        m = after_pc;
    }
}
