//! MUSE arc consistency (AC-1): support counters plus the four families of
//! DAG support sets that detect when a label has lost support in every
//! segment through a pair of nodes.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::csp::{Label, Node};
use crate::error::{Error, Result};
use crate::muse::{Endpoint, MuseInstance};
use crate::sets::{decode_sorted, SetFamily};
use crate::worklist::{Discipline, Worklist};

const NO_PAIR: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default)]
pub struct Ac1Options {
    pub discipline: Discipline,
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ac1Event {
    Pop { i: Node, j: Node, a: Label },
    Delete { i: Node, a: Label },
}

impl fmt::Display for Ac1Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Ac1Event::Pop { i, j, a } => write!(f, "POP ({i},{j}) {a}"),
            Ac1Event::Delete { i, a } => write!(f, "DEL {i} {a}"),
        }
    }
}

/// Operation counts, used to check the propagation cost bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Ac1Stats {
    pub pops: usize,
    pub counter_decrements: usize,
    pub support_removals: usize,
    pub local_removals: usize,
}

/// Everything AC-1 maintains, keyed by ordered pair `(i,j)` of co-occurring
/// nodes and a label `a` of `i`.
#[derive(Clone, Debug)]
pub struct SupportState {
    n: usize,
    l: usize,
    pair_id: Vec<u32>,
    present: FixedBitSet,
    counter: Vec<u32>,
    s: Vec<Vec<Label>>,
    marked: FixedBitSet,
    prev: SetFamily,
    next: SetFamily,
    local_prev: SetFamily,
    local_next: SetFamily,
    worklist: Worklist<(Node, Node, Label)>,
    pub stats: Ac1Stats,
    trace: Option<Vec<Ac1Event>>,
}

impl SupportState {
    /// Builds counters and support sets from the current domains and queues
    /// every key whose counter starts at zero.
    pub fn initialize(m: &MuseInstance, opts: Ac1Options) -> Self {
        let csp = m.csp();
        let (n, l) = (csp.num_nodes(), csp.num_labels());
        let mut pair_id = vec![NO_PAIR; n * n];
        let mut count = 0u32;
        for (i, j) in m.e_pairs() {
            pair_id[i * n + j] = count;
            count += 1;
        }
        let slots = count as usize * l;
        let stride = n + 2;
        let (start, end) = (n, n + 1);
        let mut st = SupportState {
            n,
            l,
            pair_id,
            present: FixedBitSet::with_capacity(slots),
            counter: vec![0; slots],
            s: vec![Vec::new(); slots],
            marked: FixedBitSet::with_capacity(slots),
            prev: SetFamily::new(slots, stride),
            next: SetFamily::new(slots, stride),
            local_prev: SetFamily::new(n * l, stride),
            local_next: SetFamily::new(n * l, stride),
            worklist: Worklist::new(opts.discipline),
            stats: Ac1Stats::default(),
            trace: opts.trace.then(Vec::new),
        };

        for (i, j) in m.e_pairs() {
            // The sets depend on the pair only, so compute them once.
            let mut prev = Vec::new();
            for &x in m.predecessors(j) {
                if x == i {
                    prev.push(j);
                } else if m.co_occur(i, x) {
                    prev.push(x);
                }
            }
            // A segment that begins at j cannot hold an earlier i.
            let i_after_j = m.topo_rank(i) > m.topo_rank(j);
            if m.is_start(j) && i_after_j {
                prev.push(start);
            }
            let mut next = Vec::new();
            for &x in m.successors(j) {
                if x == i {
                    next.push(j);
                } else if m.co_occur(i, x) {
                    next.push(x);
                }
            }
            if m.is_end(j) && !i_after_j {
                next.push(end);
            }
            for a in csp.domain(i).iter() {
                let key = st.slot(i, j, a);
                st.present.insert(key);
                let mut total = 0;
                for b in csp.domain(j).iter() {
                    if csp.r2(i, a, j, b) {
                        total += 1;
                        let back = st.slot(j, i, b);
                        st.s[back].push(a);
                    }
                }
                st.counter[key] = total;
                if total == 0 {
                    st.enqueue(key, i, j, a);
                }
                for &x in &prev {
                    st.prev.insert(key, x);
                }
                for &x in &next {
                    st.next.insert(key, x);
                }
            }
        }

        for i in 0..n {
            for a in csp.domain(i).iter() {
                let key = i * l + a;
                for &x in m.predecessors(i) {
                    st.local_prev.insert(key, x);
                }
                if m.is_start(i) {
                    st.local_prev.insert(key, start);
                }
                for &x in m.successors(i) {
                    st.local_next.insert(key, x);
                }
                if m.is_end(i) {
                    st.local_next.insert(key, end);
                }
            }
        }
        st
    }

    fn slot(&self, i: Node, j: Node, a: Label) -> usize {
        let p = self.pair_id[i * self.n + j];
        debug_assert_ne!(p, NO_PAIR, "({i},{j}) is not a constraint pair");
        p as usize * self.l + a
    }

    fn key(&self, i: Node, j: Node, a: Label) -> Option<usize> {
        if i >= self.n || j >= self.n || a >= self.l {
            return None;
        }
        let p = self.pair_id[i * self.n + j];
        if p == NO_PAIR {
            return None;
        }
        let key = p as usize * self.l + a;
        self.present.contains(key).then_some(key)
    }

    fn enqueue(&mut self, key: usize, i: Node, j: Node, a: Label) {
        self.marked.insert(key);
        self.worklist.push((i, j, a));
    }

    pub fn counter(&self, i: Node, j: Node, a: Label) -> Option<u32> {
        self.key(i, j, a).map(|k| self.counter[k])
    }

    /// Labels `b` of `j` whose counters toward `i` depend on `a`.
    pub fn supports(&self, i: Node, j: Node, a: Label) -> Option<&[Label]> {
        self.key(i, j, a).map(|k| self.s[k].as_slice())
    }

    pub fn is_marked(&self, i: Node, j: Node, a: Label) -> Option<bool> {
        self.key(i, j, a).map(|k| self.marked.contains(k))
    }

    /// The `x` of every member `(i,x)` of Prev-Support[(i,j),a]. `Node(j)`
    /// stands for `i` itself directly preceding `j`.
    pub fn prev_support(&self, i: Node, j: Node, a: Label) -> Option<Vec<Endpoint>> {
        self.key(i, j, a)
            .map(|k| decode_sorted(self.n, self.prev.members(k)))
    }

    pub fn next_support(&self, i: Node, j: Node, a: Label) -> Option<Vec<Endpoint>> {
        self.key(i, j, a)
            .map(|k| decode_sorted(self.n, self.next.members(k)))
    }

    pub(crate) fn next_support_contains(&self, i: Node, j: Node, a: Label, x: Endpoint) -> bool {
        match self.key(i, j, a) {
            Some(k) => self.next.contains(k, crate::sets::encode(self.n, x)),
            None => false,
        }
    }

    pub(crate) fn local_next_contains(&self, i: Node, a: Label, x: Endpoint) -> bool {
        self.local_next
            .contains(i * self.l + a, crate::sets::encode(self.n, x))
    }

    pub fn local_prev(&self, i: Node, a: Label) -> Vec<Endpoint> {
        decode_sorted(self.n, self.local_prev.members(i * self.l + a))
    }

    pub fn local_next(&self, i: Node, a: Label) -> Vec<Endpoint> {
        decode_sorted(self.n, self.local_next.members(i * self.l + a))
    }

    pub fn pending(&self) -> usize {
        self.worklist.len()
    }

    pub fn trace(&self) -> &[Ac1Event] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Runs the worklist to exhaustion.
    pub fn propagate(&mut self, m: &mut MuseInstance) {
        while let Some((i, j, a)) = self.worklist.pop() {
            self.stats.pops += 1;
            if let Some(t) = &mut self.trace {
                t.push(Ac1Event::Pop { i, j, a });
            }
            let key = self.slot(i, j, a);
            for idx in 0..self.s[key].len() {
                let b = self.s[key][idx];
                let back = self.slot(j, i, b);
                self.counter[back] -= 1;
                self.stats.counter_decrements += 1;
                if self.counter[back] == 0 && !self.marked.contains(back) {
                    self.enqueue(back, j, i, b);
                }
            }
            self.update_support_sets(m, i, j, a);
        }
    }

    fn update_support_sets(&mut self, m: &mut MuseInstance, i: Node, j: Node, a: Label) {
        let (start, end) = (self.n, self.n + 1);
        let key = self.slot(i, j, a);

        for x in self.prev.members(key) {
            if x == j || x == start {
                continue;
            }
            self.prev.remove(key, x);
            let other = self.slot(i, x, a);
            self.next.remove(other, j);
            self.stats.support_removals += 2;
            if self.next.is_empty(other) && !self.marked.contains(other) {
                self.enqueue(other, i, x, a);
            }
        }
        for x in self.next.members(key) {
            if x == j || x == end {
                continue;
            }
            self.next.remove(key, x);
            let other = self.slot(i, x, a);
            self.prev.remove(other, j);
            self.stats.support_removals += 2;
            if self.prev.is_empty(other) && !self.marked.contains(other) {
                self.enqueue(other, i, x, a);
            }
        }

        let local = i * self.l + a;
        if m.has_edge(j, i) && self.local_prev.remove(local, j) {
            self.stats.local_removals += 1;
        }
        if self.local_prev.is_empty(local) {
            self.delete_label(m, i, a);
            for x in self.local_next.members(local) {
                if x == j || x == end {
                    continue;
                }
                self.local_next.remove(local, x);
                self.stats.local_removals += 1;
                let other = self.slot(i, x, a);
                if !self.marked.contains(other) {
                    self.enqueue(other, i, x, a);
                }
            }
        }
        if m.has_edge(i, j) && self.local_next.remove(local, j) {
            self.stats.local_removals += 1;
        }
        if self.local_next.is_empty(local) {
            self.delete_label(m, i, a);
            for x in self.local_prev.members(local) {
                if x == j || x == start {
                    continue;
                }
                self.local_prev.remove(local, x);
                self.stats.local_removals += 1;
                let other = self.slot(i, x, a);
                if !self.marked.contains(other) {
                    self.enqueue(other, i, x, a);
                }
            }
        }
    }

    fn delete_label(&mut self, m: &mut MuseInstance, i: Node, a: Label) {
        if m.csp_mut().remove_label(i, a) {
            if let Some(t) = &mut self.trace {
                t.push(Ac1Event::Delete { i, a });
            }
        }
    }
}

pub fn muse_ac1(m: MuseInstance) -> (MuseInstance, SupportState) {
    muse_ac1_with(m, Ac1Options::default())
}

pub fn muse_ac1_with(mut m: MuseInstance, opts: Ac1Options) -> (MuseInstance, SupportState) {
    let mut st = SupportState::initialize(&m, opts);
    st.propagate(&mut m);
    (m, st)
}

/// Marks and queues the given keys, then propagates. Keys already marked
/// are skipped.
pub fn propagate_from(
    m: &mut MuseInstance,
    state: &mut SupportState,
    seeds: &[(Node, Node, Label)],
) -> Result<()> {
    let mut keys = Vec::with_capacity(seeds.len());
    for &(i, j, a) in seeds {
        if i >= state.n || j >= state.n || state.pair_id[i * state.n + j] == NO_PAIR {
            return Err(Error::UnknownPair(i, j));
        }
        let key = state
            .key(i, j, a)
            .ok_or(Error::UnknownLabel { node: i, label: a })?;
        keys.push((key, i, j, a));
    }
    for (key, i, j, a) in keys {
        if !state.marked.contains(key) {
            state.enqueue(key, i, j, a);
        }
    }
    state.propagate(m);
    Ok(())
}
