//! Merging separate CSPs that share named variables into one MUSE DAG.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::csp::{CspInstance, Node};
use crate::error::{Error, Result};
use crate::muse::{build_muse, MuseInstance};

/// A segment position: one of the dummies or a named node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tok {
    Start,
    Name(String),
    End,
}

/// Outcome of the three sharing conditions for one shared name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedCheck {
    pub name: String,
    pub domains_equal: bool,
    pub unary_equal: bool,
    pub binary_equal: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeCompatibility {
    pub shared: Vec<SharedCheck>,
}

impl MergeCompatibility {
    pub fn is_mergeable(&self) -> bool {
        self.shared
            .iter()
            .all(|c| c.domains_equal && c.unary_equal && c.binary_equal)
    }

    /// The first violated condition, as an error naming the node.
    pub fn violation(&self) -> Option<Error> {
        self.shared.iter().find_map(|c| {
            let reason = if !c.domains_equal {
                "domains differ (condition 1)"
            } else if !c.unary_equal {
                "unary constraints differ (condition 2)"
            } else if !c.binary_equal {
                "binary constraints with a common node differ (condition 3)"
            } else {
                return None;
            };
            Some(Error::Merge {
                name: c.name.clone(),
                reason: reason.into(),
            })
        })
    }
}

fn name_index(csp: &CspInstance) -> HashMap<&str, Node> {
    csp.node_names()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect()
}

/// Compares every pair of CSPs on each name they share. All CSPs must use
/// the same label set.
pub fn check_mergeable(csps: &[CspInstance]) -> Result<MergeCompatibility> {
    if let Some(first) = csps.first() {
        if let Some(other) = csps.iter().find(|c| c.label_names() != first.label_names()) {
            return Err(Error::Merge {
                name: other.node_names().first().cloned().unwrap_or_default(),
                reason: "label sets differ".into(),
            });
        }
    }
    let indices: Vec<HashMap<&str, Node>> = csps.iter().map(name_index).collect();
    let mut checks: BTreeMap<String, SharedCheck> = BTreeMap::new();
    for p in 0..csps.len() {
        for q in p + 1..csps.len() {
            let (cp, cq) = (&csps[p], &csps[q]);
            let common: Vec<(&str, Node, Node)> = indices[p]
                .iter()
                .filter_map(|(&name, &i)| indices[q].get(name).map(|&j| (name, i, j)))
                .collect();
            for &(name, i, j) in &common {
                let l = cp.num_labels();
                let domains_equal = cp.domain(i) == cq.domain(j);
                let unary_equal = (0..l).all(|a| cp.r1(i, a) == cq.r1(j, a));
                let binary_equal = common.iter().filter(|c| c.0 != name).all(|&(_, x, y)| {
                    (0..l).all(|a| (0..l).all(|b| cp.r2(i, a, x, b) == cq.r2(j, a, y, b)))
                });
                let entry = checks.entry(name.to_string()).or_insert(SharedCheck {
                    name: name.to_string(),
                    domains_equal: true,
                    unary_equal: true,
                    binary_equal: true,
                });
                entry.domains_equal &= domains_equal;
                entry.unary_equal &= unary_equal;
                entry.binary_equal &= binary_equal;
            }
        }
    }
    Ok(MergeCompatibility {
        shared: checks.into_values().collect(),
    })
}

/// The `>` order on nodes: start greatest, end least, otherwise more
/// occurrences first, ties broken by earlier first appearance.
struct Precedence {
    rank: HashMap<String, (usize, Reverse<usize>)>,
}

impl Precedence {
    fn new(segments: &[Vec<Tok>]) -> Self {
        let mut rank: HashMap<String, (usize, Reverse<usize>)> = HashMap::new();
        let mut ordinal = 0;
        for seg in segments {
            for t in seg {
                if let Tok::Name(s) = t {
                    let e = rank.entry(s.clone()).or_insert_with(|| {
                        ordinal += 1;
                        (0, Reverse(ordinal))
                    });
                    e.0 += 1;
                }
            }
        }
        Precedence { rank }
    }

    fn key(&self, t: &Tok) -> (u8, usize, Reverse<usize>) {
        match t {
            Tok::Start => (2, 0, Reverse(0)),
            Tok::End => (0, 0, Reverse(0)),
            Tok::Name(s) => {
                let (f, o) = self.rank[s];
                (1, f, o)
            }
        }
    }
}

/// Elementary-step counters for the merge routines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub order_steps: usize,
    pub create_steps: usize,
}

fn augment(segments: &[Vec<String>]) -> Vec<Vec<Tok>> {
    segments
        .iter()
        .map(|s| {
            let mut v = vec![Tok::Start];
            v.extend(s.iter().cloned().map(Tok::Name));
            v.push(Tok::End);
            v
        })
        .collect()
}

/// Reorders the nodes of each segment so frequently shared nodes come
/// early and in a common order. Input and output include the dummies.
pub fn order_sigma(segments: &mut [Vec<Tok>]) -> usize {
    let prec = Precedence::new(segments);
    let mut steps = 0;
    let all: Vec<usize> = (0..segments.len()).collect();
    order_group(segments, all, &Tok::Start, &prec, &mut steps);
    steps
}

fn order_group(segs: &mut [Vec<Tok>], mut z: Vec<usize>, j: &Tok, prec: &Precedence, steps: &mut usize) {
    let mut placed: BTreeSet<Tok> = BTreeSet::new();
    while !z.is_empty() {
        let mut r: BTreeSet<&Tok> = BTreeSet::new();
        for &s in &z {
            *steps += segs[s].len();
            r.extend(segs[s].iter());
        }
        let below = |t: &&&Tok| prec.key(t) < prec.key(j);
        let fresh = r.iter().filter(|t| !placed.contains(**t)).filter(below).max_by_key(|t| prec.key(t));
        let i = fresh
            .or_else(|| r.iter().filter(below).max_by_key(|t| prec.key(t)))
            .map(|t| (*t).clone())
            .expect("end is below every other node");
        let (group, rest): (Vec<usize>, Vec<usize>) = z.iter().partition(|&&s| segs[s].contains(&i));
        z = rest;
        if i != Tok::End {
            for &s in &group {
                *steps += segs[s].len();
                let seg = &mut segs[s];
                let from = seg.iter().position(|t| *t == i).expect("group member holds i");
                seg.remove(from);
                let at = seg.iter().position(|t| t == j).expect("j precedes i") + 1;
                seg.insert(at, i.clone());
                placed.extend(seg.iter().cloned());
            }
            order_group(segs, group, &i, prec, steps);
        }
    }
}

/// A merged DAG over named nodes. Clones of a shared name are suffixed
/// with apostrophes and remember their original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedDag {
    pub names: Vec<String>,
    pub original: Vec<String>,
    pub edges: Vec<(Node, Node)>,
    pub starts: Vec<Node>,
    pub ends: Vec<Node>,
    /// Whether the merge had to fall back to the minimized prefix tree.
    pub fell_back: bool,
    pub stats: MergeStats,
}

impl NamedDag {
    /// Node-name sets of all start-to-end paths, with clones mapped back.
    pub fn path_family(&self) -> BTreeSet<BTreeSet<String>> {
        let n = self.names.len();
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            succ[a].push(b);
        }
        let ends: BTreeSet<Node> = self.ends.iter().copied().collect();
        let mut out = BTreeSet::new();
        let mut stack: Vec<(Node, Vec<Node>)> = self.starts.iter().map(|&s| (s, vec![s])).collect();
        while let Some((v, path)) = stack.pop() {
            if ends.contains(&v) {
                out.insert(path.iter().map(|&x| self.original[x].clone()).collect());
            }
            for &w in &succ[v] {
                let mut p = path.clone();
                p.push(w);
                stack.push((w, p));
            }
        }
        out
    }

    fn path_count(&self) -> u128 {
        let n = self.names.len();
        let mut indeg = vec![0; n];
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut order: Vec<Node> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    order.push(w);
                }
            }
        }
        if order.len() < n {
            return u128::MAX;
        }
        let mut ways = vec![0u128; n];
        for &s in &self.starts {
            ways[s] = 1;
        }
        let mut total = 0u128;
        for &v in &order {
            if self.ends.contains(&v) {
                total = total.saturating_add(ways[v]);
            }
            for &w in &succ[v] {
                ways[w] = ways[w].saturating_add(ways[v]);
            }
        }
        total
    }
}

/// Builds a DAG whose paths are exactly the given segments (as name sets).
pub fn create_dag(segments: &[Vec<String>]) -> NamedDag {
    let family: BTreeSet<BTreeSet<String>> = segments
        .iter()
        .map(|s| s.iter().cloned().collect())
        .collect();
    let mut segs = augment(segments);
    let order_steps = order_sigma(&mut segs);
    let ordered = segs.clone();
    let (mut dag, create_steps) = merge_positions(&mut segs);
    dag.stats = MergeStats {
        order_steps,
        create_steps,
    };
    let ok = dag.path_count() == family.len() as u128 && dag.path_family() == family;
    if ok {
        return dag;
    }
    let mut fallback = minimized_trie(&ordered);
    fallback.stats = dag.stats;
    fallback.fell_back = true;
    fallback
}

fn merge_positions(segs: &mut [Vec<Tok>]) -> (NamedDag, usize) {
    let mut steps = 0;
    let mut names: Vec<String> = Vec::new();
    let mut original: Vec<String> = Vec::new();
    let mut index: HashMap<String, Node> = HashMap::new();
    let mut next_of: Vec<BTreeSet<Tok>> = Vec::new();
    let mut edges: BTreeSet<(Tok, Tok)> = BTreeSet::new();
    let maxlen = segs.iter().map(Vec::len).max().unwrap_or(0);

    for pos in 1..maxlen {
        let mut remaining: Vec<usize> = (0..segs.len()).filter(|&s| segs[s].len() > pos).collect();
        while let Some(&s) = remaining.first() {
            steps += remaining.len();
            let prev = segs[s][pos - 1].clone();
            let cur = segs[s][pos].clone();
            let Tok::Name(cur_name) = cur.clone() else {
                edges.insert((prev, cur));
                remaining.remove(0);
                continue;
            };
            let (same, rest): (Vec<usize>, Vec<usize>) = remaining
                .iter()
                .partition(|&&t| segs[t][pos - 1] == prev && segs[t][pos] == cur);
            remaining = rest;
            let next_set: BTreeSet<Tok> = same.iter().map(|&t| segs[t][pos + 1].clone()).collect();

            let Some(&existing) = index.get(&cur_name) else {
                index.insert(cur_name.clone(), names.len());
                names.push(cur_name.clone());
                original.push(cur_name.clone());
                next_of.push(next_set);
                edges.insert((prev, cur));
                continue;
            };
            if next_of[existing] == next_set {
                edges.insert((prev, cur));
                continue;
            }
            let base = original[existing].clone();
            let mut clone = format!("{cur_name}'");
            loop {
                steps += 1;
                match index.get(&clone) {
                    None => {
                        index.insert(clone.clone(), names.len());
                        names.push(clone.clone());
                        original.push(base.clone());
                        next_of.push(next_set.clone());
                        break;
                    }
                    Some(&c) if next_of[c] == next_set => break,
                    Some(_) => clone.push('\''),
                }
            }
            let clone_tok = Tok::Name(clone.clone());
            if let Tok::Name(p) = &prev {
                let pi = index[p];
                if next_of[pi].remove(&cur) {
                    next_of[pi].insert(clone_tok.clone());
                }
            }
            edges.insert((prev, clone_tok.clone()));
            for &t in &same {
                segs[t][pos] = clone_tok.clone();
            }
        }
    }

    let node = |t: &Tok| match t {
        Tok::Name(s) => Some(index[s]),
        _ => None,
    };
    let mut dag = NamedDag {
        names,
        original,
        edges: Vec::new(),
        starts: Vec::new(),
        ends: Vec::new(),
        fell_back: false,
        stats: MergeStats::default(),
    };
    for (a, b) in &edges {
        match (node(a), node(b)) {
            (Some(x), Some(y)) => dag.edges.push((x, y)),
            (None, Some(y)) if *a == Tok::Start => dag.starts.push(y),
            (Some(x), None) if *b == Tok::End => dag.ends.push(x),
            _ => {}
        }
    }
    dag.starts.sort_unstable();
    dag.ends.sort_unstable();
    (dag, steps)
}

/// Prefix tree of the ordered segments with equivalent suffixes merged.
/// Its paths are exactly the input sequences.
fn minimized_trie(segs: &[Vec<Tok>]) -> NamedDag {
    struct TrieNode {
        name: String,
        children: BTreeMap<String, usize>,
        terminal: bool,
    }
    let mut trie = vec![TrieNode {
        name: String::new(),
        children: BTreeMap::new(),
        terminal: false,
    }];
    for seg in segs {
        let mut at = 0;
        for t in seg {
            if let Tok::Name(s) = t {
                at = match trie[at].children.get(s) {
                    Some(&c) => c,
                    None => {
                        trie.push(TrieNode {
                            name: s.clone(),
                            children: BTreeMap::new(),
                            terminal: false,
                        });
                        let c = trie.len() - 1;
                        trie[at].children.insert(s.clone(), c);
                        c
                    }
                };
            }
        }
        trie[at].terminal = true;
    }

    // Children always have larger indices, so a reverse sweep is bottom-up.
    let mut class = vec![usize::MAX; trie.len()];
    let mut signatures: HashMap<(String, bool, Vec<usize>), usize> = HashMap::new();
    let mut class_name: Vec<String> = Vec::new();
    for v in (1..trie.len()).rev() {
        let mut kids: Vec<usize> = trie[v].children.values().map(|&c| class[c]).collect();
        kids.sort_unstable();
        let sig = (trie[v].name.clone(), trie[v].terminal, kids);
        let next = signatures.len();
        let id = *signatures.entry(sig).or_insert(next);
        if id == class_name.len() {
            class_name.push(trie[v].name.clone());
        }
        class[v] = id;
    }

    let mut seen: HashMap<String, usize> = HashMap::new();
    let names: Vec<String> = class_name
        .iter()
        .map(|s| {
            let k = seen.entry(s.clone()).or_insert(0);
            let out = format!("{s}{}", "'".repeat(*k));
            *k += 1;
            out
        })
        .collect();
    let mut edges = BTreeSet::new();
    let mut ends = BTreeSet::new();
    for v in 1..trie.len() {
        for &c in trie[v].children.values() {
            edges.insert((class[v], class[c]));
        }
        if trie[v].terminal {
            ends.insert(class[v]);
        }
    }
    let starts: BTreeSet<usize> = trie[0].children.values().map(|&c| class[c]).collect();
    NamedDag {
        names,
        original: class_name,
        edges: edges.into_iter().collect(),
        starts: starts.into_iter().collect(),
        ends: ends.into_iter().collect(),
        fell_back: false,
        stats: MergeStats::default(),
    }
}

/// Checks the sharing conditions, merges the CSPs' node sets into a DAG
/// and builds the combined instance. Clones copy their original's data.
pub fn combine(csps: &[CspInstance]) -> Result<(MuseInstance, NamedDag)> {
    let compat = check_mergeable(csps)?;
    if let Some(e) = compat.violation() {
        return Err(e);
    }
    let Some(first) = csps.first() else {
        return Err(Error::InvalidSpec("nothing to combine".into()));
    };
    let segments: Vec<Vec<String>> = csps.iter().map(|c| c.node_names().to_vec()).collect();
    let dag = create_dag(&segments);
    let indices: Vec<HashMap<&str, Node>> = csps.iter().map(name_index).collect();
    let home = |name: &str| {
        indices
            .iter()
            .enumerate()
            .find_map(|(p, ix)| ix.get(name).map(|&i| (p, i)))
            .expect("every DAG node comes from some input")
    };
    let n = dag.names.len();
    let l = first.num_labels();
    let mut csp = CspInstance::new(n, l);
    csp.set_label_names(first.label_names().to_vec());
    csp.set_node_names(dag.names.clone());
    for v in 0..n {
        let (p, i) = home(&dag.original[v]);
        csp.set_domain(v, csps[p].domain(i).clone());
        for a in 0..l {
            csp.set_r1(v, a, csps[p].r1(i, a));
        }
    }
    for v in 0..n {
        for w in v + 1..n {
            let (x, y) = (dag.original[v].as_str(), dag.original[w].as_str());
            let holder = indices
                .iter()
                .enumerate()
                .find_map(|(p, ix)| Some((p, *ix.get(x)?, *ix.get(y)?)));
            if let Some((p, i, j)) = holder {
                for a in 0..l {
                    for b in 0..l {
                        csp.set_r2(v, a, w, b, csps[p].r2(i, a, j, b));
                    }
                }
            }
        }
    }
    let m = build_muse(csp, dag.edges.clone(), dag.starts.clone(), dag.ends.clone())?;
    Ok((m, dag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_segment_is_a_chain() {
        let dag = create_dag(&[strs(&["a", "b", "c"])]);
        assert_eq!(dag.names.len(), 3);
        assert_eq!(dag.edges.len(), 2);
        assert_eq!(dag.starts.len(), 1);
        assert_eq!(dag.ends.len(), 1);
    }

    #[test]
    fn order_sigma_puts_shared_node_first() {
        let mut segs = augment(&[strs(&["1", "2"]), strs(&["2", "3"])]);
        order_sigma(&mut segs);
        let name = |s: &str| Tok::Name(s.into());
        assert_eq!(segs[0], vec![Tok::Start, name("2"), name("1"), Tok::End]);
        assert_eq!(segs[1], vec![Tok::Start, name("2"), name("3"), Tok::End]);
    }
}
