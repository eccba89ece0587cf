//! Random instance generation and the profile and timing experiments.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ac::muse_ac1;
use crate::cdg::{build_network, builtin_grammar, prune, Builtin, WordGraph};
use crate::csp::{ac4, CspInstance, Domain, Label, Node};
use crate::error::{Error, Result};
use crate::muse::{build_muse, MuseInstance};
use crate::search::{extract_all, extract_all_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Complete `branching`-ary tree, `path_length` levels deep.
    Tree,
    /// `path_length` layers of `branching` nodes, fully connected between
    /// neighbouring layers.
    Lattice,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(Topology::Tree),
            "lattice" => Ok(Topology::Lattice),
            _ => Err(Error::InvalidSpec(format!("unknown topology '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopologySpec {
    pub kind: Topology,
    pub branching: usize,
    pub path_length: usize,
    pub labels: usize,
    /// Probability that a pairwise entry is admissible.
    pub p: f64,
    pub seed: u64,
}

impl TopologySpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidSpec(format!("p = {} is outside [0,1]", self.p)));
        }
        if self.branching == 0 || self.path_length == 0 || self.labels == 0 {
            return Err(Error::InvalidSpec(
                "branching, path length and labels must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        match self.kind {
            Topology::Tree => (0..self.path_length).map(|k| self.branching.pow(k as u32)).sum(),
            Topology::Lattice => self.branching * self.path_length,
        }
    }
}

type Shape = (usize, Vec<(Node, Node)>, Vec<Node>, Vec<Node>);

/// Node count, edges, starts and ends of the requested topology.
fn topology(spec: &TopologySpec) -> Shape {
    let b = spec.branching;
    let n = spec.num_nodes();
    let mut edges = Vec::new();
    match spec.kind {
        Topology::Tree => {
            // Level-order numbering: children of `i` are `b*i+1 ..= b*i+b`.
            for i in 0..n {
                for c in 1..=b {
                    if b * i + c < n {
                        edges.push((i, b * i + c));
                    }
                }
            }
            let first_leaf = n - b.pow(spec.path_length as u32 - 1);
            (n, edges, vec![0], (first_leaf..n).collect())
        }
        Topology::Lattice => {
            for layer in 0..spec.path_length - 1 {
                for x in 0..b {
                    for y in 0..b {
                        edges.push((layer * b + x, (layer + 1) * b + y));
                    }
                }
            }
            (n, edges, (0..b).collect(), (n - b..n).collect())
        }
    }
}

/// Random instance over the requested topology: full domains, and every pairwise
/// entry between co-occurring nodes admissible with probability `p`.
pub fn gen_random(spec: &TopologySpec) -> Result<MuseInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    gen_random_with(spec, &mut rng)
}

pub fn gen_random_with(spec: &TopologySpec, rng: &mut impl Rng) -> Result<MuseInstance> {
    spec.validate()?;
    let (n, edges, starts, ends) = topology(spec);
    let l = spec.labels;
    let mut m = build_muse(CspInstance::new(n, l), edges, starts, ends)?;
    fill_pairs(&mut m, spec.p, rng);
    Ok(m)
}

fn fill_pairs(m: &mut MuseInstance, p: f64, rng: &mut impl Rng) {
    let pairs: Vec<(Node, Node)> = m.e_pairs().filter(|&(i, j)| i < j).collect();
    let l = m.csp().num_labels();
    let csp = m.csp_mut();
    for (i, j) in pairs {
        for a in 0..l {
            for b in 0..l {
                csp.set_r2(i, a, j, b, rng.gen_bool(p));
            }
        }
    }
}

/// Shape limits for [`random_muse`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomShape {
    pub max_nodes: usize,
    pub max_labels: usize,
    pub max_segments: usize,
    pub p: f64,
}

/// Small random DAG instance for cross-checking against the oracles.
/// Domains are random non-empty subsets; a few labels fail the unary
/// relation.
pub fn random_muse(shape: &RandomShape, rng: &mut impl Rng) -> MuseInstance {
    loop {
        let n = rng.gen_range(1..=shape.max_nodes);
        let l = rng.gen_range(1..=shape.max_labels);
        let density = rng.gen_range(0.2..0.7);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    edges.push((i, j));
                }
            }
        }
        let has_pred = |j: Node| edges.iter().any(|&(_, y)| y == j);
        let has_succ = |i: Node| edges.iter().any(|&(x, _)| x == i);
        let starts: Vec<Node> = (0..n).filter(|&i| !has_pred(i) || rng.gen_bool(0.15)).collect();
        let ends: Vec<Node> = (0..n).filter(|&i| !has_succ(i) || rng.gen_bool(0.15)).collect();
        let mut csp = CspInstance::new(n, l);
        for i in 0..n {
            let mut d: Vec<Label> = (0..l).filter(|_| rng.gen_bool(0.8)).collect();
            if d.is_empty() {
                d.push(rng.gen_range(0..l));
            }
            for &a in &d {
                if rng.gen_bool(0.05) {
                    csp.set_r1(i, a, false);
                }
            }
            csp.set_domain(i, Domain::from_labels(l, d));
        }
        let Ok(mut m) = build_muse(csp, edges, starts, ends) else {
            continue;
        };
        if m.enumerate_segments().len() > shape.max_segments {
            continue;
        }
        fill_pairs(&mut m, shape.p, rng);
        let csp = std::mem::replace(m.csp_mut(), CspInstance::new(0, 0));
        *m.csp_mut() = crate::csp::enforce_node_consistency(csp);
        return m;
    }
}

/// Random single-segment instance with `n` nodes in a chain.
pub fn random_chain(n: usize, l: usize, p: f64, rng: &mut impl Rng) -> MuseInstance {
    let mut m = MuseInstance::chain(CspInstance::new(n, l));
    fill_pairs(&mut m, p, rng);
    m
}

/// Mean label counts at one constraint probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub p: f64,
    /// Left by MUSE AC-1.
    pub after: f64,
    /// Used by at least one solution.
    pub solution: f64,
    /// Left by arc consistency on at least one segment taken alone.
    pub csp_ac: f64,
    pub unused: f64,
    /// Labels before any filtering.
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub kind: Topology,
    pub branching: usize,
    pub path_length: usize,
    pub labels: usize,
    pub ps: Vec<f64>,
    pub instances: usize,
    pub seed: u64,
}

impl ProfileSpec {
    /// 0.05 to 0.95 in steps of 0.05.
    pub fn default_ps() -> Vec<f64> {
        (1..=19).map(|k| k as f64 * 0.05).collect()
    }
}

/// Label counts of one instance: (after, solution, csp_ac, total).
pub fn profile_instance(m: MuseInstance) -> (usize, usize, usize, usize) {
    let total = m.csp().total_labels();
    let (m, state) = muse_ac1(m);
    let after = m.csp().total_labels();
    let in_solution: BTreeSet<(Node, Label)> = extract_all(&m, &state)
        .iter()
        .flat_map(|a| a.binding.iter().copied())
        .collect();
    let mut in_ac: BTreeSet<(Node, Label)> = BTreeSet::new();
    for seg in m.enumerate_segments() {
        let order = m.path_order(&seg);
        let sub = ac4(m.csp().restrict(&order));
        if sub.is_wiped_out() {
            continue;
        }
        for (x, &i) in order.iter().enumerate() {
            in_ac.extend(sub.domain(x).iter().map(|a| (i, a)));
        }
    }
    (after, in_solution.len(), in_ac.len(), total)
}

/// Rows in sweep order. Instance `k` at sweep index `s` draws from its own
/// ChaCha8 stream, so rows do not depend on each other.
pub fn run_profile(spec: &ProfileSpec) -> Result<Vec<ProfileRow>> {
    let mut rows = Vec::with_capacity(spec.ps.len());
    for (s, &p) in spec.ps.iter().enumerate() {
        let topo = TopologySpec {
            kind: spec.kind,
            branching: spec.branching,
            path_length: spec.path_length,
            labels: spec.labels,
            p,
            seed: spec.seed,
        };
        topo.validate()?;
        let mut sums = [0usize; 4];
        for k in 0..spec.instances {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream((s * spec.instances + k) as u64);
            let m = gen_random_with(&topo, &mut rng)?;
            let (after, solution, csp_ac, total) = profile_instance(m);
            for (acc, v) in sums.iter_mut().zip([after, solution, csp_ac, total]) {
                *acc += v;
            }
        }
        let mean = |x: usize| x as f64 / spec.instances.max(1) as f64;
        rows.push(ProfileRow {
            p,
            after: mean(sums[0]),
            solution: mean(sums[1]),
            csp_ac: mean(sums[2]),
            unused: mean(sums[0]) - mean(sums[2]),
            total: mean(sums[3]),
        });
    }
    Ok(rows)
}

pub fn profile_csv(seed: u64, rows: &[ProfileRow]) -> String {
    let mut out = format!("# seed={seed}\np,after,solution,csp_ac,unused\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.2},{:.3},{:.3},{:.3},{:.3}",
            r.p, r.after, r.solution, r.csp_ac, r.unused
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Language {
    /// a^n b^n c^n over lattices of length 3n.
    Abc,
    /// ww over lattices of length 2n.
    Ww,
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abc" => Ok(Language::Abc),
            "ww" => Ok(Language::Ww),
            _ => Err(Error::InvalidSpec(format!("unknown language '{s}'"))),
        }
    }
}

impl Language {
    pub fn lattice_length(self, n: usize) -> usize {
        match self {
            Language::Abc => 3 * n,
            Language::Ww => 2 * n,
        }
    }

    pub fn grammar(self) -> Builtin {
        match self {
            Language::Abc => Builtin::G2,
            Language::Ww => Builtin::G3,
        }
    }
}

/// Median wall-clock seconds of both pipelines at one size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingRow {
    pub n: usize,
    /// Extracting every parse from the compiled network with no filtering.
    pub t_raw: f64,
    /// Node consistency, MUSE AC-1, then guided extraction.
    pub t_muse: f64,
    pub parses_raw: usize,
    pub parses_muse: usize,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Times both pipelines `reps` times per size; network compilation is not
/// timed. `raw_limit` skips the unfiltered search above that size.
pub fn run_timing(lang: Language, sizes: &[usize], reps: usize, raw_limit: Option<usize>) -> Result<Vec<TimingRow>> {
    let g = builtin_grammar(lang.grammar());
    let mut rows = Vec::new();
    for &n in sizes {
        let wg = WordGraph::full_lattice(lang.lattice_length(n), &["a", "b", "c"]);
        let net = build_network(&wg, &g)?;
        let mut raw = Vec::new();
        let mut guided = Vec::new();
        let (mut parses_raw, mut parses_muse) = (0, 0);
        for _ in 0..reps.max(1) {
            if raw_limit.is_none_or(|lim| n <= lim) {
                let t = Instant::now();
                let (found, _) = extract_all_with(&net.muse, None);
                raw.push(t.elapsed().as_secs_f64());
                parses_raw = found.len();
            }
            let t = Instant::now();
            let mut copy = net.clone();
            prune(&mut copy);
            let (m, state) = muse_ac1(copy.muse);
            let found = extract_all(&m, &state);
            guided.push(t.elapsed().as_secs_f64());
            parses_muse = found.len();
        }
        rows.push(TimingRow {
            n,
            t_raw: if raw.is_empty() { f64::NAN } else { median(raw) },
            t_muse: median(guided),
            parses_raw,
            parses_muse,
        });
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("n,t_raw,t_muse\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.6},{:.6}", r.n, r.t_raw, r.t_muse);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: Topology, p: f64) -> TopologySpec {
        TopologySpec {
            kind,
            branching: 2,
            path_length: 4,
            labels: 3,
            p,
            seed: 7,
        }
    }

    #[test]
    fn binary_tree_of_depth_four_has_fifteen_nodes() {
        let m = gen_random(&spec(Topology::Tree, 0.5)).unwrap();
        assert_eq!(m.num_nodes(), 15);
        assert_eq!(m.starts().collect::<Vec<_>>(), [0]);
        assert_eq!(m.ends().count(), 8);
        assert_eq!(m.enumerate_segments().len(), 8);
    }

    #[test]
    fn lattice_paths() {
        let m = gen_random(&spec(Topology::Lattice, 0.5)).unwrap();
        assert_eq!(m.num_nodes(), 8);
        assert_eq!(m.enumerate_segments().len(), 16);
    }

    #[test]
    fn certain_constraints_remove_nothing_and_impossible_ones_everything() {
        for kind in [Topology::Tree, Topology::Lattice] {
            let m = gen_random(&spec(kind, 1.0)).unwrap();
            let before = m.csp().total_labels();
            assert_eq!(muse_ac1(m).0.csp().total_labels(), before);
            let m = gen_random(&spec(kind, 0.0)).unwrap();
            assert!(muse_ac1(m).0.csp().all_domains_empty());
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let s = spec(Topology::Lattice, 0.4);
        assert_eq!(gen_random(&s).unwrap(), gen_random(&s).unwrap());
    }

    #[test]
    fn invalid_probability_is_rejected() {
        assert!(gen_random(&spec(Topology::Tree, 1.5)).is_err());
    }
}
