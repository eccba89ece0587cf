//! Constraint dependency grammar front end: word graphs and grammars are
//! compiled into a [`MuseInstance`] whose labels are role values, and
//! parsing is MUSE arc consistency followed by extraction.

mod formula;
pub mod grammars;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

pub use formula::{read_sexps, Constraint, Formula, Func, Pred, RoleView, SExp, Term, Var};

use crate::ac::muse_ac1;
use crate::csp::{enforce_node_consistency, CspInstance, Domain, Node};
use crate::error::{Error, Result};
use crate::muse::{build_muse, MuseInstance};
use crate::search::{extract_all, Assignment};
use formula::{parse_constraint, Vocabulary};

/// Half-open word position `(begin, end)` with `begin < end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub begin: i64,
    pub end: i64,
}

impl Interval {
    pub const fn new(begin: i64, end: i64) -> Self {
        Interval { begin, end }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.begin, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionOrder {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

/// Overlapping intervals are incomparable; `nil` equals only `nil`.
pub fn interval_compare(p: Option<Interval>, q: Option<Interval>) -> PositionOrder {
    match (p, q) {
        (None, None) => PositionOrder::Eq,
        (Some(p), Some(q)) if p == q => PositionOrder::Eq,
        (Some(p), Some(q)) if p.end <= q.begin => PositionOrder::Lt,
        (Some(p), Some(q)) if q.end <= p.begin => PositionOrder::Gt,
        _ => PositionOrder::Incomparable,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub categories: Vec<String>,
    pub roles: Vec<String>,
    pub labels: Vec<String>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    G1,
    G2,
    G3,
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g1" => Ok(Builtin::G1),
            "g2" | "abc" => Ok(Builtin::G2),
            "g3" | "ww" => Ok(Builtin::G3),
            _ => Err(Error::Grammar(format!("no built-in grammar named '{s}'"))),
        }
    }
}

pub fn builtin_grammar(which: Builtin) -> Grammar {
    let text = match which {
        Builtin::G1 => grammars::G1,
        Builtin::G2 => grammars::G2,
        Builtin::G3 => grammars::G3,
    };
    Grammar::parse(text).expect("built-in grammar text is well formed")
}

impl Grammar {
    /// Reads `(categories ...)`, `(roles ...)` and `(labels ...)` headers
    /// followed by `(if antecedent consequent)` constraints.
    pub fn parse(text: &str) -> Result<Grammar> {
        let exprs = read_sexps(text)?;
        let mut headers: HashMap<&str, Vec<String>> = HashMap::new();
        let mut bodies = Vec::new();
        for e in &exprs {
            if let SExp::List(items, l, c) = e {
                if let Some(SExp::Atom(head, ..)) = items.first() {
                    if matches!(head.as_str(), "categories" | "roles" | "labels") {
                        let key = match head.as_str() {
                            "categories" => "categories",
                            "roles" => "roles",
                            _ => "labels",
                        };
                        let names = items[1..]
                            .iter()
                            .map(|x| match x {
                                SExp::Atom(s, ..) => Ok(s.clone()),
                                SExp::List(_, l, c) => Err(Error::parse(*l, *c, "expected a name")),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        if headers.insert(key, names).is_some() {
                            return Err(Error::parse(*l, *c, format!("duplicate ({key} ...)")));
                        }
                        continue;
                    }
                }
            }
            bodies.push(e);
        }
        let mut take = |k: &str| {
            headers
                .remove(k)
                .filter(|v| !v.is_empty())
                .ok_or_else(|| Error::Grammar(format!("missing or empty ({k} ...)")))
        };
        let categories = take("categories")?;
        let roles = take("roles")?;
        let labels = take("labels")?;
        let symbols: Vec<&str> = categories
            .iter()
            .chain(&roles)
            .chain(&labels)
            .map(String::as_str)
            .collect();
        let vocab = Vocabulary { symbols: &symbols };
        let constraints = bodies
            .into_iter()
            .map(|e| parse_constraint(e, &vocab))
            .collect::<Result<Vec<_>>>()?;
        Ok(Grammar {
            categories,
            roles,
            labels,
            constraints,
        })
    }

    /// Number of roles per word.
    pub fn degree(&self) -> usize {
        self.roles.len()
    }

    pub fn unary(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.arity() <= 1)
    }

    pub fn binary(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.arity() == 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub id: String,
    pub form: String,
    pub cat: String,
    pub span: Interval,
}

/// DAG of word candidates. Paths from a start word to an end word are
/// sentence hypotheses.
#[derive(Clone, Debug)]
pub struct WordGraph {
    words: Vec<Word>,
    skeleton: MuseInstance,
}

impl WordGraph {
    pub fn new(
        words: Vec<Word>,
        edges: Vec<(usize, usize)>,
        starts: Vec<usize>,
        ends: Vec<usize>,
    ) -> Result<WordGraph> {
        for w in &words {
            if w.span.begin >= w.span.end {
                return Err(Error::InvalidSpec(format!("word {} has empty span {}", w.id, w.span)));
            }
        }
        for &(u, v) in &edges {
            let (Some(a), Some(b)) = (words.get(u), words.get(v)) else {
                return Err(Error::NodeOutOfRange {
                    node: u.max(v),
                    n: words.len(),
                });
            };
            if a.span.end != b.span.begin {
                return Err(Error::InvalidSpec(format!(
                    "edge {} -> {} joins {} to {}",
                    a.id, b.id, a.span, b.span
                )));
            }
        }
        let skeleton = build_muse(CspInstance::new(words.len(), 0), edges, starts, ends)?;
        Ok(WordGraph { words, skeleton })
    }

    /// One unambiguous sentence; word `k` (from 1) spans `(k, k+1)`.
    pub fn sentence(words: &[(&str, &str)]) -> WordGraph {
        let n = words.len();
        let ws = words
            .iter()
            .enumerate()
            .map(|(k, &(form, cat))| Word {
                id: format!("w{}", k + 1),
                form: form.to_string(),
                cat: cat.to_string(),
                span: Interval::new(k as i64 + 1, k as i64 + 2),
            })
            .collect();
        let edges = (1..n).map(|k| (k - 1, k)).collect();
        WordGraph::new(ws, edges, vec![0], vec![n - 1]).expect("a chain of abutting words is valid")
    }

    /// Every string of length `len` over `cats`: one word per category at
    /// each position, fully connected between neighbouring positions.
    pub fn full_lattice(len: usize, cats: &[&str]) -> WordGraph {
        assert!(len > 0 && !cats.is_empty(), "lattice needs positions and categories");
        let k = cats.len();
        let mut words = Vec::with_capacity(len * k);
        for p in 1..=len {
            for c in cats {
                words.push(Word {
                    id: format!("{p}{c}"),
                    form: c.to_string(),
                    cat: c.to_string(),
                    span: Interval::new(p as i64, p as i64 + 1),
                });
            }
        }
        let mut edges = Vec::new();
        for p in 0..len - 1 {
            for x in 0..k {
                for y in 0..k {
                    edges.push((p * k + x, (p + 1) * k + y));
                }
            }
        }
        let ends = ((len - 1) * k..len * k).collect();
        WordGraph::new(words, edges, (0..k).collect(), ends).expect("full lattice is valid")
    }

    /// `WORD id form cat b e`, `WEDGE id id`, `WSTART id`, `WEND id`.
    /// Without `WSTART`/`WEND` lines, sources and sinks are used.
    pub fn parse(text: &str) -> Result<WordGraph> {
        let mut words: Vec<Word> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut starts = Vec::new();
        let mut ends = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<(usize, &str)> = tokens(line);
            let Some(&(col, kw)) = toks.first() else {
                continue;
            };
            let arg = |k: usize| {
                toks.get(k)
                    .map(|&(_, t)| t)
                    .ok_or_else(|| Error::parse(line_no, raw.len() + 1, format!("{kw}: missing field {k}")))
            };
            let lookup = |k: usize| -> Result<usize> {
                let (c, t) = toks
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::parse(line_no, raw.len() + 1, format!("{kw}: missing word id")))?;
                index
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::parse(line_no, c, format!("unknown word '{t}'")))
            };
            let num = |k: usize| -> Result<i64> {
                let t = arg(k)?;
                t.parse()
                    .map_err(|_| Error::parse(line_no, toks[k].0, format!("expected an integer, got '{t}'")))
            };
            let arity = match kw {
                "WORD" => 6,
                "WEDGE" => 3,
                "WSTART" | "WEND" => 2,
                _ => return Err(Error::parse(line_no, col, format!("unknown keyword '{kw}'"))),
            };
            if toks.len() > arity {
                return Err(Error::parse(line_no, toks[arity].0, "unexpected trailing field"));
            }
            match kw {
                "WORD" => {
                    let id = arg(1)?.to_string();
                    if index.contains_key(&id) {
                        return Err(Error::parse(line_no, toks[1].0, format!("duplicate word '{id}'")));
                    }
                    let span = Interval::new(num(4)?, num(5)?);
                    index.insert(id.clone(), words.len());
                    words.push(Word {
                        id,
                        form: arg(2)?.to_string(),
                        cat: arg(3)?.to_string(),
                        span,
                    });
                }
                "WEDGE" => edges.push((lookup(1)?, lookup(2)?)),
                "WSTART" => starts.push(lookup(1)?),
                _ => ends.push(lookup(1)?),
            }
        }
        if starts.is_empty() {
            starts = (0..words.len()).filter(|&w| edges.iter().all(|&(_, v)| v != w)).collect();
        }
        if ends.is_empty() {
            ends = (0..words.len()).filter(|&w| edges.iter().all(|&(u, _)| u != w)).collect();
        }
        WordGraph::new(words, edges, starts, ends)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for w in &self.words {
            s += &format!("WORD {} {} {} {} {}\n", w.id, w.form, w.cat, w.span.begin, w.span.end);
        }
        for &(u, v) in self.skeleton.edges() {
            s += &format!("WEDGE {} {}\n", self.words[u].id, self.words[v].id);
        }
        for u in self.skeleton.starts() {
            s += &format!("WSTART {}\n", self.words[u].id);
        }
        for u in self.skeleton.ends() {
            s += &format!("WEND {}\n", self.words[u].id);
        }
        s
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Word-level DAG with no labels.
    pub fn skeleton(&self) -> &MuseInstance {
        &self.skeleton
    }

    pub fn co_occur(&self, u: usize, v: usize) -> bool {
        self.skeleton.co_occur(u, v)
    }
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..k]));
                start = None;
            }
            (false, None) => start = Some(k),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// `⟨label, modifiee⟩`; `None` is nil.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleValue {
    pub label: String,
    pub modifiee: Option<Interval>,
}

impl fmt::Display for RoleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modifiee {
            Some(m) => write!(f, "{}-{}", self.label, m),
            None => write!(f, "{}-nil", self.label),
        }
    }
}

/// A compiled constraint network. MUSE node `w * degree + r` is role `r`
/// of word `w`; MUSE label `k` is `values[k]`.
#[derive(Clone, Debug)]
pub struct Network {
    pub muse: MuseInstance,
    pub values: Vec<RoleValue>,
    pub words: Vec<Word>,
    pub roles: Vec<String>,
}

impl Network {
    pub fn degree(&self) -> usize {
        self.roles.len()
    }

    /// `(word, role)` of a MUSE node.
    pub fn owner(&self, node: Node) -> (usize, usize) {
        (node / self.degree(), node % self.degree())
    }

    /// Categories of the words an assignment covers, in position order.
    pub fn category_string(&self, a: &Assignment) -> Vec<String> {
        self.covered_words(a)
            .into_iter()
            .map(|w| self.words[w].cat.clone())
            .collect()
    }

    /// Role value of every `(word, role)` the assignment binds.
    pub fn role_values(&self, a: &Assignment) -> Vec<(usize, usize, RoleValue)> {
        a.binding
            .iter()
            .map(|&(i, x)| {
                let (w, r) = self.owner(i);
                (w, r, self.values[x].clone())
            })
            .collect()
    }

    /// One line per word: `pos=(b,e) form cat role=label-modifiee ...`.
    pub fn format(&self, a: &Assignment) -> String {
        let mut out = String::new();
        for w in self.covered_words(a) {
            let word = &self.words[w];
            out += &format!("pos={} {} {}", word.span, word.form, word.cat);
            for (r, role) in self.roles.iter().enumerate() {
                if let Some(x) = a.label_of(w * self.degree() + r) {
                    out += &format!(" {}={}", role, self.values[x]);
                }
            }
            out.push('\n');
        }
        out
    }

    fn covered_words(&self, a: &Assignment) -> Vec<usize> {
        let mut ws: Vec<usize> = a.binding.iter().map(|&(i, _)| self.owner(i).0).collect();
        ws.dedup();
        ws.sort_by_key(|&w| (self.words[w].span, w));
        ws
    }
}

/// Compiles `g` over `wg`: domains, unary table, and pairwise table
/// including segmental incompatibility of modifiees.
pub fn build_network(wg: &WordGraph, g: &Grammar) -> Result<Network> {
    if let Some(c) = g.constraints.iter().find(|c| c.arity() > 2) {
        return Err(Error::Grammar(format!("constraint has arity above 2: {}", c.text)));
    }
    let p = g.degree();
    let nw = wg.len();
    let spans: Vec<Interval> = wg
        .words()
        .iter()
        .map(|w| w.span)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut words_at: HashMap<Interval, Vec<usize>> = HashMap::new();
    for (w, word) in wg.words().iter().enumerate() {
        words_at.entry(word.span).or_default().push(w);
    }
    let mut values = Vec::new();
    for lab in &g.labels {
        values.push(RoleValue {
            label: lab.clone(),
            modifiee: None,
        });
        for &s in &spans {
            values.push(RoleValue {
                label: lab.clone(),
                modifiee: Some(s),
            });
        }
    }
    let nl = values.len();
    let n = nw * p;
    let mut csp = CspInstance::new(n, nl);
    csp.set_label_names(values.iter().map(ToString::to_string).collect());
    csp.set_node_names(
        (0..n)
            .map(|i| format!("{}.{}", wg.words()[i / p].id, g.roles[i % p]))
            .collect(),
    );

    // Modifiee `m` can be realized by a word sharing a segment with both
    // the owner word and `other`.
    let realizable = |m: Option<Interval>, owner: usize, other: usize| match m {
        None => true,
        Some(s) => words_at.get(&s).is_some_and(|ws| {
            ws.iter().any(|&w| {
                (w == owner || wg.co_occur(w, owner)) && (w == other || wg.co_occur(w, other))
            })
        }),
    };

    let view = |i: Node, x: usize| {
        let word = &wg.words()[i / p];
        RoleView {
            pos: word.span,
            rid: &g.roles[i % p],
            lab: &values[x].label,
            modifiee: values[x].modifiee,
            cat: &word.cat,
        }
    };

    let unary: Vec<&Constraint> = g.unary().collect();
    let binary: Vec<&Constraint> = g.binary().collect();
    for i in 0..n {
        let w = i / p;
        let own = wg.words()[w].span;
        let dom = Domain::from_labels(
            nl,
            (0..nl).filter(|&x| match values[x].modifiee {
                None => true,
                Some(s) => s != own && realizable(Some(s), w, w),
            }),
        );
        for x in dom.iter() {
            let v = view(i, x);
            if !unary.iter().all(|c| c.holds_unary(&v)) {
                csp.set_r1(i, x, false);
            }
        }
        csp.set_domain(i, dom);
    }

    let mut edges = Vec::new();
    for w in 0..nw {
        for r in 1..p {
            edges.push((w * p + r - 1, w * p + r));
        }
    }
    for &(u, v) in wg.skeleton().edges() {
        edges.push((u * p + p - 1, v * p));
    }
    let starts: Vec<Node> = wg.skeleton().starts().map(|w| w * p).collect();
    let ends: Vec<Node> = wg.skeleton().ends().map(|w| w * p + p - 1).collect();
    let mut muse = build_muse(csp, edges, starts, ends)?;

    let pairs: Vec<(Node, Node)> = muse.e_pairs().filter(|&(i, j)| i < j).collect();
    let csp = muse.csp_mut();
    for (i, j) in pairs {
        let (wi, wj) = (i / p, j / p);
        let xs: Vec<usize> = csp.domain(i).iter().filter(|&x| csp.r1(i, x)).collect();
        let ys: Vec<usize> = csp.domain(j).iter().filter(|&y| csp.r1(j, y)).collect();
        for &x in &xs {
            let vx = view(i, x);
            let x_ok = realizable(vx.modifiee, wi, wj);
            for &y in &ys {
                let vy = view(j, y);
                let ok = x_ok
                    && realizable(vy.modifiee, wj, wi)
                    && binary.iter().all(|c| c.holds(&vx, &vy) && c.holds(&vy, &vx));
                if !ok {
                    csp.set_r2(i, x, j, y, false);
                }
            }
        }
    }

    Ok(Network {
        muse,
        values,
        words: wg.words().to_vec(),
        roles: g.roles.clone(),
    })
}

/// The outcome of parsing: the pruned network and every parse it holds.
#[derive(Clone, Debug)]
pub struct ParseResult {
    pub network: Network,
    pub parses: BTreeSet<Assignment>,
}

impl ParseResult {
    pub fn surviving_values(&self) -> usize {
        self.network.muse.csp().total_labels()
    }

    /// Distinct category strings among the parses.
    pub fn sentences(&self) -> BTreeSet<Vec<String>> {
        self.parses
            .iter()
            .map(|a| self.network.category_string(a))
            .collect()
    }
}

/// Node consistency, then MUSE arc consistency, then extraction of every
/// parse.
pub fn parse(wg: &WordGraph, g: &Grammar) -> Result<ParseResult> {
    let mut network = build_network(wg, g)?;
    prune(&mut network);
    let (muse, state) = muse_ac1(network.muse);
    let parses = extract_all(&muse, &state);
    network.muse = muse;
    Ok(ParseResult { network, parses })
}

/// Node consistency in place.
pub fn prune(network: &mut Network) {
    let csp = std::mem::replace(network.muse.csp_mut(), CspInstance::new(0, 0));
    *network.muse.csp_mut() = enforce_node_consistency(csp);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_orders() {
        let i = |b, e| Some(Interval::new(b, e));
        assert_eq!(interval_compare(i(1, 2), i(2, 3)), PositionOrder::Lt);
        assert_eq!(interval_compare(i(2, 3), i(1, 2)), PositionOrder::Gt);
        assert_eq!(interval_compare(i(3, 4), i(3, 5)), PositionOrder::Incomparable);
        assert_eq!(interval_compare(None, i(1, 2)), PositionOrder::Incomparable);
        assert_eq!(interval_compare(None, None), PositionOrder::Eq);
    }

    #[test]
    fn builtin_grammar_shapes() {
        let g1 = builtin_grammar(Builtin::G1);
        assert_eq!(g1.categories, ["det", "noun", "verb"]);
        let g2 = builtin_grammar(Builtin::G2);
        assert_eq!(g2.degree(), 1);
        assert_eq!(g2.labels, ["a", "b", "c"]);
        assert_eq!(g2.unary().count(), 3);
        let g3 = builtin_grammar(Builtin::G3);
        assert_eq!(g3.labels, ["w1", "w2"]);
        assert_eq!((g3.unary().count(), g3.binary().count()), (2, 6));
    }

    #[test]
    fn single_word_with_no_constraints_has_only_nil_modifiees() {
        let g = Grammar::parse("(categories n) (roles governor) (labels x y)").unwrap();
        let net = build_network(&WordGraph::sentence(&[("w", "n")]), &g).unwrap();
        let dom: Vec<String> = net.muse.csp().domain(0).iter().map(|x| net.values[x].to_string()).collect();
        assert_eq!(dom, ["x-nil", "y-nil"]);
    }

    #[test]
    fn unknown_symbol_is_reported_with_position() {
        let err = Grammar::parse("(categories a)\n(roles g)\n(labels l)\n(if (= (cat x) zz) (= (lab x) l))")
            .unwrap_err();
        assert_eq!(err, Error::parse(4, 16, "unknown symbol 'zz'"));
    }
}
