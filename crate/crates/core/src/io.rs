//! Line-oriented text formats for instances, solutions and share lists.
//!
//! ```text
//! NODES 3
//! LABELS 2 red green
//! NAME 0 x              # optional node name
//! DOMAIN 0: red green
//! R1 1 green: 0
//! R2 0 red 1 red: 0
//! ARC 0 1               # plain CSPs only; default is the complete graph
//! EDGE 0 1              # segment DAG; without EDGE lines nodes form a chain
//! START 0
//! END 2
//! ```

use std::collections::HashMap;

use crate::csp::{CspInstance, Domain, Label, Node};
use crate::error::{Error, Result};
use crate::muse::{build_muse, MuseInstance};
use crate::search::Assignment;

/// Parsed contents of an instance file before the DAG is validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub csp: CspInstance,
    pub edges: Vec<(Node, Node)>,
    pub starts: Vec<Node>,
    pub ends: Vec<Node>,
}

impl InstanceFile {
    pub fn has_dag(&self) -> bool {
        !self.edges.is_empty() || !self.starts.is_empty() || !self.ends.is_empty()
    }

    /// The declared DAG, or a single chain segment when none is declared.
    pub fn into_muse(self) -> Result<MuseInstance> {
        if self.has_dag() {
            build_muse(self.csp, self.edges, self.starts, self.ends)
        } else {
            Ok(MuseInstance::chain(self.csp))
        }
    }
}

/// Whitespace-separated tokens with 1-based columns; `:` is its own token.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (k, ch) in line.char_indices() {
        if ch.is_whitespace() || ch == ':' {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..k]));
            }
            if ch == ':' {
                out.push((k + 1, &line[k..k + 1]));
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

struct Line<'a> {
    no: usize,
    end_col: usize,
    toks: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn err(&self, k: usize, msg: impl Into<String>) -> Error {
        let col = self.toks.get(k).map_or(self.end_col, |t| t.0);
        Error::parse(self.no, col, msg)
    }

    fn tok(&self, k: usize) -> Result<&'a str> {
        self.toks
            .get(k)
            .map(|t| t.1)
            .ok_or_else(|| self.err(k, format!("{}: missing field", self.toks[0].1)))
    }

    fn usize(&self, k: usize) -> Result<usize> {
        let t = self.tok(k)?;
        t.parse().map_err(|_| self.err(k, format!("expected a number, got '{t}'")))
    }

    fn node(&self, k: usize, n: usize) -> Result<Node> {
        let i = self.usize(k)?;
        if i >= n {
            return Err(self.err(k, format!("node {i} out of range (NODES {n})")));
        }
        Ok(i)
    }

    fn label(&self, k: usize, names: &HashMap<String, Label>, l: usize) -> Result<Label> {
        let t = self.tok(k)?;
        if let Some(&a) = names.get(t) {
            return Ok(a);
        }
        match t.parse::<usize>() {
            Ok(a) if a < l => Ok(a),
            _ => Err(self.err(k, format!("unknown label '{t}'"))),
        }
    }

    fn colon(&self, k: usize) -> Result<()> {
        if self.tok(k)? == ":" {
            Ok(())
        } else {
            Err(self.err(k, "expected ':'"))
        }
    }

    fn bit(&self, k: usize) -> Result<bool> {
        match self.tok(k)? {
            "0" => Ok(false),
            "1" => Ok(true),
            t => Err(self.err(k, format!("expected 0 or 1, got '{t}'"))),
        }
    }

    fn done(&self, k: usize) -> Result<()> {
        if self.toks.len() > k {
            Err(self.err(k, "unexpected trailing field"))
        } else {
            Ok(())
        }
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut csp: Option<CspInstance> = None;
    let mut n = 0;
    let mut label_index: HashMap<String, Label> = HashMap::new();
    let mut arcs: Vec<(Node, Node)> = Vec::new();
    let mut edges = Vec::new();
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    let mut node_names: Option<Vec<String>> = None;
    let mut nodes_seen = false;

    for (ln, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let line = Line {
            no: ln + 1,
            end_col: body.trim_end().len() + 1,
            toks: tokens(body),
        };
        let Some(&(_, kw)) = line.toks.first() else {
            continue;
        };
        if !matches!(kw, "NODES" | "LABELS") && csp.is_none() {
            return Err(line.err(0, format!("{kw} before NODES and LABELS")));
        }
        match kw {
            "NODES" => {
                if nodes_seen {
                    return Err(line.err(0, "duplicate NODES"));
                }
                n = line.usize(1)?;
                line.done(2)?;
                nodes_seen = true;
            }
            "LABELS" => {
                if !nodes_seen {
                    return Err(line.err(0, "LABELS before NODES"));
                }
                if csp.is_some() {
                    return Err(line.err(0, "duplicate LABELS"));
                }
                let l = line.usize(1)?;
                let mut c = CspInstance::new(n, l);
                if line.toks.len() > 2 {
                    let names: Vec<String> = line.toks[2..].iter().map(|t| t.1.to_string()).collect();
                    if names.len() != l {
                        return Err(line.err(2, format!("LABELS {l} lists {} names", names.len())));
                    }
                    c.set_label_names(names);
                }
                label_index = c
                    .label_names()
                    .iter()
                    .enumerate()
                    .map(|(a, s)| (s.clone(), a))
                    .collect();
                if label_index.len() != l {
                    return Err(line.err(2, "duplicate label name"));
                }
                csp = Some(c);
            }
            _ => {
                let c = csp.as_mut().expect("checked above");
                let l = c.num_labels();
                match kw {
                    "NAME" => {
                        let i = line.node(1, n)?;
                        line.done(3)?;
                        node_names.get_or_insert_with(|| c.node_names().to_vec())[i] =
                            line.tok(2)?.to_string();
                    }
                    "DOMAIN" => {
                        let i = line.node(1, n)?;
                        line.colon(2)?;
                        let labels = (3..line.toks.len())
                            .map(|k| line.label(k, &label_index, l))
                            .collect::<Result<Vec<_>>>()?;
                        c.set_domain(i, Domain::from_labels(l, labels));
                    }
                    "R1" => {
                        let i = line.node(1, n)?;
                        let a = line.label(2, &label_index, l)?;
                        line.colon(3)?;
                        c.set_r1(i, a, line.bit(4)?);
                        line.done(5)?;
                    }
                    "R2" => {
                        let i = line.node(1, n)?;
                        let a = line.label(2, &label_index, l)?;
                        let j = line.node(3, n)?;
                        let b = line.label(4, &label_index, l)?;
                        if i == j {
                            return Err(line.err(3, "R2 needs two distinct nodes"));
                        }
                        line.colon(5)?;
                        c.set_r2(i, a, j, b, line.bit(6)?);
                        line.done(7)?;
                    }
                    "ARC" | "EDGE" => {
                        let i = line.node(1, n)?;
                        let j = line.node(2, n)?;
                        line.done(3)?;
                        if kw == "ARC" {
                            arcs.push((i, j));
                        } else {
                            edges.push((i, j));
                        }
                    }
                    "START" | "END" => {
                        let i = line.node(1, n)?;
                        line.done(2)?;
                        if kw == "START" {
                            starts.push(i);
                        } else {
                            ends.push(i);
                        }
                    }
                    _ => return Err(line.err(0, format!("unknown keyword '{kw}'"))),
                }
            }
        }
    }
    let mut csp = match csp {
        Some(c) => c,
        None if nodes_seen => return Err(Error::parse(text.lines().count().max(1), 1, "missing LABELS")),
        None => return Err(Error::parse(1, 1, "missing NODES")),
    };
    if let Some(names) = node_names {
        csp.set_node_names(names);
    }
    if !arcs.is_empty() {
        csp.set_arcs(arcs.iter().flat_map(|&(i, j)| [(i, j), (j, i)]));
    }
    Ok(InstanceFile {
        csp,
        edges,
        starts,
        ends,
    })
}

fn write_body(csp: &CspInstance, out: &mut String) {
    let n = csp.num_nodes();
    let l = csp.num_labels();
    out.push_str(&format!("NODES {n}\n"));
    out.push_str(&format!("LABELS {l}"));
    for s in csp.label_names() {
        out.push(' ');
        out.push_str(s);
    }
    out.push('\n');
    for i in 0..n {
        if csp.node_name(i) != i.to_string() {
            out.push_str(&format!("NAME {i} {}\n", csp.node_name(i)));
        }
    }
    for i in 0..n {
        out.push_str(&format!("DOMAIN {i}:"));
        for a in csp.domain(i).iter() {
            out.push(' ');
            out.push_str(csp.label_name(a));
        }
        out.push('\n');
    }
    for i in 0..n {
        for a in 0..l {
            if !csp.r1(i, a) {
                out.push_str(&format!("R1 {i} {}: 0\n", csp.label_name(a)));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for a in 0..l {
                for b in 0..l {
                    if !csp.r2(i, a, j, b) {
                        out.push_str(&format!(
                            "R2 {i} {} {j} {}: 0\n",
                            csp.label_name(a),
                            csp.label_name(b)
                        ));
                    }
                }
            }
        }
    }
}

/// Canonical text of a plain CSP. Arc lines are written only when the arc
/// set is not complete.
pub fn write_csp(csp: &CspInstance) -> String {
    let mut out = String::new();
    write_body(csp, &mut out);
    let n = csp.num_nodes();
    let complete = (0..n).all(|i| (0..n).all(|j| i == j || csp.has_arc(i, j)));
    if !complete {
        for (i, j) in csp.arcs().filter(|&(i, j)| i < j) {
            out.push_str(&format!("ARC {i} {j}\n"));
        }
    }
    out
}

/// Canonical text of a MUSE instance; arcs follow from the DAG.
pub fn write_muse(m: &MuseInstance) -> String {
    let mut out = String::new();
    write_body(m.csp(), &mut out);
    for &(i, j) in m.edges() {
        out.push_str(&format!("EDGE {i} {j}\n"));
    }
    for i in m.starts() {
        out.push_str(&format!("START {i}\n"));
    }
    for i in m.ends() {
        out.push_str(&format!("END {i}\n"));
    }
    out
}

pub fn parse_muse(text: &str) -> Result<MuseInstance> {
    parse_instance(text)?.into_muse()
}

/// `node=label` pairs sorted by node id, using node and label names.
pub fn format_assignment(csp: &CspInstance, a: &Assignment) -> String {
    a.binding
        .iter()
        .map(|&(i, x)| format!("{}={}", csp.node_name(i), csp.label_name(x)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One `SHARE name: file:node ...` line: the listed nodes are the same
/// variable, called `name` in the combined instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    pub name: String,
    pub members: Vec<(String, String)>,
}

pub fn parse_shares(text: &str) -> Result<Vec<Share>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let no = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - trimmed.len();
        let Some(rest) = trimmed.strip_prefix("SHARE") else {
            let kw = trimmed.split_whitespace().next().unwrap_or("");
            return Err(Error::parse(no, indent + 1, format!("unknown keyword '{kw}'")));
        };
        let Some((name, members)) = rest.split_once(':') else {
            return Err(Error::parse(no, indent + 6, "expected 'SHARE name: file:node ...'"));
        };
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::parse(no, indent + 7, "SHARE needs one name"));
        }
        let mut list = Vec::new();
        for m in members.split_whitespace() {
            let Some((file, node)) = m.rsplit_once(':') else {
                let col = body.find(m).map_or(1, |k| k + 1);
                return Err(Error::parse(no, col, format!("expected file:node, got '{m}'")));
            };
            list.push((file.to_string(), node.to_string()));
        }
        if list.is_empty() {
            return Err(Error::parse(no, body.len() + 1, "SHARE lists no nodes"));
        }
        out.push(Share {
            name: name.to_string(),
            members: list,
        });
    }
    Ok(out)
}

/// Renames nodes of the CSP loaded from `file` as the share list says.
pub fn apply_shares(csp: &mut CspInstance, file: &str, shares: &[Share]) -> Result<()> {
    let mut names = csp.node_names().to_vec();
    for s in shares {
        for (f, node) in &s.members {
            if f != file {
                continue;
            }
            let i = names
                .iter()
                .position(|x| x == node)
                .ok_or_else(|| Error::InvalidSpec(format!("{file} has no node '{node}'")))?;
            names[i] = s.name.clone();
        }
    }
    csp.set_node_names(names);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = "NODES 3\nLABELS 2 r g\nDOMAIN 0: r g\nDOMAIN 1: r g\nDOMAIN 2: g\n\
                         R1 1 g: 0\nR2 0 r 1 r: 0\nEDGE 0 1\nEDGE 1 2\nSTART 0\nEND 2\n";

    #[test]
    fn canonical_roundtrip() {
        let m = parse_muse(CHAIN).unwrap();
        let text = write_muse(&m);
        assert_eq!(text, CHAIN);
        assert_eq!(parse_muse(&text).unwrap(), m);
    }

    #[test]
    fn unknown_keyword_names_the_line() {
        let err = parse_instance("NODES 1\nLABELS 1\nBOGUS 0\n").unwrap_err();
        assert_eq!(err, Error::parse(3, 1, "unknown keyword 'BOGUS'"));
    }

    #[test]
    fn label_out_of_range_is_reported_at_its_column() {
        let err = parse_instance("NODES 2\nLABELS 2\nR1 0 7: 0\n").unwrap_err();
        assert_eq!(err, Error::parse(3, 6, "unknown label '7'"));
    }

    #[test]
    fn shares_parse() {
        let s = parse_shares("SHARE v: a.txt:0 b.txt:x\n").unwrap();
        assert_eq!(s[0].name, "v");
        assert_eq!(s[0].members, [("a.txt".into(), "0".into()), ("b.txt".into(), "x".into())]);
    }
}
