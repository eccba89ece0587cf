//! Constraint formulas in parenthesized prefix notation, e.g.
//! `(if (= (lab x) det) (< (pos x) (mod x)))`.

use std::fmt;

use super::Interval;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExp {
    Atom(String, usize, usize),
    List(Vec<SExp>, usize, usize),
}

impl SExp {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            SExp::Atom(_, l, c) | SExp::List(_, l, c) => (*l, *c),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.pos();
        Error::parse(l, c, msg)
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(s, ..) => f.write_str(s),
            SExp::List(items, ..) => {
                f.write_str("(")?;
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads every top-level expression. `;` starts a comment.
pub fn read_sexps(text: &str) -> Result<Vec<SExp>> {
    let mut stack: Vec<(Vec<SExp>, usize, usize)> = Vec::new();
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut c = 0;
        while c < chars.len() {
            let ch = chars[c];
            if ch == ';' {
                break;
            }
            if ch.is_whitespace() {
                c += 1;
                continue;
            }
            let col = c + 1;
            match ch {
                '(' => {
                    stack.push((Vec::new(), line_no, col));
                    c += 1;
                }
                ')' => {
                    let (items, l, cc) = stack
                        .pop()
                        .ok_or_else(|| Error::parse(line_no, col, "unbalanced ')'"))?;
                    let e = SExp::List(items, l, cc);
                    match stack.last_mut() {
                        Some(top) => top.0.push(e),
                        None => out.push(e),
                    }
                    c += 1;
                }
                _ => {
                    let begin = c;
                    while c < chars.len() && !chars[c].is_whitespace() && !"();".contains(chars[c]) {
                        c += 1;
                    }
                    let tok: String = chars[begin..c].iter().collect();
                    let e = SExp::Atom(tok, line_no, col);
                    match stack.last_mut() {
                        Some(top) => top.0.push(e),
                        None => out.push(e),
                    }
                }
            }
        }
    }
    if let Some((_, l, c)) = stack.last() {
        return Err(Error::parse(*l, *c, "unclosed '('"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Pos,
    Rid,
    Lab,
    Mod,
    Cat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Apply(Func, Var),
    Sym(String),
    Nil,
    Position(Interval),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pred {
    Eq,
    Lt,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Cmp(Pred, Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

/// `if antecedent then consequent`; violated only when the antecedent
/// holds and the consequent does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub text: String,
}

/// What a formula can observe about a role value.
#[derive(Clone, Copy, Debug)]
pub struct RoleView<'a> {
    pub pos: Interval,
    pub rid: &'a str,
    pub lab: &'a str,
    pub modifiee: Option<Interval>,
    pub cat: &'a str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value<'a> {
    Sym(&'a str),
    Span(Interval),
    Nil,
}

fn compare(p: Pred, a: Value<'_>, b: Value<'_>) -> bool {
    match (a, b) {
        (Value::Sym(x), Value::Sym(y)) => p == Pred::Eq && x == y,
        (Value::Nil, Value::Nil) => p == Pred::Eq,
        (Value::Span(x), Value::Span(y)) => match p {
            Pred::Eq => x == y,
            Pred::Lt => x.end <= y.begin,
            Pred::Gt => y.end <= x.begin,
        },
        _ => false,
    }
}

impl Term {
    fn eval<'a>(&'a self, x: &RoleView<'a>, y: &RoleView<'a>) -> Value<'a> {
        match self {
            Term::Sym(s) => Value::Sym(s),
            Term::Nil => Value::Nil,
            Term::Position(p) => Value::Span(*p),
            Term::Apply(f, v) => {
                let r = if *v == Var::X { x } else { y };
                match f {
                    Func::Pos => Value::Span(r.pos),
                    Func::Rid => Value::Sym(r.rid),
                    Func::Lab => Value::Sym(r.lab),
                    Func::Cat => Value::Sym(r.cat),
                    Func::Mod => r.modifiee.map_or(Value::Nil, Value::Span),
                }
            }
        }
    }

    fn uses(&self, v: Var) -> bool {
        matches!(self, Term::Apply(_, w) if *w == v)
    }
}

impl Formula {
    pub fn eval(&self, x: &RoleView<'_>, y: &RoleView<'_>) -> bool {
        match self {
            Formula::Cmp(p, a, b) => compare(*p, a.eval(x, y), b.eval(x, y)),
            Formula::And(fs) => fs.iter().all(|f| f.eval(x, y)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(x, y)),
            Formula::Not(f) => !f.eval(x, y),
        }
    }

    fn uses(&self, v: Var) -> bool {
        match self {
            Formula::Cmp(_, a, b) => a.uses(v) || b.uses(v),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.uses(v)),
            Formula::Not(f) => f.uses(v),
        }
    }
}

impl Constraint {
    /// Number of distinct role-value variables mentioned.
    pub fn arity(&self) -> usize {
        let uses = |v| self.antecedent.uses(v) || self.consequent.uses(v);
        usize::from(uses(Var::X)) + usize::from(uses(Var::Y))
    }

    pub fn holds(&self, x: &RoleView<'_>, y: &RoleView<'_>) -> bool {
        !self.antecedent.eval(x, y) || self.consequent.eval(x, y)
    }

    /// Unary check; whichever variable the formula names is bound to `x`.
    pub fn holds_unary(&self, x: &RoleView<'_>) -> bool {
        self.holds(x, x)
    }
}

/// Symbols a formula may mention as constants.
pub struct Vocabulary<'a> {
    pub symbols: &'a [&'a str],
}

pub fn parse_constraint(e: &SExp, vocab: &Vocabulary<'_>) -> Result<Constraint> {
    let SExp::List(items, ..) = e else {
        return Err(e.err("expected (if antecedent consequent)"));
    };
    match items.as_slice() {
        [SExp::Atom(head, ..), ante, cons] if head == "if" => Ok(Constraint {
            antecedent: parse_formula(ante, vocab)?,
            consequent: parse_formula(cons, vocab)?,
            text: e.to_string(),
        }),
        _ => Err(e.err("expected (if antecedent consequent)")),
    }
}

fn parse_formula(e: &SExp, vocab: &Vocabulary<'_>) -> Result<Formula> {
    let SExp::List(items, ..) = e else {
        return Err(e.err("expected a parenthesized formula"));
    };
    let Some(SExp::Atom(head, ..)) = items.first() else {
        return Err(e.err("formula must start with an operator"));
    };
    let args = &items[1..];
    let subformulas = || args.iter().map(|a| parse_formula(a, vocab)).collect::<Result<Vec<_>>>();
    match head.as_str() {
        "and" => Ok(Formula::And(subformulas()?)),
        "or" => Ok(Formula::Or(subformulas()?)),
        "not" => match args {
            [f] => Ok(Formula::Not(Box::new(parse_formula(f, vocab)?))),
            _ => Err(e.err("not takes one argument")),
        },
        "=" | "<" | ">" => {
            let [a, b] = args else {
                return Err(e.err(format!("{head} takes two arguments")));
            };
            let p = match head.as_str() {
                "=" => Pred::Eq,
                "<" => Pred::Lt,
                _ => Pred::Gt,
            };
            Ok(Formula::Cmp(p, parse_term(a, vocab)?, parse_term(b, vocab)?))
        }
        other => Err(e.err(format!("unknown operator '{other}'"))),
    }
}

fn parse_term(e: &SExp, vocab: &Vocabulary<'_>) -> Result<Term> {
    match e {
        SExp::Atom(s, ..) => {
            if s == "nil" {
                Ok(Term::Nil)
            } else if let Ok(k) = s.parse::<i64>() {
                Ok(Term::Position(Interval::new(k, k + 1)))
            } else if vocab.symbols.contains(&s.as_str()) {
                Ok(Term::Sym(s.clone()))
            } else {
                Err(e.err(format!("unknown symbol '{s}'")))
            }
        }
        SExp::List(items, ..) => {
            let [SExp::Atom(f, ..), SExp::Atom(v, ..)] = items.as_slice() else {
                return Err(e.err("expected (function variable)"));
            };
            let func = match f.as_str() {
                "pos" => Func::Pos,
                "rid" => Func::Rid,
                "lab" => Func::Lab,
                "mod" => Func::Mod,
                "cat" => Func::Cat,
                other => return Err(e.err(format!("unknown function '{other}'"))),
            };
            let var = match v.as_str() {
                "x" => Var::X,
                "y" => Var::Y,
                other => return Err(e.err(format!("unknown variable '{other}'"))),
            };
            Ok(Term::Apply(func, var))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_position_of_unbalanced_paren() {
        let err = read_sexps("(if (= (lab x) a)\n  (< (pos x) (mod x))))").unwrap_err();
        assert_eq!(err, Error::parse(2, 23, "unbalanced ')'"));
    }

    #[test]
    fn nil_comparisons_are_false_except_equality_with_nil() {
        let p = Value::Span(Interval::new(1, 2));
        assert!(!compare(Pred::Lt, Value::Nil, p));
        assert!(!compare(Pred::Gt, Value::Nil, p));
        assert!(!compare(Pred::Eq, Value::Nil, p));
        assert!(compare(Pred::Eq, Value::Nil, Value::Nil));
    }
}
