//! Formula shapes, path normalization and the Fischer–Ladner closure.

use std::collections::BTreeSet;

use crate::ast::Term;
use crate::error::{Error, Result};

/// Interval `[lower, upper)` over time-point differences; `None` is `#sup`.
pub type Interval = (i64, Option<i64>);

/// The semantic shape of a formula node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node<'a> {
    Atom,
    True,
    Initial,
    Not(&'a Term),
    Next(&'a Term),
    Eventually(&'a Term),
    MetricNext(Interval, &'a Term),
    MetricEventually(Interval, &'a Term),
    /// `<path> formula`.
    Diamond(&'a Term, &'a Term),
    /// `[path] formula`.
    Box(&'a Term, &'a Term),
}

fn integer(t: &Term) -> Option<i64> {
    match t {
        Term::Integer(i) => Some(*i),
        Term::Minus(inner) => integer(inner).map(|i| -i),
        _ => None,
    }
}

/// Reads `&i(l, u)`.
pub fn interval(t: &Term) -> Option<Interval> {
    match t {
        Term::Theory(op, args) if op == "i" && args.len() == 2 => {
            let lower = integer(&args[0])?;
            let upper = match &args[1] {
                Term::Supremum => None,
                u => Some(integer(u)?),
            };
            Some((lower, upper))
        }
        _ => None,
    }
}

pub fn classify(f: &Term) -> Result<Node<'_>> {
    let unsupported = || Error::Meta(format!("no temporal semantics for {f}"));
    match f {
        Term::Symbol(_) | Term::Function(..) => Ok(Node::Atom),
        Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
            ("true", []) => Ok(Node::True),
            ("initial", []) => Ok(Node::Initial),
            ("not", [g]) => Ok(Node::Not(g)),
            ("next", [g]) => Ok(Node::Next(g)),
            ("eventually", [g]) => Ok(Node::Eventually(g)),
            ("next", [i, g]) => interval(i).map(|i| Node::MetricNext(i, g)).ok_or_else(unsupported),
            ("eventually", [p, g]) => Ok(match interval(p) {
                Some(i) => Node::MetricEventually(i, g),
                None => Node::Diamond(p, g),
            }),
            ("always", [p, g]) => Ok(Node::Box(p, g)),
            _ => Err(unsupported()),
        },
        _ => Err(unsupported()),
    }
}

fn th(op: &str, args: Vec<Term>) -> Term {
    Term::theory(op, args)
}

fn fail() -> Term {
    th("test", vec![th("not", vec![th("true", vec![])])])
}

/// The identity part of a path as a test-only path, `None` if empty.
fn empty_part(p: &Term) -> Option<Term> {
    match p {
        Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
            ("test", [_]) => Some(p.clone()),
            ("seq", [a, b]) => Some(th("seq", vec![empty_part(a)?, empty_part(b)?])),
            ("choice", [a, b]) => match (empty_part(a), empty_part(b)) {
                (Some(x), Some(y)) => Some(th("choice", vec![x, y])),
                (x, y) => x.or(y),
            },
            ("star", [_]) => Some(th("test", vec![th("true", vec![])])),
            _ => None,
        },
        _ => None,
    }
}

/// The part of a path that advances at least one step, `None` if empty.
fn progress_part(p: &Term) -> Option<Term> {
    let choice = |x: Option<Term>, y: Option<Term>| match (x, y) {
        (Some(x), Some(y)) => Some(th("choice", vec![x, y])),
        (x, y) => x.or(y),
    };
    match p {
        Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
            ("step", []) => Some(p.clone()),
            ("seq", [a, b]) => {
                let first = progress_part(a).map(|x| th("seq", vec![x, b.clone()]));
                let second = empty_part(a).zip(progress_part(b)).map(|(x, y)| th("seq", vec![x, y]));
                choice(first, second)
            }
            ("choice", [a, b]) => choice(progress_part(a), progress_part(b)),
            ("star", [a]) => progress_part(a).map(|x| th("seq", vec![x, p.clone()])),
            _ => None,
        },
        _ => None,
    }
}

fn normalize_path(p: &Term) -> Term {
    match p {
        Term::Symbol(_) | Term::Function(..) => th("seq", vec![th("test", vec![p.clone()]), th("step", vec![])]),
        Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
            ("test", [f]) => th("test", vec![normalize(f)]),
            ("star", [a]) => {
                let a = normalize_path(a);
                if empty_part(&a).is_none() {
                    th("star", vec![a])
                } else {
                    th("star", vec![progress_part(&a).unwrap_or_else(fail)])
                }
            }
            _ => th(op, args.iter().map(normalize_path).collect()),
        },
        _ => p.clone(),
    }
}

/// Rewrites a formula into the form the encoding works on: boxes become
/// `&not(&eventually(p, &not(f)))`, atoms used as paths become
/// `&seq(&test(a), &step)`, and star bodies are reduced to their
/// step-consuming part. The last rewrite keeps the recursive unfolding of
/// stars well-founded: `<(p?)*>q` must not be justified by looping on `p?`.
pub fn normalize(f: &Term) -> Term {
    match classify(f) {
        Ok(Node::Diamond(p, g)) => th("eventually", vec![normalize_path(p), normalize(g)]),
        Ok(Node::Box(p, g)) => th(
            "not",
            vec![th("eventually", vec![normalize_path(p), th("not", vec![normalize(g)])])],
        ),
        _ => match f {
            Term::Theory(op, args) => th(op, args.iter().map(normalize).collect()),
            _ => f.clone(),
        },
    }
}

fn diamond(p: &Term, f: &Term) -> Term {
    th("eventually", vec![p.clone(), f.clone()])
}

fn boxed(p: &Term, f: &Term) -> Term {
    th("always", vec![p.clone(), f.clone()])
}

/// Formulas that the closure adds for one member.
fn successors(f: &Term) -> Vec<Term> {
    let Ok(node) = classify(f) else {
        return Vec::new();
    };
    let modal = |p: &Term, g: &Term, wrap: fn(&Term, &Term) -> Term| -> Vec<Term> {
        let p = match p {
            Term::Symbol(_) | Term::Function(..) => normalize_path(p),
            _ => p.clone(),
        };
        match &p {
            Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
                ("step", []) => vec![g.clone()],
                ("test", [psi]) => vec![psi.clone(), g.clone()],
                ("seq", [a, b]) => vec![wrap(a, &wrap(b, g))],
                ("choice", [a, b]) => vec![wrap(a, g), wrap(b, g)],
                ("star", [a]) => vec![g.clone(), wrap(a, &wrap(&p, g))],
                _ => Vec::new(),
            },
            _ => Vec::new(),
        }
    };
    match node {
        Node::Atom | Node::True | Node::Initial => Vec::new(),
        Node::Not(g) | Node::Next(g) | Node::Eventually(g) => vec![g.clone()],
        Node::MetricNext(_, g) | Node::MetricEventually(_, g) => vec![g.clone()],
        Node::Diamond(p, g) => modal(p, g, diamond),
        Node::Box(p, g) => modal(p, g, boxed),
    }
}

/// Least superset of `formulas` closed under subformulas and the unfolding
/// of path modalities.
pub fn fl_close(formulas: impl IntoIterator<Item = Term>) -> BTreeSet<Term> {
    let mut closure = BTreeSet::new();
    let mut todo: Vec<Term> = formulas.into_iter().collect();
    while let Some(f) = todo.pop() {
        if closure.contains(&f) {
            continue;
        }
        todo.extend(successors(&f).into_iter().filter(|s| !closure.contains(s)));
        closure.insert(f);
    }
    closure
}
