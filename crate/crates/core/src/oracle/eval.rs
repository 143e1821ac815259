//! Satisfaction of temporal formulas over (here, there) pairs of traces.

use std::collections::HashMap;

use crate::ast::Term;
use crate::error::{Error, Result};

/// `[lower, upper)`; `None` is `#sup`.
type Bounds = (i64, Option<i64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Formula {
    Atom(usize),
    Bottom,
    Top,
    Initial,
    Final,
    Not(Box<Formula>),
    Next(Option<Bounds>, Box<Formula>),
    Eventually(Option<Bounds>, Box<Formula>),
    Diamond(Box<Path>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Path {
    Step,
    Test(Formula),
    Seq(Box<Path>, Box<Path>),
    Choice(Box<Path>, Box<Path>),
    Star(Box<Path>),
}

/// Atom indices of a vocabulary; atoms outside it are false everywhere.
pub(crate) type Vocabulary = HashMap<Term, usize>;

fn number(t: &Term) -> Option<i64> {
    match t {
        Term::Integer(i) => Some(*i),
        Term::Minus(x) => number(x).map(|v| -v),
        _ => None,
    }
}

fn bounds(t: &Term) -> Option<Bounds> {
    match t {
        Term::Theory(op, args) if op == "i" && args.len() == 2 => {
            let upper = if args[1] == Term::Supremum { None } else { Some(number(&args[1])?) };
            Some((number(&args[0])?, upper))
        }
        _ => None,
    }
}

pub(crate) fn compile(t: &Term, vocab: &Vocabulary) -> Result<Formula> {
    let c = |x: &Term| compile(x, vocab).map(Box::new);
    match t {
        Term::Symbol(_) | Term::Function(..) => Ok(vocab.get(t).map_or(Formula::Bottom, |&i| Formula::Atom(i))),
        Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
            ("true", []) => Ok(Formula::Top),
            ("initial", []) => Ok(Formula::Initial),
            ("final", []) => Ok(Formula::Final),
            ("not", [g]) => Ok(Formula::Not(c(g)?)),
            ("next", [g]) => Ok(Formula::Next(None, c(g)?)),
            ("eventually", [g]) => Ok(Formula::Eventually(None, c(g)?)),
            ("next", [i, g]) => match bounds(i) {
                Some(b) => Ok(Formula::Next(Some(b), c(g)?)),
                None => Err(Error::Oracle(format!("bad interval in {t}"))),
            },
            ("eventually", [i, g]) => match bounds(i) {
                Some(b) => Ok(Formula::Eventually(Some(b), c(g)?)),
                None => Ok(Formula::Diamond(Box::new(compile_path(i, vocab)?), c(g)?)),
            },
            ("always", [p, g]) => {
                let inner = Formula::Not(c(g)?);
                Ok(Formula::Not(Box::new(Formula::Diamond(Box::new(compile_path(p, vocab)?), Box::new(inner)))))
            }
            _ => Err(Error::Oracle(format!("unsupported formula {t}"))),
        },
        _ => Err(Error::Oracle(format!("not a formula: {t}"))),
    }
}

pub(crate) fn compile_path(t: &Term, vocab: &Vocabulary) -> Result<Path> {
    let c = |x: &Term| compile_path(x, vocab).map(Box::new);
    match t {
        Term::Symbol(_) | Term::Function(..) => {
            Ok(Path::Seq(Box::new(Path::Test(compile(t, vocab)?)), Box::new(Path::Step)))
        }
        Term::Theory(op, args) => match (op.as_str(), args.as_slice()) {
            ("step", []) => Ok(Path::Step),
            ("test", [f]) => Ok(Path::Test(compile(f, vocab)?)),
            ("seq", [a, b]) => Ok(Path::Seq(c(a)?, c(b)?)),
            ("choice", [a, b]) => Ok(Path::Choice(c(a)?, c(b)?)),
            ("star", [a]) => Ok(Path::Star(c(a)?)),
            _ => Err(Error::Oracle(format!("unsupported path {t}"))),
        },
        _ => Err(Error::Oracle(format!("not a path: {t}"))),
    }
}

/// An interpretation: `here` is pointwise included in `there`. Both are
/// per-state bit sets over the vocabulary.
#[derive(Clone, Copy)]
pub(crate) struct World<'a> {
    pub here: &'a [u64],
    pub there: &'a [u64],
    pub tau: Option<&'a [i64]>,
}

impl World<'_> {
    fn last(&self) -> usize {
        self.here.len() - 1
    }

    fn total(&self) -> Self {
        World { here: self.there, ..*self }
    }

    fn within(&self, b: Option<Bounds>, from: usize, to: usize) -> bool {
        match (b, self.tau) {
            (None, _) => true,
            (Some((l, u)), Some(tau)) => {
                let d = tau[to] - tau[from];
                l <= d && u.is_none_or(|u| d < u)
            }
            (Some(_), None) => false,
        }
    }
}

pub(crate) fn holds(f: &Formula, w: World<'_>, t: usize) -> bool {
    let n = w.last();
    match f {
        Formula::Atom(i) => w.here[t] >> i & 1 == 1,
        Formula::Bottom => false,
        Formula::Top => true,
        Formula::Initial => t == 0,
        Formula::Final => t == n,
        Formula::Not(g) => !holds(g, w.total(), t),
        Formula::Next(b, g) => t < n && w.within(*b, t, t + 1) && holds(g, w, t + 1),
        Formula::Eventually(b, g) => (t..=n).any(|j| w.within(*b, t, j) && holds(g, w, j)),
        Formula::Diamond(p, g) => {
            let r = relation(p, w);
            (t..=n).any(|j| r[t] >> j & 1 == 1 && holds(g, w, j))
        }
    }
}

/// Row `t` holds the bit set of states reachable from `t`.
pub(crate) fn relation(p: &Path, w: World<'_>) -> Vec<u64> {
    let n = w.last();
    match p {
        Path::Step => (0..=n).map(|t| if t < n { 1 << (t + 1) } else { 0 }).collect(),
        Path::Test(f) => (0..=n).map(|t| if holds(f, w, t) { 1 << t } else { 0 }).collect(),
        Path::Seq(a, b) => compose(&relation(a, w), &relation(b, w)),
        Path::Choice(a, b) => relation(a, w).iter().zip(relation(b, w)).map(|(x, y)| x | y).collect(),
        Path::Star(a) => {
            let r = relation(a, w);
            let mut closure: Vec<u64> = (0..=n).map(|t| 1 << t).collect();
            loop {
                let next: Vec<u64> = closure.iter().zip(compose(&closure, &r)).map(|(x, y)| x | y).collect();
                if next == closure {
                    return closure;
                }
                closure = next;
            }
        }
    }
}

fn compose(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|&row| (0..b.len()).filter(|k| row >> k & 1 == 1).fold(0, |acc, k| acc | b[k]))
        .collect()
}
