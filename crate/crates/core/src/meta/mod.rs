//! Timed meta-encoding of reified programs.
//!
//! A reified program and a horizon `n` are turned into one propositional
//! program whose stable models are the temporal models of length `n + 1`.
//! The object program is copied once per time step over `hold(id, T)`
//! atoms. Theory expressions get `true(formula, T)` atoms defined by the
//! semantics of their operators, and the output table identifies the two
//! families: the formula with id `l` is true at `T` exactly when
//! `hold(l, T)` is. Metric operators additionally see a bounded timing
//! function chosen through `tau_diff(T, d)` atoms.

mod closure;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::ast::Term;
use crate::error::{Error, Result};
use crate::grammar::Logic;
use crate::reify::{HeadKind, ReifiedDb};
use crate::solver::{self, Atom, Model, Rule, RuleHead};
use crate::trace::Trace;

pub use closure::{classify, fl_close, interval, normalize, Interval, Node};

/// Default bound on time points for a horizon.
pub fn default_max_time(horizon: usize) -> i64 {
    4 * (horizon as i64 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaOptions {
    pub horizon: usize,
    /// Largest time point of metric traces; defaults to [`default_max_time`].
    pub max_time: Option<i64>,
}

impl MetaOptions {
    pub fn new(horizon: usize) -> Self {
        MetaOptions { horizon, max_time: None }
    }
}

/// An atom of the meta-level program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MetaAtom {
    Hold(u32, usize),
    True(Term, usize),
    TauDiff(usize, i64),
    Tau(usize, i64),
    /// `tau(to) - tau(from)` lies in the interval.
    Within(usize, usize, Interval),
    /// The state `to` witnesses a metric eventuality at `from`.
    Witness(Term, usize, usize),
}

impl fmt::Display for MetaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaAtom::Hold(a, t) => write!(f, "hold({a},{t})"),
            MetaAtom::True(x, t) => write!(f, "true({x},{t})"),
            MetaAtom::TauDiff(t, d) => write!(f, "tau_diff({t},{d})"),
            MetaAtom::Tau(t, v) => write!(f, "tau({t},{v})"),
            MetaAtom::Within(s, t, (l, u)) => match u {
                Some(u) => write!(f, "within({s},{t},{l},{u})"),
                None => write!(f, "within({s},{t},{l},#sup)"),
            },
            MetaAtom::Witness(x, s, t) => write!(f, "witness({x},{s},{t})"),
        }
    }
}

/// Signed atoms that must all hold, as `(atom, positive)`.
type Condition = Vec<(Atom, bool)>;

/// The instantiated meta-encoding together with what is needed to read
/// traces back from its stable models.
#[derive(Debug, Clone)]
pub struct MetaProgram {
    pub program: solver::Program,
    pub horizon: usize,
    names: Vec<MetaAtom>,
    /// Plain atoms with their truth atom at each step.
    atoms: Vec<(Term, Vec<Atom>)>,
    /// For each step, the candidate time points and their atoms.
    tau: Option<Vec<Vec<(i64, Atom)>>>,
    /// Shown terms with the literals required at each step.
    shows: Vec<(Term, Vec<Condition>)>,
}

impl MetaProgram {
    pub fn name(&self, a: Atom) -> &MetaAtom {
        &self.names[a]
    }

    pub fn is_timed(&self) -> bool {
        self.tau.is_some()
    }

    fn truth_vector(&self, model: &Model) -> Vec<bool> {
        let mut v = vec![false; self.program.num_atoms];
        for &a in model {
            v[a] = true;
        }
        v
    }

    fn timing(&self, v: &[bool]) -> Option<Vec<i64>> {
        self.tau.as_ref().map(|steps| {
            steps.iter().map(|cands| cands.iter().find(|(_, a)| v[*a]).map_or(0, |(t, _)| *t)).collect()
        })
    }

    /// The trace of a model over every plain atom of the program.
    pub fn trace(&self, model: &Model) -> Trace {
        let v = self.truth_vector(model);
        let mut states = vec![BTreeSet::new(); self.horizon + 1];
        for (term, per_step) in &self.atoms {
            for (t, &a) in per_step.iter().enumerate() {
                if v[a] {
                    states[t].insert(term.clone());
                }
            }
        }
        Trace { states, tau: self.timing(&v) }
    }

    /// The trace of a model restricted to what the show directives select.
    pub fn shown(&self, model: &Model) -> Trace {
        let v = self.truth_vector(model);
        let mut states = vec![BTreeSet::new(); self.horizon + 1];
        for (term, per_step) in &self.shows {
            for (t, lits) in per_step.iter().enumerate() {
                if lits.iter().all(|&(a, pos)| v[a] == pos) {
                    states[t].insert(term.clone());
                }
            }
        }
        Trace { states, tau: self.timing(&v) }
    }
}

struct Builder<'a> {
    db: &'a ReifiedDb,
    n: usize,
    max_time: i64,
    program: solver::Program,
    index: HashMap<MetaAtom, Atom>,
    names: Vec<MetaAtom>,
    /// Normalized output symbols and the atom id they stand for.
    alias: HashMap<Term, u32>,
    defined_within: HashSet<MetaAtom>,
}

impl Builder<'_> {
    fn atom(&mut self, a: MetaAtom) -> Atom {
        if let Some(&x) = self.index.get(&a) {
            return x;
        }
        let x = self.program.atom();
        self.names.push(a.clone());
        self.index.insert(a, x);
        x
    }

    fn hold(&mut self, id: u32, t: usize) -> Atom {
        self.atom(MetaAtom::Hold(id, t))
    }

    fn truth(&mut self, f: &Term, t: usize) -> Atom {
        match self.alias.get(f) {
            Some(&id) => self.hold(id, t),
            None => self.atom(MetaAtom::True(f.clone(), t)),
        }
    }

    fn rule(&mut self, head: Vec<Atom>, pos: Vec<Atom>, neg: Vec<Atom>) {
        self.program.add(Rule { head: RuleHead::Disjunction(head), pos, neg });
    }

    fn equivalent(&mut self, a: Atom, b: Atom) {
        self.rule(vec![a], vec![b], vec![]);
        self.rule(vec![b], vec![a], vec![]);
    }

    fn steps(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.n
    }

    fn literal_tuple(&self, id: u32) -> Result<&BTreeSet<i64>> {
        self.db.literal_tuples.get(&id).ok_or_else(|| Error::Meta(format!("undefined literal tuple {id}")))
    }

    fn core(&mut self) -> Result<()> {
        for r in &self.db.rules {
            let head: Vec<u32> = self
                .db
                .atom_tuples
                .get(&r.atoms)
                .ok_or_else(|| Error::Meta(format!("undefined atom tuple {}", r.atoms)))?
                .iter()
                .copied()
                .collect();
            let body: Vec<i64> = self.literal_tuple(r.body)?.iter().copied().collect();
            for t in self.steps() {
                let h: Vec<Atom> = head.iter().map(|&a| self.hold(a, t)).collect();
                let pos = body.iter().filter(|&&l| l > 0).map(|&l| self.hold(l as u32, t)).collect();
                let neg = body.iter().filter(|&&l| l < 0).map(|&l| self.hold(l.unsigned_abs() as u32, t)).collect();
                let head = match r.head {
                    HeadKind::Disjunction => RuleHead::Disjunction(h),
                    HeadKind::Choice => RuleHead::Choice(h),
                };
                self.program.add(Rule { head, pos, neg });
            }
        }
        Ok(())
    }

    /// Connects output symbols with atom ids.
    fn bridge(&mut self) -> Result<()> {
        let mut facts = Vec::new();
        let mut shared = Vec::new();
        for (o, tuple) in &self.db.outputs {
            let lits: Vec<i64> = self.literal_tuple(*tuple)?.iter().copied().collect();
            let key = normalize(o);
            match lits[..] {
                [] => facts.push(key),
                [l] if l > 0 => match self.alias.get(&key) {
                    Some(&other) if other != l as u32 => shared.push((other, l as u32)),
                    Some(_) => {}
                    None => {
                        self.alias.insert(key, l as u32);
                    }
                },
                _ => {
                    return Err(Error::Meta(format!(
                        "output {o} must be defined by a single positive literal, found {lits:?}"
                    )))
                }
            }
        }
        for (a, b) in shared {
            for t in self.steps() {
                let (x, y) = (self.hold(a, t), self.hold(b, t));
                self.equivalent(x, y);
            }
        }
        for f in &facts {
            for t in self.steps() {
                let a = self.truth(f, t);
                self.rule(vec![a], vec![], vec![]);
            }
        }
        Ok(())
    }

    fn tau(&mut self, t: usize, v: i64) -> Atom {
        self.atom(MetaAtom::Tau(t, v))
    }

    /// Chooses one positive increment per step with `tau(n) <= M`.
    fn timing(&mut self) -> Vec<Vec<(i64, Atom)>> {
        let m = self.max_time;
        let t0 = self.tau(0, 0);
        self.rule(vec![t0], vec![], vec![]);
        for t in 1..=self.n {
            let diffs: Vec<Atom> = (1..=m).map(|d| self.atom(MetaAtom::TauDiff(t, d))).collect();
            self.program.add(Rule { head: RuleHead::Choice(diffs.clone()), pos: vec![], neg: vec![] });
            self.rule(vec![], vec![], diffs.clone());
            for i in 0..diffs.len() {
                for j in i + 1..diffs.len() {
                    self.rule(vec![], vec![diffs[i], diffs[j]], vec![]);
                }
            }
            for v in (t as i64 - 1)..=m {
                let prev = self.tau(t - 1, v);
                for (d, &diff) in (1..=m).zip(&diffs) {
                    if v + d <= m {
                        let next = self.tau(t, v + d);
                        self.rule(vec![next], vec![prev, diff], vec![]);
                    } else {
                        self.rule(vec![], vec![prev, diff], vec![]);
                    }
                }
            }
        }
        self.steps().map(|t| (t as i64..=m).map(|v| (v, self.tau(t, v))).collect()).collect()
    }

    /// Atom for `tau(to) - tau(from)` in `[l, u)`, defined on first use.
    fn within(&mut self, from: usize, to: usize, iv: Interval) -> Atom {
        let key = MetaAtom::Within(from, to, iv);
        let a = self.atom(key.clone());
        if !self.defined_within.insert(key) {
            return a;
        }
        let (l, u) = iv;
        let inside = |d: i64| l <= d && u.is_none_or(|u| d < u);
        if from == to {
            if inside(0) {
                self.rule(vec![a], vec![], vec![]);
            }
            return a;
        }
        let m = self.max_time;
        for v in from as i64..=m {
            for w in (v + (to - from) as i64)..=m {
                if inside(w - v) {
                    let (x, y) = (self.tau(from, v), self.tau(to, w));
                    self.rule(vec![a], vec![x, y], vec![]);
                }
            }
        }
        a
    }

    fn semantics(&mut self, f: &Term) -> Result<()> {
        let n = self.n;
        for t in self.steps() {
            let ft = self.truth(f, t);
            match classify(f)? {
                Node::Atom => {}
                Node::True => self.rule(vec![ft], vec![], vec![]),
                Node::Initial if t == 0 => self.rule(vec![ft], vec![], vec![]),
                Node::Initial => self.rule(vec![], vec![ft], vec![]),
                Node::Not(g) => {
                    let gt = self.truth(g, t);
                    self.rule(vec![ft], vec![], vec![gt]);
                    self.rule(vec![], vec![ft, gt], vec![]);
                }
                Node::Next(g) => self.next_step(ft, g, t),
                Node::Eventually(g) => {
                    let mut later = Vec::new();
                    for j in t..=n {
                        let gj = self.truth(g, j);
                        self.rule(vec![ft], vec![gj], vec![]);
                        later.push(gj);
                    }
                    self.rule(later, vec![ft], vec![]);
                }
                Node::MetricNext(iv, g) => {
                    if t < n {
                        let g1 = self.truth(g, t + 1);
                        let w = self.within(t, t + 1, iv);
                        self.rule(vec![ft], vec![g1, w], vec![]);
                        self.rule(vec![g1], vec![ft], vec![]);
                        self.rule(vec![], vec![ft], vec![w]);
                    } else {
                        self.rule(vec![], vec![ft], vec![]);
                    }
                }
                Node::MetricEventually(iv, g) => {
                    let mut witnesses = Vec::new();
                    for j in t..=n {
                        let gj = self.truth(g, j);
                        let w = self.within(t, j, iv);
                        self.rule(vec![ft], vec![gj, w], vec![]);
                        let x = self.atom(MetaAtom::Witness(f.clone(), t, j));
                        self.rule(vec![gj], vec![x], vec![]);
                        self.rule(vec![x], vec![gj, w], vec![]);
                        self.rule(vec![], vec![x], vec![w]);
                        witnesses.push(x);
                    }
                    self.rule(witnesses, vec![ft], vec![]);
                }
                Node::Diamond(p, g) => self.diamond(ft, p, g, t)?,
                Node::Box(..) => {
                    return Err(Error::Meta(format!("formula {f} is not in normal form")));
                }
            }
        }
        Ok(())
    }

    fn next_step(&mut self, ft: Atom, g: &Term, t: usize) {
        if t < self.n {
            let g1 = self.truth(g, t + 1);
            self.equivalent(ft, g1);
        } else {
            self.rule(vec![], vec![ft], vec![]);
        }
    }

    fn diamond(&mut self, ft: Atom, p: &Term, g: &Term, t: usize) -> Result<()> {
        let dia = |p: &Term, g: &Term| Term::theory("eventually", vec![p.clone(), g.clone()]);
        let Term::Theory(op, args) = p else {
            return Err(Error::Meta(format!("path {p} is not in normal form")));
        };
        match (op.as_str(), args.as_slice()) {
            ("step", []) => self.next_step(ft, g, t),
            ("test", [psi]) => {
                let (pt, gt) = (self.truth(psi, t), self.truth(g, t));
                self.rule(vec![ft], vec![pt, gt], vec![]);
                self.rule(vec![pt], vec![ft], vec![]);
                self.rule(vec![gt], vec![ft], vec![]);
            }
            ("seq", [a, b]) => {
                let inner = self.truth(&dia(a, &dia(b, g)), t);
                self.equivalent(ft, inner);
            }
            ("choice", [a, b]) => {
                let (x, y) = (self.truth(&dia(a, g), t), self.truth(&dia(b, g), t));
                self.rule(vec![ft], vec![x], vec![]);
                self.rule(vec![ft], vec![y], vec![]);
                self.rule(vec![x, y], vec![ft], vec![]);
            }
            ("star", [a]) => {
                let gt = self.truth(g, t);
                let again = self.truth(&dia(a, &dia(p, g)), t);
                self.rule(vec![ft], vec![gt], vec![]);
                self.rule(vec![ft], vec![again], vec![]);
                self.rule(vec![gt, again], vec![ft], vec![]);
            }
            _ => return Err(Error::Meta(format!("unknown path operator in {p}"))),
        }
        Ok(())
    }
}

fn is_metric(f: &Term) -> bool {
    matches!(classify(f), Ok(Node::MetricNext(..) | Node::MetricEventually(..)))
}

/// Instantiates the meta-encoding of `db` for `logic` and horizon
/// `opts.horizon`. Metric programs fail if the time bound is below the
/// horizon, since time must advance at every step.
pub fn build(db: &ReifiedDb, logic: Logic, opts: &MetaOptions) -> Result<MetaProgram> {
    let n = opts.horizon;
    let max_time = opts.max_time.unwrap_or_else(|| default_max_time(n));
    let mut b = Builder {
        db,
        n,
        max_time,
        program: solver::Program::new(0),
        index: HashMap::new(),
        names: Vec::new(),
        alias: HashMap::new(),
        defined_within: HashSet::new(),
    };
    b.core()?;
    b.bridge()?;

    let seeds = db
        .outputs
        .iter()
        .map(|(o, _)| o)
        .chain(db.formulas.iter().filter(|(ty, _)| matches!(ty.as_str(), "tel" | "mel" | "del")).map(|(_, f)| f))
        .filter(|f| f.is_theory())
        .map(normalize);
    let closure = fl_close(seeds);

    let timed = logic == Logic::Mel || closure.iter().any(is_metric);
    if timed && max_time < n as i64 {
        return Err(Error::Meta(format!("time bound {max_time} is below the horizon {n}")));
    }
    let tau = timed.then(|| b.timing());
    for f in &closure {
        b.semantics(f)?;
    }

    let plain: BTreeSet<&Term> =
        db.outputs.iter().map(|(o, _)| o).chain(&closure).filter(|a| a.is_plain_atom()).collect();
    let atoms = plain
        .into_iter().map(|a| (a.clone(), (0..=n).map(|t| b.truth(a, t)).collect())).collect();

    let mut shows = Vec::new();
    for (term, tuple) in db.show_atoms.iter().chain(&db.show_terms) {
        let lits: Vec<i64> = b.literal_tuple(*tuple)?.iter().copied().collect();
        let per_step = (0..=n)
            .map(|t| lits.iter().map(|&l| (b.hold(l.unsigned_abs() as u32, t), l > 0)).collect())
            .collect();
        shows.push((term.clone(), per_step));
    }

    Ok(MetaProgram { program: b.program, horizon: n, names: b.names, atoms, tau, shows })
}
