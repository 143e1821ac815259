//! Stable-model search for propositional programs with disjunctive and
//! choice heads.
//!
//! The program is compiled to its completion in CNF (with one variable per
//! distinct body) and searched by DPLL with watched-literal unit
//! propagation. At every propagation fixpoint an unfounded-set check
//! falsifies atoms that have lost all possible support. Candidates of
//! programs with proper disjunctions additionally pass a minimality test on
//! the reduct. Choice rules are rewritten into even loops through fresh
//! atoms first, so only normal and disjunctive rules reach the search.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

pub type Atom = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleHead {
    /// Empty for integrity constraints.
    Disjunction(Vec<Atom>),
    Choice(Vec<Atom>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: RuleHead,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

impl Rule {
    pub fn normal(head: Atom, pos: Vec<Atom>, neg: Vec<Atom>) -> Self {
        Rule { head: RuleHead::Disjunction(vec![head]), pos, neg }
    }

    pub fn fact(head: Atom) -> Self {
        Rule::normal(head, Vec::new(), Vec::new())
    }

    pub fn constraint(pos: Vec<Atom>, neg: Vec<Atom>) -> Self {
        Rule { head: RuleHead::Disjunction(Vec::new()), pos, neg }
    }

    pub fn head_atoms(&self) -> &[Atom] {
        match &self.head {
            RuleHead::Disjunction(h) | RuleHead::Choice(h) => h,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub num_atoms: usize,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(num_atoms: usize) -> Self {
        Program { num_atoms, rules: Vec::new() }
    }

    pub fn add(&mut self, rule: Rule) {
        debug_assert!(rule.head_atoms().iter().chain(&rule.pos).chain(&rule.neg).all(|&a| a < self.num_atoms));
        self.rules.push(rule);
    }

    /// Allocates a fresh atom.
    pub fn atom(&mut self) -> Atom {
        self.num_atoms += 1;
        self.num_atoms - 1
    }
}

/// A stable model: its true atoms in increasing order.
pub type Model = Vec<Atom>;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Number of models to find; 0 enumerates all.
    pub limit: usize,
    /// Bound on decisions plus conflicts.
    pub max_steps: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { limit: 0, max_steps: 200_000_000 }
    }
}

type Lit = usize;

fn lit(var: usize, positive: bool) -> Lit {
    2 * var + usize::from(!positive)
}

fn var_of(l: Lit) -> usize {
    l / 2
}

fn neg(l: Lit) -> Lit {
    l ^ 1
}

/// Propositional clause database with watched-literal propagation and a
/// chronological backtracking trail.
struct Sat {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    levels: Vec<usize>,
    /// Decision literal per level and whether it is already the flipped
    /// alternative.
    decisions: Vec<(Lit, bool)>,
    qhead: usize,
    units: Vec<Lit>,
    empty_clause: bool,
}

impl Sat {
    fn new(num_vars: usize) -> Self {
        Sat {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![0; num_vars],
            trail: Vec::new(),
            levels: Vec::new(),
            decisions: Vec::new(),
            qhead: 0,
            units: Vec::new(),
            empty_clause: false,
        }
    }

    fn add_clause(&mut self, mut c: Vec<Lit>) {
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == neg(w[1]) || w[1] == neg(w[0])) {
            return;
        }
        match c.len() {
            0 => self.empty_clause = true,
            1 => self.units.push(c[0]),
            _ => {
                let id = self.clauses.len();
                self.watches[c[0]].push(id);
                self.watches[c[1]].push(id);
                self.clauses.push(c);
            }
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[var_of(l)];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    /// Assigns `l`; false if it is already false.
    fn enqueue(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            -1 => false,
            _ => {
                self.value[var_of(l)] = if l & 1 == 1 { -1 } else { 1 };
                self.trail.push(l);
                true
            }
        }
    }

    /// Assigns the unit clauses; false if the clause set is trivially
    /// unsatisfiable.
    fn init(&mut self) -> bool {
        if self.empty_clause {
            return false;
        }
        let units = std::mem::take(&mut self.units);
        units.iter().all(|&u| self.enqueue(u))
    }

    /// Unit propagation to fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = neg(self.trail[self.qhead]);
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified]);
            let mut i = 0;
            let mut ok = true;
            while i < ws.len() {
                let cid = ws[i];
                let c = &mut self.clauses[cid];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let other = c[0];
                let other_val = {
                    let v = self.value[var_of(other)];
                    if other & 1 == 1 { -v } else { v }
                };
                if other_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let l = c[k];
                    let v = self.value[var_of(l)];
                    let lv = if l & 1 == 1 { -v } else { v };
                    if lv != -1 {
                        c.swap(1, k);
                        let new_watch = c[1];
                        self.watches[new_watch].push(cid);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                if !self.enqueue(other) {
                    ok = false;
                    break;
                }
            }
            let rest = std::mem::replace(&mut self.watches[falsified], ws);
            self.watches[falsified].extend(rest);
            if !ok {
                return false;
            }
        }
        true
    }

    fn decide(&mut self, l: Lit, flipped: bool) {
        self.levels.push(self.trail.len());
        self.decisions.push((l, flipped));
        let ok = self.enqueue(l);
        debug_assert!(ok, "decision on an assigned variable");
    }

    fn undo_to(&mut self, level: usize) {
        if let Some(&start) = self.levels.get(level) {
            for l in self.trail.drain(start..) {
                self.value[var_of(l)] = 0;
            }
            self.levels.truncate(level);
            self.decisions.truncate(level);
            self.qhead = self.qhead.min(start);
        }
    }

    /// Backtracks to the most recent decision with an untried alternative
    /// and takes it. False when the search space is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(&(l, flipped)) = self.decisions.last() {
            let level = self.decisions.len() - 1;
            self.undo_to(level);
            if !flipped {
                self.decide(neg(l), true);
                return true;
            }
        }
        false
    }

    /// Satisfiability of the clause set, deciding variables in index order.
    fn satisfiable(mut self, num_vars: usize) -> bool {
        if !self.init() {
            return false;
        }
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return false;
                }
                continue;
            }
            match (0..num_vars).find(|&v| self.value[v] == 0) {
                None => return true,
                Some(v) => self.decide(lit(v, false), false),
            }
        }
    }
}

/// Replaces choice rules by even loops: `a :- B, not a'` and `a' :- not a`.
/// Returns the normalized program; atoms of the input keep their indices.
fn normalize(program: &Program) -> Program {
    let mut out = Program::new(program.num_atoms);
    let mut shadow: HashMap<Atom, Atom> = HashMap::new();
    for r in &program.rules {
        match &r.head {
            RuleHead::Disjunction(_) => out.rules.push(r.clone()),
            RuleHead::Choice(h) => {
                for &a in h {
                    let s = *shadow.entry(a).or_insert_with(|| {
                        out.num_atoms += 1;
                        out.num_atoms - 1
                    });
                    let mut n = r.neg.clone();
                    n.push(s);
                    out.rules.push(Rule::normal(a, r.pos.clone(), n));
                }
            }
        }
    }
    let mut pairs: Vec<_> = shadow.into_iter().collect();
    pairs.sort_unstable();
    for (a, s) in pairs {
        out.rules.push(Rule::normal(s, Vec::new(), vec![a]));
    }
    out
}

/// The completion of a normalized program together with what the
/// unfounded-set check needs.
struct Compiled {
    num_atoms: usize,
    sat: Sat,
    rules: Vec<Rule>,
    /// Body variable of each rule.
    body_var: Vec<usize>,
    /// Rules in whose positive body each atom occurs.
    pos_occ: Vec<Vec<usize>>,
    disjunctive: bool,
}

fn compile(program: &Program) -> Compiled {
    let n = program.num_atoms;
    let mut bodies: HashMap<(Vec<Atom>, Vec<Atom>), usize> = HashMap::new();
    let mut body_defs: Vec<(Vec<Atom>, Vec<Atom>)> = Vec::new();
    let mut body_var = Vec::with_capacity(program.rules.len());
    for r in &program.rules {
        let mut p = r.pos.clone();
        let mut q = r.neg.clone();
        p.sort_unstable();
        p.dedup();
        q.sort_unstable();
        q.dedup();
        let key = (p, q);
        let next = n + body_defs.len();
        let v = *bodies.entry(key.clone()).or_insert_with(|| {
            body_defs.push(key);
            next
        });
        body_var.push(v);
    }
    // Support variables for atoms in proper disjunctions.
    let mut support_defs: Vec<(usize, Atom, usize)> = Vec::new();
    let mut supports: Vec<Vec<usize>> = vec![Vec::new(); n];
    let first_support = n + body_defs.len();
    for (ri, r) in program.rules.iter().enumerate() {
        let h = r.head_atoms();
        if h.len() == 1 {
            supports[h[0]].push(body_var[ri]);
        } else {
            for &a in h {
                let v = first_support + support_defs.len();
                support_defs.push((ri, a, v));
                supports[a].push(v);
            }
        }
    }
    let num_vars = first_support + support_defs.len();
    let mut sat = Sat::new(num_vars);
    for (i, (p, q)) in body_defs.iter().enumerate() {
        let b = n + i;
        let mut long = vec![lit(b, true)];
        for &a in p {
            sat.add_clause(vec![lit(b, false), lit(a, true)]);
            long.push(lit(a, false));
        }
        for &a in q {
            sat.add_clause(vec![lit(b, false), lit(a, false)]);
            long.push(lit(a, true));
        }
        sat.add_clause(long);
    }
    for (ri, r) in program.rules.iter().enumerate() {
        let mut c = vec![lit(body_var[ri], false)];
        c.extend(r.head_atoms().iter().map(|&a| lit(a, true)));
        sat.add_clause(c);
    }
    for &(ri, a, v) in &support_defs {
        // v <-> body & no other head atom
        let others: Vec<Atom> = program.rules[ri].head_atoms().iter().copied().filter(|&b| b != a).collect();
        sat.add_clause(vec![lit(v, false), lit(body_var[ri], true)]);
        let mut long = vec![lit(v, true), lit(body_var[ri], false)];
        for &b in &others {
            sat.add_clause(vec![lit(v, false), lit(b, false)]);
            long.push(lit(b, true));
        }
        sat.add_clause(long);
    }
    for (a, s) in supports.iter().enumerate() {
        let mut c = vec![lit(a, false)];
        c.extend(s.iter().map(|&v| lit(v, true)));
        sat.add_clause(c);
    }
    let mut pos_occ = vec![Vec::new(); n];
    for (ri, r) in program.rules.iter().enumerate() {
        for &a in &r.pos {
            pos_occ[a].push(ri);
        }
    }
    Compiled {
        num_atoms: n,
        sat,
        rules: program.rules.clone(),
        body_var,
        pos_occ,
        disjunctive: program.rules.iter().any(|r| r.head_atoms().len() > 1),
    }
}

impl Compiled {
    /// Atoms that are not false but have no possible well-founded support.
    fn unfounded(&self) -> Vec<Atom> {
        let value = &self.sat.value;
        let mut founded = vec![false; self.num_atoms];
        let mut missing: Vec<usize> = Vec::with_capacity(self.rules.len());
        let mut queue = Vec::new();
        for (ri, r) in self.rules.iter().enumerate() {
            let blocked = value[self.body_var[ri]] == -1;
            missing.push(if blocked { usize::MAX } else { r.pos.len() });
            if !blocked && r.pos.is_empty() {
                queue.push(ri);
            }
        }
        while let Some(ri) = queue.pop() {
            for &a in self.rules[ri].head_atoms() {
                if value[a] != -1 && !founded[a] {
                    founded[a] = true;
                    for &rj in &self.pos_occ[a] {
                        if missing[rj] != usize::MAX {
                            missing[rj] -= 1;
                            if missing[rj] == 0 {
                                queue.push(rj);
                            }
                        }
                    }
                }
            }
        }
        (0..self.num_atoms).filter(|&a| value[a] != -1 && !founded[a]).collect()
    }

    /// Unit propagation interleaved with unfounded-set falsification.
    fn propagate(&mut self) -> bool {
        loop {
            if !self.sat.propagate() {
                return false;
            }
            let u = self.unfounded();
            if u.is_empty() {
                return true;
            }
            for a in u {
                if !self.sat.enqueue(lit(a, false)) {
                    return false;
                }
            }
        }
    }

    fn model(&self) -> Vec<bool> {
        (0..self.num_atoms).map(|a| self.sat.value[a] == 1).collect()
    }
}

/// True if no proper subset of `m` is a model of the reduct of `program`.
fn is_minimal(program: &Program, m: &[bool]) -> bool {
    let inside: Vec<Atom> = (0..program.num_atoms).filter(|&a| m[a]).collect();
    if inside.is_empty() {
        return true;
    }
    let index: HashMap<Atom, usize> = inside.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut sat = Sat::new(inside.len());
    for r in &program.rules {
        if r.neg.iter().any(|&a| m[a]) || r.pos.iter().any(|&a| !m[a]) {
            continue;
        }
        let mut c: Vec<Lit> = r.pos.iter().map(|a| lit(index[a], false)).collect();
        match &r.head {
            RuleHead::Disjunction(h) => c.extend(h.iter().filter(|&&a| m[a]).map(|a| lit(index[a], true))),
            RuleHead::Choice(h) => {
                // A chosen atom must stay derivable: a <- pos for a in H ∩ M.
                for &a in h.iter().filter(|&&a| m[a]) {
                    let mut ca = c.clone();
                    ca.push(lit(index[&a], true));
                    sat.add_clause(ca);
                }
                continue;
            }
        }
        sat.add_clause(c);
    }
    sat.add_clause((0..inside.len()).map(|i| lit(i, false)).collect());
    !sat.satisfiable(inside.len())
}

/// Enumerates stable models, calling `on_model` for each until it returns
/// false or `opts.limit` models were found. Models come in lexicographic
/// order with false before true, lowest atom first.
pub fn solve_with(program: &Program, opts: SolveOptions, mut on_model: impl FnMut(&Model) -> bool) -> Result<usize> {
    let normal = normalize(program);
    let mut c = compile(&normal);
    let mut found = 0;
    let mut steps: u64 = 0;
    if !c.sat.init() {
        return Ok(0);
    }
    loop {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Solve(format!("search exceeded {} steps", opts.max_steps)));
        }
        if !c.propagate() {
            if !c.sat.backtrack() {
                return Ok(found);
            }
            continue;
        }
        match (0..c.num_atoms).find(|&a| c.sat.value[a] == 0) {
            Some(a) => c.sat.decide(lit(a, false), false),
            None => {
                let full = c.model();
                if !c.disjunctive || is_minimal(&normal, &full) {
                    let model: Model = (0..program.num_atoms).filter(|&a| full[a]).collect();
                    debug_assert!(check_stable(program, &model), "solver produced an unstable model");
                    found += 1;
                    if !on_model(&model) || (opts.limit != 0 && found >= opts.limit) {
                        return Ok(found);
                    }
                }
                if !c.sat.backtrack() {
                    return Ok(found);
                }
            }
        }
    }
}

/// Stable models of `program`; `limit` 0 means all.
pub fn solve(program: &Program, limit: usize) -> Result<Vec<Model>> {
    let mut out = Vec::new();
    solve_with(program, SolveOptions { limit, ..SolveOptions::default() }, |m| {
        out.push(m.clone());
        true
    })?;
    Ok(out)
}

/// Checks that `candidate` (its true atoms) is a stable model: it satisfies
/// every rule and is a minimal model of the reduct, where a choice rule
/// reduces to `a :- pos` for each chosen head atom `a`.
pub fn check_stable(program: &Program, candidate: &[Atom]) -> bool {
    let mut m = vec![false; program.num_atoms];
    for &a in candidate {
        if a >= program.num_atoms {
            return false;
        }
        m[a] = true;
    }
    for r in &program.rules {
        let body = r.pos.iter().all(|&a| m[a]) && r.neg.iter().all(|&a| !m[a]);
        if let RuleHead::Disjunction(h) = &r.head {
            if body && !h.iter().any(|&a| m[a]) {
                return false;
            }
        }
    }
    let normal_reduct = program.rules.iter().all(|r| match &r.head {
        RuleHead::Disjunction(h) => h.len() <= 1,
        RuleHead::Choice(_) => true,
    });
    if !normal_reduct {
        return is_minimal(program, &m);
    }
    // Least model of the definite reduct.
    let mut derived = vec![false; program.num_atoms];
    loop {
        let mut changed = false;
        for r in &program.rules {
            if r.neg.iter().any(|&a| m[a]) || !r.pos.iter().all(|&a| derived[a]) {
                continue;
            }
            let heads: Vec<Atom> = match &r.head {
                RuleHead::Disjunction(h) => h.clone(),
                RuleHead::Choice(h) => h.iter().copied().filter(|&a| m[a]).collect(),
            };
            for a in heads {
                if !derived[a] {
                    derived[a] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    derived == m
}

/// Result of propagating a partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    /// Extended assignment over the program's atoms.
    Extended(Vec<Option<bool>>),
    /// No stable model extends the assignment; `reason` lists the input
    /// literals involved.
    Conflict { reason: BTreeSet<(Atom, bool)> },
}

/// Completion-based unit propagation plus unfounded-set falsification,
/// exposed for inspection and testing.
pub struct Propagator {
    program: Program,
}

impl Propagator {
    pub fn new(program: &Program) -> Self {
        Propagator { program: program.clone() }
    }

    pub fn propagate(&self, partial: &[Option<bool>]) -> Propagation {
        let normal = normalize(&self.program);
        let mut c = compile(&normal);
        let reason: BTreeSet<(Atom, bool)> =
            partial.iter().enumerate().filter_map(|(a, v)| v.map(|v| (a, v))).collect();
        let conflict = Propagation::Conflict { reason: reason.clone() };
        if !c.sat.init() {
            return Propagation::Conflict { reason: BTreeSet::new() };
        }
        for &(a, v) in &reason {
            if a >= self.program.num_atoms || !c.sat.enqueue(lit(a, v)) {
                return conflict;
            }
        }
        if !c.propagate() {
            return conflict;
        }
        Propagation::Extended(
            (0..self.program.num_atoms)
                .map(|a| match c.sat.value[a] {
                    1 => Some(true),
                    -1 => Some(false),
                    _ => None,
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disj(h: &[Atom], pos: &[Atom], neg: &[Atom]) -> Rule {
        Rule { head: RuleHead::Disjunction(h.to_vec()), pos: pos.to_vec(), neg: neg.to_vec() }
    }

    fn prog(n: usize, rules: Vec<Rule>) -> Program {
        Program { num_atoms: n, rules }
    }

    #[test]
    fn disjunction_has_two_minimal_models() {
        let p = prog(2, vec![disj(&[0, 1], &[], &[])]);
        assert_eq!(solve(&p, 0).unwrap(), vec![vec![1], vec![0]]);
    }

    #[test]
    fn textbook_stability() {
        let p = prog(2, vec![Rule::normal(0, vec![], vec![1])]);
        assert!(check_stable(&p, &[0]));
        assert!(!check_stable(&p, &[1]));
        assert_eq!(solve(&p, 0).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn disjunctive_loop_not_minimal() {
        let p = prog(2, vec![disj(&[0, 1], &[], &[]), Rule::normal(0, vec![1], vec![]), Rule::normal(1, vec![0], vec![])]);
        assert!(check_stable(&p, &[0, 1]));
        let q = prog(2, vec![disj(&[0, 1], &[], &[]), Rule::normal(0, vec![1], vec![])]);
        assert!(!check_stable(&q, &[0, 1]));
        assert_eq!(solve(&q, 0).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn positive_loop_is_unfounded() {
        let p = prog(2, vec![Rule::normal(0, vec![1], vec![]), Rule::normal(1, vec![0], vec![])]);
        assert_eq!(Propagator::new(&p).propagate(&[None, None]), Propagation::Extended(vec![Some(false), Some(false)]));
        assert_eq!(solve(&p, 0).unwrap(), vec![Vec::<Atom>::new()]);
    }

    #[test]
    fn true_body_forces_head() {
        let p = prog(3, vec![disj(&[0, 1], &[2], &[]), Rule { head: RuleHead::Choice(vec![2]), pos: vec![], neg: vec![] }]);
        match Propagator::new(&p).propagate(&[Some(false), None, Some(true)]) {
            Propagation::Extended(v) => assert_eq!(v, vec![Some(false), Some(true), Some(true)]),
            other => panic!("{other:?}"),
        }
        match Propagator::new(&p).propagate(&[Some(false), Some(false), Some(true)]) {
            Propagation::Conflict { reason } => assert_eq!(reason.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn choice_and_constraints() {
        let mut p = prog(2, vec![Rule { head: RuleHead::Choice(vec![0, 1]), pos: vec![], neg: vec![] }]);
        assert_eq!(solve(&p, 0).unwrap().len(), 4);
        p.add(Rule::constraint(vec![0, 1], vec![]));
        p.add(Rule::constraint(vec![], vec![0, 1]));
        assert_eq!(solve(&p, 0).unwrap(), vec![vec![1], vec![0]]);
        assert_eq!(solve(&p, 1).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn odd_loop_has_no_model() {
        let p = prog(1, vec![Rule::normal(0, vec![], vec![0])]);
        assert!(solve(&p, 0).unwrap().is_empty());
    }

    #[test]
    fn step_limit_is_reported() {
        let p = prog(12, vec![Rule { head: RuleHead::Choice((0..12).collect()), pos: vec![], neg: vec![] }]);
        let err = solve_with(&p, SolveOptions { limit: 0, max_steps: 10 }, |_| true);
        assert!(matches!(err, Err(Error::Solve(_))));
    }
}
