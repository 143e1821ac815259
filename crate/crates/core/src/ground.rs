//! Bottom-up instantiation of transformed programs.
//!
//! Grounding runs in two phases. A semi-naive fixpoint first computes the
//! set of possibly derivable atoms, seeded by facts and external instances;
//! negative literals are ignored there, so the set over-approximates every
//! stable model. Rules are then instantiated against the final set and
//! simplified: known facts leave bodies, rules depending on impossible
//! atoms vanish, and negations of impossible atoms are dropped. Externals
//! are never simplified away.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use log::warn;

use crate::ast::{
    compare_terms, BinOp, CmpOp, Head, Literal, Program, Rule, Sign, Statement, Term,
};
use crate::error::{Error, Result};
use crate::transform::{SHOW_NONE, SHOW_SIG, SHOW_TERM};

/// Maximal nesting depth of terms created during instantiation.
pub const MAX_TERM_DEPTH: usize = 16;
const MAX_ATOMS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub sign: Sign,
    pub atom: Term,
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Negative {
            write!(f, "not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundHead {
    /// Empty for integrity constraints.
    Disjunction(Vec<Term>),
    Choice(Vec<Term>),
}

impl GroundHead {
    pub fn atoms(&self) -> &[Term] {
        match self {
            GroundHead::Disjunction(a) | GroundHead::Choice(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: GroundHead,
    pub body: Vec<GroundLiteral>,
}

impl GroundRule {
    fn fact_atom(&self) -> Option<&Term> {
        match (&self.head, self.body.is_empty()) {
            (GroundHead::Disjunction(h), true) if h.len() == 1 => Some(&h[0]),
            _ => None,
        }
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ts: &[Term], sep: &str| ts.iter().map(Term::to_string).collect::<Vec<_>>().join(sep);
        match &self.head {
            GroundHead::Disjunction(h) => write!(f, "{}", join(h, " | "))?,
            GroundHead::Choice(h) => write!(f, "{{ {} }}", join(h, "; "))?,
        }
        if !self.body.is_empty() {
            if !self.head.atoms().is_empty() || matches!(self.head, GroundHead::Choice(_)) {
                write!(f, " ")?;
            }
            let body: Vec<String> = self.body.iter().map(|l| l.to_string()).collect();
            write!(f, ":- {}", body.join(", "))?;
        } else if matches!(&self.head, GroundHead::Disjunction(h) if h.is_empty()) {
            write!(f, ":-")?;
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundShow {
    /// `#show.`: hide every atom not shown otherwise.
    Nothing,
    Signature { name: String, arity: usize },
    /// Shown when the body holds; an empty body shows the term everywhere.
    Term { term: Term, body: Vec<GroundLiteral> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub facts: Vec<Term>,
    pub externals: Vec<Term>,
    /// Every atom and expression of the program, in first-occurrence order.
    pub symbols: Vec<Term>,
    pub shows: Vec<GroundShow>,
}

impl GroundProgram {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.externals.is_empty() && self.shows.is_empty()
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        for e in &self.externals {
            writeln!(f, "#external {e}.")?;
        }
        Ok(())
    }
}

/// Replaces `#const` symbols. `overrides` take precedence over definitions
/// in the program, which are removed.
pub fn substitute_constants(program: &Program, overrides: &[(String, Term)]) -> Program {
    let mut consts: BTreeMap<String, Term> = program.constants().into_iter().collect();
    for (k, v) in overrides {
        consts.insert(k.clone(), v.clone());
    }
    if consts.is_empty() {
        return program.clone();
    }
    let value = |s: &str| consts.get(s).cloned();
    // A bare symbol in atom position is a predicate, not a constant.
    let atom = |t: &Term| match t {
        Term::Symbol(_) => t.clone(),
        other => other.substitute_consts(&value),
    };
    let term = |t: &Term| t.substitute_consts(&value);
    let lits = |ls: &[Literal]| -> Vec<Literal> { ls.iter().map(|l| map_literal(l, &atom, &term)).collect() };
    let statements = program
        .statements
        .iter()
        .filter(|s| !matches!(s, Statement::Const { .. }))
        .map(|s| match s {
            Statement::Rule(r) => {
                let mut r = r.clone();
                for e in r.head.elements_mut() {
                    e.atom = atom(&e.atom);
                    e.condition = lits(&e.condition);
                }
                r.body = lits(&r.body);
                Statement::Rule(r)
            }
            Statement::External { atom: a, condition, span } => {
                Statement::External { atom: atom(a), condition: lits(condition), span: *span }
            }
            Statement::Show { show: crate::ast::Show::Term { term: t, condition }, span } => Statement::Show {
                show: crate::ast::Show::Term { term: term(t), condition: lits(condition) },
                span: *span,
            },
            other => other.clone(),
        })
        .collect();
    Program { statements }
}

fn map_literal(l: &Literal, atom: &dyn Fn(&Term) -> Term, term: &dyn Fn(&Term) -> Term) -> Literal {
    match l {
        Literal::Atom { sign, atom: a } => Literal::Atom { sign: *sign, atom: atom(a) },
        Literal::Comparison { lhs, op, rhs } => Literal::Comparison { lhs: term(lhs), op: *op, rhs: term(rhs) },
        Literal::Conditional { sign, atom: a, condition } => Literal::Conditional {
            sign: *sign,
            atom: atom(a),
            condition: condition.iter().map(|c| map_literal(c, atom, term)).collect(),
        },
    }
}

type Subst = BTreeMap<String, Term>;

/// Evaluates arithmetic in a term under a substitution. `None` if a variable
/// is unbound or the arithmetic is undefined.
pub fn eval(t: &Term, s: &Subst) -> Option<Term> {
    match t {
        Term::Variable(v) => s.get(v).cloned(),
        Term::Function(n, args) => {
            Some(Term::Function(n.clone(), args.iter().map(|a| eval(a, s)).collect::<Option<_>>()?))
        }
        Term::Theory(n, args) => {
            Some(Term::Theory(n.clone(), args.iter().map(|a| eval(a, s)).collect::<Option<_>>()?))
        }
        Term::BinOp(op, l, r) => {
            let (Term::Integer(a), Term::Integer(b)) = (eval(l, s)?, eval(r, s)?) else {
                return None;
            };
            let v = match op {
                BinOp::Add => a.checked_add(b),
                BinOp::Sub => a.checked_sub(b),
                BinOp::Mul => a.checked_mul(b),
                BinOp::Div | BinOp::Mod if b == 0 => {
                    warn!("division by zero in {t}; instance dropped");
                    None
                }
                BinOp::Div => a.checked_div(b),
                BinOp::Mod => a.checked_rem(b),
            };
            v.map(Term::Integer)
        }
        Term::Minus(x) => match eval(x, s)? {
            Term::Integer(v) => Some(Term::Integer(v.checked_neg()?)),
            _ => None,
        },
        Term::Range(..) => None,
        _ => Some(t.clone()),
    }
}

/// Like [`eval`], expanding every range into its values.
pub fn eval_all(t: &Term, s: &Subst) -> Vec<Term> {
    fn product(args: &[Term], s: &Subst) -> Vec<Vec<Term>> {
        let mut acc = vec![Vec::new()];
        for a in args {
            let vals = eval_all(a, s);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v.clone());
                        p
                    })
                })
                .collect();
        }
        acc
    }
    match t {
        Term::Range(lo, hi) => match (eval(lo, s), eval(hi, s)) {
            (Some(Term::Integer(a)), Some(Term::Integer(b))) => (a..=b).map(Term::Integer).collect(),
            _ => Vec::new(),
        },
        Term::Function(n, args) => {
            product(args, s).into_iter().map(|a| Term::Function(n.clone(), a)).collect()
        }
        Term::Theory(n, args) => product(args, s).into_iter().map(|a| Term::Theory(n.clone(), a)).collect(),
        _ => eval(t, s).into_iter().collect(),
    }
}

/// Matches a pattern against a ground term, extending the substitution.
fn match_term(pattern: &Term, ground: &Term, s: &mut Subst) -> bool {
    match (pattern, ground) {
        (Term::Variable(v), _) if v == "_" => true,
        (Term::Variable(v), _) => match s.get(v) {
            Some(b) => b == ground,
            None => {
                s.insert(v.clone(), ground.clone());
                true
            }
        },
        (Term::Function(f, xs), Term::Function(g, ys)) | (Term::Theory(f, xs), Term::Theory(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
        }
        (Term::BinOp(..) | Term::Minus(_), _) => eval(pattern, s).as_ref() == Some(ground),
        _ => pattern == ground,
    }
}

/// Truth of a ground comparison; ranges hold if some pair of values does.
fn cmp_holds(lhs: &Term, op: CmpOp, rhs: &Term, s: &Subst) -> Option<bool> {
    let (ls, rs) = (eval_all(lhs, s), eval_all(rhs, s));
    if ls.is_empty() || rs.is_empty() {
        return None;
    }
    Some(ls.iter().any(|l| rs.iter().any(|r| op.eval(compare_terms(l, r)))))
}

fn is_bound(t: &Term, s: &Subst) -> bool {
    t.vars().iter().all(|v| s.contains_key(v))
}

/// Possibly-derivable atoms with the iteration that produced them.
#[derive(Default)]
struct Domain {
    by_sig: HashMap<(String, usize), Vec<(Term, usize)>>,
    all: HashMap<Term, usize>,
}

impl Domain {
    fn insert(&mut self, t: Term, generation: usize) -> Result<bool> {
        if self.all.contains_key(&t) {
            return Ok(false);
        }
        if t.depth() > MAX_TERM_DEPTH {
            return Err(Error::Ground(format!("term {t} exceeds nesting depth {MAX_TERM_DEPTH}")));
        }
        if self.all.len() >= MAX_ATOMS {
            return Err(Error::Ground(format!("instantiation exceeds {MAX_ATOMS} atoms")));
        }
        if let Some(sig) = t.signature() {
            self.by_sig.entry(sig).or_default().push((t.clone(), generation));
        }
        self.all.insert(t, generation);
        Ok(true)
    }

    fn candidates(&self, pattern: &Term) -> &[(Term, usize)] {
        pattern.signature().and_then(|sig| self.by_sig.get(&sig)).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// One step of a join plan.
#[derive(Clone)]
enum Step {
    Atom(Term),
    Compare(Term, CmpOp, Term),
}

/// Orders positive atoms and comparisons so that each comparison runs as
/// soon as its variables are bound (or it can bind one through `=`).
fn plan(lits: &[Literal]) -> Vec<Step> {
    let mut atoms: Vec<&Term> = Vec::new();
    let mut cmps: Vec<(&Term, CmpOp, &Term)> = Vec::new();
    for l in lits {
        match l {
            Literal::Atom { sign: Sign::Positive, atom } => atoms.push(atom),
            Literal::Comparison { lhs, op, rhs } => cmps.push((lhs, *op, rhs)),
            _ => {}
        }
    }
    let mut bound = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut ai = 0;
    while !cmps.is_empty() || ai < atoms.len() {
        let ready = cmps.iter().position(|(l, op, r)| {
            let lb = l.vars().is_subset(&bound);
            let rb = r.vars().is_subset(&bound);
            (lb && rb)
                || (*op == CmpOp::Eq
                    && ((matches!(l, Term::Variable(_)) && rb) || (matches!(r, Term::Variable(_)) && lb)))
        });
        if let Some(i) = ready {
            let (l, op, r) = cmps.remove(i);
            l.collect_vars(&mut bound);
            r.collect_vars(&mut bound);
            out.push(Step::Compare(l.clone(), op, r.clone()));
        } else if ai < atoms.len() {
            atoms[ai].collect_vars(&mut bound);
            out.push(Step::Atom(atoms[ai].clone()));
            ai += 1;
        } else {
            // Unbindable comparisons are left to fail at evaluation.
            for (l, op, r) in cmps.drain(..) {
                out.push(Step::Compare(l.clone(), op, r.clone()));
            }
        }
    }
    out
}

/// Generation window for semi-naive evaluation: the atom step `pivot` reads
/// only the newest generation, earlier ones only older atoms.
#[derive(Clone, Copy)]
struct Window {
    newest: usize,
    pivot: Option<usize>,
}

fn join(steps: &[Step], idx: usize, atom_idx: usize, s: &Subst, dom: &Domain, w: Window, out: &mut Vec<Subst>) {
    let Some(step) = steps.get(idx) else {
        out.push(s.clone());
        return;
    };
    match step {
        Step::Compare(l, op, r) => {
            if is_bound(l, s) && is_bound(r, s) {
                if cmp_holds(l, *op, r, s) == Some(true) {
                    join(steps, idx + 1, atom_idx, s, dom, w, out);
                }
                return;
            }
            let (var, other) = match (l, r) {
                (Term::Variable(v), o) if !s.contains_key(v) && is_bound(o, s) => (v, o),
                (o, Term::Variable(v)) if !s.contains_key(v) && is_bound(o, s) => (v, o),
                _ => return,
            };
            for val in eval_all(other, s) {
                let mut s2 = s.clone();
                s2.insert(var.clone(), val);
                join(steps, idx + 1, atom_idx, &s2, dom, w, out);
            }
        }
        Step::Atom(pattern) => {
            if is_bound(pattern, s) {
                let Some(g) = eval(pattern, s) else { return };
                let Some(&gen) = dom.all.get(&g) else { return };
                if admits(w, atom_idx, gen) {
                    join(steps, idx + 1, atom_idx + 1, s, dom, w, out);
                }
                return;
            }
            for (g, gen) in dom.candidates(pattern) {
                if !admits(w, atom_idx, *gen) {
                    continue;
                }
                let mut s2 = s.clone();
                if match_term(pattern, g, &mut s2) {
                    join(steps, idx + 1, atom_idx + 1, &s2, dom, w, out);
                }
            }
        }
    }
}

fn admits(w: Window, atom_idx: usize, gen: usize) -> bool {
    match w.pivot {
        None => gen <= w.newest,
        Some(p) if atom_idx < p => gen < w.newest,
        Some(p) if atom_idx == p => gen == w.newest,
        Some(_) => gen <= w.newest,
    }
}

/// All substitutions satisfying the positive part of `lits` in `dom`.
fn substitutions(lits: &[Literal], dom: &Domain) -> Vec<Subst> {
    let steps = plan(lits);
    let mut out = Vec::new();
    join(&steps, 0, 0, &Subst::new(), dom, Window { newest: usize::MAX, pivot: None }, &mut out);
    out
}

/// Substitutions that use at least one atom of generation `newest`.
fn new_substitutions(steps: &[Step], dom: &Domain, newest: usize, first_round: bool) -> Vec<Subst> {
    let n_atoms = steps.iter().filter(|s| matches!(s, Step::Atom(_))).count();
    let mut out = Vec::new();
    if first_round || n_atoms == 0 {
        if first_round {
            join(steps, 0, 0, &Subst::new(), dom, Window { newest, pivot: None }, &mut out);
        }
        return out;
    }
    for pivot in 0..n_atoms {
        join(steps, 0, 0, &Subst::new(), dom, Window { newest, pivot: Some(pivot) }, &mut out);
    }
    out
}

/// A rule or external directive as seen by the fixpoint.
struct Source<'a> {
    heads: Vec<(&'a Term, &'a [Literal])>,
    body: &'a [Literal],
    steps: Vec<Step>,
}

fn sources(program: &Program) -> Vec<Source<'_>> {
    let mut out = Vec::new();
    for st in &program.statements {
        match st {
            Statement::Rule(r) => out.push(Source {
                heads: r.head.elements().iter().map(|e| (&e.atom, e.condition.as_slice())).collect(),
                body: &r.body,
                steps: plan(&r.body),
            }),
            Statement::External { atom, condition, .. } => out.push(Source {
                heads: vec![(atom, &[][..])],
                body: condition,
                steps: plan(condition),
            }),
            _ => {}
        }
    }
    out
}

/// Head atoms produced by a substitution, with conditional elements expanded
/// over the domain.
fn head_instances(heads: &[(&Term, &[Literal])], s: &Subst, dom: &Domain) -> Vec<Term> {
    let mut out = Vec::new();
    for (atom, cond) in heads {
        if cond.is_empty() {
            out.extend(eval_all(atom, s));
        } else {
            for local in extend_all(cond, s, dom) {
                out.extend(eval_all(atom, &local));
            }
        }
    }
    out
}

fn extend_all(cond: &[Literal], s: &Subst, dom: &Domain) -> Vec<Subst> {
    let steps = plan(cond);
    let mut out = Vec::new();
    join(&steps, 0, 0, s, dom, Window { newest: usize::MAX, pivot: None }, &mut out);
    out
}

fn possible_atoms(program: &Program) -> Result<Domain> {
    let srcs = sources(program);
    let mut dom = Domain::default();
    let mut generation = 0;
    loop {
        let mut added = Vec::new();
        for src in &srcs {
            if src.heads.is_empty() {
                continue;
            }
            let subs = if generation == 0 {
                new_substitutions(&src.steps, &dom, 0, true)
            } else {
                new_substitutions(&src.steps, &dom, generation - 1, false)
            };
            for s in subs {
                added.extend(head_instances(&src.heads, &s, &dom));
            }
        }
        // Conditional head elements depend on the whole domain, so they are
        // re-expanded every round for all body matches.
        for src in srcs.iter().filter(|s| s.heads.iter().any(|(_, c)| !c.is_empty())) {
            for s in substitutions(src.body, &dom) {
                added.extend(head_instances(&src.heads, &s, &dom));
            }
        }
        let mut changed = false;
        for a in added {
            changed |= dom.insert(a, generation)?;
        }
        if !changed {
            return Ok(dom);
        }
        generation += 1;
    }
}

/// Expands conditional literals of a ground body instance. Condition
/// instances must be facts, since the conjunction cannot depend on guesses.
fn expand_body(
    body: &[Literal],
    s: &Subst,
    dom: &Domain,
    facts: &HashSet<Term>,
) -> Result<Option<Vec<GroundLiteral>>> {
    let mut out = Vec::new();
    for l in body {
        match l {
            Literal::Atom { sign, atom } => match eval(atom, s) {
                Some(a) => out.push(GroundLiteral { sign: *sign, atom: a }),
                None => return Ok(None),
            },
            Literal::Comparison { lhs, op, rhs } => {
                if cmp_holds(lhs, *op, rhs, s) != Some(true) {
                    return Ok(None);
                }
            }
            Literal::Conditional { sign, atom, condition } => {
                for local in extend_all(condition, s, dom) {
                    for c in condition {
                        if let Literal::Atom { sign: Sign::Positive, atom: ca } = c {
                            let g = eval(ca, &local).expect("condition atom bound after join");
                            if !facts.contains(&g) {
                                return Err(Error::Ground(format!(
                                    "condition atom {g} of a conditional literal is not a fact"
                                )));
                            }
                        }
                    }
                    let Some(a) = eval(atom, &local) else { continue };
                    out.push(GroundLiteral { sign: *sign, atom: a });
                }
            }
        }
    }
    Ok(Some(out))
}

/// Atoms derivable by definite rules alone; used to decide conditional
/// expansions before simplification.
fn definite_facts(program: &Program, dom: &Domain) -> HashSet<Term> {
    let mut facts = HashSet::new();
    loop {
        let mut changed = false;
        for r in program.rules() {
            let Head::Disjunction(els) = &r.head else { continue };
            if els.len() != 1 || !els[0].condition.is_empty() {
                continue;
            }
            if r.body.iter().any(|l| !matches!(l, Literal::Atom { sign: Sign::Positive, .. } | Literal::Comparison { .. })) {
                continue;
            }
            for s in substitutions(&r.body, dom) {
                let ok = r.body.iter().all(|l| match l {
                    Literal::Atom { atom, .. } => eval(atom, &s).is_some_and(|a| facts.contains(&a)),
                    _ => true,
                });
                if ok {
                    for a in eval_all(&els[0].atom, &s) {
                        changed |= facts.insert(a);
                    }
                }
            }
        }
        if !changed {
            return facts;
        }
    }
}

fn instantiate(program: &Program, dom: &Domain) -> Result<(Vec<GroundRule>, Vec<Term>)> {
    let facts = definite_facts(program, dom);
    let mut rules = Vec::new();
    let mut seen = HashSet::new();
    let mut externals = Vec::new();
    let mut ext_seen = HashSet::new();
    for st in &program.statements {
        match st {
            Statement::Rule(r) => {
                let heads: Vec<(&Term, &[Literal])> =
                    r.head.elements().iter().map(|e| (&e.atom, e.condition.as_slice())).collect();
                for s in substitutions(&r.body, dom) {
                    let Some(body) = expand_body(&r.body, &s, dom, &facts)? else { continue };
                    let mut h = head_instances(&heads, &s, dom);
                    dedup(&mut h);
                    let is_choice = matches!(r.head, Head::Choice(_));
                    // A fact over a range stands for one fact per value.
                    let split = !is_choice && body.is_empty() && r.head.elements().len() == 1 && h.len() > 1;
                    let groups = if split { h.into_iter().map(|a| vec![a]).collect() } else { vec![h] };
                    for head in groups {
                        let mut body = body.clone();
                        dedup(&mut body);
                        let rule = GroundRule {
                            head: if is_choice { GroundHead::Choice(head) } else { GroundHead::Disjunction(head) },
                            body,
                        };
                        if seen.insert(rule.clone()) {
                            rules.push(rule);
                        }
                    }
                }
            }
            Statement::External { atom, condition, .. } => {
                for s in substitutions(condition, dom) {
                    if !condition.iter().all(|l| match l {
                        Literal::Comparison { lhs, op, rhs } => cmp_holds(lhs, *op, rhs, &s) == Some(true),
                        _ => true,
                    }) {
                        continue;
                    }
                    for a in eval_all(atom, &s) {
                        if ext_seen.insert(a.clone()) {
                            externals.push(a);
                        }
                    }
                }
            }
            _ => {}
        }
    }
    Ok((rules, externals))
}

fn dedup<T: Clone + Eq + std::hash::Hash>(v: &mut Vec<T>) {
    let mut seen = HashSet::new();
    v.retain(|x| seen.insert(x.clone()));
}

/// Simplifies ground rules to a fixpoint. Returns the surviving rules.
fn simplify(mut rules: Vec<GroundRule>, externals: &HashSet<Term>) -> Vec<GroundRule> {
    loop {
        let facts: HashSet<Term> = rules.iter().filter_map(|r| r.fact_atom().cloned()).collect();
        let mut possible: HashSet<Term> = externals.clone();
        for r in &rules {
            possible.extend(r.head.atoms().iter().cloned());
        }
        let mut changed = false;
        let mut next = Vec::with_capacity(rules.len());
        'rules: for mut r in rules {
            let before = r.body.len();
            let mut body = Vec::with_capacity(r.body.len());
            for l in r.body {
                match l.sign {
                    Sign::Positive if facts.contains(&l.atom) => {}
                    Sign::Positive if !possible.contains(&l.atom) => {
                        changed = true;
                        continue 'rules;
                    }
                    Sign::Negative if facts.contains(&l.atom) => {
                        changed = true;
                        continue 'rules;
                    }
                    Sign::Negative if !possible.contains(&l.atom) => {}
                    _ => body.push(l),
                }
            }
            changed |= body.len() != before;
            r.body = body;
            next.push(r);
        }
        let mut seen = HashSet::new();
        next.retain(|r| seen.insert(r.clone()));
        rules = next;
        if !changed {
            return rules;
        }
    }
}

fn reserved(t: &Term) -> Option<&str> {
    match t {
        Term::Symbol(n) | Term::Function(n, _) if n == SHOW_SIG || n == SHOW_TERM || n == SHOW_NONE => Some(n),
        _ => None,
    }
}

/// Grounds a transformed program.
pub fn ground(program: &Program) -> Result<GroundProgram> {
    let dom = possible_atoms(program)?;
    let (rules, externals) = instantiate(program, &dom)?;
    let ext_set: HashSet<Term> = externals.iter().cloned().collect();
    let rules = simplify(rules, &ext_set);

    let mut shows = Vec::new();
    let mut kept = Vec::new();
    for r in rules {
        let show = match r.head.atoms() {
            [h] if matches!(r.head, GroundHead::Disjunction(_)) => reserved(h).map(|n| (n.to_string(), h.clone())),
            _ => None,
        };
        match show {
            Some((n, _)) if n == SHOW_NONE => shows.push(GroundShow::Nothing),
            Some((n, Term::Function(_, args))) if n == SHOW_SIG => {
                if let [Term::Symbol(name), Term::Integer(arity)] = args.as_slice() {
                    shows.push(GroundShow::Signature { name: name.clone(), arity: *arity as usize });
                }
            }
            Some((n, Term::Function(_, mut args))) if n == SHOW_TERM => {
                shows.push(GroundShow::Term { term: args.pop().expect("show term"), body: r.body })
            }
            _ => kept.push(r),
        }
    }
    dedup(&mut shows);

    let mut symbols = Vec::new();
    let mut seen = HashSet::new();
    let mut add = |t: &Term, symbols: &mut Vec<Term>| {
        if seen.insert(t.clone()) {
            symbols.push(t.clone());
        }
    };
    for r in &kept {
        r.head.atoms().iter().for_each(|a| add(a, &mut symbols));
        for l in r.body.iter().filter(|l| l.sign == Sign::Positive) {
            add(&l.atom, &mut symbols);
        }
        for l in r.body.iter().filter(|l| l.sign == Sign::Negative) {
            add(&l.atom, &mut symbols);
        }
    }
    externals.iter().for_each(|e| add(e, &mut symbols));
    for s in &shows {
        if let GroundShow::Term { body, .. } = s {
            body.iter().for_each(|l| add(&l.atom, &mut symbols));
        }
    }
    let facts = kept.iter().filter_map(|r| r.fact_atom().cloned()).collect();
    Ok(GroundProgram { rules: kept, facts, externals, symbols, shows })
}

/// Every instance of every rule over the constants of the program, without
/// simplification. Exponential; meant as a reference for small tests.
pub fn naive_instances(program: &Program) -> Vec<GroundRule> {
    let mut universe: Vec<Term> = Vec::new();
    let mut seen = HashSet::new();
    for r in program.rules() {
        let atoms = r.head.elements().iter().map(|e| &e.atom).chain(r.body.iter().filter_map(|l| match l {
            Literal::Atom { atom, .. } => Some(atom),
            _ => None,
        }));
        for a in atoms {
            if let Term::Function(_, args) = a {
                for arg in args {
                    arg.walk(&mut |s| {
                        if matches!(s, Term::Symbol(_) | Term::Integer(_)) && seen.insert(s.clone()) {
                            universe.push(s.clone());
                        }
                    });
                }
            }
        }
    }
    let mut out = Vec::new();
    for r in program.rules() {
        let mut vars = r.global_vars();
        r.body.iter().for_each(|l| l.collect_vars(&mut vars));
        let vars: Vec<String> = vars.into_iter().collect();
        let total = universe.len().checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
        for mut code in 0..total {
            let mut s = Subst::new();
            for v in &vars {
                s.insert(v.clone(), universe[code % universe.len()].clone());
                code /= universe.len();
            }
            let mut body = Vec::new();
            let mut holds = true;
            for l in &r.body {
                match l {
                    Literal::Atom { sign, atom } => match eval(atom, &s) {
                        Some(a) => body.push(GroundLiteral { sign: *sign, atom: a }),
                        None => holds = false,
                    },
                    Literal::Comparison { lhs, op, rhs } => holds &= cmp_holds(lhs, *op, rhs, &s) == Some(true),
                    Literal::Conditional { .. } => {}
                }
            }
            if !holds {
                continue;
            }
            let head: Vec<Term> = r.head.elements().iter().filter_map(|e| eval(&e.atom, &s)).collect();
            out.push(GroundRule {
                head: match r.head {
                    Head::Choice(_) => GroundHead::Choice(head),
                    Head::Disjunction(_) => GroundHead::Disjunction(head),
                },
                body,
            });
        }
    }
    out
}

/// Rule of a ground program in non-ground AST form, for printing.
pub fn to_rule(r: &GroundRule) -> Rule {
    use crate::ast::HeadElement;
    let els = r.head.atoms().iter().cloned().map(HeadElement::new).collect();
    Rule::new(
        match r.head {
            GroundHead::Choice(_) => Head::Choice(els),
            GroundHead::Disjunction(_) => Head::Disjunction(els),
        },
        r.body.iter().map(|l| Literal::Atom { sign: l.sign, atom: l.atom.clone() }).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_program;

    fn g(src: &str) -> GroundProgram {
        ground(&parse_program(src).unwrap()).unwrap()
    }

    fn rules(gp: &GroundProgram) -> Vec<String> {
        gp.rules.iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn underivable_negation_is_dropped() {
        let gp = g("light(l1). red(L) :- not green(L), light(L).");
        assert_eq!(rules(&gp), ["light(l1).", "red(l1)."]);
    }

    #[test]
    fn external_keeps_negation() {
        let gp = g("#external green(l1). #external light(l1). red(L) :- not green(L), light(L).");
        assert_eq!(rules(&gp), ["red(l1) :- not green(l1), light(l1)."]);
        assert_eq!(gp.externals.len(), 2);
        for e in &gp.externals {
            assert!(gp.symbols.contains(e));
        }
    }

    #[test]
    fn vacuous_rule_deleted() {
        let gp = g("p :- q.");
        assert!(gp.rules.is_empty() && gp.symbols.is_empty());
    }

    #[test]
    fn negated_fact_deletes_rule() {
        assert_eq!(rules(&g("q. p :- not q.")), ["q."]);
    }

    #[test]
    fn ranges_arithmetic_and_comparisons() {
        let gp = g("time(0..2). next(T,T+1) :- time(T), time(T+1). big(X) :- time(X), X > 0.");
        assert_eq!(gp.facts.len(), 7);
        assert!(gp.facts.contains(&crate::ast::parse_term("next(1,2)").unwrap()));
        let gp = g("p(X) :- X = 1..3. q(Y) :- p(X), Y = X*X, Y != 4.");
        let q: Vec<_> = gp.facts.iter().filter(|t| t.to_string().starts_with('q')).map(|t| t.to_string()).collect();
        assert_eq!(q, ["q(1)", "q(9)"]);
    }

    #[test]
    fn division_by_zero_instance_dropped() {
        let gp = g("n(0..1). r(X) :- n(X), Y = 4/X, Y > 0.");
        assert_eq!(gp.facts.iter().filter(|t| t.to_string().starts_with('r')).count(), 1);
    }

    #[test]
    fn head_conditional_expands_over_domain() {
        let gp = g("light(l1). light(l2). &eventually(green(L)) : light(L) :- start. start.");
        assert_eq!(rules(&gp)[2], "&eventually(green(l1)) | &eventually(green(l2)).");
        let gp = g("light(l1). &eventually(green(L)) : light(L), other(L).");
        assert_eq!(rules(&gp), ["light(l1).", ":-."]);
    }

    #[test]
    fn body_conditional_expands() {
        let gp = g("#external hold(1). #external hold(2). lt(0,1). lt(0,2). c :- hold(L) : lt(0,L).");
        assert_eq!(rules(&gp).last().unwrap(), "c :- hold(1), hold(2).");
        let err = ground(&parse_program("{ r(1) }. c :- h(L) : r(L).").unwrap());
        assert!(matches!(err, Err(Error::Ground(_))));
    }

    #[test]
    fn recursion_reaches_fixpoint() {
        let gp = g("e(1,2). e(2,3). e(3,1). r(X,Y) :- e(X,Y). r(X,Z) :- r(X,Y), e(Y,Z).");
        assert_eq!(gp.facts.iter().filter(|t| t.to_string().starts_with("r(")).count(), 9);
    }

    #[test]
    fn depth_bound_guards_value_invention() {
        let err = ground(&parse_program("p(a). p(f(X)) :- p(X).").unwrap());
        assert!(matches!(err, Err(Error::Ground(m)) if m.contains("depth")));
    }

    #[test]
    fn constants_are_substituted() {
        let p = parse_program("#const n = 1. n. t(0..n). q :- t(X), X = n.").unwrap();
        let p = substitute_constants(&p, &[("n".into(), Term::Integer(2))]);
        let gp = ground(&p).unwrap();
        let names: Vec<String> = gp.facts.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["n", "t(0)", "t(1)", "t(2)", "q"]);
    }

    #[test]
    fn shows_are_separated() {
        let p = parse_program("#show green/1. #show s(X) : p(X). p(1). {green(a)}.").unwrap();
        let p = crate::transform::rewrite_shows(&p).unwrap();
        let gp = ground(&p).unwrap();
        assert_eq!(gp.shows.len(), 2);
        assert!(gp.symbols.iter().all(|s| !s.to_string().starts_with("__")));
    }

    #[test]
    fn matches_naive_grounding_on_positive_programs() {
        let src = "e(a,b). e(b,c). p(X) :- e(X,Y). q(X) :- p(X), e(X,Y), p(Y). r(X) :- e(X,X).";
        let p = parse_program(src).unwrap();
        let gp = ground(&p).unwrap();
        // The least model of the naive instantiation equals the facts found
        // by the grounder.
        let naive = naive_instances(&p);
        let mut model: HashSet<Term> = HashSet::new();
        loop {
            let before = model.len();
            for r in &naive {
                if r.body.iter().all(|l| model.contains(&l.atom)) {
                    model.extend(r.head.atoms().iter().cloned());
                }
            }
            if model.len() == before {
                break;
            }
        }
        let facts: HashSet<Term> = gp.facts.iter().cloned().collect();
        assert_eq!(facts, model);
        assert_eq!(gp.rules.len(), gp.facts.len());
    }
}
