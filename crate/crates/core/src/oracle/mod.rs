//! Brute-force reference semantics for temporal programs.
//!
//! Nothing here is shared with the grounder, the meta-encoding or the
//! solver. Rules are instantiated over the constants of the program, every
//! trace over the head atoms is enumerated (with every timing function
//! when metric), and a trace is kept when it is a temporal equilibrium
//! model: it satisfies the program, and no pointwise smaller "here" trace
//! satisfies it in the logic of here-and-there, where negation is judged
//! by the full trace. Only practical for a handful of atoms and states.

mod eval;

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{compare_terms, BinOp, Head, Literal, Program, Sign, Statement, Term};
use crate::error::{Error, Result};
use crate::trace::Trace;

use eval::{compile, compile_path, holds, relation, Formula, Vocabulary, World};

/// Largest number of (atom, state) pairs the enumeration accepts.
pub const MAX_CANDIDATE_BITS: usize = 24;
const MAX_UNIVERSE: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
struct GroundRule {
    head: Vec<Term>,
    choice: bool,
    pos: Vec<Term>,
    neg: Vec<Term>,
}

struct CompiledRule {
    head: Vec<Formula>,
    choice: bool,
    pos: Vec<Formula>,
    neg: Vec<Formula>,
}

impl CompiledRule {
    fn satisfied(&self, w: World<'_>, t: usize) -> bool {
        let total = World { here: w.there, ..w };
        let body = self.pos.iter().all(|f| holds(f, w, t)) && self.neg.iter().all(|f| !holds(f, total, t));
        if !body {
            return true;
        }
        if self.choice {
            self.head.iter().all(|h| holds(h, w, t) || !holds(h, total, t))
        } else {
            self.head.iter().any(|h| holds(h, w, t))
        }
    }
}

fn values(t: &Term, s: &BTreeMap<String, Term>) -> Option<Vec<Term>> {
    let product = |args: &[Term]| -> Option<Vec<Vec<Term>>> {
        let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
        for a in args {
            let vs = values(a, s)?;
            acc = acc.iter().flat_map(|p| vs.iter().map(move |v| [p.clone(), vec![v.clone()]].concat())).collect();
        }
        Some(acc)
    };
    let ints = |t: &Term| -> Option<Vec<i64>> {
        values(t, s)?.into_iter().map(|v| if let Term::Integer(i) = v { Some(i) } else { None }).collect()
    };
    Some(match t {
        Term::Variable(v) => vec![s.get(v)?.clone()],
        Term::Function(n, args) => product(args)?.into_iter().map(|a| Term::Function(n.clone(), a)).collect(),
        Term::Theory(n, args) => product(args)?.into_iter().map(|a| Term::Theory(n.clone(), a)).collect(),
        Term::Minus(x) => ints(x)?.into_iter().map(|i| Term::Integer(-i)).collect(),
        Term::Range(lo, hi) => {
            let (lo, hi) = (ints(lo)?, ints(hi)?);
            lo.iter().flat_map(|&l| hi.iter().flat_map(move |&h| (l..=h).map(Term::Integer))).collect()
        }
        Term::BinOp(op, l, r) => {
            let (ls, rs) = (ints(l)?, ints(r)?);
            let mut out = Vec::new();
            for &a in &ls {
                for &b in &rs {
                    let v = match op {
                        BinOp::Add => a.checked_add(b),
                        BinOp::Sub => a.checked_sub(b),
                        BinOp::Mul => a.checked_mul(b),
                        BinOp::Div => a.checked_div(b),
                        BinOp::Mod => a.checked_rem(b),
                    };
                    out.push(Term::Integer(v?));
                }
            }
            out
        }
        _ => vec![t.clone()],
    })
}

fn single(t: &Term, s: &BTreeMap<String, Term>) -> Option<Term> {
    match values(t, s)?.as_slice() {
        [v] => Some(v.clone()),
        _ => None,
    }
}

/// Arguments of plain atoms nested in `t`, and the atoms themselves.
fn visit_atoms(t: &Term, atoms: &mut Vec<Term>, args: &mut Vec<Term>) {
    match t {
        Term::Symbol(_) => atoms.push(t.clone()),
        Term::Function(_, xs) => {
            atoms.push(t.clone());
            args.extend(xs.iter().cloned());
        }
        Term::Theory(op, xs) if op != "i" => xs.iter().for_each(|x| visit_atoms(x, atoms, args)),
        _ => {}
    }
}

fn add_constants(t: &Term, universe: &mut BTreeSet<Term>) {
    if t.is_ground() {
        for v in values(t, &BTreeMap::new()).unwrap_or_default() {
            universe.insert(v);
        }
    }
    if let Term::Function(_, xs) = t {
        xs.iter().for_each(|x| add_constants(x, universe));
    }
}

fn substitute(program: &Program, overrides: &[(String, Term)]) -> Program {
    let mut consts: BTreeMap<String, Term> = BTreeMap::new();
    for s in &program.statements {
        if let Statement::Const { name, value, .. } = s {
            consts.entry(name.clone()).or_insert_with(|| value.clone());
        }
    }
    for (k, v) in overrides {
        consts.insert(k.clone(), v.clone());
    }
    fn term(t: &Term, c: &BTreeMap<String, Term>) -> Term {
        t.substitute_consts(&|s: &str| c.get(s).cloned())
    }
    fn atom(t: &Term, c: &BTreeMap<String, Term>) -> Term {
        match t {
            Term::Symbol(_) => t.clone(),
            Term::Function(n, xs) => Term::Function(n.clone(), xs.iter().map(|x| term(x, c)).collect()),
            Term::Theory(n, xs) => Term::Theory(n.clone(), xs.iter().map(|x| atom(x, c)).collect()),
            _ => term(t, c),
        }
    }
    let lit = |l: &Literal| match l {
        Literal::Atom { sign, atom: a } => Literal::Atom { sign: *sign, atom: atom(a, &consts) },
        Literal::Comparison { lhs, op, rhs } => {
            Literal::Comparison { lhs: term(lhs, &consts), op: *op, rhs: term(rhs, &consts) }
        }
        other => other.clone(),
    };
    let statements = program
        .statements
        .iter()
        .map(|s| match s {
            Statement::Rule(r) => {
                let mut r = r.clone();
                for e in r.head.elements_mut() {
                    e.atom = atom(&e.atom, &consts);
                }
                r.body = r.body.iter().map(lit).collect();
                Statement::Rule(r)
            }
            other => other.clone(),
        })
        .collect();
    Program { statements }
}

fn instances(program: &Program, universe: &BTreeSet<Term>) -> Result<Vec<GroundRule>> {
    let mut out = Vec::new();
    for r in program.rules() {
        if r.head.elements().iter().any(|e| !e.condition.is_empty())
            || r.body.iter().any(|l| matches!(l, Literal::Conditional { .. }))
        {
            return Err(Error::Oracle("conditional literals are not supported".into()));
        }
        let vars: Vec<String> = r.global_vars().into_iter().collect();
        let domain: Vec<&Term> = universe.iter().collect();
        let mut counter = vec![0usize; vars.len()];
        if !vars.is_empty() && domain.is_empty() {
            continue;
        }
        'assign: loop {
            let s: BTreeMap<String, Term> =
                vars.iter().zip(&counter).map(|(v, &i)| (v.clone(), domain[i].clone())).collect();
            let mut g = GroundRule { head: Vec::new(), choice: matches!(r.head, Head::Choice(_)), pos: vec![], neg: vec![] };
            let mut ok = true;
            for l in &r.body {
                match l {
                    Literal::Atom { sign, atom } => match single(atom, &s) {
                        Some(a) if *sign == Sign::Positive => g.pos.push(a),
                        Some(a) => g.neg.push(a),
                        None => ok = false,
                    },
                    Literal::Comparison { lhs, op, rhs } => {
                        let (ls, rs) = (values(lhs, &s).unwrap_or_default(), values(rhs, &s).unwrap_or_default());
                        ok &= ls.iter().any(|a| rs.iter().any(|b| op.eval(compare_terms(a, b))));
                    }
                    Literal::Conditional { .. } => unreachable!(),
                }
            }
            for e in r.head.elements() {
                match values(&e.atom, &s) {
                    Some(vs) => g.head.extend(vs),
                    None => ok = false,
                }
            }
            if ok {
                out.push(g);
            }
            let mut i = 0;
            loop {
                if i == counter.len() {
                    break 'assign;
                }
                counter[i] += 1;
                if counter[i] < domain.len() {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
        }
    }
    Ok(out)
}

/// Instantiates the program over a universe that is closed under the
/// arguments of derivable head atoms.
fn instantiate(program: &Program) -> Result<Vec<GroundRule>> {
    let mut universe = BTreeSet::new();
    for r in program.rules() {
        let mut atoms = Vec::new();
        let mut args = Vec::new();
        for e in r.head.elements() {
            visit_atoms(&e.atom, &mut atoms, &mut args);
        }
        for l in &r.body {
            if let Literal::Atom { atom, .. } = l {
                visit_atoms(atom, &mut atoms, &mut args);
            }
        }
        args.iter().for_each(|a| add_constants(a, &mut universe));
    }
    loop {
        let rules = instances(program, &universe)?;
        let before = universe.len();
        for g in &rules {
            let (mut atoms, mut args) = (Vec::new(), Vec::new());
            g.head.iter().for_each(|h| visit_atoms(h, &mut atoms, &mut args));
            args.iter().for_each(|a| add_constants(a, &mut universe));
        }
        if universe.len() > MAX_UNIVERSE {
            return Err(Error::Oracle(format!("more than {MAX_UNIVERSE} constants")));
        }
        if universe.len() == before {
            return Ok(rules);
        }
    }
}

/// Strictly increasing timings starting at 0 and ending at most at `max`.
fn timings(n: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64];
    fn rec(n: usize, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n + 1 {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().expect("non-empty");
        let remaining = (n + 1 - cur.len()) as i64;
        for v in last + 1..=max - remaining + 1 {
            cur.push(v);
            rec(n, max, cur, out);
            cur.pop();
        }
    }
    rec(n, max, &mut cur, &mut out);
    out
}

/// Equilibrium models of length `horizon + 1`. With `max_time`, formulas
/// are metric and every timing function bounded by it is enumerated; the
/// models are then pairs of a trace and a timing.
pub fn temporal_models(
    program: &Program,
    constants: &[(String, Term)],
    horizon: usize,
    max_time: Option<i64>,
) -> Result<Vec<Trace>> {
    let program = substitute(program, constants);
    let rules = instantiate(&program)?;

    let mut candidates = BTreeSet::new();
    for g in &rules {
        let mut args = Vec::new();
        let mut atoms = Vec::new();
        g.head.iter().for_each(|h| visit_atoms(h, &mut atoms, &mut args));
        candidates.extend(atoms);
    }
    let k = candidates.len();
    let states = horizon + 1;
    if k * states > MAX_CANDIDATE_BITS {
        return Err(Error::Oracle(format!("{k} atoms over {states} states exceed the enumeration bound")));
    }
    let atoms: Vec<Term> = candidates.into_iter().collect();
    let vocab: Vocabulary = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let compiled = rules
        .iter()
        .map(|g| {
            let c = |ts: &[Term]| ts.iter().map(|t| compile(t, &vocab)).collect::<Result<Vec<_>>>();
            Ok(CompiledRule { head: c(&g.head)?, choice: g.choice, pos: c(&g.pos)?, neg: c(&g.neg)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let taus: Vec<Option<Vec<i64>>> = match max_time {
        Some(m) => timings(horizon, m).into_iter().map(Some).collect(),
        None => vec![None],
    };
    let state_mask = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let split = |mask: u64| -> Vec<u64> { (0..states).map(|t| (mask >> (t * k)) & state_mask).collect() };
    let model_of = |w: World<'_>| (0..states).all(|t| compiled.iter().all(|r| r.satisfied(w, t)));

    let mut found = BTreeSet::new();
    for tau in &taus {
        for mask in 0..(1u64 << (k * states)) {
            let there = split(mask);
            let total = World { here: &there, there: &there, tau: tau.as_deref() };
            if !model_of(total) {
                continue;
            }
            let mut sub = mask;
            let mut minimal = true;
            while sub != 0 {
                sub = (sub - 1) & mask;
                let here = split(sub);
                if model_of(World { here: &here, there: &there, tau: tau.as_deref() }) {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                let states = there
                    .iter()
                    .map(|bits| atoms.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
                    .collect();
                found.insert(Trace { states, tau: tau.clone() });
            }
        }
    }
    Ok(found.into_iter().collect())
}

fn trace_world(trace: &Trace) -> Result<(Vocabulary, Vec<u64>)> {
    let atoms: BTreeSet<&Term> = trace.states.iter().flatten().collect();
    if atoms.len() > 64 || trace.states.len() > 64 {
        return Err(Error::Oracle("trace too large".into()));
    }
    let vocab: Vocabulary = atoms.into_iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let bits = trace.states.iter().map(|s| s.iter().fold(0u64, |acc, a| acc | 1 << vocab[a])).collect();
    Ok((vocab, bits))
}

/// Whether `formula` holds at state `t` of a total trace.
pub fn eval_formula(trace: &Trace, t: usize, formula: &Term) -> Result<bool> {
    let (vocab, bits) = trace_world(trace)?;
    let f = compile(formula, &vocab)?;
    Ok(holds(&f, World { here: &bits, there: &bits, tau: trace.tau.as_deref() }, t))
}

/// The pairs of states related by a path expression on a total trace.
pub fn eval_path(trace: &Trace, path: &Term) -> Result<BTreeSet<(usize, usize)>> {
    let (vocab, bits) = trace_world(trace)?;
    let p = compile_path(path, &vocab)?;
    let rows = relation(&p, World { here: &bits, there: &bits, tau: trace.tau.as_deref() });
    Ok(rows
        .iter()
        .enumerate()
        .flat_map(|(t, row)| (0..rows.len()).filter(move |j| row >> j & 1 == 1).map(move |j| (t, j)))
        .collect())
}

#[cfg(test)]
mod tests;
