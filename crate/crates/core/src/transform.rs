//! Non-ground rewriting ahead of grounding.
//!
//! Theory expressions are invisible to a standard grounder: an expression in
//! a body would be judged underivable and its rule dropped, and atoms nested
//! in head expressions would never enter the symbol table. This pass adds
//! `#external` directives that keep both alive, checks rule safety on the
//! way, and turns `#show` directives into ordinary rules over reserved
//! predicates.

use std::collections::BTreeSet;

use crate::ast::{Head, HeadElement, Literal, Program, Rule, Show, Sign, Statement, Term};
use crate::error::{Error, Result};
use crate::grammar::{Safety, TheoryGrammar, Typed};

pub const SHOW_SIG: &str = "__show_sig";
pub const SHOW_TERM: &str = "__show_term";
pub const SHOW_NONE: &str = "__show_none";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyReport {
    /// Atom occurrences that bind variables: positive plain atoms and atoms
    /// reached through safe argument positions of positive expressions.
    pub safe_atoms: Vec<Term>,
    pub bound: BTreeSet<String>,
    /// Global variables left unbound; empty for safe rules.
    pub unsafe_vars: BTreeSet<String>,
}

impl SafetyReport {
    pub fn is_safe(&self) -> bool {
        self.unsafe_vars.is_empty()
    }
}

/// Variables a term binds when it occurs in a safe atom; arithmetic does not
/// bind.
fn binding_vars(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Variable(v) if v != "_" => {
            out.insert(v.clone());
        }
        Term::Function(_, args) | Term::Theory(_, args) => args.iter().for_each(|a| binding_vars(a, out)),
        _ => {}
    }
}

fn typed_expr(term: &Term, g: &TheoryGrammar) -> Result<Typed> {
    g.typecheck_standalone(term)
}

/// Safe atom occurrences of a positive literal's atom.
fn safe_occurrences(atom: &Term, g: &TheoryGrammar, out: &mut Vec<Term>) -> Result<()> {
    if atom.is_theory() {
        fn collect(t: &Typed, out: &mut Vec<Term>) {
            if t.term.is_plain_atom() {
                out.push(t.term.clone());
                return;
            }
            for (a, s) in t.args.iter().zip(&t.safety) {
                if *s == Safety::Safe {
                    collect(a, out);
                }
            }
        }
        collect(&typed_expr(atom, g)?, out);
    } else if atom.is_plain_atom() {
        out.push(atom.clone());
    }
    Ok(())
}

/// Closes `bound` under `X = t` comparisons whose right side is bound.
fn bind_comparisons(lits: &[Literal], bound: &mut BTreeSet<String>) {
    loop {
        let mut changed = false;
        for l in lits {
            if let Literal::Comparison { lhs, op: crate::ast::CmpOp::Eq, rhs } = l {
                for (a, b) in [(lhs, rhs), (rhs, lhs)] {
                    if let Term::Variable(v) = a {
                        if !bound.contains(v) && b.vars().is_subset(bound) {
                            bound.insert(v.clone());
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn bound_by(lits: &[Literal], g: &TheoryGrammar, outer: &BTreeSet<String>) -> Result<(Vec<Term>, BTreeSet<String>)> {
    let mut safe = Vec::new();
    for l in lits {
        if let Literal::Atom { sign: Sign::Positive, atom } = l {
            safe_occurrences(atom, g, &mut safe)?;
        }
    }
    let mut bound = outer.clone();
    for a in &safe {
        binding_vars(a, &mut bound);
    }
    bind_comparisons(lits, &mut bound);
    Ok((safe, bound))
}

/// Classifies the body atom occurrences of a rule and checks that every
/// variable is bound by a safe one.
pub fn classify_safety(rule: &Rule, g: &TheoryGrammar) -> Result<SafetyReport> {
    let (safe_atoms, bound) = bound_by(&rule.body, g, &BTreeSet::new())?;
    let mut unsafe_vars: BTreeSet<String> = rule.global_vars().difference(&bound).cloned().collect();
    let mut local = |atom: &Term, condition: &[Literal]| -> Result<()> {
        let (_, inner) = bound_by(condition, g, &bound)?;
        let mut vars = atom.vars();
        condition.iter().for_each(|c| c.collect_vars(&mut vars));
        unsafe_vars.extend(vars.difference(&inner).cloned());
        Ok(())
    };
    for l in &rule.body {
        if let Literal::Conditional { atom, condition, .. } = l {
            local(atom, condition)?;
        }
    }
    for e in rule.head.elements() {
        if !e.condition.is_empty() {
            local(&e.atom, &e.condition)?;
        }
    }
    Ok(SafetyReport { safe_atoms, bound, unsafe_vars })
}

/// Plain atoms inside an expression that are not under `&not`.
fn head_atoms(t: &Typed, out: &mut Vec<Term>) {
    match &t.term {
        Term::Symbol(_) | Term::Function(..) => out.push(t.term.clone()),
        Term::Theory(op, _) if op == "not" => {}
        _ => t.args.iter().for_each(|a| head_atoms(a, out)),
    }
}

fn dedup_terms(ts: Vec<Term>) -> Vec<Literal> {
    let mut seen = BTreeSet::new();
    ts.into_iter().filter(|t| seen.insert(t.clone())).map(Literal::pos).collect()
}

fn positive_atoms(lits: &[Literal]) -> Vec<Term> {
    lits.iter()
        .filter_map(|l| match l {
            Literal::Atom { sign: Sign::Positive, atom } if atom.is_plain_atom() => Some(atom.clone()),
            _ => None,
        })
        .collect()
}

/// External directives required by one rule.
fn rule_externals(rule: &Rule, g: &TheoryGrammar) -> Result<Vec<(Term, Vec<Literal>)>> {
    let report = classify_safety(rule, g)?;
    if !report.is_safe() {
        return Err(Error::Unsafe { span: rule.span, vars: report.unsafe_vars.into_iter().collect() });
    }
    let mut out = Vec::new();
    for l in &rule.body {
        match l {
            Literal::Atom { atom, .. } if atom.is_theory() => {
                out.push((atom.clone(), dedup_terms(report.safe_atoms.clone())));
            }
            Literal::Conditional { atom, condition, .. } if atom.is_theory() => {
                let mut c = report.safe_atoms.clone();
                c.extend(positive_atoms(condition));
                out.push((atom.clone(), dedup_terms(c)));
            }
            _ => {}
        }
    }
    for e in rule.head.elements() {
        if !e.atom.is_theory() {
            continue;
        }
        let mut atoms = Vec::new();
        head_atoms(&typed_expr(&e.atom, g)?, &mut atoms);
        let mut c = report.safe_atoms.clone();
        c.extend(positive_atoms(&e.condition));
        let cond = dedup_terms(c);
        for a in atoms {
            out.push((a, cond.clone()));
        }
    }
    Ok(out)
}

/// Adds the externals needed to protect theory expressions from grounding
/// simplifications. Existing externals are never duplicated, so applying the
/// pass twice is the same as applying it once.
pub fn inject_externals(program: &Program, g: &TheoryGrammar) -> Result<Program> {
    let mut seen: BTreeSet<(Term, Vec<Literal>)> = program
        .statements
        .iter()
        .filter_map(|s| match s {
            Statement::External { atom, condition, .. } => Some((atom.clone(), condition.clone())),
            _ => None,
        })
        .collect();
    let mut out = program.clone();
    for rule in program.rules() {
        for (atom, condition) in rule_externals(rule, g)? {
            if seen.insert((atom.clone(), condition.clone())) {
                out.statements.push(Statement::External { atom, condition, span: rule.span });
            }
        }
    }
    Ok(out)
}

/// Replaces `#show` directives by rules over reserved predicates, from which
/// reification derives `show_atom/2` and `show_term/2`.
pub fn rewrite_shows(program: &Program) -> Result<Program> {
    let mut statements = Vec::with_capacity(program.statements.len());
    for st in &program.statements {
        let Statement::Show { show, span } = st else {
            statements.push(st.clone());
            continue;
        };
        let rule = match show {
            Show::Nothing => Rule::fact(Term::sym(SHOW_NONE)),
            Show::Signature { name, arity } => Rule::fact(Term::func(
                SHOW_SIG,
                vec![Term::Symbol(name.clone()), Term::Integer(*arity as i64)],
            )),
            Show::Term { term, condition } => {
                let mut bound = BTreeSet::new();
                positive_atoms(condition).iter().for_each(|a| binding_vars(a, &mut bound));
                bind_comparisons(condition, &mut bound);
                let free: Vec<String> = term.vars().difference(&bound).cloned().collect();
                if !free.is_empty() {
                    return Err(Error::Unsafe { span: *span, vars: free });
                }
                Rule::new(
                    Head::Disjunction(vec![HeadElement::new(Term::func(SHOW_TERM, vec![term.clone()]))]),
                    condition.clone(),
                )
            }
        };
        statements.push(Statement::Rule(Rule { span: *span, ..rule }));
    }
    Ok(Program { statements })
}

const RESERVED_PREFIX: &str = "__";

fn reserved_name(t: &Term) -> Option<String> {
    let mut found = None;
    t.walk(&mut |s| match s {
        Term::Symbol(n) | Term::Function(n, _) if found.is_none() && n.starts_with(RESERVED_PREFIX) => {
            found = Some(n.clone())
        }
        _ => {}
    });
    found
}

fn literal_terms<'a>(lits: &'a [Literal], out: &mut Vec<&'a Term>) {
    for l in lits {
        match l {
            Literal::Atom { atom, .. } => out.push(atom),
            Literal::Comparison { lhs, rhs, .. } => out.extend([lhs, rhs]),
            Literal::Conditional { atom, condition, .. } => {
                out.push(atom);
                literal_terms(condition, out);
            }
        }
    }
}

fn check_reserved(program: &Program) -> Result<()> {
    for st in &program.statements {
        let mut terms = Vec::new();
        match st {
            Statement::Rule(r) => {
                for e in r.head.elements() {
                    terms.push(&e.atom);
                    literal_terms(&e.condition, &mut terms);
                }
                literal_terms(&r.body, &mut terms);
            }
            Statement::External { atom, condition, .. } => {
                terms.push(atom);
                literal_terms(condition, &mut terms);
            }
            Statement::Show { show: Show::Term { term, condition }, .. } => {
                terms.push(term);
                literal_terms(condition, &mut terms);
            }
            Statement::Const { value, .. } => terms.push(value),
            _ => {}
        }
        if let Some(name) = terms.into_iter().find_map(reserved_name) {
            return Err(Error::Type(format!("{}: names starting with `{RESERVED_PREFIX}` are reserved: {name}", st.span())));
        }
    }
    Ok(())
}

/// Full transformation: occurrence and type checks, show rewriting and
/// external injection.
pub fn transform(program: &Program, g: &TheoryGrammar) -> Result<Program> {
    check_reserved(program)?;
    if let Some(d) = g.check_occurrence(program).into_iter().next() {
        return Err(Error::Type(d.to_string()));
    }
    for st in &program.statements {
        for (term, _) in crate::grammar::standalone_terms(st) {
            g.typecheck_standalone(term).map_err(|e| match e {
                Error::Type(m) => Error::Type(format!("{}: {m}", st.span())),
                other => other,
            })?;
        }
    }
    inject_externals(&rewrite_shows(program)?, g)
}
