//! The full solving workflow: transform, ground, reify, instantiate the
//! meta-encoding and enumerate stable models as traces.

use crate::ast::{Program, Term};
use crate::error::{Error, Result};
use crate::grammar::{Logic, TheoryGrammar};
use crate::ground::{ground, substitute_constants, GroundProgram};
use crate::meta::{build, MetaOptions, MetaProgram};
use crate::reify::{reify, ReifiedDb};
use crate::solver::{solve_with, SolveOptions};
use crate::trace::Trace;
use crate::transform::transform;

/// Name of the constant that fixes the horizon.
pub const HORIZON_CONSTANT: &str = "n";

#[derive(Debug, Clone)]
pub struct Config {
    pub logic: Logic,
    /// Replaces the built-in grammar of `logic` when non-empty.
    pub grammars: Vec<TheoryGrammar>,
    /// `-c name=value` overrides.
    pub constants: Vec<(String, Term)>,
    pub max_time: Option<i64>,
    /// Number of models to enumerate; 0 for all.
    pub models: usize,
    pub max_steps: u64,
}

impl Config {
    pub fn new(logic: Logic) -> Self {
        Config {
            logic,
            grammars: Vec::new(),
            constants: Vec::new(),
            max_time: None,
            models: 0,
            max_steps: SolveOptions::default().max_steps,
        }
    }

    pub fn with_horizon(mut self, n: usize) -> Self {
        self.constants.retain(|(k, _)| k != HORIZON_CONSTANT);
        self.constants.push((HORIZON_CONSTANT.to_string(), Term::Integer(n as i64)));
        self
    }
}

/// Grammar used for `program`: the configured (or built-in) grammar plus
/// the program's own `#type` declarations.
pub fn grammar_for(program: &Program, cfg: &Config) -> Result<TheoryGrammar> {
    let mut g = if cfg.grammars.is_empty() {
        cfg.logic.grammar()
    } else {
        let mut g = TheoryGrammar::default();
        for extra in &cfg.grammars {
            g.merge(extra.clone())?;
        }
        g
    };
    if let Some(own) = TheoryGrammar::from_program(program)? {
        g.merge(own)?;
    }
    Ok(g)
}

/// Horizon from `-c n=...` or `#const n = ...`; 0 when neither is given.
pub fn horizon(program: &Program, cfg: &Config) -> Result<usize> {
    let value = cfg
        .constants
        .iter()
        .rev()
        .find(|(k, _)| k == HORIZON_CONSTANT)
        .map(|(_, v)| v.clone())
        .or_else(|| program.constants().into_iter().rev().find(|(k, _)| k == HORIZON_CONSTANT).map(|(_, v)| v));
    match value {
        None => Ok(0),
        Some(Term::Integer(n)) if n >= 0 => Ok(n as usize),
        Some(other) => Err(Error::Meta(format!("horizon must be a non-negative integer, got {other}"))),
    }
}

/// Every intermediate result of the workflow.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub grammar: TheoryGrammar,
    pub transformed: Program,
    pub ground: GroundProgram,
    pub db: ReifiedDb,
    pub meta: MetaProgram,
}

pub fn transformed(program: &Program, cfg: &Config) -> Result<Program> {
    let g = grammar_for(program, cfg)?;
    transform(&substitute_constants(program, &cfg.constants), &g)
}

pub fn reified(program: &Program, cfg: &Config) -> Result<ReifiedDb> {
    let g = grammar_for(program, cfg)?;
    let t = transform(&substitute_constants(program, &cfg.constants), &g)?;
    reify(&ground(&t)?, &g)
}

pub fn prepare(program: &Program, cfg: &Config) -> Result<Prepared> {
    let grammar = grammar_for(program, cfg)?;
    let n = horizon(program, cfg)?;
    let transformed = transform(&substitute_constants(program, &cfg.constants), &grammar)?;
    let ground = ground(&transformed)?;
    let db = reify(&ground, &grammar)?;
    let meta = build(&db, cfg.logic, &MetaOptions { horizon: n, max_time: cfg.max_time })?;
    Ok(Prepared { grammar, transformed, ground, db, meta })
}

/// Enumerates models, passing the full trace and the shown trace of each to
/// `on_model` until it returns false. Returns the number of models found.
pub fn solve(
    program: &Program,
    cfg: &Config,
    mut on_model: impl FnMut(&Trace, &Trace) -> bool,
) -> Result<usize> {
    let p = prepare(program, cfg)?;
    let opts = SolveOptions { limit: cfg.models, max_steps: cfg.max_steps };
    solve_with(&p.meta.program, opts, |m| on_model(&p.meta.trace(m), &p.meta.shown(m)))
}

/// All models as full traces.
pub fn models(program: &Program, cfg: &Config) -> Result<Vec<Trace>> {
    let mut out = Vec::new();
    solve(program, cfg, |t, _| {
        out.push(t.clone());
        true
    })?;
    Ok(out)
}
