//! Theory grammars: `#type` declarations, typechecking and macro expansion.
//!
//! A grammar is a set of named types. Each type lists the operators it
//! defines (with per-argument types and safety), its subtypes, where its
//! expressions may stand on their own, and macros that rewrite shorthand
//! forms into defined operators. Five base types are always present:
//! `atom`, `number`, `string`, `infimum` and `supremum`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use log::warn;

use crate::ast::{Literal, Parser, Program, Statement, Term, TokenKind};
use crate::error::{Error, Result};

pub const BASE_TYPES: [&str; 5] = ["atom", "number", "string", "infimum", "supremum"];

const MACRO_DEPTH: usize = 64;

pub const TEL_GRAMMAR: &str = include_str!("../grammars/tel.lp");
pub const MEL_GRAMMAR: &str = include_str!("../grammars/mel.lp");
pub const DEL_GRAMMAR: &str = include_str!("../grammars/del.lp");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Occurrence {
    Any,
    Head,
    Body,
    Directive,
    ArgumentOnly,
}

impl Occurrence {
    fn allows(self, pos: Position) -> bool {
        match self {
            Occurrence::Any => true,
            Occurrence::Head => pos == Position::Head,
            Occurrence::Body => pos == Position::Body,
            Occurrence::Directive => pos == Position::Directive,
            Occurrence::ArgumentOnly => false,
        }
    }
}

/// Where a theory expression stands in a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    Head,
    Body,
    Directive,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Position::Head => "head",
            Position::Body => "body",
            Position::Directive => "directive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Safety {
    Safe,
    Unsafe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpressionSpec {
    pub op: String,
    pub arg_types: Vec<String>,
    pub arg_safety: Vec<Safety>,
}

impl ExpressionSpec {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSpec {
    pub name: String,
    pub subtypes: Vec<String>,
    pub expressions: Vec<ExpressionSpec>,
    pub occurrence: Occurrence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroSpec {
    /// Type the macro belongs to; expansions are checked against it.
    pub owner: String,
    pub pattern: Term,
    pub expansion: Term,
    pub placeholders: BTreeMap<String, String>,
}

/// A typed theory expression. Plain atoms and numbers are leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typed {
    /// The term after macro expansion.
    pub term: Term,
    /// Type that defines the node (or the base type for leaves).
    pub ty: String,
    /// Every type the node belongs to in its context.
    pub memberships: BTreeSet<String>,
    pub args: Vec<Typed>,
    /// Declared safety of each argument position.
    pub safety: Vec<Safety>,
}

impl Typed {
    /// Visits every node, outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Typed)) {
        f(self);
        for a in &self.args {
            a.walk(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: crate::ast::Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TheoryGrammar {
    types: BTreeMap<String, TypeSpec>,
    /// User types in declaration order.
    order: Vec<String>,
    macros: Vec<MacroSpec>,
}

/// Named built-in logics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    Tel,
    Mel,
    Del,
}

impl Logic {
    pub fn grammar(self) -> TheoryGrammar {
        let texts: &[&str] = match self {
            Logic::Tel => &[TEL_GRAMMAR],
            Logic::Mel => &[MEL_GRAMMAR],
            Logic::Del => &[TEL_GRAMMAR, DEL_GRAMMAR],
        };
        TheoryGrammar::load_all(texts).expect("built-in grammar is valid")
    }
}

impl std::str::FromStr for Logic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tel" => Ok(Logic::Tel),
            "mel" => Ok(Logic::Mel),
            "del" => Ok(Logic::Del),
            other => Err(Error::Grammar(format!("unknown semantics '{other}'"))),
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Tel => "tel",
            Logic::Mel => "mel",
            Logic::Del => "del",
        })
    }
}

/// Parses one or more `#type` blocks into a validated grammar.
pub fn load_grammar(text: &str) -> Result<TheoryGrammar> {
    TheoryGrammar::load_all(&[text])
}

impl TheoryGrammar {
    /// Loads several grammar texts as one grammar. A type declared in two
    /// texts is an error.
    pub fn load_all(texts: &[&str]) -> Result<Self> {
        let mut g = TheoryGrammar::default();
        for text in texts {
            let mut p = Parser::new(text)?;
            while *p.peek() != TokenKind::Eof {
                let (spec, macros) = parse_type_block(&mut p)?;
                g.add_type(spec, macros)?;
            }
        }
        g.validate()?;
        Ok(g)
    }

    /// Grammar made of the `#type` blocks embedded in a program, if any.
    pub fn from_program(program: &Program) -> Result<Option<Self>> {
        let text = program.type_declarations();
        if text.is_empty() {
            Ok(None)
        } else {
            load_grammar(&text).map(Some)
        }
    }

    /// Adds the types of `other`; duplicate type names are rejected.
    pub fn merge(&mut self, other: TheoryGrammar) -> Result<()> {
        for name in other.order {
            let spec = other.types[&name].clone();
            let macros = other.macros.iter().filter(|m| m.owner == name).cloned().collect();
            self.add_type(spec, macros)?;
        }
        self.validate()
    }

    fn add_type(&mut self, spec: TypeSpec, macros: Vec<MacroSpec>) -> Result<()> {
        if BASE_TYPES.contains(&spec.name.as_str()) || self.types.contains_key(&spec.name) {
            return Err(Error::Grammar(format!("type '{}' declared twice", spec.name)));
        }
        for m in macros {
            if let Some(old) = self.macros.iter_mut().find(|o| o.pattern == m.pattern) {
                warn!("macro {} redefined", m.pattern);
                *old = m;
            } else {
                self.macros.push(m);
            }
        }
        self.order.push(spec.name.clone());
        self.types.insert(spec.name.clone(), spec);
        Ok(())
    }

    fn is_type(&self, name: &str) -> bool {
        BASE_TYPES.contains(&name) || self.types.contains_key(name)
    }

    fn validate(&self) -> Result<()> {
        for spec in self.types.values() {
            for s in &spec.subtypes {
                if !self.is_type(s) {
                    return Err(Error::Grammar(format!(
                        "type '{}' lists unknown subtype '{s}'",
                        spec.name
                    )));
                }
            }
            let mut seen = BTreeSet::new();
            for e in &spec.expressions {
                if !seen.insert((e.op.as_str(), e.arity())) {
                    return Err(Error::Grammar(format!(
                        "type '{}' declares &{}/{} twice",
                        spec.name,
                        e.op,
                        e.arity()
                    )));
                }
                for t in &e.arg_types {
                    if !self.is_type(t) {
                        return Err(Error::Grammar(format!(
                            "argument type '{t}' of &{} is not declared",
                            e.op
                        )));
                    }
                }
            }
        }
        for name in &self.order {
            let mut stack = Vec::new();
            self.check_acyclic(name, &mut stack)?;
        }
        for m in &self.macros {
            for ty in m.placeholders.values() {
                if !self.is_type(ty) {
                    return Err(Error::Grammar(format!(
                        "placeholder type '{ty}' in macro {} is not declared",
                        m.pattern
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_acyclic<'a>(&'a self, name: &'a str, stack: &mut Vec<&'a str>) -> Result<()> {
        if stack.contains(&name) {
            stack.push(name);
            return Err(Error::Grammar(format!("cyclic subtypes: {}", stack.join(" -> "))));
        }
        if let Some(spec) = self.types.get(name) {
            stack.push(name);
            for s in &spec.subtypes {
                self.check_acyclic(s, stack)?;
            }
            stack.pop();
        }
        Ok(())
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeSpec> {
        self.order.iter().map(|n| &self.types[n])
    }

    pub fn get(&self, name: &str) -> Option<&TypeSpec> {
        self.types.get(name)
    }

    pub fn macros(&self) -> &[MacroSpec] {
        &self.macros
    }

    /// True if `sub` is `sup` or reachable from it along subtype edges.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        self.reachable(sup).iter().any(|(t, _)| t == sub)
    }

    /// Types reachable from `ty` in breadth-first order, each with the chain
    /// of types leading to it (inclusive).
    fn reachable(&self, ty: &str) -> Vec<(String, Vec<String>)> {
        let mut out: Vec<(String, Vec<String>)> = Vec::new();
        let mut queue = VecDeque::from([(ty.to_string(), vec![ty.to_string()])]);
        while let Some((t, path)) = queue.pop_front() {
            if out.iter().any(|(o, _)| *o == t) {
                continue;
            }
            if let Some(spec) = self.types.get(&t) {
                for s in &spec.subtypes {
                    let mut p = path.clone();
                    p.push(s.clone());
                    queue.push_back((s.clone(), p));
                }
            }
            out.push((t, path));
        }
        out
    }

    /// Checks `term` against the expected type, expanding macros where the
    /// term does not type directly.
    pub fn typecheck(&self, term: &Term, expected: &str) -> Result<Typed> {
        self.check(term, expected, 0)
    }

    fn check(&self, term: &Term, expected: &str, depth: usize) -> Result<Typed> {
        if depth > MACRO_DEPTH {
            return Err(Error::Type(format!("macro expansion of {term} exceeds depth {MACRO_DEPTH}")));
        }
        let reach = self.reachable(expected);
        let mut first_err = None;
        if let Term::Theory(op, args) = term {
            for (ty, path) in &reach {
                let Some(spec) = self.types.get(ty) else { continue };
                let Some(e) = spec.expressions.iter().find(|e| e.op == *op && e.arity() == args.len())
                else {
                    continue;
                };
                match self.check_args(args, e, depth) {
                    Ok(typed_args) => {
                        return Ok(Typed {
                            term: Term::Theory(
                                op.clone(),
                                typed_args.iter().map(|a| a.term.clone()).collect(),
                            ),
                            ty: ty.clone(),
                            memberships: path.iter().cloned().collect(),
                            args: typed_args,
                            safety: e.arg_safety.clone(),
                        })
                    }
                    Err(err) => {
                        first_err.get_or_insert(err);
                    }
                }
            }
        } else if let Some(base) = leaf_kind(term) {
            let hit = reach.iter().find(|(t, _)| match base {
                Leaf::Any => BASE_TYPES.contains(&t.as_str()),
                Leaf::Base(b) => t == b,
            });
            if let Some((ty, path)) = hit {
                return Ok(Typed {
                    term: term.clone(),
                    ty: ty.clone(),
                    memberships: path.iter().cloned().collect(),
                    args: Vec::new(),
                    safety: Vec::new(),
                });
            }
        }
        for (ty, path) in &reach {
            for m in self.macros.iter().filter(|m| m.owner == *ty) {
                let mut binding = BTreeMap::new();
                if !self.match_pattern(&m.pattern, term, m, &mut binding) {
                    continue;
                }
                let expanded = instantiate(&m.expansion, &binding);
                match self.check(&expanded, ty, depth + 1) {
                    Ok(mut typed) => {
                        typed.memberships.extend(path.iter().cloned());
                        return Ok(typed);
                    }
                    Err(err) => {
                        first_err.get_or_insert(err);
                    }
                }
            }
        }
        Err(first_err.unwrap_or_else(|| Error::Type(format!("{term} is not of type '{expected}'"))))
    }

    fn check_args(&self, args: &[Term], e: &ExpressionSpec, depth: usize) -> Result<Vec<Typed>> {
        args.iter().zip(&e.arg_types).map(|(a, t)| self.check(a, t, depth)).collect()
    }

    fn match_pattern(
        &self,
        pattern: &Term,
        term: &Term,
        m: &MacroSpec,
        binding: &mut BTreeMap<String, Term>,
    ) -> bool {
        if let Term::Symbol(s) = pattern {
            if let Some(ty) = m.placeholders.get(s) {
                let fits = match ty.as_str() {
                    "atom" => matches!(term, Term::Symbol(_) | Term::Function(..)),
                    "number" => matches!(term, Term::Integer(_) | Term::Variable(_)),
                    "string" => matches!(term, Term::Str(_)),
                    "supremum" => *term == Term::Supremum,
                    "infimum" => *term == Term::Infimum,
                    _ => true,
                };
                if !fits {
                    return false;
                }
                return match binding.get(s) {
                    Some(b) => b == term,
                    None => {
                        binding.insert(s.clone(), term.clone());
                        true
                    }
                };
            }
        }
        match (pattern, term) {
            (Term::Theory(p, pa), Term::Theory(t, ta)) | (Term::Function(p, pa), Term::Function(t, ta)) => {
                p == t
                    && pa.len() == ta.len()
                    && pa.iter().zip(ta).all(|(x, y)| self.match_pattern(x, y, m, binding))
            }
            _ => pattern == term,
        }
    }

    /// Types a theory expression standing as a whole atom: the first type in
    /// declaration order that defines its operator and accepts it.
    pub fn typecheck_standalone(&self, term: &Term) -> Result<Typed> {
        self.standalone(term).map(|(_, t)| t)
    }

    /// The type whose occurrence rules govern a standalone expression.
    pub fn standalone_type(&self, term: &Term) -> Option<String> {
        self.standalone(term).ok().map(|(name, _)| name)
    }

    fn standalone(&self, term: &Term) -> Result<(String, Typed)> {
        let Term::Theory(op, args) = term else {
            return Err(Error::Type(format!("{term} is not a theory expression")));
        };
        let mut first_err = None;
        for name in &self.order {
            let spec = &self.types[name];
            let defines = spec.expressions.iter().any(|e| e.op == *op && e.arity() == args.len())
                || self.macros.iter().any(|m| {
                    m.owner == *name
                        && matches!(&m.pattern, Term::Theory(p, pa) if p == op && pa.len() == args.len())
                });
            if !defines {
                continue;
            }
            match self.typecheck(term, name) {
                Ok(t) => return Ok((name.clone(), t)),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.unwrap_or_else(|| {
            Error::Type(format!("no grammar type defines &{op}/{}", args.len()))
        }))
    }

    /// Expands every macro in a standalone expression.
    pub fn expand_macros(&self, term: &Term) -> Result<Term> {
        Ok(self.typecheck_standalone(term)?.term)
    }

    /// Reports theory expressions that stand where their type forbids.
    pub fn check_occurrence(&self, program: &Program) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for st in &program.statements {
            for (term, pos) in standalone_terms(st) {
                let Some(ty) = self.standalone_type(term) else { continue };
                let occ = self.types[&ty].occurrence;
                if occ == Occurrence::ArgumentOnly {
                    out.push(Diagnostic {
                        span: st.span(),
                        message: format!("{term} of type '{ty}' may only appear as an argument ({pos} position)"),
                    });
                } else if !occ.allows(pos) {
                    out.push(Diagnostic {
                        span: st.span(),
                        message: format!("{term} of type '{ty}' is not allowed in {pos} position"),
                    });
                }
            }
        }
        out
    }
}

/// Theory expressions standing as whole atoms in a statement, with their
/// position.
pub fn standalone_terms(st: &Statement) -> Vec<(&Term, Position)> {
    fn lits<'a>(ls: &'a [Literal], pos: Position, out: &mut Vec<(&'a Term, Position)>) {
        for l in ls {
            match l {
                Literal::Atom { atom, .. } => out.push((atom, pos)),
                Literal::Conditional { atom, condition, .. } => {
                    out.push((atom, pos));
                    lits(condition, pos, out);
                }
                Literal::Comparison { .. } => {}
            }
        }
    }
    let mut out = Vec::new();
    match st {
        Statement::Rule(r) => {
            for e in r.head.elements() {
                out.push((&e.atom, Position::Head));
                lits(&e.condition, Position::Body, &mut out);
            }
            lits(&r.body, Position::Body, &mut out);
        }
        Statement::External { atom, condition, .. } => {
            out.push((atom, Position::Directive));
            lits(condition, Position::Body, &mut out);
        }
        Statement::Show { show: crate::ast::Show::Term { term, condition }, .. } => {
            out.push((term, Position::Directive));
            lits(condition, Position::Body, &mut out);
        }
        _ => {}
    }
    out.retain(|(t, _)| t.is_theory());
    out
}

enum Leaf {
    Any,
    Base(&'static str),
}

fn leaf_kind(t: &Term) -> Option<Leaf> {
    match t {
        Term::Symbol(_) | Term::Function(..) => Some(Leaf::Base("atom")),
        Term::Integer(_) | Term::BinOp(..) | Term::Minus(_) => Some(Leaf::Base("number")),
        Term::Str(_) => Some(Leaf::Base("string")),
        Term::Supremum => Some(Leaf::Base("supremum")),
        Term::Infimum => Some(Leaf::Base("infimum")),
        Term::Variable(_) => Some(Leaf::Any),
        Term::Theory(..) | Term::Range(..) => None,
    }
}

fn instantiate(t: &Term, binding: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Symbol(s) => binding.get(s).cloned().unwrap_or_else(|| t.clone()),
        Term::Function(n, args) => {
            Term::Function(n.clone(), args.iter().map(|a| instantiate(a, binding)).collect())
        }
        Term::Theory(n, args) => {
            Term::Theory(n.clone(), args.iter().map(|a| instantiate(a, binding)).collect())
        }
        _ => t.clone(),
    }
}

fn grammar_error(p: &Parser<'_>, msg: impl Into<String>) -> Error {
    let s = p.span();
    Error::Grammar(format!("{s}: {}", msg.into()))
}

fn expect(p: &mut Parser<'_>, kind: TokenKind, what: &str) -> Result<()> {
    if p.eat(&kind) {
        Ok(())
    } else {
        Err(grammar_error(p, format!("expected {what}")))
    }
}

fn parse_type_block(p: &mut Parser<'_>) -> Result<(TypeSpec, Vec<MacroSpec>)> {
    match p.advance() {
        TokenKind::Directive(d) if d == "type" => {}
        _ => return Err(grammar_error(p, "expected '#type'")),
    }
    let name = p.ident().map_err(|_| grammar_error(p, "expected type name"))?;
    expect(p, TokenKind::LBrace, "'{'")?;
    let mut spec = TypeSpec {
        name: name.clone(),
        subtypes: Vec::new(),
        expressions: Vec::new(),
        occurrence: Occurrence::ArgumentOnly,
    };
    let mut macros = Vec::new();
    while *p.peek() != TokenKind::RBrace {
        let field = p.ident().map_err(|_| grammar_error(p, "expected field name"))?;
        expect(p, TokenKind::Colon, "':'")?;
        match field.as_str() {
            "subtypes" => {
                expect(p, TokenKind::LBracket, "'['")?;
                while !p.eat(&TokenKind::RBracket) {
                    spec.subtypes.push(p.ident().map_err(|_| grammar_error(p, "expected type name"))?);
                    if !p.eat(&TokenKind::Comma) {
                        expect(p, TokenKind::RBracket, "']'")?;
                        break;
                    }
                }
            }
            "occurrence" => {
                let o = p.ident().map_err(|_| grammar_error(p, "expected occurrence"))?;
                spec.occurrence = match o.as_str() {
                    "any" => Occurrence::Any,
                    "head" => Occurrence::Head,
                    "body" => Occurrence::Body,
                    "directive" => Occurrence::Directive,
                    "argument" | "argument_only" => Occurrence::ArgumentOnly,
                    other => return Err(grammar_error(p, format!("unknown occurrence '{other}'"))),
                };
            }
            "expressions" => {
                expect(p, TokenKind::LBracket, "'['")?;
                while !p.eat(&TokenKind::RBracket) {
                    spec.expressions.push(parse_expression_spec(p)?);
                    if !p.eat(&TokenKind::Comma) {
                        expect(p, TokenKind::RBracket, "']'")?;
                        break;
                    }
                }
            }
            "macros" => {
                expect(p, TokenKind::LBracket, "'['")?;
                while !p.eat(&TokenKind::RBracket) {
                    macros.push(parse_macro(p, &name)?);
                    if !p.eat(&TokenKind::Semi) {
                        expect(p, TokenKind::RBracket, "']'")?;
                        break;
                    }
                }
            }
            other => return Err(grammar_error(p, format!("unknown field '{other}'"))),
        }
        if !p.eat(&TokenKind::Comma) {
            break;
        }
    }
    expect(p, TokenKind::RBrace, "'}'")?;
    expect(p, TokenKind::Dot, "'.'")?;
    Ok((spec, macros))
}

fn parse_expression_spec(p: &mut Parser<'_>) -> Result<ExpressionSpec> {
    expect(p, TokenKind::Amp, "'&'")?;
    let op = p.ident().map_err(|_| grammar_error(p, "expected operator name"))?;
    let mut spec = ExpressionSpec { op, arg_types: Vec::new(), arg_safety: Vec::new() };
    if p.eat(&TokenKind::LParen) {
        loop {
            spec.arg_types.push(p.ident().map_err(|_| grammar_error(p, "expected argument type"))?);
            let safety = if p.eat(&TokenKind::Colon) {
                match p.ident().map_err(|_| grammar_error(p, "expected safety"))?.as_str() {
                    "safe" => Safety::Safe,
                    "unsafe" => Safety::Unsafe,
                    other => return Err(grammar_error(p, format!("unknown safety '{other}'"))),
                }
            } else {
                Safety::Unsafe
            };
            spec.arg_safety.push(safety);
            if p.eat(&TokenKind::Comma) {
                continue;
            }
            expect(p, TokenKind::RParen, "')'")?;
            break;
        }
    }
    Ok(spec)
}

fn parse_macro(p: &mut Parser<'_>, owner: &str) -> Result<MacroSpec> {
    let pattern = p.term()?;
    expect(p, TokenKind::Arrow, "'=>'")?;
    let expansion = p.term()?;
    let mut placeholders = BTreeMap::new();
    if matches!(p.peek(), TokenKind::Ident(w) if w == "where") {
        p.advance();
        loop {
            let ph = p.ident().map_err(|_| grammar_error(p, "expected placeholder"))?;
            expect(p, TokenKind::Colon, "':'")?;
            let ty = p.ident().map_err(|_| grammar_error(p, "expected placeholder type"))?;
            placeholders.insert(ph, ty);
            if !p.eat(&TokenKind::Comma) {
                break;
            }
        }
    }
    let mut in_pattern = BTreeSet::new();
    pattern.walk(&mut |t| {
        if let Term::Symbol(s) = t {
            in_pattern.insert(s.clone());
        }
    });
    for ph in placeholders.keys() {
        if !in_pattern.contains(ph) {
            return Err(Error::Grammar(format!("placeholder '{ph}' does not occur in pattern {pattern}")));
        }
    }
    let mut undeclared = None;
    if let Term::Theory(_, args) = &pattern {
        for a in args {
            if let Term::Symbol(s) = a {
                let mut used = false;
                expansion.walk(&mut |t| used |= *t == Term::Symbol(s.clone()));
                if used && !placeholders.contains_key(s) {
                    undeclared.get_or_insert(s.clone());
                }
            }
        }
    }
    if let Some(s) = undeclared {
        return Err(Error::Grammar(format!(
            "placeholder '{s}' of macro {pattern} is not declared in a 'where' clause"
        )));
    }
    Ok(MacroSpec { owner: owner.to_string(), pattern, expansion, placeholders })
}
