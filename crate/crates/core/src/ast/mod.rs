//! Abstract syntax of temporal logic programs.
//!
//! Theory expressions (`&op(...)`) are ordinary [`Term`]s so that grounding,
//! matching and printing treat atoms and nested formulas uniformly. Whether a
//! term denotes an atom, a number or a formula is decided later by the
//! grammar.

mod lexer;
mod parser;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

pub use lexer::{Lexer, Token, TokenKind};
pub use parser::{parse_program, parse_term, Parser};

/// Position of a token in the source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "\\",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Symbol(String),
    Integer(i64),
    Str(String),
    Variable(String),
    Function(String, Vec<Term>),
    Supremum,
    Infimum,
    /// `&op` or `&op(args)`.
    Theory(String, Vec<Term>),
    BinOp(BinOp, Box<Term>, Box<Term>),
    Minus(Box<Term>),
    /// `lo..hi`, only meaningful in heads of facts.
    Range(Box<Term>, Box<Term>),
}

impl Term {
    pub fn sym(name: &str) -> Term {
        Term::Symbol(name.to_string())
    }

    pub fn func(name: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Symbol(name.to_string())
        } else {
            Term::Function(name.to_string(), args)
        }
    }

    pub fn theory(op: &str, args: Vec<Term>) -> Term {
        Term::Theory(op.to_string(), args)
    }

    pub fn var(name: &str) -> Term {
        Term::Variable(name.to_string())
    }

    /// True for symbolic atoms (`p`, `p(a)`), the terms the grammar calls `atom`.
    pub fn is_plain_atom(&self) -> bool {
        matches!(self, Term::Symbol(_) | Term::Function(..))
    }

    pub fn is_theory(&self) -> bool {
        matches!(self, Term::Theory(..))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Function(_, args) | Term::Theory(_, args) => args.iter().all(Term::is_ground),
            Term::BinOp(_, l, r) | Term::Range(l, r) => l.is_ground() && r.is_ground(),
            Term::Minus(t) => t.is_ground(),
            _ => true,
        }
    }

    /// Predicate signature: name and arity; theory expressions are prefixed with `&`.
    pub fn signature(&self) -> Option<(String, usize)> {
        match self {
            Term::Symbol(n) => Some((n.clone(), 0)),
            Term::Function(n, args) => Some((n.clone(), args.len())),
            Term::Theory(op, args) => Some((format!("&{op}"), args.len())),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Variable(v) if v != "_" => {
                out.insert(v.clone());
            }
            Term::Function(_, args) | Term::Theory(_, args) => {
                args.iter().for_each(|a| a.collect_vars(out))
            }
            Term::BinOp(_, l, r) | Term::Range(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Minus(t) => t.collect_vars(out),
            _ => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Nesting depth of function and theory symbols.
    pub fn depth(&self) -> usize {
        match self {
            Term::Function(_, args) | Term::Theory(_, args) => {
                1 + args.iter().map(Term::depth).max().unwrap_or(0)
            }
            Term::BinOp(_, l, r) | Term::Range(l, r) => l.depth().max(r.depth()),
            Term::Minus(t) => t.depth(),
            _ => 0,
        }
    }

    /// Replaces free symbols named in `consts` by their values.
    pub fn substitute_consts(&self, consts: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Symbol(s) => consts(s).unwrap_or_else(|| self.clone()),
            Term::Function(n, args) => Term::Function(
                n.clone(),
                args.iter().map(|a| a.substitute_consts(consts)).collect(),
            ),
            Term::Theory(n, args) => Term::Theory(
                n.clone(),
                args.iter().map(|a| a.substitute_consts(consts)).collect(),
            ),
            Term::BinOp(op, l, r) => Term::BinOp(
                *op,
                Box::new(l.substitute_consts(consts)),
                Box::new(r.substitute_consts(consts)),
            ),
            Term::Range(l, r) => Term::Range(
                Box::new(l.substitute_consts(consts)),
                Box::new(r.substitute_consts(consts)),
            ),
            Term::Minus(t) => Term::Minus(Box::new(t.substitute_consts(consts))),
            _ => self.clone(),
        }
    }

    /// Visits this term and every nested subterm, outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Function(_, args) | Term::Theory(_, args) => args.iter().for_each(|a| a.walk(f)),
            Term::BinOp(_, l, r) | Term::Range(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Term::Minus(t) => t.walk(f),
            _ => {}
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Infimum => 0,
            Term::Integer(_) => 1,
            Term::Symbol(_) | Term::Function(..) => 2,
            Term::Str(_) => 3,
            Term::Supremum => 5,
            _ => 4,
        }
    }
}

/// Total order on ground terms used by comparisons: `#inf` < integers <
/// symbols/functions < strings < `#sup`.
pub fn compare_terms(a: &Term, b: &Term) -> Ordering {
    match (a, b) {
        (Term::Integer(x), Term::Integer(y)) => x.cmp(y),
        (Term::Str(x), Term::Str(y)) => x.cmp(y),
        (Term::Symbol(x), Term::Symbol(y)) => x.cmp(y),
        (Term::Symbol(_), Term::Function(..)) => Ordering::Less,
        (Term::Function(..), Term::Symbol(_)) => Ordering::Greater,
        (Term::Function(f, xs), Term::Function(g, ys)) => xs
            .len()
            .cmp(&ys.len())
            .then_with(|| f.cmp(g))
            .then_with(|| {
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| compare_terms(x, y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            }),
        _ => a.rank().cmp(&b.rank()).then_with(|| a.cmp(b)),
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term, parent: u8, right: bool) -> fmt::Result {
    match t {
        Term::BinOp(op, ..) if op.precedence() < parent || (right && op.precedence() == parent) => {
            write!(f, "({t})")
        }
        Term::Range(..) => write!(f, "({t})"),
        _ => write!(f, "{t}"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Symbol(s) => write!(f, "{s}"),
            Term::Integer(i) => write!(f, "{i}"),
            Term::Str(s) => write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            Term::Variable(v) => write!(f, "{v}"),
            Term::Function(n, args) => {
                write!(f, "{n}")?;
                write_args(f, args)
            }
            Term::Supremum => write!(f, "#sup"),
            Term::Infimum => write!(f, "#inf"),
            Term::Theory(op, args) => {
                write!(f, "&{op}")?;
                if args.is_empty() {
                    Ok(())
                } else {
                    write_args(f, args)
                }
            }
            Term::BinOp(op, l, r) => {
                write_operand(f, l, op.precedence(), false)?;
                write!(f, "{}", op.symbol())?;
                write_operand(f, r, op.precedence(), true)
            }
            Term::Minus(t) => match **t {
                Term::BinOp(..) | Term::Range(..) => write!(f, "-({t})"),
                _ => write!(f, "-{t}"),
            },
            Term::Range(l, r) => write!(f, "{l}..{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn eval(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Atom { sign: Sign, atom: Term },
    Comparison { lhs: Term, op: CmpOp, rhs: Term },
    /// `[not] atom : condition`; conditions never contain conditionals.
    Conditional { sign: Sign, atom: Term, condition: Vec<Literal> },
}

impl Literal {
    pub fn pos(atom: Term) -> Literal {
        Literal::Atom { sign: Sign::Positive, atom }
    }

    pub fn neg(atom: Term) -> Literal {
        Literal::Atom { sign: Sign::Negative, atom }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Literal::Atom { atom, .. } => atom.collect_vars(out),
            Literal::Comparison { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Literal::Conditional { atom, condition, .. } => {
                atom.collect_vars(out);
                condition.iter().for_each(|c| c.collect_vars(out));
            }
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom { sign, atom } => {
                if *sign == Sign::Negative {
                    write!(f, "not ")?;
                }
                write!(f, "{atom}")
            }
            Literal::Comparison { lhs, op, rhs } => write!(f, "{lhs}{op}{rhs}"),
            Literal::Conditional { sign, atom, condition } => {
                if *sign == Sign::Negative {
                    write!(f, "not ")?;
                }
                write!(f, "{atom}: ")?;
                write_list(f, condition, ", ")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeadElement {
    pub atom: Term,
    pub condition: Vec<Literal>,
}

impl HeadElement {
    pub fn new(atom: Term) -> Self {
        HeadElement { atom, condition: Vec::new() }
    }
}

impl fmt::Display for HeadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        if !self.condition.is_empty() {
            write!(f, ": ")?;
            write_list(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

/// An empty disjunction is the head of an integrity constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Disjunction(Vec<HeadElement>),
    Choice(Vec<HeadElement>),
}

impl Head {
    pub fn elements(&self) -> &[HeadElement] {
        match self {
            Head::Disjunction(e) | Head::Choice(e) => e,
        }
    }

    pub fn elements_mut(&mut self) -> &mut Vec<HeadElement> {
        match self {
            Head::Disjunction(e) | Head::Choice(e) => e,
        }
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self, Head::Disjunction(e) if e.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
    pub span: Span,
}

impl Rule {
    pub fn new(head: Head, body: Vec<Literal>) -> Self {
        Rule { head, body, span: Span::default() }
    }

    pub fn fact(atom: Term) -> Self {
        Rule::new(Head::Disjunction(vec![HeadElement::new(atom)]), Vec::new())
    }

    /// Variables of the rule that are not local to a conditional literal.
    pub fn global_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for lit in &self.body {
            if !matches!(lit, Literal::Conditional { .. }) {
                lit.collect_vars(&mut out);
            }
        }
        for e in self.head.elements() {
            if e.condition.is_empty() {
                e.atom.collect_vars(&mut out);
            }
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Disjunction(els) => {
                let sep = if els.iter().any(|e| !e.condition.is_empty()) { "; " } else { " | " };
                write_list(f, els, sep)?;
            }
            Head::Choice(els) => {
                write!(f, "{{ ")?;
                write_list(f, els, "; ")?;
                write!(f, " }}")?;
            }
        }
        if !self.body.is_empty() {
            if !self.head.is_constraint() {
                write!(f, " ")?;
            }
            write!(f, ":- ")?;
            let sep = if self.body.iter().any(|l| matches!(l, Literal::Conditional { .. })) {
                "; "
            } else {
                ", "
            };
            write_list(f, &self.body, sep)?;
        } else if self.head.is_constraint() {
            write!(f, ":-")?;
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Show {
    /// `#show.`
    Nothing,
    /// `#show p/1.`
    Signature { name: String, arity: usize },
    /// `#show t : C.`
    Term { term: Term, condition: Vec<Literal> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Rule(Rule),
    External { atom: Term, condition: Vec<Literal>, span: Span },
    Show { show: Show, span: Span },
    Const { name: String, value: Term, span: Span },
    /// A raw `#type` block, handed to the grammar loader.
    TypeDecl { text: String, span: Span },
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Rule(r) => r.span,
            Statement::External { span, .. }
            | Statement::Show { span, .. }
            | Statement::Const { span, .. }
            | Statement::TypeDecl { span, .. } => *span,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Rule(r) => write!(f, "{r}"),
            Statement::External { atom, condition, .. } => {
                write!(f, "#external {atom}")?;
                if !condition.is_empty() {
                    write!(f, " : ")?;
                    write_list(f, condition, ", ")?;
                }
                write!(f, ".")
            }
            Statement::Show { show, .. } => match show {
                Show::Nothing => write!(f, "#show."),
                Show::Signature { name, arity } => write!(f, "#show {name}/{arity}."),
                Show::Term { term, condition } => {
                    write!(f, "#show {term}")?;
                    if !condition.is_empty() {
                        write!(f, " : ")?;
                        write_list(f, condition, ", ")?;
                    }
                    write!(f, ".")
                }
            },
            Statement::Const { name, value, .. } => write!(f, "#const {name} = {value}."),
            Statement::TypeDecl { text, .. } => write!(f, "{text}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub statements: Vec<Statement>,
}

impl Program {
    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Rule(r) => Some(r),
            _ => None,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Concatenated text of every embedded `#type` block.
    pub fn type_declarations(&self) -> String {
        self.statements
            .iter()
            .filter_map(|s| match s {
                Statement::TypeDecl { text, .. } => Some(text.as_str()),
                _ => None,
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// `#const` definitions in source order.
    pub fn constants(&self) -> Vec<(String, Term)> {
        self.statements
            .iter()
            .filter_map(|s| match s {
                Statement::Const { name, value, .. } => Some((name.clone(), value.clone())),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Prints a theory expression in surface syntax.
pub fn format_expression(e: &Term) -> String {
    e.to_string()
}
