//! Extended reification of ground programs into integer-identified facts.
//!
//! Besides the standard `rule/2`, `atom_tuple/1,2`, `literal_tuple/1,2` and
//! `output/2` facts, the database records every typed subexpression of
//! every theory expression (`formula/2`), the external directives
//! (`external/2`) and the show policy (`show_atom/2`, `show_term/2`).
//!
//! Theory expressions cannot appear as-is inside reified facts, so
//! `&op(args)` is written `__op(args)` in the text format. Names starting
//! with two underscores are reserved for this purpose.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::ast::{parse_program, Head, Sign, Statement, Term};
use crate::error::{Error, Result};
use crate::grammar::TheoryGrammar;
use crate::ground::{GroundHead, GroundProgram, GroundShow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadKind {
    Disjunction,
    Choice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReifiedRule {
    pub head: HeadKind,
    /// Atom tuple id of the head.
    pub atoms: u32,
    /// Literal tuple id of the (normal) body.
    pub body: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReifiedDb {
    pub rules: Vec<ReifiedRule>,
    pub atom_tuples: BTreeMap<u32, BTreeSet<u32>>,
    pub literal_tuples: BTreeMap<u32, BTreeSet<i64>>,
    /// Symbol and the literal tuple defining it; an empty tuple marks a fact.
    pub outputs: Vec<(Term, u32)>,
    /// Type and subexpression, one entry per type membership.
    pub formulas: Vec<(String, Term)>,
    /// Atom ids declared external (with default value false).
    pub externals: Vec<u32>,
    pub show_atoms: Vec<(Term, u32)>,
    pub show_terms: Vec<(Term, u32)>,
}

/// Writes a theory expression as a plain term in the reserved namespace.
pub fn encode(t: &Term) -> Term {
    match t {
        Term::Theory(op, args) => Term::func(&format!("__{op}"), args.iter().map(encode).collect()),
        Term::Function(n, args) => Term::Function(n.clone(), args.iter().map(encode).collect()),
        _ => t.clone(),
    }
}

/// Inverse of [`encode`].
pub fn decode(t: &Term) -> Term {
    match t {
        Term::Symbol(n) if n.starts_with("__") => Term::Theory(n[2..].to_string(), Vec::new()),
        Term::Function(n, args) if n.starts_with("__") => {
            Term::Theory(n[2..].to_string(), args.iter().map(decode).collect())
        }
        Term::Function(n, args) => Term::Function(n.clone(), args.iter().map(decode).collect()),
        _ => t.clone(),
    }
}

#[derive(Default)]
struct Builder {
    db: ReifiedDb,
    atom_tuple_ids: HashMap<BTreeSet<u32>, u32>,
    literal_tuple_ids: HashMap<BTreeSet<i64>, u32>,
}

impl Builder {
    fn atom_tuple(&mut self, atoms: BTreeSet<u32>) -> u32 {
        let next = self.atom_tuple_ids.len() as u32;
        let id = *self.atom_tuple_ids.entry(atoms.clone()).or_insert(next);
        self.db.atom_tuples.entry(id).or_insert(atoms);
        id
    }

    fn literal_tuple(&mut self, lits: BTreeSet<i64>) -> u32 {
        let next = self.literal_tuple_ids.len() as u32;
        let id = *self.literal_tuple_ids.entry(lits.clone()).or_insert(next);
        self.db.literal_tuples.entry(id).or_insert(lits);
        id
    }
}

fn matches_signature(t: &Term, name: &str, arity: usize) -> bool {
    match t {
        Term::Symbol(n) => n == name && arity == 0,
        Term::Function(n, args) => n == name && args.len() == arity,
        _ => false,
    }
}

/// Reifies a ground program. Theory expressions are expanded and typed
/// with `g`; expressions that expand to the same form share an id.
pub fn reify(gp: &GroundProgram, g: &TheoryGrammar) -> Result<ReifiedDb> {
    let mut expanded: HashMap<&Term, Term> = HashMap::new();
    let mut ids: HashMap<Term, u32> = HashMap::new();
    let mut symbols: Vec<Term> = Vec::new();
    let mut typed = Vec::new();
    for s in &gp.symbols {
        let key = if s.is_theory() {
            let t = g.typecheck_standalone(s).map_err(|e| Error::Reify(format!("{s}: {e}")))?;
            let key = t.term.clone();
            if !ids.contains_key(&key) {
                typed.push(t);
            }
            key
        } else {
            s.clone()
        };
        if !ids.contains_key(&key) {
            ids.insert(key.clone(), symbols.len() as u32 + 1);
            symbols.push(key.clone());
        }
        expanded.insert(s, key);
    }
    let id_of = |t: &Term| ids[&expanded[t]];

    let mut b = Builder::default();
    for r in &gp.rules {
        let (kind, atoms) = match &r.head {
            GroundHead::Disjunction(a) => (HeadKind::Disjunction, a),
            GroundHead::Choice(a) => (HeadKind::Choice, a),
        };
        let head = b.atom_tuple(atoms.iter().map(id_of).collect());
        let body = b.literal_tuple(
            r.body
                .iter()
                .map(|l| {
                    let id = id_of(&l.atom) as i64;
                    if l.sign == Sign::Negative {
                        -id
                    } else {
                        id
                    }
                })
                .collect(),
        );
        b.db.rules.push(ReifiedRule { head: kind, atoms: head, body });
    }

    let facts: BTreeSet<u32> = gp.facts.iter().map(id_of).collect();
    let mut output_tuple = BTreeMap::new();
    for (i, sym) in symbols.iter().enumerate() {
        let id = i as u32 + 1;
        let tuple = if facts.contains(&id) {
            b.literal_tuple(BTreeSet::new())
        } else {
            b.literal_tuple(BTreeSet::from([id as i64]))
        };
        output_tuple.insert(id, tuple);
        b.db.outputs.push((sym.clone(), tuple));
    }

    let mut seen = BTreeSet::new();
    for t in &typed {
        t.walk(&mut |node| {
            for ty in &node.memberships {
                if seen.insert((ty.clone(), node.term.clone())) {
                    b.db.formulas.push((ty.clone(), node.term.clone()));
                }
            }
        });
    }

    let mut ext_seen = BTreeSet::new();
    for e in &gp.externals {
        let id = id_of(e);
        if ext_seen.insert(id) {
            b.db.externals.push(id);
        }
    }

    let hide_all = gp.shows.contains(&GroundShow::Nothing);
    let sigs: Vec<(&str, usize)> = gp
        .shows
        .iter()
        .filter_map(|s| match s {
            GroundShow::Signature { name, arity } => Some((name.as_str(), *arity)),
            _ => None,
        })
        .collect();
    let show_all = gp.shows.is_empty();
    for (i, sym) in symbols.iter().enumerate() {
        if sym.is_theory() || hide_all {
            continue;
        }
        if show_all || sigs.iter().any(|(n, a)| matches_signature(sym, n, *a)) {
            let id = i as u32 + 1;
            b.db.show_atoms.push((sym.clone(), output_tuple[&id]));
        }
    }
    for s in &gp.shows {
        if let GroundShow::Term { term, body } = s {
            let lits = body
                .iter()
                .map(|l| {
                    let id = id_of(&l.atom) as i64;
                    if l.sign == Sign::Negative {
                        -id
                    } else {
                        id
                    }
                })
                .collect();
            let tuple = b.literal_tuple(lits);
            b.db.show_terms.push((term.clone(), tuple));
        }
    }
    Ok(b.db)
}

impl ReifiedDb {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
            && self.outputs.is_empty()
            && self.formulas.is_empty()
            && self.externals.is_empty()
            && self.show_atoms.is_empty()
            && self.show_terms.is_empty()
    }

    /// Number of atom ids in use.
    pub fn num_atoms(&self) -> u32 {
        let from_tuples = self.atom_tuples.values().flat_map(|s| s.iter().copied()).max().unwrap_or(0);
        let from_lits = self
            .literal_tuples
            .values()
            .flat_map(|s| s.iter().map(|l| l.unsigned_abs() as u32))
            .max()
            .unwrap_or(0);
        let from_ext = self.externals.iter().copied().max().unwrap_or(0);
        from_tuples.max(from_lits).max(from_ext)
    }

    /// Symbol of each atom id, from singleton output tuples.
    pub fn symbol_ids(&self) -> BTreeMap<u32, Term> {
        let mut out = BTreeMap::new();
        for (t, tuple) in &self.outputs {
            if let Some(lits) = self.literal_tuples.get(tuple) {
                if let [l] = lits.iter().copied().collect::<Vec<_>>()[..] {
                    if l > 0 {
                        out.insert(l as u32, t.clone());
                    }
                }
            }
        }
        out
    }

    /// Writes the database as one fact per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rules {
            let h = match r.head {
                HeadKind::Disjunction => "disjunction",
                HeadKind::Choice => "choice",
            };
            let _ = writeln!(s, "rule({h}({}),normal({})).", r.atoms, r.body);
        }
        for (id, atoms) in &self.atom_tuples {
            let _ = writeln!(s, "atom_tuple({id}).");
            for a in atoms {
                let _ = writeln!(s, "atom_tuple({id},{a}).");
            }
        }
        for (id, lits) in &self.literal_tuples {
            let _ = writeln!(s, "literal_tuple({id}).");
            for l in lits {
                let _ = writeln!(s, "literal_tuple({id},{l}).");
            }
        }
        for (t, tuple) in &self.outputs {
            let _ = writeln!(s, "output({},{tuple}).", encode(t));
        }
        for (ty, t) in &self.formulas {
            let _ = writeln!(s, "formula({ty},{}).", encode(t));
        }
        for e in &self.externals {
            let _ = writeln!(s, "external({e},false).");
        }
        for (t, tuple) in &self.show_atoms {
            let _ = writeln!(s, "show_atom({},{tuple}).", encode(t));
        }
        for (t, tuple) in &self.show_terms {
            let _ = writeln!(s, "show_term({},{tuple}).", encode(t));
        }
        s
    }
}

fn int(t: &Term, what: &str) -> Result<i64> {
    match t {
        Term::Integer(i) => Ok(*i),
        other => Err(Error::Reify(format!("expected integer {what}, found {other}"))),
    }
}

fn id(t: &Term, what: &str) -> Result<u32> {
    let v = int(t, what)?;
    u32::try_from(v).map_err(|_| Error::Reify(format!("{what} {v} out of range")))
}

/// Reads the text format back. Every tuple referenced by a rule, output or
/// show fact must be declared.
pub fn parse_reified(text: &str) -> Result<ReifiedDb> {
    let program = parse_program(text)?;
    let mut db = ReifiedDb::default();
    for st in &program.statements {
        let Statement::Rule(r) = st else {
            return Err(Error::Reify(format!("unexpected statement {st}")));
        };
        let fact = match (&r.head, r.body.is_empty()) {
            (Head::Disjunction(e), true) if e.len() == 1 && e[0].condition.is_empty() => &e[0].atom,
            _ => return Err(Error::Reify(format!("malformed fact {st}"))),
        };
        let (name, args): (&str, &[Term]) = match fact {
            Term::Function(n, a) => (n, a),
            _ => return Err(Error::Reify(format!("malformed fact {st}"))),
        };
        match (name, args) {
            ("rule", [Term::Function(h, ha), Term::Function(b, ba)]) if ha.len() == 1 && ba.len() == 1 && b == "normal" => {
                let head = match h.as_str() {
                    "disjunction" => HeadKind::Disjunction,
                    "choice" => HeadKind::Choice,
                    other => return Err(Error::Reify(format!("unsupported head kind {other}"))),
                };
                db.rules.push(ReifiedRule { head, atoms: id(&ha[0], "atom tuple")?, body: id(&ba[0], "literal tuple")? });
            }
            ("atom_tuple", [t]) => {
                db.atom_tuples.entry(id(t, "atom tuple")?).or_default();
            }
            ("atom_tuple", [t, a]) => {
                db.atom_tuples.entry(id(t, "atom tuple")?).or_default().insert(id(a, "atom")?);
            }
            ("literal_tuple", [t]) => {
                db.literal_tuples.entry(id(t, "literal tuple")?).or_default();
            }
            ("literal_tuple", [t, l]) => {
                db.literal_tuples.entry(id(t, "literal tuple")?).or_default().insert(int(l, "literal")?);
            }
            ("output", [s, t]) => db.outputs.push((decode(s), id(t, "literal tuple")?)),
            ("formula", [Term::Symbol(ty), e]) => db.formulas.push((ty.clone(), decode(e))),
            ("external", [a, Term::Symbol(v)]) if v == "false" => db.externals.push(id(a, "atom")?),
            ("show_atom", [s, t]) => db.show_atoms.push((decode(s), id(t, "literal tuple")?)),
            ("show_term", [s, t]) => db.show_terms.push((decode(s), id(t, "literal tuple")?)),
            _ => return Err(Error::Reify(format!("unknown fact {st}"))),
        }
    }
    for r in &db.rules {
        if !db.atom_tuples.contains_key(&r.atoms) {
            return Err(Error::Reify(format!("dangling atom_tuple {}", r.atoms)));
        }
        if !db.literal_tuples.contains_key(&r.body) {
            return Err(Error::Reify(format!("dangling literal_tuple {}", r.body)));
        }
    }
    for (_, t) in db.outputs.iter().chain(&db.show_atoms).chain(&db.show_terms) {
        if !db.literal_tuples.contains_key(t) {
            return Err(Error::Reify(format!("dangling literal_tuple {t}")));
        }
    }
    Ok(db)
}
