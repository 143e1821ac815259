//! Random program generators and brute-force references shared by the
//! integration tests.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

pub const ATOMS: [&str; 3] = ["a", "b", "c"];

pub fn tel_formula(rng: &mut StdRng, depth: u32) -> String {
    let leaf = |rng: &mut StdRng| -> String {
        match rng.gen_range(0..6) {
            0 => "&initial".into(),
            1 => "&final".into(),
            _ => ATOMS[rng.gen_range(0..ATOMS.len())].into(),
        }
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let inner = tel_formula(rng, depth - 1);
    match rng.gen_range(0..3) {
        0 => format!("&next({inner})"),
        1 => format!("&eventually({inner})"),
        _ => format!("&not({inner})"),
    }
}

fn tel_literal(rng: &mut StdRng) -> String {
    let f = if rng.gen_bool(0.5) { ATOMS[rng.gen_range(0..ATOMS.len())].to_string() } else { tel_formula(rng, 2) };
    if rng.gen_bool(0.3) {
        format!("not {f}")
    } else {
        f
    }
}

/// A propositional program over three atoms with at most four rules.
pub fn tel_program(rng: &mut StdRng) -> String {
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let head = match rng.gen_range(0..8) {
            0 => String::new(),
            1 => format!("{{ {} }}", ATOMS[rng.gen_range(0..ATOMS.len())]),
            2 => format!("{} | {}", ATOMS[rng.gen_range(0..ATOMS.len())], ATOMS[rng.gen_range(0..ATOMS.len())]),
            3 | 4 => ATOMS[rng.gen_range(0..ATOMS.len())].to_string(),
            _ => tel_formula(rng, 2),
        };
        let body: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| tel_literal(rng)).collect();
        let rule = match (head.is_empty(), body.is_empty()) {
            (true, true) => continue,
            (false, true) => format!("{head}."),
            (true, false) => format!(":- {}.", body.join(", ")),
            (false, false) => format!("{head} :- {}.", body.join(", ")),
        };
        rules.push(rule);
    }
    rules.join("\n")
}

/// A path expression over atoms `p` and `q` of at most the given depth.
pub fn path(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => "&step".into(),
            1 => "p".into(),
            2 => "&test(q)".into(),
            _ => "&test(&not(p))".into(),
        };
    }
    match rng.gen_range(0..3) {
        0 => format!("&seq({},{})", path(rng, depth - 1), path(rng, depth - 1)),
        1 => format!("&choice({},{})", path(rng, depth - 1), path(rng, depth - 1)),
        _ => format!("&star({})", path(rng, depth - 1)),
    }
}

pub fn metric_formula(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..5) {
            0 => "&initial".into(),
            1 => "&final".into(),
            _ => ATOMS[rng.gen_range(0..2)].into(),
        };
    }
    let inner = metric_formula(rng, depth - 1);
    let lo = rng.gen_range(0..3);
    let hi = if rng.gen_bool(0.3) { "#sup".to_string() } else { (lo + rng.gen_range(1..3)).to_string() };
    match rng.gen_range(0..3) {
        0 => format!("&next(&i({lo},{hi}),{inner})"),
        1 => format!("&eventually(&i({lo},{hi}),{inner})"),
        _ => format!("&not({inner})"),
    }
}

use tasp_core::solver::{Program, Rule, RuleHead};

/// A random program over `atoms` atoms mixing normal, disjunctive and
/// choice rules and constraints.
pub fn propositional(rng: &mut StdRng, atoms: usize) -> Program {
    let mut p = Program::new(atoms);
    let pick = |rng: &mut StdRng, k: usize| -> Vec<usize> {
        let mut v: Vec<usize> = (0..k).map(|_| rng.gen_range(0..atoms)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for _ in 0..rng.gen_range(1..=2 * atoms) {
        let k = rng.gen_range(0..=2);
        let pos = pick(rng, k);
        let k = rng.gen_range(0..=2);
        let neg = pick(rng, k);
        let head = match rng.gen_range(0..10) {
            0 => RuleHead::Disjunction(Vec::new()),
            1 | 2 => RuleHead::Disjunction(pick(rng, 2)),
            3 => {
                let k = rng.gen_range(1..=3);
                RuleHead::Choice(pick(rng, k))
            }
            _ => RuleHead::Disjunction(pick(rng, 1)),
        };
        p.add(Rule { head, pos, neg });
    }
    p
}

/// Stable models by enumerating every interpretation and checking that it
/// is a minimal model of its reduct.
pub fn brute_force_stable(p: &Program) -> Vec<Vec<usize>> {
    let n = p.num_atoms;
    let has = |m: u32, a: usize| m >> a & 1 == 1;
    // Reduct rules: (head, pos); choice rules reduce to one rule per chosen atom.
    let reduct = |m: u32| -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        for r in &p.rules {
            if r.neg.iter().any(|&a| has(m, a)) {
                continue;
            }
            match &r.head {
                RuleHead::Disjunction(h) => out.push((h.clone(), r.pos.clone())),
                RuleHead::Choice(h) => {
                    for &a in h.iter().filter(|&&a| has(m, a)) {
                        out.push((vec![a], r.pos.clone()));
                    }
                }
            }
        }
        out
    };
    let satisfies = |rules: &[(Vec<usize>, Vec<usize>)], m: u32| {
        rules.iter().all(|(h, pos)| !pos.iter().all(|&a| has(m, a)) || h.iter().any(|&a| has(m, a)))
    };
    let mut out = Vec::new();
    for m in 0..(1u32 << n) {
        let red = reduct(m);
        if !satisfies(&red, m) {
            continue;
        }
        let mut sub = m;
        let mut minimal = true;
        while sub != 0 {
            sub = (sub - 1) & m;
            if satisfies(&red, sub) {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push((0..n).filter(|&a| has(m, a)).collect());
        }
    }
    out
}
