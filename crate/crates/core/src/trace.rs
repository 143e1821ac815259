//! Finite traces: the temporal models produced by the solver and the oracle.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::Term;

/// A sequence of states, optionally timed. A horizon `n` gives `n + 1`
/// states. When present, `tau` starts at 0 and strictly increases.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    pub states: Vec<BTreeSet<Term>>,
    pub tau: Option<Vec<i64>>,
}

impl Trace {
    pub fn new(states: Vec<BTreeSet<Term>>) -> Self {
        Trace { states, tau: None }
    }

    /// Index of the last state.
    pub fn horizon(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn holds(&self, atom: &Term, t: usize) -> bool {
        self.states.get(t).is_some_and(|s| s.contains(atom))
    }

    /// The same trace restricted to atoms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Term) -> bool) -> Trace {
        Trace {
            states: self.states.iter().map(|s| s.iter().filter(|a| keep(a)).cloned().collect()).collect(),
            tau: self.tau.clone(),
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (t, s) in self.states.iter().enumerate() {
            if t > 0 {
                write!(f, ", ")?;
            }
            let atoms: Vec<String> = s.iter().map(Term::to_string).collect();
            write!(f, "{{{}}}", atoms.join(","))?;
            if let Some(tau) = &self.tau {
                write!(f, "@{}", tau[t])?;
            }
        }
        write!(f, ">")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_filter() {
        let p = Term::sym("p");
        let q = Term::func("q", vec![Term::Integer(1)]);
        let tr = Trace::new(vec![BTreeSet::from([p.clone(), q.clone()]), BTreeSet::new()]);
        assert_eq!(tr.to_string(), "<{p,q(1)}, {}>");
        assert_eq!(tr.horizon(), 1);
        assert!(tr.holds(&p, 0) && !tr.holds(&p, 1));
        let only_p = tr.filter(|a| *a == p);
        assert_eq!(only_p.to_string(), "<{p}, {}>");
        let timed = Trace { tau: Some(vec![0, 3]), ..only_p };
        assert_eq!(timed.to_string(), "<{p}@0, {}@3>");
    }
}
