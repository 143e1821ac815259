use std::io::{self, Write};

use tasp_core::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PrinterKind {
    /// One line per model: the trace as a sequence of states.
    Default,
    /// One block per state.
    Temporal,
}

fn atoms(state: &std::collections::BTreeSet<tasp_core::Term>) -> Vec<String> {
    let mut v: Vec<String> = state.iter().map(|a| a.to_string()).collect();
    v.sort();
    v
}

/// Writes model number `index` (1-based).
pub fn print_model(out: &mut dyn Write, kind: PrinterKind, index: usize, trace: &Trace) -> io::Result<()> {
    writeln!(out, "Answer: {index}")?;
    match kind {
        PrinterKind::Default => writeln!(out, "{trace}"),
        PrinterKind::Temporal => {
            for (t, state) in trace.states.iter().enumerate() {
                match &trace.tau {
                    Some(tau) => writeln!(out, " State {t} [t={}]:", tau[t])?,
                    None => writeln!(out, " State {t}:")?,
                }
                let line = atoms(state).join(" ");
                if !line.is_empty() {
                    writeln!(out, "  {line}")?;
                }
            }
            Ok(())
        }
    }
}

pub fn print_footer(out: &mut dyn Write, models: usize, limited: bool, seconds: f64) -> io::Result<()> {
    writeln!(out, "{}", if models > 0 { "SATISFIABLE" } else { "UNSATISFIABLE" })?;
    writeln!(out)?;
    writeln!(out, "Models       : {models}{}", if limited { "+" } else { "" })?;
    writeln!(out, "Time         : {seconds:.3}s")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use tasp_core::parse_term;

    fn state(atoms: &[&str]) -> BTreeSet<tasp_core::Term> {
        atoms.iter().map(|a| parse_term(a).unwrap()).collect()
    }

    fn render(kind: PrinterKind, trace: &Trace) -> String {
        let mut buf = Vec::new();
        print_model(&mut buf, kind, 1, trace).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn groups_atoms_by_state() {
        let trace = Trace::new(vec![state(&["red(l1)"]), state(&["red(l1)", "push(l1)"]), state(&["green(l1)"])]);
        let text = render(PrinterKind::Temporal, &trace);
        assert_eq!(text, "Answer: 1\n State 0:\n  red(l1)\n State 1:\n  push(l1) red(l1)\n State 2:\n  green(l1)\n");
    }

    #[test]
    fn empty_states_still_get_headers() {
        let text = render(PrinterKind::Temporal, &Trace::new(vec![state(&[]), state(&[])]));
        assert_eq!(text, "Answer: 1\n State 0:\n State 1:\n");
    }

    #[test]
    fn timed_states_show_time_points() {
        let mut trace = Trace::new(vec![state(&["a"]), state(&[])]);
        trace.tau = Some(vec![0, 3]);
        assert_eq!(render(PrinterKind::Temporal, &trace), "Answer: 1\n State 0 [t=0]:\n  a\n State 1 [t=3]:\n");
    }

    #[test]
    fn default_printer_is_one_line() {
        let trace = Trace::new(vec![state(&["a"]), state(&[])]);
        assert_eq!(render(PrinterKind::Default, &trace), "Answer: 1\n<{a}, {}>\n");
    }
}
