use std::io::Write;
use std::path::Path;

use tasp_cli::{run, EXIT_INPUT, EXIT_OK, EXIT_SAT, EXIT_UNSAT, EXIT_USAGE};

const TRAFFIC_LIGHT: &str = include_str!("../../core/tests/fixtures/telex.lp");

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn tasp(args: &[&str], stdin: &str) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("tasp").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Output { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name).display().to_string()
}

fn state_block(out: &str, t: usize) -> Vec<&str> {
    let header = format!(" State {t}:");
    let mut lines = out.lines().skip_while(|l| *l != header).skip(1);
    lines.next().filter(|l| l.starts_with("  ")).map(|l| l.split_whitespace().collect()).unwrap_or_default()
}

#[test]
fn traffic_light_turns_green_at_state_two() {
    let r = tasp(&["solve", &fixture("telex.lp"), "--semantics", "tel", "-c", "n=2", "--printer", "temporal"], "");
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
    assert_eq!(r.out.matches("Answer:").count(), 1);
    assert!(state_block(&r.out, 1).contains(&"push(l1)"));
    assert!(state_block(&r.out, 1).contains(&"red(l1)"));
    assert!(state_block(&r.out, 2).contains(&"green(l1)"));
    assert!(!state_block(&r.out, 0).contains(&"green(l1)"));
}

#[test]
fn short_horizons_are_unsatisfiable() {
    for n in ["n=0", "n=1"] {
        let r = tasp(&["solve", &fixture("telex.lp"), "-c", n], "");
        assert_eq!(r.code, EXIT_UNSAT);
        assert!(r.out.contains("UNSATISFIABLE"));
    }
}

#[test]
fn reads_standard_input() {
    let r = tasp(&["solve", "-c", "n=2"], TRAFFIC_LIGHT);
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
    let r = tasp(&["solve", "-", "-c", "n=1"], TRAFFIC_LIGHT);
    assert_eq!(r.code, EXIT_UNSAT, "{}", r.err);
}

#[test]
fn empty_program_reifies_to_nothing() {
    let r = tasp(&["reify"], "");
    assert_eq!((r.code, r.out.as_str()), (EXIT_OK, ""));
}

#[test]
fn transform_keeps_theory_atoms_external() {
    let r = tasp(&["transform", &fixture("wait.lp")], "");
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("#external &eventually(green(L)) : green(L)."), "{}", r.out);
}

#[test]
fn oracle_agrees_with_solver() {
    let solve = tasp(&["solve", &fixture("telex.lp"), "-c", "n=2"], "");
    let oracle = tasp(&["oracle", &fixture("telex.lp"), "-c", "n=2"], "");
    assert_eq!(oracle.code, EXIT_SAT);
    let models = |s: &str| s.lines().filter(|l| l.starts_with('<')).map(String::from).collect::<Vec<_>>();
    assert_eq!(models(&solve.out), models(&oracle.out));
}

#[test]
fn show_directives_filter_output() {
    let program = format!("{TRAFFIC_LIGHT}\n#show green/1.");
    let r = tasp(&["solve", "-c", "n=2", "--printer", "temporal"], &program);
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
    assert_eq!(state_block(&r.out, 2), ["green(l1)"]);
    assert!(state_block(&r.out, 0).is_empty() && state_block(&r.out, 1).is_empty());
}

#[test]
fn metric_models_print_time_points() {
    let args = ["solve", &fixture("telex_metric_small.lp"), "--semantics", "mel", "-c", "n=3", "--max-time", "6"];
    let r = tasp(&[&args[..], &["--printer", "temporal", "--models", "1"]].concat(), "");
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
    assert!(r.out.contains(" State 0 [t=0]:"));
    assert!(r.out.contains("Models       : 1+"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# traffic light\nsemantics = tel\nconst = n=2\nprinter = temporal\n").unwrap();
    let cfg = cfg.display().to_string();
    let r = tasp(&["solve", &fixture("telex.lp"), "--config", &cfg], "");
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
    assert!(r.out.contains(" State 2:"));
    let r = tasp(&["solve", &fixture("telex.lp"), "--config", &cfg, "-c", "n=1"], "");
    assert_eq!(r.code, EXIT_UNSAT);
}

#[test]
fn user_grammar_replaces_built_in() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = std::fs::File::create(dir.path().join("tiny.lp")).unwrap();
    writeln!(f, "#type tiny {{ subtypes: [atom], occurrence: any, expressions: [&initial] }}.").unwrap();
    let path = dir.path().join("tiny.lp").display().to_string();
    let r = tasp(&["solve", "--grammar", &path], "a :- &initial.");
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
    let r = tasp(&["solve", "--grammar", &path], "a :- &eventually(b).");
    assert_eq!(r.code, EXIT_INPUT);
    let r = tasp(&["solve", "--syntax-encoding", "tel"], "a :- &eventually(b).");
    assert_eq!(r.code, EXIT_SAT, "{}", r.err);
}

#[test]
fn errors_map_to_exit_codes() {
    assert_eq!(tasp(&["solve", "--semantics", "ctl"], "").code, EXIT_USAGE);
    assert_eq!(tasp(&["solve", "--models", "many"], "").code, EXIT_USAGE);
    assert_eq!(tasp(&["solve", "-c", "n"], "").code, EXIT_USAGE);
    assert_eq!(tasp(&["frobnicate"], "").code, EXIT_USAGE);
    assert_eq!(tasp(&["solve", "/no/such/file.lp"], "").code, EXIT_INPUT);
    let r = tasp(&["solve"], "a :- b");
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("syntax error"), "{}", r.err);
    assert_eq!(tasp(&["--help"], "").code, EXIT_OK);
}
