use super::*;
use crate::ast::{parse_program, parse_term};

fn t(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn trace(states: &[&[&str]]) -> Trace {
    Trace::new(states.iter().map(|s| s.iter().map(|a| t(a)).collect()).collect())
}

fn models(src: &str, n: usize) -> Vec<String> {
    temporal_models(&parse_program(src).unwrap(), &[], n, None).unwrap().iter().map(Trace::to_string).collect()
}

#[test]
fn traffic_light() {
    let src = "red(L) :- not green(L), light(L).
               &next(&eventually(green(L))) :- push(L).
               &next(push(l1)) :- &initial.
               light(l1).";
    assert!(models(src, 0).is_empty());
    assert!(models(src, 1).is_empty());
    assert_eq!(
        models(src, 2),
        vec!["<{light(l1),red(l1)}, {light(l1),push(l1),red(l1)}, {green(l1),light(l1)}>"]
    );
}

#[test]
fn empty_program() {
    assert_eq!(models("", 0), vec!["<{}>"]);
}

#[test]
fn disjunction_and_choice() {
    assert_eq!(models("a | b.", 0), vec!["<{a}>", "<{b}>"]);
    assert_eq!(models("{a}.", 0), vec!["<{}>", "<{a}>"]);
    assert_eq!(models("a :- not b. b :- not a.", 0).len(), 2);
    assert!(models("a :- not a.", 0).is_empty());
}

#[test]
fn eventually_in_head_picks_one_state() {
    assert_eq!(models("&eventually(p) :- &initial.", 1), vec!["<{}, {p}>", "<{p}, {}>"]);
}

#[test]
fn formulas_on_traces() {
    let tr = trace(&[&["red"], &["red", "push"], &["green"]]);
    assert!(eval_formula(&tr, 1, &t("&eventually(green)")).unwrap());
    assert!(eval_formula(&tr, 0, &t("&initial")).unwrap());
    assert!(!eval_formula(&tr, 1, &t("&initial")).unwrap());
    assert!(!eval_formula(&tr, 2, &t("&next(&true)")).unwrap());
    assert!(eval_formula(&tr, 2, &t("&final")).unwrap());
    assert!(eval_formula(&tr, 0, &t("&not(green)")).unwrap());
    for i in 0..3 {
        let lhs = eval_formula(&tr, i, &t("&eventually(push)")).unwrap();
        let unfolded = eval_formula(&tr, i, &t("push")).unwrap() || eval_formula(&tr, i, &t("&next(&eventually(push))")).unwrap();
        assert_eq!(lhs, unfolded);
    }
}

#[test]
fn metric_formulas() {
    let tr = Trace { tau: Some(vec![0, 2, 7]), ..trace(&[&[], &["p"], &["q"]]) };
    assert!(eval_formula(&tr, 0, &t("&next(&i(2,3),p)")).unwrap());
    assert!(!eval_formula(&tr, 0, &t("&next(&i(0,2),p)")).unwrap());
    assert!(eval_formula(&tr, 0, &t("&eventually(&i(5,8),q)")).unwrap());
    assert!(!eval_formula(&tr, 0, &t("&eventually(&i(5,7),q)")).unwrap());
    assert!(eval_formula(&tr, 1, &t("&eventually(&i(0,#sup),q)")).unwrap());
}

#[test]
fn paths() {
    let tr = trace(&[&["green"], &["red"], &[]]);
    let r = eval_path(&tr, &t("&star(&seq(green,red))")).unwrap();
    assert!(r.contains(&(0, 2)));
    assert!((0..3).all(|i| r.contains(&(i, i))));
    assert_eq!(eval_path(&tr, &t("&step")).unwrap(), BTreeSet::from([(0, 1), (1, 2)]));
    assert!(eval_path(&tr, &t("&test(p)")).unwrap().is_empty());
    let star = eval_path(&tr, &t("&star(&step)")).unwrap();
    let unfolded: BTreeSet<_> = (0..3).flat_map(|i| (i..3).map(move |j| (i, j))).collect();
    assert_eq!(star, unfolded);
}

#[test]
fn metric_models_enumerate_timings() {
    let p = parse_program("&next(&i(2,3),p) :- &initial.").unwrap();
    let ms = temporal_models(&p, &[], 1, Some(5)).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].tau, Some(vec![0, 2]));
    assert_eq!(timings(2, 4).len(), 6);
}

#[test]
fn constants_and_variables() {
    let src = "#const k = 2. p(k). q(X) :- p(X), X > 1.";
    assert_eq!(models(src, 0), vec!["<{p(2),q(2)}>"]);
    let p = parse_program("p(k).").unwrap();
    let ms = temporal_models(&p, &[("k".into(), Term::Integer(7))], 0, None).unwrap();
    assert_eq!(ms[0].to_string(), "<{p(7)}>");
}

#[test]
fn enumeration_bound() {
    let p = parse_program("{a;b;c;d;e}.").unwrap();
    assert!(temporal_models(&p, &[], 4, None).is_err());
}
