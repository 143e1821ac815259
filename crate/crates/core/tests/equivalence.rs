mod common;

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tasp_core::{oracle, parse_program, pipeline, Config, Logic, Trace};

fn assert_matches_oracle(src: &str, logic: Logic, n: usize, max_time: Option<i64>) {
    let p = parse_program(src).unwrap();
    let cfg = Config { max_time, ..Config::new(logic).with_horizon(n) };
    let ours: BTreeSet<Trace> = pipeline::models(&p, &cfg).unwrap().into_iter().collect();
    let reference: BTreeSet<Trace> = oracle::temporal_models(&p, &[], n, max_time).unwrap().into_iter().collect();
    assert_eq!(ours, reference, "n={n}\n{src}");
}

#[test]
fn dynamic_programs_match_oracle() {
    let mut rng = StdRng::seed_from_u64(11);
    for i in 0..400 {
        let rho = common::path(&mut rng, 3);
        let src = match rng.gen_range(0..3) {
            0 => format!("{{p;q}}. &eventually({rho},r) :- &initial."),
            1 => format!("{{p;q}}. r :- &eventually({rho},q)."),
            _ => format!("{{p}}. q :- not p. :- not &always({rho},p), &initial."),
        };
        assert_matches_oracle(&src, Logic::Del, i % 3, None);
    }
}

#[test]
fn metric_programs_match_oracle() {
    let mut rng = StdRng::seed_from_u64(13);
    for i in 0..200 {
        let f = common::metric_formula(&mut rng, 2);
        let g = common::metric_formula(&mut rng, 2);
        let src = format!("{f} :- &initial. b :- {g}. {{a}} :- b.");
        assert_matches_oracle(&src, Logic::Mel, i % 3, Some(4));
    }
}

#[test]
fn temporal_programs_match_oracle_on_longer_horizons() {
    let mut rng = StdRng::seed_from_u64(17);
    for i in 0..100 {
        let src = common::tel_program(&mut rng);
        assert_matches_oracle(&src, Logic::Tel, 3 + i % 2, None);
    }
}
