mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use tasp_core::reify::parse_reified;
use tasp_core::{parse_program, parse_term, pipeline, Config, Logic, Term};

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        "[a-z][a-z0-9_]{0,4}".prop_map(|s: String| Term::sym(&s)),
        (0i64..1000).prop_map(Term::Integer),
        "[A-Z][a-z0-9]{0,3}".prop_map(|s: String| Term::var(&s)),
        "[a-z ]{0,6}".prop_map(Term::Str),
        Just(Term::Supremum),
        Just(Term::Infimum),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            ("[a-z][a-z0-9]{0,3}", prop::collection::vec(inner.clone(), 1..3)).prop_map(|(f, args): (String, _)| Term::func(&f, args)),
            ("[a-z][a-z0-9]{0,3}", prop::collection::vec(inner, 0..3)).prop_map(|(f, args): (String, _)| Term::theory(&f, args)),
        ]
    })
}

proptest! {
    #[test]
    fn terms_survive_printing(t in term()) {
        let printed = t.to_string();
        prop_assert_eq!(parse_term(&printed).unwrap(), t, "{}", printed);
    }

    #[test]
    fn programs_survive_printing(seed in any::<u64>()) {
        let src = common::tel_program(&mut StdRng::seed_from_u64(seed));
        let once = parse_program(&src).unwrap().to_string();
        let twice = parse_program(&once).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn reified_facts_survive_printing(seed in any::<u64>()) {
        let src = common::tel_program(&mut StdRng::seed_from_u64(seed));
        let db = pipeline::reified(&parse_program(&src).unwrap(), &Config::new(Logic::Tel)).unwrap();
        let back = parse_reified(&db.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), db.to_text());
    }
}
