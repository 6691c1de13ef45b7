use proptest::prelude::*;

use spectra::format::{parse_model, parse_test, write_model, write_test, FormatError};
use spectra_core::spectrum::{random_model, random_pair, ClassConstraint, GenConfig};
use spectra_core::testing::{generate_tests, TestBounds};
use spectra_core::{Budget, Error, Rational};

fn syntax_at(text: &str) -> (usize, usize) {
    match parse_model(text) {
        Err(FormatError::Syntax { line, column, .. }) => (line, column),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn parses_a_small_model() {
    let m = parse_model(
        "# a coin\nnplts coin\nalphabet a b\ntrans s a -> h:1/2, t:1/2   # fair\ntrans h b -> s2:1\n\nstate idle\n",
    )
    .unwrap();
    assert_eq!(m.name(), "coin");
    assert_eq!(m.num_states(), 5);
    assert_eq!(m.actions(), ["a", "b"]);
    let s = m.state("s").unwrap();
    let t = m.transition(m.outgoing(s)[0]);
    assert_eq!(t.target.probability(m.state("h").unwrap()), Rational::new(1, 2));
    assert!(m.is_deadlocked(m.state("idle").unwrap()));
}

#[test]
fn decimals_are_rejected_with_a_position() {
    let err = parse_model("nplts x\ntrans s a -> t:0.5, u:0.5\n").unwrap_err();
    assert!(err.to_string().starts_with("2:16:"), "{err}");
    assert!(err.to_string().contains("decimals"), "{err}");
}

#[test]
fn syntax_errors_point_at_the_offending_token() {
    assert_eq!(syntax_at("trans s a -> t:1\n"), (1, 1));
    assert_eq!(syntax_at("nplts x\ntrans s a t:1\n"), (2, 11));
    assert_eq!(syntax_at("nplts x\ntrans s a -> t 1\n"), (2, 16));
    assert_eq!(syntax_at("nplts x\ntrans s a -> t:1,\n"), (2, 18));
    assert_eq!(syntax_at("nplts x\nfrobnicate\n"), (2, 1));
    assert_eq!(syntax_at("nplts x\nnplts y\n"), (2, 1));
    assert_eq!(syntax_at(""), (1, 1));
}

#[test]
fn semantic_errors_come_from_validation() {
    let invalid = |text: &str| match parse_model(text) {
        Err(FormatError::Invalid(e)) => e,
        other => panic!("expected a validation error, got {other:?}"),
    };
    assert!(matches!(invalid("nplts x\ntrans s a -> t:1/2\n"), Error::DistributionNotNormalized { .. }));
    assert!(matches!(invalid("nplts x\ntrans s a -> t:1\ntrans t a -> s:1\n"), Error::CyclicModel { .. }));
    assert!(matches!(invalid("nplts x\nalphabet a\ntrans s b -> t:1\n"), Error::UnknownAction(_)));
    assert!(matches!(invalid("nplts x\ntrans s a -> t:1/2, t:1/2\n"), Error::DuplicateSupportState { .. }));
    assert!(matches!(invalid("nplts x\n"), Error::EmptyModel));
}

#[test]
fn tests_need_a_root_and_a_final_omega() {
    let t = parse_test("npt probe\nroot o\ntrans o a -> omega:1/2, o1:1/2\ntrans o1 b -> omega:1\n").unwrap();
    assert_eq!(t.model().state_name(t.initial()), "o");
    assert!(parse_test("npt probe\ntrans o a -> omega:1\n").is_err());
    assert!(parse_test("npt probe\nroot o\ntrans o a -> omega:1\ntrans omega a -> x:1\n").is_err());
    // a test that only refuses
    let trivial = parse_test("npt none\nroot o\nstate o omega\n").unwrap();
    assert!(trivial.model().transitions().is_empty());
}

#[test]
fn generated_tests_round_trip() {
    let alphabet = vec!["a".to_string(), "b".to_string()];
    let bounds = TestBounds { max_depth: 2, max_transitions: 2, ..TestBounds::default() };
    let family = generate_tests(&alphabet, &bounds, &Budget::default()).unwrap();
    for t in family.tests() {
        let text = write_test(t);
        assert_eq!(&parse_test(&text).unwrap(), t, "{text}");
    }
}

fn arb_config() -> impl Strategy<Value = GenConfig> {
    (1usize..7, 1usize..4, 1usize..4, 0usize..3, any::<u64>()).prop_map(|(states, out, support, class, seed)| {
        GenConfig {
            states,
            max_out_degree: out,
            max_support: support,
            class: [ClassConstraint::Any, ClassConstraint::FullyNondeterministic, ClassConstraint::FullyProbabilistic]
                [class],
            seed,
            ..GenConfig::default()
        }
    })
}

proptest! {
    #[test]
    fn models_round_trip(cfg in arb_config()) {
        let m = random_model(&cfg);
        let text = write_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(write_model(&back), text);
    }

    #[test]
    fn pairs_round_trip(cfg in arb_config()) {
        let (m, _, _) = random_pair(&cfg);
        prop_assert_eq!(parse_model(&write_model(&m)).unwrap(), m);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC*") {
        let _ = parse_model(&text);
        let _ = parse_test(&text);
    }

    #[test]
    fn corrupted_models_never_panic(cfg in arb_config(), at in any::<prop::sample::Index>(), junk in "[ -~\\n]{0,6}") {
        let text = write_model(&random_model(&cfg));
        let mut cut = at.index(text.len() + 1);
        while !text.is_char_boundary(cut) {
            cut -= 1;
        }
        let corrupted = format!("{}{junk}{}", &text[..cut], &text[cut..]);
        let _ = parse_model(&corrupted);
    }
}
