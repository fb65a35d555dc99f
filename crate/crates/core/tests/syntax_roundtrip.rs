use clpz::syntax::{parse_program, parse_query, parse_term, SourceTerm};
use num_bigint::BigInt;
use proptest::prelude::*;

const INFIX: &[&str] = &["=", "is", "in", "#=", "#\\=", "#<", "#=<", "#>", "#>=", "\\/", "..", "+", "-", "*", "/", "^"];

fn leaf() -> impl Strategy<Value = SourceTerm> {
    prop_oneof![
        prop::sample::select(vec!["X", "Y", "Zs", "N1", "_A"]).prop_map(SourceTerm::var),
        (-1000i64..1000).prop_map(SourceTerm::int),
        Just(SourceTerm::int("123456789012345678901234567890".parse::<BigInt>().unwrap())),
        prop::sample::select(vec!["a", "foo", "[]", "inf", "sup", "Hello", "a b", "it's"]).prop_map(SourceTerm::atom),
    ]
}

fn term() -> impl Strategy<Value = SourceTerm> {
    leaf().prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["f", "g", "abs", "queens_"]), prop::collection::vec(inner.clone(), 1..4))
                .prop_map(|(f, args)| SourceTerm::compound(f, args)),
            (prop::sample::select(INFIX.to_vec()), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| SourceTerm::compound(op, vec![a, b])),
            (prop::collection::vec(inner.clone(), 0..4), prop::option::of(inner.clone())).prop_map(|(items, tail)| {
                SourceTerm::list(items, tail.unwrap_or_else(|| SourceTerm::atom("[]")))
            }),
            (inner.clone(), inner).prop_map(|(a, b)| SourceTerm::compound(",", vec![a, b])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn print_then_parse_is_identity(t in term()) {
        let text = format!("{t}.");
        let back = parse_term(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, t, "text {}", text);
    }

    #[test]
    fn printing_is_a_fixpoint(t in term()) {
        let once = t.to_string();
        let twice = parse_term(&format!("{once}.")).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn listing_round_trip() {
    let text = include_str!("../programs/queens.pl");
    let clauses = parse_program(text).unwrap();
    let printed: String = clauses.iter().map(|c| format!("{c}\n")).collect();
    assert_eq!(parse_program(&printed).unwrap(), clauses);
}

#[test]
fn sample_queries_parse() {
    for q in [
        "X in 0..2, 0/X #= 0, X = 1.",
        "X#>Y, Y#>X, X#>B*Y, B in -1..0, labeling([],[B]).",
        "abs(X)#<7^7^7.",
        "Y #\\= 91, mc_carthy_91(X, Y).",
        "set_prolog_flag(occurs_check,error).",
        "Xs = [X|Xs].",
    ] {
        parse_query(q).unwrap_or_else(|e| panic!("{q}: {e}"));
    }
}
