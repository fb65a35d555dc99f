//! The engine against an independent substitution-based depth-first
//! interpreter on constraint-free programs.

mod support;

use std::collections::HashMap;

use clpz::oracle::{random_formula, Limits};
use clpz::syntax::{parse_program, parse_query, parse_term, Clause, SourceTerm, TermKind};
use clpz::{Engine, OccursMode};
use proptest::prelude::*;
use support::finite_unify::{resolve, unify, variant, Subst};

struct Reference {
    clauses: Vec<Clause>,
    counter: usize,
    steps: usize,
}

fn rename(t: &SourceTerm, suffix: usize, map: &mut HashMap<String, String>) -> SourceTerm {
    match &t.kind {
        TermKind::Var(v) if v == "_" => {
            let n = map.len();
            map.insert(format!("_{n}"), String::new());
            SourceTerm::var(format!("_#{suffix}_{n}"))
        }
        TermKind::Var(v) => SourceTerm::var(map.entry(v.clone()).or_insert_with(|| format!("{v}#{suffix}")).clone()),
        TermKind::Compound(f, args) => SourceTerm::compound(f.clone(), args.iter().map(|a| rename(a, suffix, map)).collect()),
        _ => t.clone(),
    }
}

impl Reference {
    fn solve(&mut self, goals: &[SourceTerm], s: Subst, out: &mut Vec<Subst>, cap: usize) {
        if out.len() >= cap || self.steps > 200_000 {
            return;
        }
        self.steps += 1;
        let Some((g, rest)) = goals.split_first() else {
            out.push(s);
            return;
        };
        match &g.kind {
            TermKind::Atom(a) if a == "true" => self.solve(rest, s, out, cap),
            TermKind::Atom(a) if a == "fail" || a == "false" => {}
            TermKind::Compound(f, args) if f == "=" && args.len() == 2 => {
                let mut s2 = s.clone();
                if unify(&args[0], &args[1], &mut s2) {
                    self.solve(rest, s2, out, cap);
                }
            }
            _ => {
                let clauses = self.clauses.clone();
                for c in &clauses {
                    self.counter += 1;
                    let mut map = HashMap::new();
                    let head = rename(&c.head, self.counter, &mut map);
                    let body: Vec<SourceTerm> = c.body.iter().map(|b| rename(b, self.counter, &mut map)).collect();
                    let mut s2 = s.clone();
                    if unify(g, &head, &mut s2) {
                        let goals: Vec<SourceTerm> = body.into_iter().chain(rest.iter().cloned()).collect();
                        self.solve(&goals, s2, out, cap);
                    }
                }
            }
        }
    }
}

/// Answer tuples from the engine: one term per query variable.
fn engine_answers(program: &str, query: &str, cap: usize) -> Vec<SourceTerm> {
    let mut e = Engine::with_mode(OccursMode::True);
    e.consult_str(program).unwrap();
    let mut answers = e.query(query).unwrap();
    let names: Vec<String> = answers.variable_names().iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    while out.len() < cap {
        let Some(a) = answers.next_answer().unwrap() else { break };
        let items = std::iter::once(SourceTerm::int(0))
            .chain(names.iter()
            .map(|n| match a.binding(n) {
                Some(v) => parse_term(&format!("{v}.")).unwrap(),
                None => SourceTerm::var(n.clone()),
            }))
            .collect();
        out.push(SourceTerm::compound("ans", items));
    }
    out
}

fn reference_answers(program: &str, query: &str, cap: usize) -> Vec<SourceTerm> {
    let goals = parse_query(query).unwrap();
    let mut names = Vec::new();
    for g in &goals {
        g.variables(&mut names);
    }
    names.retain(|n| n != "_");
    let mut r = Reference { clauses: parse_program(program).unwrap(), counter: 0, steps: 0 };
    let mut out = Vec::new();
    r.solve(&goals, Subst::new(), &mut out, cap);
    out.iter()
        .map(|s| {
            let items = names.iter().map(|n| resolve(&SourceTerm::var(n.clone()), s));
            SourceTerm::compound("ans", std::iter::once(SourceTerm::int(0)).chain(items).collect())
        })
        .collect()
}

const CORPUS: &[(&str, &str)] = &[
    ("app([], Ys, Ys). app([X|Xs], Ys, [X|Zs]) :- app(Xs, Ys, Zs).", "app(Xs, Ys, [1,2,3])."),
    ("app([], Ys, Ys). app([X|Xs], Ys, [X|Zs]) :- app(Xs, Ys, Zs).", "app([a], [b], L)."),
    ("mem(X, [X|_]). mem(X, [_|Xs]) :- mem(X, Xs).", "mem(X, [a,b,c])."),
    ("mem(X, [X|_]). mem(X, [_|Xs]) :- mem(X, Xs).", "mem(b, [a,b,c,b])."),
    ("mem(X, [X|_]). mem(X, [_|Xs]) :- mem(X, Xs).", "mem(z, [a,b])."),
    (
        "app([], Ys, Ys). app([X|Xs], Ys, [X|Zs]) :- app(Xs, Ys, Zs). rev([], []). rev([X|Xs], R) :- rev(Xs, R0), app(R0, [X], R).",
        "rev([1,2,3,4], R).",
    ),
    ("nat(z). nat(s(N)) :- nat(N).", "nat(N)."),
    ("add(z, Y, Y). add(s(X), Y, s(Z)) :- add(X, Y, Z).", "add(A, B, s(s(s(z))))."),
    (
        "edge(a,b). edge(b,c). edge(c,d). edge(b,d). path(X,X). path(X,Y) :- edge(X,Z), path(Z,Y).",
        "path(a, Y).",
    ),
    (
        "sel(X, [X|Xs], Xs). sel(X, [Y|Xs], [Y|Ys]) :- sel(X, Xs, Ys). perm([], []). perm(Xs, [X|Ys]) :- sel(X, Xs, Zs), perm(Zs, Ys).",
        "perm([1,2,3], P).",
    ),
    ("last([X], X). last([_|Xs], X) :- last(Xs, X).", "last([1,2,3], X)."),
    ("p(1). p(2). q(2). q(3). r(X) :- p(X), q(X).", "r(X)."),
    ("p(X, f(X)). ", "p(A, B), B = f(C)."),
    ("p(X, f(X)). ", "p(A, A)."),
    ("t(f(X, Y), X, Y).", "t(T, a, B), T = f(_, g(B))."),
    ("parent(tom, bob). parent(bob, ann). parent(bob, pat). gp(X, Z) :- parent(X, Y), parent(Y, Z).", "gp(tom, W)."),
    ("len([], z). len([_|T], s(N)) :- len(T, N).", "len(L, s(s(z)))."),
    ("q(a). q(b). pair(X, Y) :- q(X), q(Y).", "pair(X, Y), X = Y."),
    ("loop(X) :- loop(X). p(1).", "p(X)."),
    ("eq(X, X).", "eq(f(A, b), f(a, B)), eq(g(A), G)."),
];

#[test]
fn corpus_agrees_with_reference() {
    for (program, query) in CORPUS {
        let got = engine_answers(program, query, 12);
        let want = reference_answers(program, query, 12);
        assert_eq!(got.len(), want.len(), "{query}: {got:?} vs {want:?}");
        for (g, w) in got.iter().zip(&want) {
            assert!(variant(g, w), "{query}: {g} vs {w}");
        }
    }
}

#[test]
fn ground_answers_re_solve() {
    let factorial = include_str!("../programs/factorial.pl");
    let queens = include_str!("../programs/queens.pl");
    for (program, query) in [
        (factorial, "Y in 1..5, factorial(X,Y)."),
        (factorial, "factorial(5, F)."),
        (queens, "queens(5, Qs)."),
        ("", "X in 0..3, Y #= X*X - 2, labeling([],[X])."),
    ] {
        let mut e = Engine::new();
        e.consult_str(program).unwrap();
        let mut answers = e.query(query).unwrap();
        let mut replays = Vec::new();
        while let Some(a) = answers.next_answer().unwrap() {
            let bindings: Vec<String> = a.items.iter().map(|i| i.to_string()).collect();
            replays.push(format!("{}, {}", bindings.join(", "), query));
        }
        drop(answers);
        assert!(!replays.is_empty(), "{query}");
        for r in replays {
            assert!(clpz::solutions_count(&mut e, &r, 1) == 1, "{r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn queries_leave_no_trace(seed in any::<u64>(), pulls in 0usize..4) {
        let f = random_formula(seed, Limits::default());
        let names: Vec<String> = (0..f.var_count()).map(clpz::oracle::var_name).collect();
        let q = format!("{}, labeling([],[{}]).", f.to_query_text().trim_end_matches('.'), names.join(","));
        let mut e = Engine::new();
        e.consult_str("p(1). p(2).").unwrap();
        let before = e.store().snapshot();
        {
            let mut answers = e.query(&q).unwrap();
            for _ in 0..pulls {
                if answers.next_answer().unwrap().is_none() {
                    break;
                }
            }
        }
        prop_assert!(e.store().snapshot() == before);
    }
}
