//! Textbook finite-tree unification over source terms, with substitutions
//! kept as a map and an explicit occurs check. Used as an independent oracle.
#![allow(dead_code)]

use std::collections::HashMap;

use clpz::syntax::{SourceTerm, TermKind};

pub type Subst = HashMap<String, SourceTerm>;

pub fn walk(t: &SourceTerm, s: &Subst) -> SourceTerm {
    match &t.kind {
        TermKind::Var(v) => match s.get(v) {
            Some(b) => walk(b, s),
            None => t.clone(),
        },
        _ => t.clone(),
    }
}

/// Applies the substitution everywhere.
pub fn resolve(t: &SourceTerm, s: &Subst) -> SourceTerm {
    let t = walk(t, s);
    match &t.kind {
        TermKind::Compound(f, args) => SourceTerm::compound(f.clone(), args.iter().map(|a| resolve(a, s)).collect()),
        _ => t,
    }
}

fn occurs(v: &str, t: &SourceTerm, s: &Subst) -> bool {
    let t = walk(t, s);
    match &t.kind {
        TermKind::Var(w) => w == v,
        TermKind::Compound(_, args) => args.iter().any(|a| occurs(v, a, s)),
        _ => false,
    }
}

/// Most general unifier extending `s`, or `None`.
pub fn unify(a: &SourceTerm, b: &SourceTerm, s: &mut Subst) -> bool {
    let (a, b) = (walk(a, s), walk(b, s));
    match (&a.kind, &b.kind) {
        (TermKind::Var(x), TermKind::Var(y)) if x == y => true,
        (TermKind::Var(x), _) => {
            if occurs(x, &b, s) {
                return false;
            }
            s.insert(x.clone(), b.clone());
            true
        }
        (_, TermKind::Var(_)) => unify(&b, &a, s),
        (TermKind::Int(m), TermKind::Int(n)) => m == n,
        (TermKind::Atom(p), TermKind::Atom(q)) => p == q,
        (TermKind::Compound(f, xs), TermKind::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, s))
        }
        _ => false,
    }
}

/// Equal up to a consistent bijective renaming of variables.
pub fn variant(a: &SourceTerm, b: &SourceTerm) -> bool {
    fn go(a: &SourceTerm, b: &SourceTerm, fw: &mut HashMap<String, String>, bw: &mut HashMap<String, String>) -> bool {
        match (&a.kind, &b.kind) {
            (TermKind::Var(x), TermKind::Var(y)) => {
                let f = fw.entry(x.clone()).or_insert_with(|| y.clone()).clone();
                let g = bw.entry(y.clone()).or_insert_with(|| x.clone()).clone();
                f == *y && g == *x
            }
            (TermKind::Int(m), TermKind::Int(n)) => m == n,
            (TermKind::Atom(p), TermKind::Atom(q)) => p == q,
            (TermKind::Compound(f, xs), TermKind::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fw, bw))
            }
            _ => false,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

/// Deterministic pseudo-random finite term (xorshift), for harnesses that do
/// not use proptest.
pub struct TermGen(pub u64);

impl TermGen {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn term(&mut self, depth: u32) -> SourceTerm {
        let k = self.next() % if depth == 0 { 4 } else { 7 };
        match k {
            0 | 1 => SourceTerm::var(["A", "B", "C", "D"][(self.next() % 4) as usize]),
            2 => SourceTerm::atom(["a", "b"][(self.next() % 2) as usize]),
            3 => SourceTerm::int((self.next() % 3) as i64),
            4 => SourceTerm::compound("f", vec![self.term(depth - 1)]),
            5 => SourceTerm::compound("f", vec![self.term(depth - 1), self.term(depth - 1)]),
            _ => SourceTerm::compound("g", vec![self.term(depth - 1), self.term(depth - 1)]),
        }
    }
}
