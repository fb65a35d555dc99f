//! Brute-force ground truth and black-box algebraic checks of the solver.
//!
//! A formula is a conjunction of relations over small boxed variables. The
//! oracle enumerates its solutions by exact evaluation; the checks compare
//! solver behaviour against that set.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::propagate::{apply_op, ArithOp, Relation};
use crate::syntax::SourceTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(usize),
    Const(i64),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn abs(a: Expr) -> Expr {
        Expr::Abs(Box::new(a))
    }

    /// Exact value; `None` on a zero divisor or negative exponent.
    pub fn eval(&self, env: &[i64]) -> Option<BigInt> {
        Some(match self {
            Expr::Var(i) => BigInt::from(env[*i]),
            Expr::Const(k) => BigInt::from(*k),
            Expr::Abs(a) => a.eval(env)?.abs(),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            return None;
                        }
                        // truncating division
                        a / b
                    }
                    BinOp::Pow => {
                        if b.is_negative() {
                            return None;
                        }
                        // exponents stay small for the boxes used here
                        apply_op(ArithOp::Pow, &a, Some(&b)).ok()?
                    }
                }
            }
        })
    }

    fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Const(_) => {}
            Expr::Abs(a) => a.vars(out),
            Expr::Bin(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn to_source(&self) -> SourceTerm {
        match self {
            Expr::Var(i) => SourceTerm::var(var_name(*i)),
            Expr::Const(k) => SourceTerm::int(*k),
            Expr::Abs(a) => SourceTerm::compound("abs", vec![a.to_source()]),
            Expr::Bin(op, a, b) => SourceTerm::compound(op.symbol(), vec![a.to_source(), b.to_source()]),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_source())
    }
}

pub fn var_name(i: usize) -> String {
    format!("X{i}")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub rel: Relation,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Constraint {
    pub fn new(lhs: Expr, rel: Relation, rhs: Expr) -> Constraint {
        Constraint { rel, lhs, rhs }
    }

    pub fn holds(&self, env: &[i64]) -> bool {
        match (self.lhs.eval(env), self.rhs.eval(env)) {
            (Some(a), Some(b)) => self.rel.holds(&a, &b),
            _ => false,
        }
    }

    /// Whether some variable occurs on both sides.
    pub fn shares_variable(&self) -> bool {
        let (mut l, mut r) = (BTreeSet::new(), BTreeSet::new());
        self.lhs.vars(&mut l);
        self.rhs.vars(&mut r);
        !l.is_disjoint(&r)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = SourceTerm::compound(self.rel.name(), vec![self.lhs.to_source(), self.rhs.to_source()]);
        write!(f, "{t}")
    }
}

/// Conjunction of constraints over variables `X0..`, each with a box domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    pub boxes: Vec<(i64, i64)>,
    pub constraints: Vec<Constraint>,
}

/// One integer per variable.
pub type Assignment = Vec<i64>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("grid of {0} assignments exceeds the limit of {MAX_GRID}")]
pub struct GridTooLarge(pub u128);

pub const MAX_GRID: u128 = 1_000_000;

impl Formula {
    pub fn var_count(&self) -> usize {
        self.boxes.len()
    }

    pub fn box_goals(&self) -> Vec<String> {
        self.boxes
            .iter()
            .enumerate()
            .map(|(i, (lo, hi))| format!("{} in {}", var_name(i), SourceTerm::compound("..", vec![SourceTerm::int(*lo), SourceTerm::int(*hi)])))
            .collect()
    }

    pub fn constraint_goals(&self) -> Vec<String> {
        self.constraints.iter().map(|c| c.to_string()).collect()
    }

    fn assignment_goals(&self, a: &[i64]) -> Vec<String> {
        a.iter().enumerate().map(|(i, v)| format!("{} = {v}", var_name(i))).collect()
    }

    fn label_goal(&self) -> String {
        let vars: Vec<String> = (0..self.var_count()).map(var_name).collect();
        format!("labeling([],[{}])", vars.join(","))
    }

    /// Boxes then constraints, as a query.
    pub fn to_query_text(&self) -> String {
        query_text([self.box_goals(), self.constraint_goals()].concat())
    }

    /// Like [`Formula::to_query_text`] but labels every variable at the end.
    pub fn to_labeling_query(&self) -> String {
        query_text([self.box_goals(), self.constraint_goals(), vec![self.label_goal()]].concat())
    }

    pub fn holds(&self, a: &[i64]) -> bool {
        a.iter().zip(&self.boxes).all(|(v, (lo, hi))| lo <= v && v <= hi)
            && self.constraints.iter().all(|c| c.holds(a))
    }

    pub fn shares_variable(&self) -> bool {
        self.constraints.iter().any(Constraint::shares_variable)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_query_text())
    }
}

fn query_text(goals: Vec<String>) -> String {
    if goals.is_empty() {
        return "true.".into();
    }
    format!("{}.", goals.join(", "))
}

/// Every assignment in the boxes that satisfies all constraints, in
/// lexicographic order.
pub fn brute_solutions(f: &Formula) -> Result<Vec<Assignment>, GridTooLarge> {
    let size: u128 = f.boxes.iter().map(|(lo, hi)| (hi - lo + 1).max(0) as u128).product();
    if size > MAX_GRID {
        return Err(GridTooLarge(size));
    }
    let mut out = Vec::new();
    if f.boxes.iter().any(|(lo, hi)| lo > hi) {
        return Ok(out);
    }
    let mut a: Vec<i64> = f.boxes.iter().map(|b| b.0).collect();
    loop {
        if f.constraints.iter().all(|c| c.holds(&a)) {
            out.push(a.clone());
        }
        // odometer, last variable fastest
        let mut i = a.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if a[i] < f.boxes[i].1 {
                a[i] += 1;
                break;
            }
            a[i] = f.boxes[i].0;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MismatchKind {
    /// Posting before and after binding disagree, or disagree with the oracle.
    Commutation,
    /// A solution fell outside a propagated domain.
    LostSolution,
    /// Labeling enumerated a different set than the oracle.
    Labeling,
    /// The solver raised an error on a well-formed formula.
    SolverError,
}

/// A failed check, with the queries needed to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub kind: MismatchKind,
    pub formula: String,
    pub detail: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on `{}`: {}", self.kind, self.formula, self.detail)
    }
}

fn first_answer(query: &str) -> Result<bool, EngineError> {
    let mut engine = Engine::new();
    let mut answers = engine.query(query)?;
    Ok(answers.next_answer()?.is_some())
}

/// Posts the formula then the assignment, and the assignment then the
/// formula, in two fresh engines. Both must agree with direct evaluation.
pub fn check_commutation(f: &Formula, a: &[i64]) -> Result<(), Mismatch> {
    let expected = f.holds(a);
    let (boxes, cons, vals) = (f.box_goals(), f.constraint_goals(), f.assignment_goals(a));
    let after = query_text([boxes.clone(), cons.clone(), vals.clone()].concat());
    let before = query_text([vals, boxes, cons].concat());
    let mismatch = |detail: String| Mismatch { kind: MismatchKind::Commutation, formula: f.to_query_text(), detail };
    let r1 = first_answer(&after);
    let r2 = first_answer(&before);
    match (r1, r2) {
        (Ok(x), Ok(y)) if x == expected && y == expected => Ok(()),
        (Ok(x), Ok(y)) => Err(mismatch(format!(
            "expected {}: `{after}` {}, `{before}` {}",
            verdict(expected),
            verdict(x),
            verdict(y)
        ))),
        (Err(e), _) | (_, Err(e)) => Err(Mismatch {
            kind: MismatchKind::SolverError,
            formula: f.to_query_text(),
            detail: e.to_string(),
        }),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "succeeds"
    } else {
        "fails"
    }
}

/// Propagation must keep every solution, and labeling must enumerate exactly
/// the oracle's solution set.
pub fn check_soundness(f: &Formula) -> Result<(), Mismatch> {
    let solutions = brute_solutions(f).map_err(|e| Mismatch {
        kind: MismatchKind::SolverError,
        formula: f.to_query_text(),
        detail: e.to_string(),
    })?;
    let err = |kind, detail: String| Mismatch { kind, formula: f.to_query_text(), detail };
    let solver_err = |e: EngineError| err(MismatchKind::SolverError, e.to_string());

    let mut engine = Engine::new();
    {
        let mut answers = engine.query(&f.to_query_text()).map_err(solver_err)?;
        match answers.next_answer().map_err(solver_err)? {
            None => {
                if let Some(s) = solutions.first() {
                    return Err(err(MismatchKind::LostSolution, format!("posting fails but {s:?} is a solution")));
                }
            }
            Some(_) => {
                let doms: Vec<_> = (0..f.var_count())
                    .map(|i| answers.variable(&var_name(i)).and_then(|t| answers.store().domain_of(t)))
                    .collect();
                for s in &solutions {
                    for (i, v) in s.iter().enumerate() {
                        let inside = doms[i].as_ref().is_none_or(|d| d.contains(&BigInt::from(*v)));
                        if !inside {
                            return Err(err(
                                MismatchKind::LostSolution,
                                format!("solution {s:?} outside {} in {}", var_name(i), doms[i].as_ref().unwrap()),
                            ));
                        }
                    }
                }
            }
        }
    }

    let q = query_text([f.box_goals(), f.constraint_goals(), vec![f.label_goal()]].concat());
    let mut labeled = Vec::new();
    let mut answers = engine.query(&q).map_err(solver_err)?;
    let names: Vec<String> = (0..f.var_count()).map(var_name).collect();
    while let Some(_answer) = answers.next_answer().map_err(solver_err)? {
        let mut a = Vec::with_capacity(names.len());
        for n in &names {
            let t = answers.variable(n).expect("query variable");
            let v = answers
                .store()
                .domain_of(t)
                .and_then(|d| d.as_singleton().and_then(|v| v.to_i64()))
                .ok_or_else(|| err(MismatchKind::Labeling, format!("{n} not bound by labeling")))?;
            a.push(v);
        }
        labeled.push(a);
    }
    labeled.sort();
    if labeled != solutions {
        return Err(err(
            MismatchKind::Labeling,
            format!("labeling gave {labeled:?}, oracle {solutions:?}"),
        ));
    }
    Ok(())
}

/// Size limits for [`random_formula`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub vars: usize,
    pub constraints: usize,
    pub depth: usize,
    /// Boxes are drawn inside this range.
    pub range: (i64, i64),
}

impl Default for Limits {
    fn default() -> Self {
        Limits { vars: 3, constraints: 3, depth: 2, range: (-4, 4) }
    }
}

const RELATIONS: [Relation; 6] = [
    Relation::Eq,
    Relation::Neq,
    Relation::Lt,
    Relation::Leq,
    Relation::Gt,
    Relation::Geq,
];

fn random_expr(rng: &mut ChaCha8Rng, nvars: usize, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.45) {
        return if rng.gen_bool(0.75) {
            Expr::Var(rng.gen_range(0..nvars))
        } else {
            Expr::Const(rng.gen_range(-3..=3))
        };
    }
    // nonlinear operators are weighted up
    let op = match rng.gen_range(0..12) {
        0 | 1 => BinOp::Add,
        2 => BinOp::Sub,
        3..=5 => BinOp::Mul,
        6..=8 => BinOp::Div,
        9 => BinOp::Pow,
        _ => return Expr::abs(random_expr(rng, nvars, depth - 1)),
    };
    let a = random_expr(rng, nvars, depth - 1);
    let b = random_expr(rng, nvars, depth - 1);
    Expr::bin(op, a, b)
}

/// Deterministic formula for `seed`.
pub fn random_formula(seed: u64, limits: Limits) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nvars = rng.gen_range(1..=limits.vars.max(1));
    let (lo, hi) = limits.range;
    let boxes = (0..nvars)
        .map(|_| {
            let a = rng.gen_range(lo..=hi);
            let b = rng.gen_range(lo..=hi);
            (a.min(b), a.max(b))
        })
        .collect();
    let n = rng.gen_range(1..=limits.constraints.max(1));
    let constraints = (0..n)
        .map(|_| {
            let rel = RELATIONS[rng.gen_range(0..RELATIONS.len())];
            let lhs = random_expr(&mut rng, nvars, limits.depth);
            let mut rhs = random_expr(&mut rng, nvars, limits.depth);
            if rng.gen_bool(0.25) {
                // force sharing: reuse a variable of the left side
                let mut vs = BTreeSet::new();
                lhs.vars(&mut vs);
                if let Some(&v) = vs.iter().next() {
                    rhs = if rng.gen_bool(0.5) { Expr::Var(v) } else { Expr::bin(BinOp::Mul, Expr::Var(v), rhs) };
                }
            }
            Constraint::new(lhs, rel, rhs)
        })
        .collect();
    Formula { boxes, constraints }
}

/// Up to `n` assignments inside the boxes: solutions first when there are
/// any, then random grid points.
pub fn sample_assignments(f: &Formula, seed: u64, n: usize) -> Vec<Assignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let solutions = brute_solutions(f).unwrap_or_default();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if k % 2 == 0 && !solutions.is_empty() {
            out.push(solutions[rng.gen_range(0..solutions.len())].clone());
        } else {
            out.push(f.boxes.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect());
        }
    }
    out
}

/// Outcome of running both checks over a range of seeds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateReport {
    pub formulas: usize,
    pub commutation_checks: usize,
    pub mismatches: Vec<(u64, Mismatch)>,
}

impl GateReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks one seed: commutation on `samples` assignments plus soundness.
pub fn check_seed(seed: u64, limits: Limits, samples: usize) -> Vec<Mismatch> {
    let f = random_formula(seed, limits);
    let mut out = Vec::new();
    for a in sample_assignments(&f, seed, samples) {
        if let Err(m) = check_commutation(&f, &a) {
            out.push(m);
        }
    }
    if let Err(m) = check_soundness(&f) {
        out.push(m);
    }
    out
}

/// Runs [`check_seed`] over `seeds` in parallel.
pub fn run_gate(seeds: std::ops::Range<u64>, limits: Limits, samples: usize) -> GateReport {
    let formulas = (seeds.end - seeds.start) as usize;
    let mut mismatches: Vec<(u64, Mismatch)> = seeds
        .into_par_iter()
        .flat_map_iter(|seed| check_seed(seed, limits, samples).into_iter().map(move |m| (seed, m)))
        .collect();
    mismatches.sort_by_key(|(s, _)| *s);
    GateReport { formulas, commutation_checks: formulas * samples, mismatches }
}
