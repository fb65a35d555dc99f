//! Constraint posting, decomposition into primitive propagators, and the
//! episode scheduler.
//!
//! An episode is the propagation triggered by one external event (a post, a
//! binding of a constrained variable, a labeling decision). Within an episode
//! a variable whose domain is still infinite wakes its watchers only the first
//! time it changes; later changes to it are applied but not propagated. Changes
//! to finite domains always propagate and strictly shrink a finite set, so
//! every episode ends.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::domain::{image, quotient_hull, Cardinality, Domain, Ext, ImageOp};
use crate::terms::{Node, Store, TermId, TermView, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropId(pub(crate) u32);

impl PropId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A propagator argument.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Var(VarId),
    Const(BigInt),
}

/// Primitive relations; `z` is always the last operand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropKind {
    /// x + y = z
    Add(Operand, Operand, Operand),
    /// x * y = z
    Mul(Operand, Operand, Operand),
    /// x / y = z, truncating, y != 0
    DivT(Operand, Operand, Operand),
    /// |x| = z
    Abs(Operand, Operand),
    /// x ^ y = z, y >= 0
    Pow(Operand, Operand, Operand),
    /// x <= y + c
    Leq(Operand, Operand, BigInt),
    /// x != y + c
    Neq(Operand, Operand, BigInt),
}

impl PropKind {
    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            PropKind::Add(x, y, z) | PropKind::Mul(x, y, z) | PropKind::DivT(x, y, z) | PropKind::Pow(x, y, z) => {
                vec![x, y, z]
            }
            PropKind::Abs(x, z) => vec![x, z],
            PropKind::Leq(x, y, _) | PropKind::Neq(x, y, _) => vec![x, y],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    pub kind: PropKind,
    pub(crate) entailed: bool,
}

impl Propagator {
    pub fn is_entailed(&self) -> bool {
        self.entailed
    }
}

/// Per-episode scheduling state. Not trailed: it is empty between episodes.
#[derive(Clone, Debug, Default)]
pub(crate) struct Scheduler {
    queue: VecDeque<PropId>,
    queued: HashSet<PropId>,
    spent: HashSet<VarId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Neq,
    Lt,
    Leq,
    Gt,
    Geq,
}

impl Relation {
    pub fn from_name(name: &str) -> Option<Relation> {
        Some(match name {
            "#=" => Relation::Eq,
            "#\\=" => Relation::Neq,
            "#<" => Relation::Lt,
            "#=<" => Relation::Leq,
            "#>" => Relation::Gt,
            "#>=" => Relation::Geq,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::Eq => "#=",
            Relation::Neq => "#\\=",
            Relation::Lt => "#<",
            Relation::Leq => "#=<",
            Relation::Gt => "#>",
            Relation::Geq => "#>=",
        }
    }

    pub fn holds(self, a: &BigInt, b: &BigInt) -> bool {
        match self {
            Relation::Eq => a == b,
            Relation::Neq => a != b,
            Relation::Lt => a < b,
            Relation::Leq => a <= b,
            Relation::Gt => a > b,
            Relation::Geq => a >= b,
        }
    }
}

/// Outcome of intersecting a variable's domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Narrowed {
    Changed,
    Unchanged,
    Wiped,
}

/// Arithmetic operators of constraint and `is/2` expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Abs,
    Neg,
}

impl ArithOp {
    pub fn from_functor(name: &str, arity: usize) -> Option<ArithOp> {
        Some(match (name, arity) {
            ("+", 2) => ArithOp::Add,
            ("-", 2) => ArithOp::Sub,
            ("*", 2) => ArithOp::Mul,
            ("/", 2) => ArithOp::Div,
            ("^", 2) => ArithOp::Pow,
            ("abs", 1) => ArithOp::Abs,
            ("-", 1) => ArithOp::Neg,
            _ => return None,
        })
    }
}

/// Why an integer operation has no value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Undefined {
    ZeroDivisor,
    NegativeExponent,
    /// The exact result does not fit in memory (exponent beyond `u32`).
    TooLarge,
}

/// Exact integer semantics shared by `is/2`, the ground fast path and entailment.
pub fn apply_op(op: ArithOp, a: &BigInt, b: Option<&BigInt>) -> Result<BigInt, Undefined> {
    let b = || b.expect("binary operator");
    Ok(match op {
        ArithOp::Add => a + b(),
        ArithOp::Sub => a - b(),
        ArithOp::Mul => a * b(),
        ArithOp::Div => {
            if b().is_zero() {
                return Err(Undefined::ZeroDivisor);
            }
            a / b()
        }
        ArithOp::Pow => {
            let e = b();
            if e.is_negative() {
                return Err(Undefined::NegativeExponent);
            }
            if a.is_zero() {
                if e.is_zero() { BigInt::one() } else { BigInt::zero() }
            } else if a.is_one() {
                BigInt::one()
            } else if (-a).is_one() {
                if e.is_odd() { a.clone() } else { BigInt::one() }
            } else {
                let e = e.to_u32().ok_or(Undefined::TooLarge)?;
                a.pow(e)
            }
        }
        ArithOp::Abs => a.abs(),
        ArithOp::Neg => -a,
    })
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("arguments are not sufficiently instantiated")]
    Instantiation,
    #[error("type_error(evaluable, {0})")]
    NotEvaluable(String),
    #[error("{0:?}")]
    Undefined(Undefined),
}

/// Errors from posting a constraint. Inconsistency is not an error.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PostError {
    #[error("type_error(evaluable, {0})")]
    NotEvaluable(String),
    #[error("resource_error(integer_size)")]
    TooLarge,
}

/// Result of compiling an expression: an operand, or an expression with no
/// value (so the relation cannot hold).
enum Compiled {
    Value(Operand),
    Undefined,
}

impl Store {
    // ---- expression evaluation -------------------------------------------

    /// Evaluates a ground arithmetic expression with arbitrary precision.
    pub fn eval_ground(&self, t: TermId) -> Result<BigInt, ArithError> {
        if !self.is_acyclic(t) {
            return Err(ArithError::NotEvaluable("cyclic term".into()));
        }
        self.eval_acyclic(t)
    }

    fn eval_acyclic(&self, t: TermId) -> Result<BigInt, ArithError> {
        match self.view(t) {
            TermView::Int(n) => Ok(n.clone()),
            TermView::Var(_) => Err(ArithError::Instantiation),
            TermView::Atom(a) => Err(ArithError::NotEvaluable(format!("{a}/0"))),
            TermView::Compound(f, args) => {
                let op = ArithOp::from_functor(f, args.len())
                    .ok_or_else(|| ArithError::NotEvaluable(format!("{f}/{}", args.len())))?;
                let args = args.to_vec();
                let a = self.eval_acyclic(args[0])?;
                let b = match args.get(1) {
                    Some(&b) => Some(self.eval_acyclic(b)?),
                    None => None,
                };
                apply_op(op, &a, b.as_ref()).map_err(ArithError::Undefined)
            }
        }
    }

    /// False for rational trees (possible under occurs-check mode `false`).
    fn is_acyclic(&self, t: TermId) -> bool {
        // iterative DFS; `true` marks a node whose subtree is finished
        let mut state: HashMap<TermId, bool> = HashMap::new();
        let mut stack = vec![(self.deref(t), false)];
        while let Some((t, exiting)) = stack.pop() {
            if exiting {
                state.insert(t, true);
                continue;
            }
            match state.get(&t) {
                Some(true) => continue,
                Some(false) => return false,
                None => {}
            }
            if let TermView::Compound(_, args) = self.view(t) {
                state.insert(t, false);
                stack.push((t, true));
                for &a in args.iter() {
                    let a = self.deref(a);
                    match state.get(&a) {
                        Some(false) => return false,
                        Some(true) => {}
                        None => stack.push((a, false)),
                    }
                }
            }
        }
        true
    }

    fn is_ground(&self, t: TermId) -> bool {
        let mut stack = vec![t];
        let mut seen = HashSet::new();
        while let Some(t) = stack.pop() {
            if !seen.insert(self.deref(t)) {
                continue;
            }
            match self.view(t) {
                TermView::Var(_) => return false,
                TermView::Compound(_, args) => stack.extend_from_slice(args),
                _ => {}
            }
        }
        true
    }

    // ---- domains ----------------------------------------------------------

    /// Current domain of a term: singleton for integers, the attribute for
    /// constrained variables, `None` otherwise.
    pub fn domain_of(&self, t: TermId) -> Option<Domain> {
        match self.node(self.deref(t)) {
            Node::Int(n) => Some(Domain::singleton(n.clone())),
            Node::Ref(v) => self.vars[v.index()].dom.clone(),
            _ => None,
        }
    }

    pub fn var_domain(&self, v: VarId) -> Option<Domain> {
        self.domain_of(self.var_cell(v))
    }

    fn operand_domain(&self, op: &Operand) -> Domain {
        match op {
            Operand::Const(k) => Domain::singleton(k.clone()),
            Operand::Var(v) => self.var_domain(*v).unwrap_or_else(Domain::full),
        }
    }

    /// Gives an unconstrained variable the domain `inf..sup`.
    pub(crate) fn ensure_constrained(&mut self, v: VarId) {
        if self.vars[v.index()].dom.is_none() {
            self.set_domain(v, Domain::full());
        }
        self.clear_fresh(v);
    }

    /// Intersects the domain of `op` with `d`, trailing the change, binding
    /// the variable when a singleton remains and scheduling watchers under
    /// the once-only rule.
    pub fn narrow(&mut self, op: &Operand, d: &Domain) -> Narrowed {
        let v = match op {
            Operand::Const(k) => {
                return if d.contains(k) { Narrowed::Unchanged } else { Narrowed::Wiped };
            }
            Operand::Var(v) => *v,
        };
        let cell = self.deref(self.var_cell(v));
        let w = match self.node(cell) {
            Node::Int(n) => {
                return if d.contains(n) { Narrowed::Unchanged } else { Narrowed::Wiped };
            }
            Node::Ref(w) => *w,
            _ => return Narrowed::Wiped,
        };
        let current = self.vars[w.index()].dom.clone().unwrap_or_else(Domain::full);
        let next = current.intersect(d);
        if next.is_empty() {
            return Narrowed::Wiped;
        }
        if next == current {
            return Narrowed::Unchanged;
        }
        debug_assert!(next.is_subset(&current), "narrowing is monotone");
        let finite = next.is_finite();
        let single = next.as_singleton().cloned();
        self.set_domain(w, next);
        if let Some(n) = single {
            let c = self.int(n);
            self.bind(w, c);
        }
        self.schedule(w, finite);
        Narrowed::Changed
    }

    fn schedule(&mut self, v: VarId, finite: bool) {
        if !finite && !self.sched.spent.insert(v) {
            return;
        }
        let watchers = self.vars[v.index()].watchers.clone();
        for p in watchers {
            self.enqueue(p);
        }
    }

    fn enqueue(&mut self, p: PropId) {
        if !self.props[p.index()].entailed && self.sched.queued.insert(p) {
            self.sched.queue.push_back(p);
        }
    }

    /// Runs propagators until the queue is empty or a domain wipes out.
    pub fn run_episode(&mut self, seeds: &[PropId]) -> bool {
        self.stats.episodes += 1;
        for &p in seeds {
            self.enqueue(p);
        }
        let mut runs = 0u64;
        let mut ok = true;
        while let Some(p) = self.sched.queue.pop_front() {
            self.sched.queued.remove(&p);
            if self.props[p.index()].entailed {
                continue;
            }
            runs += 1;
            if !self.run_propagator(p) {
                ok = false;
                break;
            }
        }
        if !ok {
            self.sched.queue.clear();
            self.sched.queued.clear();
        }
        self.sched.spent.clear();
        self.stats.propagator_runs += runs;
        self.stats.max_episode_runs = self.stats.max_episode_runs.max(runs);
        ok
    }

    // ---- binding hooks ----------------------------------------------------

    /// Binds the constrained variable `v` to `n`.
    pub(crate) fn on_bind_int(&mut self, v: VarId, n: BigInt) -> bool {
        let dom = self.vars[v.index()].dom.as_ref().expect("constrained");
        if !dom.contains(&n) {
            return false;
        }
        let cell = self.int(n);
        self.bind(v, cell);
        let seeds = self.vars[v.index()].watchers.clone();
        self.run_episode(&seeds)
    }

    /// Aliases constrained variable `from` to constrained variable `to`.
    pub(crate) fn on_bind_var(&mut self, from: VarId, to: VarId) -> bool {
        let a = self.vars[from.index()].dom.clone().expect("constrained");
        let b = self.vars[to.index()].dom.clone().expect("constrained");
        let merged = a.intersect(&b);
        if merged.is_empty() {
            return false;
        }
        let cell = self.var_cell(to);
        self.bind(from, cell);
        for p in self.vars[from.index()].watchers.clone() {
            self.add_watcher(to, p);
        }
        if merged != b {
            let single = merged.as_singleton().cloned();
            self.set_domain(to, merged);
            if let Some(n) = single {
                let c = self.int(n);
                self.bind(to, c);
            }
        }
        let seeds = self.vars[to.index()].watchers.clone();
        self.run_episode(&seeds)
    }

    /// `X in D`: intersects the domain of `t` with `dom`.
    pub fn post_domain(&mut self, t: TermId, dom: &Domain) -> bool {
        match self.view(t) {
            TermView::Int(n) => dom.contains(n),
            TermView::Var(v) => {
                self.ensure_constrained(v);
                if self.narrow(&Operand::Var(v), dom) == Narrowed::Wiped {
                    self.sched.queue.clear();
                    self.sched.queued.clear();
                    self.sched.spent.clear();
                    return false;
                }
                self.run_episode(&[])
            }
            _ => false,
        }
    }

    // ---- posting ----------------------------------------------------------

    fn add_propagator(&mut self, kind: PropKind) -> PropId {
        let id = PropId(self.props.len() as u32);
        let vars: Vec<VarId> = kind
            .operands()
            .into_iter()
            .filter_map(|o| match o {
                Operand::Var(v) => Some(*v),
                Operand::Const(_) => None,
            })
            .collect();
        self.props.push(Propagator { kind, entailed: false });
        self.stats.propagators_created += 1;
        let mut seen = HashSet::new();
        for v in vars {
            if seen.insert(v) {
                self.add_watcher(v, id);
            }
        }
        id
    }

    fn compile(&mut self, t: TermId, created: &mut Vec<PropId>) -> Result<Compiled, PostError> {
        let t = self.deref(t);
        let (op, args) = match self.node(t) {
            Node::Int(n) => return Ok(Compiled::Value(Operand::Const(n.clone()))),
            Node::Ref(v) => {
                let v = *v;
                self.ensure_constrained(v);
                return Ok(Compiled::Value(Operand::Var(v)));
            }
            Node::Atom(a) => return Err(PostError::NotEvaluable(format!("{a}/0"))),
            Node::Struct(f, args) => {
                let op = ArithOp::from_functor(f, args.len())
                    .ok_or_else(|| PostError::NotEvaluable(format!("{f}/{}", args.len())))?;
                (op, args.to_vec())
            }
        };
        let mut operands = Vec::with_capacity(args.len());
        for a in args {
            match self.compile(a, created)? {
                Compiled::Value(o) => operands.push(o),
                Compiled::Undefined => return Ok(Compiled::Undefined),
            }
        }
        if let [Operand::Const(a), rest @ ..] = operands.as_slice() {
            let b = match rest {
                [Operand::Const(b)] => Some(Some(b)),
                [] => Some(None),
                _ => None,
            };
            if let Some(b) = b {
                return match apply_op(op, a, b) {
                    Ok(n) => Ok(Compiled::Value(Operand::Const(n))),
                    Err(Undefined::TooLarge) => Err(PostError::TooLarge),
                    Err(_) => Ok(Compiled::Undefined),
                };
            }
        }
        let z = self.new_var();
        let z = self.unbound_var(z).expect("new variable");
        self.ensure_constrained(z);
        let zo = Operand::Var(z);
        let mut it = operands.into_iter();
        let x = it.next().expect("first operand");
        let kind = match op {
            ArithOp::Add => PropKind::Add(x, it.next().expect("binary"), zo.clone()),
            ArithOp::Sub => PropKind::Add(zo.clone(), it.next().expect("binary"), x),
            ArithOp::Neg => PropKind::Add(zo.clone(), x, Operand::Const(BigInt::zero())),
            ArithOp::Mul => PropKind::Mul(x, it.next().expect("binary"), zo.clone()),
            ArithOp::Abs => PropKind::Abs(x, zo.clone()),
            ArithOp::Div => {
                let y = it.next().expect("binary");
                if let Operand::Const(k) = &y {
                    if k.is_zero() {
                        return Ok(Compiled::Undefined);
                    }
                }
                if let Operand::Var(v) = y {
                    let nonzero = Domain::singleton(BigInt::zero()).complement();
                    if self.narrow(&Operand::Var(v), &nonzero) == Narrowed::Wiped {
                        return Ok(Compiled::Undefined);
                    }
                }
                PropKind::DivT(x, y, zo.clone())
            }
            ArithOp::Pow => {
                let y = it.next().expect("binary");
                let nonneg = Domain::interval(Ext::fin(0), Ext::Sup);
                if self.narrow(&y, &nonneg) == Narrowed::Wiped {
                    return Ok(Compiled::Undefined);
                }
                PropKind::Pow(x, y, zo.clone())
            }
        };
        created.push(self.add_propagator(kind));
        Ok(Compiled::Value(zo))
    }

    /// Splits `e + k` / `e - k` / `k + e` with ground `k` into `(e, k)`.
    fn linear_side(&self, t: TermId) -> (TermId, BigInt) {
        if let TermView::Compound(f, args) = self.view(t) {
            if args.len() == 2 && (f == "+" || f == "-") {
                let (a, b) = (args[0], args[1]);
                if self.is_ground(b) {
                    if let Ok(k) = self.eval_ground(b) {
                        return (a, if f == "+" { k } else { -k });
                    }
                }
                if f == "+" && self.is_ground(a) {
                    if let Ok(k) = self.eval_ground(a) {
                        return (b, k);
                    }
                }
            }
        }
        (t, BigInt::zero())
    }

    /// Posts `lhs rel rhs`. `Ok(false)` means the store became inconsistent;
    /// take a mark beforehand to backtrack.
    pub fn post_relation(&mut self, rel: Relation, lhs: TermId, rhs: TermId) -> Result<bool, PostError> {
        for side in [lhs, rhs] {
            if !self.is_acyclic(side) {
                return Err(PostError::NotEvaluable("cyclic term".into()));
            }
        }
        // Ground and moded cases are decided without creating propagators.
        let lg = self.is_ground(lhs);
        let rg = self.is_ground(rhs);
        if lg && rg {
            return match (self.eval_ground(lhs), self.eval_ground(rhs)) {
                (Ok(a), Ok(b)) => Ok(rel.holds(&a, &b)),
                (Err(ArithError::NotEvaluable(s)), _) | (_, Err(ArithError::NotEvaluable(s))) => {
                    Err(PostError::NotEvaluable(s))
                }
                (Err(ArithError::Undefined(Undefined::TooLarge)), _)
                | (_, Err(ArithError::Undefined(Undefined::TooLarge))) => Err(PostError::TooLarge),
                _ => Ok(false),
            };
        }
        if rel == Relation::Eq {
            for (var_side, ground_side, ground) in [(lhs, rhs, rg), (rhs, lhs, lg)] {
                if !ground {
                    continue;
                }
                if let Some(v) = self.unbound_var(var_side) {
                    if !self.is_constrained(v) {
                        return match self.eval_ground(ground_side) {
                            Ok(n) => {
                                let c = self.int(n);
                                Ok(self.unify(var_side, c).unwrap_or(false))
                            }
                            Err(ArithError::NotEvaluable(s)) => Err(PostError::NotEvaluable(s)),
                            Err(ArithError::Undefined(Undefined::TooLarge)) => Err(PostError::TooLarge),
                            Err(_) => Ok(false),
                        };
                    }
                }
            }
        }

        let mut created = Vec::new();
        let result = self.post_general(rel, lhs, rhs, &mut created);
        if !matches!(result, Ok(true)) {
            self.sched.queue.clear();
            self.sched.queued.clear();
            self.sched.spent.clear();
        }
        result
    }

    fn post_general(
        &mut self,
        rel: Relation,
        lhs: TermId,
        rhs: TermId,
        created: &mut Vec<PropId>,
    ) -> Result<bool, PostError> {
        if rel == Relation::Eq {
            let (Compiled::Value(l), Compiled::Value(r)) = (self.compile(lhs, created)?, self.compile(rhs, created)?)
            else {
                return Ok(false);
            };
            if !self.run_episode(created) {
                return Ok(false);
            }
            return Ok(match (l, r) {
                (Operand::Const(a), Operand::Const(b)) => a == b,
                (Operand::Var(v), Operand::Const(k)) | (Operand::Const(k), Operand::Var(v)) => {
                    let c = self.int(k);
                    self.unify(self.var_cell(v), c).unwrap_or(false)
                }
                (Operand::Var(a), Operand::Var(b)) => self.unify(self.var_cell(a), self.var_cell(b)).unwrap_or(false),
            });
        }
        let (lt, lk) = self.linear_side(lhs);
        let (rt, rk) = self.linear_side(rhs);
        let (Compiled::Value(l), Compiled::Value(r)) = (self.compile(lt, created)?, self.compile(rt, created)?) else {
            return Ok(false);
        };
        // l + lk  REL  r + rk
        let offset = &rk - &lk;
        let kind = match rel {
            Relation::Leq => PropKind::Leq(l, r, offset),
            Relation::Lt => PropKind::Leq(l, r, offset - 1),
            Relation::Geq => PropKind::Leq(r, l, -offset),
            Relation::Gt => PropKind::Leq(r, l, -offset - 1),
            Relation::Neq => PropKind::Neq(l, r, offset),
            Relation::Eq => unreachable!("handled above"),
        };
        if let (Operand::Const(a), Operand::Const(b)) = match &kind {
            PropKind::Leq(a, b, _) | PropKind::Neq(a, b, _) => (a, b),
            _ => unreachable!(),
        } {
            let holds = match &kind {
                PropKind::Leq(_, _, c) => a <= &(b + c),
                PropKind::Neq(_, _, c) => a != &(b + c),
                _ => unreachable!(),
            };
            if !holds {
                return Ok(false);
            }
            return Ok(self.run_episode(created));
        }
        created.push(self.add_propagator(kind));
        Ok(self.run_episode(created))
    }

    // ---- propagator rules -------------------------------------------------

    fn entail(&mut self, p: PropId) {
        if !self.props[p.index()].entailed {
            self.props[p.index()].entailed = true;
            self.log_entail(p);
        }
    }

    /// Narrows and reports whether the store stays consistent.
    fn cut(&mut self, op: &Operand, d: Domain) -> bool {
        self.narrow(op, &d) != Narrowed::Wiped
    }

    fn run_propagator(&mut self, p: PropId) -> bool {
        let kind = self.props[p.index()].kind.clone();
        let ok = match &kind {
            PropKind::Add(x, y, z) => self.prop_add(x, y, z),
            PropKind::Mul(x, y, z) => self.prop_mul(x, y, z),
            PropKind::DivT(x, y, z) => self.prop_div(x, y, z),
            PropKind::Abs(x, z) => self.prop_abs(x, z),
            PropKind::Pow(x, y, z) => self.prop_pow(x, y, z),
            PropKind::Leq(x, y, c) => return self.prop_leq(p, x, y, c),
            PropKind::Neq(x, y, c) => return self.prop_neq(p, x, y, c),
        };
        if !ok {
            return false;
        }
        // Functional propagators are entailed once the output is fixed and
        // the forward image of the inputs is exactly that value.
        let (op, x, y, z) = match &kind {
            PropKind::Add(x, y, z) => (ImageOp::Add, x, Some(y), z),
            PropKind::Mul(x, y, z) => (ImageOp::Mul, x, Some(y), z),
            PropKind::DivT(x, y, z) => (ImageOp::DivT, x, Some(y), z),
            PropKind::Pow(x, y, z) => (ImageOp::Pow, x, Some(y), z),
            PropKind::Abs(x, z) => (ImageOp::Abs, x, None, z),
            _ => unreachable!(),
        };
        let dz = self.operand_domain(z);
        if let Some(k) = dz.as_singleton() {
            let dx = self.operand_domain(x);
            let entailed = match y {
                // {-r, r} squares to r^2 though its hull does not
                Some(y) if op == ImageOp::Mul && self.same_var(x, y) => {
                    dx.cardinality() <= Cardinality::Finite(2u32.into())
                        && dx.values().is_some_and(|vs| vs.iter().all(|v| &(v * v) == k))
                }
                _ => {
                    let dy = y.map(|y| self.operand_domain(y));
                    image(op, &dx, dy.as_ref()) == dz
                }
            };
            if entailed {
                self.entail(p);
            }
        }
        true
    }

    fn prop_add(&mut self, x: &Operand, y: &Operand, z: &Operand) -> bool {
        let (dx, dy) = (self.operand_domain(x), self.operand_domain(y));
        if !self.cut(z, image(ImageOp::Add, &dx, Some(&dy))) {
            return false;
        }
        let dz = self.operand_domain(z);
        if !self.cut(x, image(ImageOp::Sub, &dz, Some(&dy))) {
            return false;
        }
        let dx = self.operand_domain(x);
        self.cut(y, image(ImageOp::Sub, &dz, Some(&dx)))
    }

    fn prop_mul(&mut self, x: &Operand, y: &Operand, z: &Operand) -> bool {
        if self.same_var(x, y) {
            return self.prop_square(x, z);
        }
        let (dx, dy) = (self.operand_domain(x), self.operand_domain(y));
        if !self.cut(z, image(ImageOp::Mul, &dx, Some(&dy))) {
            return false;
        }
        let dz = self.operand_domain(z);
        let zero = BigInt::zero();
        if !dz.contains(&zero) {
            let nonzero = Domain::singleton(zero.clone()).complement();
            if !self.cut(x, nonzero.clone()) || !self.cut(y, nonzero) {
                return false;
            }
        }
        let dy = self.operand_domain(y);
        if !(dz.contains(&zero) && dy.contains(&zero)) {
            let Some(h) = quotient_hull(&dz, &dy) else { return false };
            if !self.cut(x, h) {
                return false;
            }
        }
        let dx = self.operand_domain(x);
        let dz = self.operand_domain(z);
        if !(dz.contains(&zero) && dx.contains(&zero)) {
            let Some(h) = quotient_hull(&dz, &dx) else { return false };
            if !self.cut(y, h) {
                return false;
            }
        }
        true
    }

    fn same_var(&self, a: &Operand, b: &Operand) -> bool {
        match (a, b) {
            (Operand::Var(a), Operand::Var(b)) => self.deref(self.var_cell(*a)) == self.deref(self.var_cell(*b)),
            _ => false,
        }
    }

    /// `x*x = z`: the same rules as `x^2 = z`.
    fn prop_square(&mut self, x: &Operand, z: &Operand) -> bool {
        self.prop_pow(x, &Operand::Const(BigInt::from(2)), z)
    }

    fn prop_div(&mut self, x: &Operand, y: &Operand, z: &Operand) -> bool {
        let nonzero = Domain::singleton(BigInt::zero()).complement();
        if !self.cut(y, nonzero) {
            return false;
        }
        let (dx, dy) = (self.operand_domain(x), self.operand_domain(y));
        if !self.cut(z, image(ImageOp::DivT, &dx, Some(&dy))) {
            return false;
        }
        let dz = self.operand_domain(z);
        if !self.cut(x, div_dividend_bounds(&dz, &dy)) {
            return false;
        }
        let dx = self.operand_domain(x);
        self.cut(y, div_divisor_bounds(&dx, &dz))
    }

    fn prop_abs(&mut self, x: &Operand, z: &Operand) -> bool {
        let dx = self.operand_domain(x);
        if !self.cut(z, image(ImageOp::Abs, &dx, None)) {
            return false;
        }
        let (zl, zh) = self.operand_domain(z).bounds();
        let zl = zl.max(Ext::fin(0));
        let both = Domain::from_intervals([(zh.neg(), zl.neg()), (zl, zh)]);
        self.cut(x, both)
    }

    fn prop_pow(&mut self, x: &Operand, y: &Operand, z: &Operand) -> bool {
        if !self.cut(y, Domain::interval(Ext::fin(0), Ext::Sup)) {
            return false;
        }
        let (dx, dy) = (self.operand_domain(x), self.operand_domain(y));
        if !self.cut(z, image(ImageOp::Pow, &dx, Some(&dy))) {
            return false;
        }
        let Some(e) = dy.as_singleton().and_then(|e| e.to_u32()) else {
            return true;
        };
        if e == 0 {
            return true;
        }
        let (zl, zh) = self.operand_domain(z).bounds();
        let roots = if e % 2 == 1 {
            let lo = match &zl {
                Ext::Fin(n) => Ext::Fin(ceil_root(n, e)),
                other => other.clone(),
            };
            let hi = match &zh {
                Ext::Fin(n) => Ext::Fin(floor_root(n, e)),
                other => other.clone(),
            };
            Domain::interval(lo, hi)
        } else {
            let hi = match &zh {
                Ext::Fin(n) if n.is_negative() => return false,
                Ext::Fin(n) => Ext::Fin(floor_root(n, e)),
                other => other.clone(),
            };
            let lo = match &zl {
                Ext::Fin(n) if n.is_positive() => Ext::Fin(ceil_root(n, e)),
                _ => Ext::fin(0),
            };
            Domain::from_intervals([(hi.neg(), lo.neg()), (lo, hi)])
        };
        self.cut(x, roots)
    }

    fn prop_leq(&mut self, p: PropId, x: &Operand, y: &Operand, c: &BigInt) -> bool {
        let yh = self.operand_domain(y).upper();
        if !self.cut(x, Domain::interval(Ext::Inf, yh.add_int(c))) {
            return false;
        }
        let xl = self.operand_domain(x).lower();
        if !self.cut(y, Domain::interval(xl.add_int(&-c), Ext::Sup)) {
            return false;
        }
        let xh = self.operand_domain(x).upper();
        let yl = self.operand_domain(y).lower();
        if xh.is_finite() && yl.is_finite() && xh <= yl.add_int(c) {
            self.entail(p);
        }
        true
    }

    fn prop_neq(&mut self, p: PropId, x: &Operand, y: &Operand, c: &BigInt) -> bool {
        let dy = self.operand_domain(y);
        if let Some(k) = dy.as_singleton() {
            let dx = self.operand_domain(x).remove_value(&(k + c));
            if !self.cut(x, dx) {
                return false;
            }
        }
        let dx = self.operand_domain(x);
        if let Some(k) = dx.as_singleton() {
            let dy = self.operand_domain(y).remove_value(&(k - c));
            if !self.cut(y, dy) {
                return false;
            }
        }
        let (dx, dy) = (self.operand_domain(x), self.operand_domain(y));
        let (xl, xh) = dx.bounds();
        let (yl, yh) = dy.bounds();
        let disjoint = (xh.is_finite() && yl.is_finite() && xh < yl.add_int(c))
            || (xl.is_finite() && yh.is_finite() && xl > yh.add_int(c));
        let excluded = dy.as_singleton().is_some_and(|k| !dx.contains(&(k + c)))
            || dx.as_singleton().is_some_and(|k| !dy.contains(&(k - c)));
        if disjoint || excluded || (dx.as_singleton().is_some() && dy.as_singleton().is_some()) {
            self.entail(p);
        }
        true
    }

    // ---- inspection -------------------------------------------------------

    pub fn propagator_count(&self) -> usize {
        self.props.len()
    }

    pub fn propagator(&self, p: PropId) -> &Propagator {
        &self.props[p.index()]
    }

    pub fn active_propagators(&self) -> Vec<PropId> {
        (0..self.props.len() as u32)
            .map(PropId)
            .filter(|p| !self.props[p.index()].entailed)
            .collect()
    }

    /// Unbound variables a propagator currently mentions.
    pub fn propagator_vars(&self, p: PropId) -> Vec<VarId> {
        let mut out = Vec::new();
        for o in self.props[p.index()].kind.operands() {
            if let Operand::Var(v) = o {
                if let Some(w) = self.unbound_var(self.var_cell(*v)) {
                    if !out.contains(&w) {
                        out.push(w);
                    }
                }
            }
        }
        out
    }

    /// Runs every active propagator once outside the scheduler and reports
    /// whether any domain would change. The store is left untouched.
    pub fn is_quiescent(&mut self) -> bool {
        let before: Vec<_> = self.vars.iter().map(|s| (s.binding, s.dom.clone())).collect();
        let mark = self.mark();
        let mut stable = true;
        for p in self.active_propagators() {
            if !self.run_propagator(p) {
                stable = false;
                break;
            }
        }
        if stable {
            stable = self
                .vars
                .iter()
                .take(before.len())
                .zip(&before)
                .all(|(s, (b, d))| s.binding == *b && s.dom == *d);
        }
        self.undo_to(mark);
        self.sched.queue.clear();
        self.sched.queued.clear();
        self.sched.spent.clear();
        stable
    }

    /// Source-syntax text of a pending propagator.
    pub fn describe_propagator(&self, p: PropId, names: &dyn Fn(VarId) -> Option<String>) -> String {
        let show = |o: &Operand| -> String {
            match o {
                Operand::Const(k) => k.to_string(),
                Operand::Var(v) => self.render(self.var_cell(*v), 5, names).to_string(),
            }
        };
        let offset = |s: &mut String, c: &BigInt| {
            if c.is_positive() {
                s.push_str(&format!("+{c}"));
            } else if c.is_negative() {
                s.push_str(&format!("-{}", -c));
            }
        };
        let mut s;
        match &self.props[p.index()].kind {
            PropKind::Add(x, y, z) => s = format!("{}+{}#={}", show(x), paren_neg(show(y)), show(z)),
            PropKind::Mul(x, y, z) => s = format!("{}*{}#={}", show(x), paren_neg(show(y)), show(z)),
            PropKind::DivT(x, y, z) => s = format!("{}/{}#={}", show(x), paren_neg(show(y)), show(z)),
            PropKind::Pow(x, y, z) => s = format!("{}^{}#={}", paren_neg(show(x)), paren_neg(show(y)), show(z)),
            PropKind::Abs(x, z) => s = format!("abs({})#={}", show(x), show(z)),
            PropKind::Leq(x, y, c) => {
                if *c == -BigInt::one() {
                    s = format!("{}#<{}", show(x), paren_neg(show(y)));
                } else {
                    s = format!("{}#=<{}", show(x), paren_neg(show(y)));
                    offset(&mut s, c);
                }
            }
            PropKind::Neq(x, y, c) => {
                s = format!("{}#\\={}", show(x), paren_neg(show(y)));
                offset(&mut s, c);
            }
        }
        s
    }
}

fn paren_neg(s: String) -> String {
    if s.starts_with('-') {
        format!(" {s}")
    } else {
        s
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn floor_root(n: &BigInt, e: u32) -> BigInt {
    let r = n.nth_root(e);
    if n.is_negative() && r.pow(e) != *n {
        r - 1
    } else {
        r
    }
}

fn ceil_root(n: &BigInt, e: u32) -> BigInt {
    let r = n.nth_root(e);
    if !n.is_negative() && r.pow(e) != *n {
        r + 1
    } else {
        r
    }
}

/// Bounds on `x` given `trunc(x / y) = z`.
fn div_dividend_bounds(dz: &Domain, dy: &Domain) -> Domain {
    let (zl, zh) = dz.bounds();
    let pos = dy.intersect(&Domain::interval(Ext::fin(1), Ext::Sup));
    let neg = dy.intersect(&Domain::interval(Ext::Inf, Ext::fin(-1)));
    let mut out = Domain::empty();
    if !pos.is_empty() {
        let (yl, yh) = pos.bounds();
        let (lo, hi) = dividend_bounds_pos(&zl, &zh, yl.as_fin().expect("finite"), &yh);
        out = out.union(&Domain::interval(lo, hi));
    }
    if !neg.is_empty() {
        // trunc(x / y) = trunc(-x / -y)
        let (yl, yh) = neg.bounds();
        let (lo, hi) = dividend_bounds_pos(&zl, &zh, yh.neg().as_fin().expect("finite"), &yl.neg());
        out = out.union(&Domain::interval(hi.neg(), lo.neg()));
    }
    out.hull()
}

/// For `y` in `[yl, yh]`, `yl >= 1`: the smallest and largest `x` with
/// `trunc(x / y)` in `[zl, zh]`.
fn dividend_bounds_pos(zl: &Ext, zh: &Ext, yl: &BigInt, yh: &Ext) -> (Ext, Ext) {
    let lo = match zl {
        Ext::Inf => Ext::Inf,
        Ext::Fin(z) if z.is_positive() => Ext::Fin(z * yl),
        Ext::Fin(z) => match yh {
            Ext::Fin(yh) => Ext::Fin((z - 1) * yh + 1),
            _ => Ext::Inf,
        },
        Ext::Sup => unreachable!("lower bound is never sup"),
    };
    let hi = match zh {
        Ext::Sup => Ext::Sup,
        Ext::Fin(z) if !z.is_negative() => match yh {
            Ext::Fin(yh) => Ext::Fin((z + 1) * yh - 1),
            _ => Ext::Sup,
        },
        Ext::Fin(z) => Ext::Fin(z * yl),
        Ext::Inf => unreachable!("upper bound is never inf"),
    };
    (lo, hi)
}

/// Constraints on `y` given `trunc(x / y) = z`: magnitude bounds when `z` is
/// known nonzero or known zero.
fn div_divisor_bounds(dx: &Domain, dz: &Domain) -> Domain {
    let (xl, xh) = dx.bounds();
    let (zl, zh) = dz.bounds();
    let zero = BigInt::zero();
    let max_abs_x = match (&xl, &xh) {
        (Ext::Fin(a), Ext::Fin(b)) => Some(a.abs().max(b.abs())),
        _ => None,
    };
    let min_abs_x = if dx.contains(&zero) {
        Some(zero.clone())
    } else {
        match (&xl, &xh) {
            (Ext::Fin(a), _) if a.is_positive() => Some(a.clone()),
            (_, Ext::Fin(b)) if b.is_negative() => Some(-b),
            _ => None,
        }
    };
    if dz.as_singleton() == Some(&zero) {
        // |x| < |y|
        return match min_abs_x {
            Some(m) => Domain::range(-&m, m.clone()).complement(),
            None => Domain::full(),
        };
    }
    let z_positive = matches!(&zl, Ext::Fin(n) if n.is_positive());
    let z_negative = matches!(&zh, Ext::Fin(n) if n.is_negative());
    if !(z_positive || z_negative) {
        return Domain::full();
    }
    // |x| >= |z| * |y| >= min|z| * |y|
    let min_abs_z = if z_positive {
        zl.as_fin().expect("finite").clone()
    } else {
        -zh.as_fin().expect("finite")
    };
    let mag = match max_abs_x {
        Some(m) => Domain::range(-(&m / &min_abs_z), &m / &min_abs_z),
        None => Domain::full(),
    };
    // sign(y) = sign(x) * sign(z)
    let x_nonneg = xl.as_fin().is_some_and(|a| !a.is_negative());
    let x_nonpos = xh.as_fin().is_some_and(|b| !b.is_positive());
    let positive = Domain::interval(Ext::fin(1), Ext::Sup);
    let negative = Domain::interval(Ext::Inf, Ext::fin(-1));
    let sign = match (x_nonneg, x_nonpos, z_positive) {
        (true, _, true) | (_, true, false) => positive,
        (true, _, false) | (_, true, true) => negative,
        _ => Domain::full(),
    };
    mag.intersect(&sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::syntax::parse_term;

    fn term(store: &mut Store, vars: &mut HashMap<String, TermId>, text: &str) -> TermId {
        let t = parse_term(&format!("{text}.")).unwrap();
        store.from_source(&t, vars)
    }

    fn post(store: &mut Store, vars: &mut HashMap<String, TermId>, rel: Relation, l: &str, r: &str) -> bool {
        let l = term(store, vars, l);
        let r = term(store, vars, r);
        store.post_relation(rel, l, r).unwrap()
    }

    fn dom(store: &Store, vars: &HashMap<String, TermId>, name: &str) -> String {
        store.domain_of(vars[name]).map(|d| d.to_string()).unwrap_or_default()
    }

    #[test]
    fn single_bound_update() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Gt, "X", "0"));
        assert_eq!(dom(&s, &v, "X"), "1..sup");
    }

    #[test]
    fn circular_strict_order_terminates() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Gt, "X", "Y"));
        assert!(post(&mut s, &mut v, Relation::Gt, "Y", "X"));
        assert!(post(&mut s, &mut v, Relation::Gt, "X", "0"));
        let (dx, dy) = (s.domain_of(v["X"]).unwrap(), s.domain_of(v["Y"]).unwrap());
        assert!(!dx.is_finite() && !dy.is_finite());
        let bound = (s.propagator_count() as u64) * (2 + 2);
        assert!(s.stats.propagator_runs <= bound, "{:?}", s.stats);
    }

    #[test]
    fn zero_dividend_keeps_nonzero_divisors() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        let x = term(&mut s, &mut v, "X");
        assert!(s.post_domain(x, &Domain::range(0, 2)));
        assert!(post(&mut s, &mut v, Relation::Eq, "0/X", "0"));
        assert_eq!(dom(&s, &v, "X"), "1..2");
        assert!(s.active_propagators().is_empty());
    }

    #[test]
    fn square_above_self_is_not_an_error() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        let l = term(&mut s, &mut v, "X");
        let r = term(&mut s, &mut v, "X*X");
        assert!(s.post_relation(Relation::Gt, l, r).is_ok());
    }

    #[test]
    fn episode_with_add() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        let x = term(&mut s, &mut v, "X");
        let y = term(&mut s, &mut v, "Y");
        let z = term(&mut s, &mut v, "Z");
        s.post_domain(x, &Domain::range(1, 2));
        s.post_domain(y, &Domain::range(3, 4));
        let (xv, yv, zv) = (s.unbound_var(x).unwrap(), s.unbound_var(y).unwrap(), s.unbound_var(z).unwrap());
        s.ensure_constrained(zv);
        let p = s.add_propagator(PropKind::Add(Operand::Var(xv), Operand::Var(yv), Operand::Var(zv)));
        let runs = s.stats.propagator_runs;
        assert!(s.run_episode(&[p]));
        assert_eq!(dom(&s, &v, "Z"), "4..6");
        // enumeration oracle
        let sums: Vec<i64> = (1..=2).flat_map(|a| (3..=4).map(move |b| a + b)).collect();
        assert_eq!(sums.iter().min(), Some(&4));
        assert_eq!(sums.iter().max(), Some(&6));
        // Z becomes finite, so the propagator is re-run once to confirm the fixpoint.
        assert!(s.stats.propagator_runs - runs <= 2);
    }

    #[test]
    fn empty_seeds() {
        let mut s = Store::new();
        let before = s.stats.propagator_runs;
        assert!(s.run_episode(&[]));
        assert_eq!(s.stats.propagator_runs, before);
    }

    #[test]
    fn narrow_outcomes() {
        let mut s = Store::new();
        let x = s.new_var();
        let xv = s.unbound_var(x).unwrap();
        s.ensure_constrained(xv);
        let op = Operand::Var(xv);
        assert_eq!(s.narrow(&op, &Domain::interval(Ext::fin(1), Ext::Sup)), Narrowed::Changed);
        s.narrow(&op, &Domain::range(1, 2));
        let trail = s.trail.len();
        assert_eq!(s.narrow(&op, &Domain::range(0, 5)), Narrowed::Unchanged);
        assert_eq!(s.trail.len(), trail);
        assert_eq!(s.narrow(&op, &Domain::range(0, 0)), Narrowed::Wiped);
        s.sched = Scheduler::default();
    }

    #[test]
    fn on_bind_cases() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        let x = term(&mut s, &mut v, "X");
        s.post_domain(x, &Domain::range(0, 2));
        let one = s.int(1);
        assert_eq!(s.unify(x, one), Ok(true));

        let y = term(&mut s, &mut v, "Y");
        s.post_domain(y, &Domain::range(1, 2));
        let five = s.int(5);
        assert_eq!(s.unify(y, five), Ok(false));

        let a = term(&mut s, &mut v, "A");
        let b = term(&mut s, &mut v, "B");
        s.post_domain(a, &Domain::range(0, 5));
        s.post_domain(b, &Domain::range(3, 9));
        assert_eq!(s.unify(a, b), Ok(true));
        assert_eq!(dom(&s, &v, "A"), "3..5");
        assert_eq!(dom(&s, &v, "B"), "3..5");
    }

    #[test]
    fn undo_restores_domain() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        let x = term(&mut s, &mut v, "X");
        let xv = s.unbound_var(x).unwrap();
        s.ensure_constrained(xv);
        let m = s.mark();
        assert!(post(&mut s, &mut v, Relation::Gt, "X", "0"));
        assert_eq!(dom(&s, &v, "X"), "1..sup");
        s.undo_to(m);
        assert_eq!(dom(&s, &v, "X"), "inf..sup");
    }

    #[test]
    fn ground_posts_create_nothing() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Eq, "N1", "5 - 1"));
        assert!(post(&mut s, &mut v, Relation::Gt, "N1", "0"));
        assert!(!post(&mut s, &mut v, Relation::Eq, "0/0", "0"));
        assert_eq!(s.stats.propagators_created, 0);
        assert_eq!(s.print_term(v["N1"], 5), "4");
    }

    #[test]
    fn huge_bounds_are_exact() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Lt, "abs(X)", "7^7^7"));
        let d = s.domain_of(v["X"]).unwrap();
        let big = BigInt::from(7).pow(823_543u32);
        let m: BigInt = &big - 1;
        assert_eq!(d.bounds(), (Ext::Fin(-&m), Ext::Fin(m)));
    }

    #[test]
    fn residual_text() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Lt, "X", "Y"));
        assert!(post(&mut s, &mut v, Relation::Neq, "X", "Y + 3"));
        let names = |id: VarId| -> Option<String> {
            if Some(id) == s.unbound_var(v["X"]) {
                Some("X".into())
            } else if Some(id) == s.unbound_var(v["Y"]) {
                Some("Y".into())
            } else {
                None
            }
        };
        let texts: Vec<String> = s.active_propagators().into_iter().map(|p| s.describe_propagator(p, &names)).collect();
        assert_eq!(texts, vec!["X#<Y".to_string(), "X#\\=Y+3".to_string()]);
    }

    #[test]
    fn roots_round_correctly() {
        assert_eq!(floor_root(&BigInt::from(26), 3), BigInt::from(2));
        assert_eq!(ceil_root(&BigInt::from(26), 3), BigInt::from(3));
        assert_eq!(floor_root(&BigInt::from(-26), 3), BigInt::from(-3));
        assert_eq!(ceil_root(&BigInt::from(-26), 3), BigInt::from(-2));
        assert_eq!(ceil_root(&BigInt::from(27), 3), BigInt::from(3));
    }

    #[test]
    fn division_bounds_cover_exact() {
        for xl in -8i64..=8 {
            for xh in xl..=8 {
                for yl in -3i64..=3 {
                    for yh in yl..=3 {
                        let dx = Domain::range(xl, xh);
                        let dy = Domain::range(yl, yh).remove_value(&BigInt::zero());
                        if dy.is_empty() {
                            continue;
                        }
                        for zv in -9i64..=9 {
                            let dz = Domain::range(zv, zv);
                            let xb = div_dividend_bounds(&dz, &dy);
                            let yb = div_divisor_bounds(&dx, &dz);
                            for x in xl..=xh {
                                for y in yl..=yh {
                                    if y != 0 && x / y == zv {
                                        assert!(xb.contains(&x.into()), "x {x} y {y} z {zv}");
                                        assert!(yb.contains(&y.into()), "x {x} y {y} z {zv}");
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn square_roots_are_found() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Eq, "X*X", "49"));
        assert_eq!(dom(&s, &v, "X"), "-7\\/7");
        assert!(s.active_propagators().is_empty());
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(!post(&mut s, &mut v, Relation::Eq, "X*X", "50"));
    }

    #[test]
    fn excluded_value_entails_disequality() {
        let (mut s, mut v) = (Store::new(), HashMap::new());
        assert!(post(&mut s, &mut v, Relation::Leq, "X", "9"));
        assert!(post(&mut s, &mut v, Relation::Neq, "X", "5"));
        assert_eq!(dom(&s, &v, "X"), "inf..4\\/6..9");
        assert!(s.active_propagators().is_empty());
    }
}
