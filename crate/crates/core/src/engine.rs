//! Clause database and depth-first SLD resolution with chronological
//! backtracking over the store's trail.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::domain::{Domain, Ext};
use crate::label::{label_vars, select_var, LabelOptions, VarOrder};
use crate::propagate::{ArithError, PostError, Relation, Undefined};
use crate::syntax::{parse_program, parse_query, Clause, SourceTerm, SyntaxError, TermKind};
use crate::terms::{Atom, Mark, OccursMode, StoError, Store, TermId, TermView, VarId};

/// Depth at which cyclic answer terms are cut off with `...`.
pub const ANSWER_DEPTH: usize = 3;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("error(syntax_error, {0})")]
    Syntax(#[from] SyntaxError),
    #[error("error(existence_error, procedure {0})")]
    Existence(String),
    #[error("error(instantiation_error, {0})")]
    Instantiation(String),
    #[error("error(type_error, {0})")]
    Type(String),
    #[error("error(domain_error, {0})")]
    Domain(String),
    #[error("error(evaluation_error, {0})")]
    Evaluation(String),
    #[error("error(resource_error, {0})")]
    Resource(String),
    #[error("error(sto_error, {0} occurs in {1})")]
    Sto(String, String),
    #[error("error(resource_error, step limit of {0} resolution steps reached)")]
    StepLimit(u64),
    #[error("error(interrupted, query aborted)")]
    Interrupted,
}

impl From<StoError> for EngineError {
    fn from(e: StoError) -> Self {
        EngineError::Sto(e.var.to_string(), e.term)
    }
}

impl From<PostError> for EngineError {
    fn from(e: PostError) -> Self {
        match e {
            PostError::NotEvaluable(s) => EngineError::Type(format!("evaluable, {s}")),
            PostError::TooLarge => EngineError::Resource("integer_size".into()),
        }
    }
}

impl EngineError {
    /// Short kind name, as in `error(<kind>, ...)`.
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::Syntax(_) => "syntax_error",
            EngineError::Existence(_) => "existence_error",
            EngineError::Instantiation(_) => "instantiation_error",
            EngineError::Type(_) => "type_error",
            EngineError::Domain(_) => "domain_error",
            EngineError::Evaluation(_) => "evaluation_error",
            EngineError::Resource(_) | EngineError::StepLimit(_) => "resource_error",
            EngineError::Sto(..) => "sto_error",
            EngineError::Interrupted => "interrupted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Builtin {
    True,
    Fail,
    Unify,
    Is,
    In,
    Rel(Relation),
    Labeling,
    SetFlag,
}

impl Builtin {
    fn lookup(name: &str, arity: usize) -> Option<Builtin> {
        Some(match (name, arity) {
            ("true", 0) => Builtin::True,
            ("fail" | "false", 0) => Builtin::Fail,
            ("=", 2) => Builtin::Unify,
            ("is", 2) => Builtin::Is,
            ("in", 2) => Builtin::In,
            ("labeling", 2) => Builtin::Labeling,
            ("set_prolog_flag", 2) => Builtin::SetFlag,
            (name, 2) => Builtin::Rel(Relation::from_name(name)?),
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pred {
    Builtin(Builtin),
    User(usize),
}

/// Clause term with variables numbered per clause.
#[derive(Clone, Debug)]
enum Tpl {
    Var(usize),
    /// `_`: a new variable at every occurrence.
    Anon,
    Int(BigInt),
    Atom(Atom),
    Struct(Atom, Box<[Tpl]>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Key {
    Int(BigInt),
    Atom(Atom),
    Functor(Atom, usize),
}

#[derive(Clone, Debug)]
struct GoalTpl {
    pred: Pred,
    args: Vec<Tpl>,
}

#[derive(Clone, Debug)]
struct ClauseTpl {
    head: Vec<Tpl>,
    body: Vec<GoalTpl>,
    nvars: usize,
    key: Option<Key>,
}

#[derive(Clone, Debug, Default)]
struct PredEntry {
    name: String,
    arity: usize,
    clauses: Arc<Vec<ClauseTpl>>,
}

/// Predicates in definition order; each clause list in source order.
#[derive(Clone, Debug, Default)]
pub struct ClauseDb {
    index: HashMap<(String, usize), usize>,
    preds: Vec<PredEntry>,
}

impl ClauseDb {
    fn pred_index(&mut self, name: &str, arity: usize) -> usize {
        if let Some(&i) = self.index.get(&(name.to_string(), arity)) {
            return i;
        }
        let i = self.preds.len();
        self.preds.push(PredEntry { name: name.to_string(), arity, ..PredEntry::default() });
        self.index.insert((name.to_string(), arity), i);
        i
    }

    fn resolve(&mut self, name: &str, arity: usize) -> Pred {
        match Builtin::lookup(name, arity) {
            Some(b) => Pred::Builtin(b),
            None => Pred::User(self.pred_index(name, arity)),
        }
    }

    /// Number of clauses for `name/arity`.
    pub fn clause_count(&self, name: &str, arity: usize) -> usize {
        self.index
            .get(&(name.to_string(), arity))
            .map_or(0, |&i| self.preds[i].clauses.len())
    }

    /// Appends clauses in order.
    pub fn consult(&mut self, clauses: &[Clause]) -> Result<(), EngineError> {
        for clause in clauses {
            let (name, arity) = callable(&clause.head)?;
            let mut vars = HashMap::new();
            let head: Vec<Tpl> = match &clause.head.kind {
                TermKind::Compound(_, args) => args.iter().map(|a| template(a, &mut vars)).collect(),
                _ => Vec::new(),
            };
            let mut body = Vec::with_capacity(clause.body.len());
            for g in &clause.body {
                let (gname, garity) = callable(g)?;
                let args = match &g.kind {
                    TermKind::Compound(_, args) => args.iter().map(|a| template(a, &mut vars)).collect(),
                    _ => Vec::new(),
                };
                body.push(GoalTpl { pred: self.resolve(gname, garity), args });
            }
            let key = head.first().and_then(tpl_key);
            let tpl = ClauseTpl { head, body, nvars: vars.len(), key };
            let i = self.pred_index(name, arity);
            Arc::make_mut(&mut self.preds[i].clauses).push(tpl);
        }
        Ok(())
    }
}

fn callable(t: &SourceTerm) -> Result<(&str, usize), EngineError> {
    match &t.kind {
        TermKind::Atom(a) => Ok((a, 0)),
        TermKind::Compound(f, args) => Ok((f, args.len())),
        TermKind::Var(v) => Err(EngineError::Instantiation(format!("goal {v} at {}", t.pos))),
        TermKind::Int(n) => Err(EngineError::Type(format!("callable, {n}"))),
    }
}

fn template(t: &SourceTerm, vars: &mut HashMap<String, usize>) -> Tpl {
    match &t.kind {
        TermKind::Var(v) if v == "_" => Tpl::Anon,
        TermKind::Var(v) => {
            let n = vars.len();
            Tpl::Var(*vars.entry(v.clone()).or_insert(n))
        }
        TermKind::Int(n) => Tpl::Int(n.clone()),
        TermKind::Atom(a) => Tpl::Atom(a.as_str().into()),
        TermKind::Compound(f, args) => Tpl::Struct(f.as_str().into(), args.iter().map(|a| template(a, vars)).collect()),
    }
}

fn tpl_key(t: &Tpl) -> Option<Key> {
    match t {
        Tpl::Int(n) => Some(Key::Int(n.clone())),
        Tpl::Atom(a) => Some(Key::Atom(a.clone())),
        Tpl::Struct(f, args) => Some(Key::Functor(f.clone(), args.len())),
        Tpl::Var(_) | Tpl::Anon => None,
    }
}

#[derive(Clone, Debug)]
enum Goal {
    Call(Pred, Vec<TermId>),
    Label(VarOrder, Rc<[TermId]>),
}

#[derive(Debug)]
struct Frame {
    goal: Goal,
    next: Cont,
}

type Cont = Option<Rc<Frame>>;

fn push(goal: Goal, next: Cont) -> Cont {
    Some(Rc::new(Frame { goal, next }))
}

#[derive(Debug)]
enum Alt {
    Clauses { pred: usize, args: Vec<TermId>, next: usize, cont: Cont },
    Label { var: VarId, last: BigInt, order: VarOrder, vars: Rc<[TermId]>, cont: Cont },
}

#[derive(Debug)]
struct ChoicePoint {
    mark: Mark,
    alt: Alt,
}

/// One line of an answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnswerItem {
    /// `Name = Value`; also used for aliases (`X = Y`).
    Binding { name: String, value: String },
    /// `Name in Domain` for an unbound constrained variable.
    Domain { name: String, domain: Domain },
    /// A pending primitive constraint in source syntax.
    Constraint(String),
}

impl fmt::Display for AnswerItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnswerItem::Binding { name, value } => write!(f, "{name} = {value}"),
            AnswerItem::Domain { name, domain } => write!(f, "{name} in {domain}"),
            AnswerItem::Constraint(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Answer {
    pub items: Vec<AnswerItem>,
}

impl Answer {
    /// Printed value of a bound query variable.
    pub fn binding(&self, name: &str) -> Option<&str> {
        self.items.iter().find_map(|i| match i {
            AnswerItem::Binding { name: n, value } if n == name => Some(value.as_str()),
            _ => None,
        })
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.items.iter().find_map(|i| match i {
            AnswerItem::Domain { name: n, domain } if n == name => Some(domain),
            _ => None,
        })
    }

    pub fn constraints(&self) -> impl Iterator<Item = &str> {
        self.items.iter().filter_map(|i| match i {
            AnswerItem::Constraint(c) => Some(c.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("true");
        }
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(",\n")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Program database plus solver state.
#[derive(Debug, Default)]
pub struct Engine {
    db: ClauseDb,
    store: Store,
    step_limit: Option<u64>,
    interrupt: Option<Arc<AtomicBool>>,
}

impl Engine {
    pub fn new() -> Engine {
        Engine::default()
    }

    pub fn with_mode(mode: OccursMode) -> Engine {
        let mut e = Engine::new();
        e.store.set_mode(mode);
        e
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub fn db(&self) -> &ClauseDb {
        &self.db
    }

    pub fn occurs_check(&self) -> OccursMode {
        self.store.mode()
    }

    pub fn set_occurs_check(&mut self, mode: OccursMode) {
        self.store.set_mode(mode);
    }

    /// Caps the resolution steps spent finding any single answer.
    pub fn set_step_limit(&mut self, limit: Option<u64>) {
        self.step_limit = limit;
    }

    /// A flag that, once set, aborts the running query.
    pub fn set_interrupt(&mut self, flag: Arc<AtomicBool>) {
        self.interrupt = Some(flag);
    }

    pub fn consult(&mut self, clauses: &[Clause]) -> Result<(), EngineError> {
        self.db.consult(clauses)
    }

    pub fn consult_str(&mut self, text: &str) -> Result<(), EngineError> {
        let clauses = parse_program(text)?;
        self.consult(&clauses)
    }

    /// Starts a query given as text (`"G1, G2."`).
    pub fn query(&mut self, text: &str) -> Result<Solutions<'_>, EngineError> {
        let goals = parse_query(text)?;
        self.solve(&goals)
    }

    /// Starts a query. Answers are produced lazily by [`Solutions::next_answer`].
    pub fn solve(&mut self, goals: &[SourceTerm]) -> Result<Solutions<'_>, EngineError> {
        let mut names = Vec::new();
        for g in goals {
            g.variables(&mut names);
        }
        names.retain(|n| n != "_");
        let mut preds = Vec::with_capacity(goals.len());
        for g in goals {
            let (name, arity) = callable(g)?;
            preds.push(self.db.resolve(name, arity));
        }
        let base = self.store.mark();
        let mut vars = HashMap::new();
        let mut built = Vec::with_capacity(goals.len());
        for g in goals {
            let args: Vec<TermId> = match &g.kind {
                TermKind::Compound(_, args) => args.iter().map(|a| self.store.from_source(a, &mut vars)).collect(),
                _ => Vec::new(),
            };
            built.push(args);
        }
        let mut cont = None;
        for (pred, args) in preds.into_iter().zip(built).rev() {
            cont = push(Goal::Call(pred, args), cont);
        }
        let qvars = names.into_iter().filter_map(|n| vars.get(&n).map(|&t| (n, t))).collect();
        Ok(Solutions { engine: self, qvars, base, stack: Vec::new(), state: State::Start(cont), steps: 0 })
    }

    fn instantiate(&mut self, t: &Tpl, vars: &mut [Option<TermId>]) -> TermId {
        match t {
            Tpl::Var(i) => match vars[*i] {
                Some(id) => id,
                None => {
                    let id = self.store.new_var();
                    vars[*i] = Some(id);
                    id
                }
            },
            Tpl::Anon => self.store.new_var(),
            Tpl::Int(n) => self.store.int(n.clone()),
            Tpl::Atom(a) => self.store.atom_shared(a.clone()),
            Tpl::Struct(f, args) => {
                let args = args.iter().map(|a| self.instantiate(a, vars)).collect();
                self.store.compound_shared(f.clone(), args)
            }
        }
    }

    fn goal_key(&self, t: TermId) -> Option<Key> {
        match self.store.view(t) {
            TermView::Var(_) => None,
            TermView::Int(n) => Some(Key::Int(n.clone())),
            TermView::Atom(a) => Some(Key::Atom(a.into())),
            TermView::Compound(f, args) => Some(Key::Functor(f.into(), args.len())),
        }
    }

    /// Unifies a goal argument with a clause head argument.
    fn unify_head(&mut self, arg: TermId, t: &Tpl, vars: &mut [Option<TermId>]) -> Result<bool, EngineError> {
        match t {
            Tpl::Var(i) if vars[*i].is_none() => {
                vars[*i] = Some(arg);
                Ok(true)
            }
            Tpl::Anon => Ok(true),
            Tpl::Int(n) => {
                if let TermView::Int(m) = self.store.view(arg) {
                    return Ok(m == n);
                }
                let c = self.store.int(n.clone());
                Ok(self.store.unify(arg, c)?)
            }
            _ => {
                let c = self.instantiate(t, vars);
                Ok(self.store.unify(arg, c)?)
            }
        }
    }

    fn parse_domain(&self, t: TermId) -> Result<Domain, EngineError> {
        let bound = |t: TermId, lower: bool| -> Result<Ext, EngineError> {
            match self.store.view(t) {
                TermView::Int(n) => Ok(Ext::Fin(n.clone())),
                TermView::Atom("inf") if lower => Ok(Ext::Inf),
                TermView::Atom("sup") if !lower => Ok(Ext::Sup),
                TermView::Var(_) => Err(EngineError::Instantiation("domain bound".into())),
                _ => Err(EngineError::Type(format!("domain bound, {}", self.store.print_term(t, ANSWER_DEPTH)))),
            }
        };
        match self.store.view(t) {
            TermView::Int(n) => Ok(Domain::singleton(n.clone())),
            TermView::Var(_) => Err(EngineError::Instantiation("in/2 domain".into())),
            TermView::Compound("..", args) if args.len() == 2 => {
                let (a, b) = (args[0], args[1]);
                Ok(Domain::interval(bound(a, true)?, bound(b, false)?))
            }
            TermView::Compound("\\/", args) if args.len() == 2 => {
                let (a, b) = (args[0], args[1]);
                Ok(self.parse_domain(a)?.union(&self.parse_domain(b)?))
            }
            _ => Err(EngineError::Type(format!("domain, {}", self.store.print_term(t, ANSWER_DEPTH)))),
        }
    }

    fn builtin(&mut self, b: Builtin, args: &[TermId], next: &Cont) -> Result<Option<Cont>, EngineError> {
        let ok = match b {
            Builtin::True => true,
            Builtin::Fail => false,
            Builtin::Unify => self.store.unify(args[0], args[1])?,
            Builtin::Is => {
                let value = self.store.eval_ground(args[1]).map_err(|e| match e {
                    ArithError::Instantiation => EngineError::Instantiation("is/2 right-hand side".into()),
                    ArithError::NotEvaluable(s) => EngineError::Type(format!("evaluable, {s}")),
                    ArithError::Undefined(Undefined::ZeroDivisor) => EngineError::Evaluation("zero_divisor".into()),
                    ArithError::Undefined(Undefined::NegativeExponent) => {
                        EngineError::Evaluation("undefined, negative exponent".into())
                    }
                    ArithError::Undefined(Undefined::TooLarge) => EngineError::Resource("integer_size".into()),
                })?;
                let c = self.store.int(value);
                self.store.unify(args[0], c)?
            }
            Builtin::In => {
                let dom = self.parse_domain(args[1])?;
                match self.store.view(args[0]) {
                    TermView::Var(_) | TermView::Int(_) => self.store.post_domain(args[0], &dom),
                    _ => {
                        return Err(EngineError::Type(format!(
                            "integer, {}",
                            self.store.print_term(args[0], ANSWER_DEPTH)
                        )))
                    }
                }
            }
            Builtin::Rel(rel) => self.store.post_relation(rel, args[0], args[1])?,
            Builtin::Labeling => {
                let opts = LabelOptions::from_term(&self.store, args[0])?;
                let vars = label_vars(&self.store, args[1])?;
                return Ok(Some(push(Goal::Label(opts.var_order, vars.into()), next.clone())));
            }
            Builtin::SetFlag => {
                match self.store.view(args[0]) {
                    TermView::Atom("occurs_check") => {}
                    TermView::Var(_) => return Err(EngineError::Instantiation("set_prolog_flag/2".into())),
                    _ => {
                        return Err(EngineError::Domain(format!(
                            "prolog_flag, {}",
                            self.store.print_term(args[0], ANSWER_DEPTH)
                        )))
                    }
                }
                let mode = match self.store.view(args[1]) {
                    TermView::Atom(a) => a.parse::<OccursMode>().ok(),
                    TermView::Var(_) => return Err(EngineError::Instantiation("set_prolog_flag/2".into())),
                    _ => None,
                };
                let mode = mode.ok_or_else(|| {
                    EngineError::Domain(format!("flag_value, {}", self.store.print_term(args[1], ANSWER_DEPTH)))
                })?;
                self.store.set_mode(mode);
                true
            }
        };
        Ok(if ok { Some(next.clone()) } else { None })
    }
}

#[derive(Debug)]
enum State {
    Start(Cont),
    Answered,
    Done,
}

/// Lazy answer stream of one query. Dropping it undoes every change the
/// query made to the store.
#[derive(Debug)]
pub struct Solutions<'e> {
    engine: &'e mut Engine,
    qvars: Vec<(String, TermId)>,
    base: Mark,
    stack: Vec<ChoicePoint>,
    state: State,
    steps: u64,
}

impl Solutions<'_> {
    /// Resolution steps taken so far by this query.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn store(&self) -> &Store {
        &self.engine.store
    }

    /// Names of the query variables in order of first occurrence.
    pub fn variable_names(&self) -> Vec<&str> {
        self.qvars.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Heap term of a query variable.
    pub fn variable(&self, name: &str) -> Option<TermId> {
        self.qvars.iter().find(|(n, _)| n == name).map(|(_, t)| *t)
    }

    /// Produces the next answer, `Ok(None)` once the stream is exhausted.
    /// After an error the stream is finished.
    pub fn next_answer(&mut self) -> Result<Option<Answer>, EngineError> {
        let start = match std::mem::replace(&mut self.state, State::Done) {
            State::Done => return Ok(None),
            State::Start(cont) => Some(cont),
            State::Answered => None,
        };
        match self.run(start) {
            Ok(true) => {
                self.state = State::Answered;
                Ok(Some(self.answer()))
            }
            Ok(false) => Ok(None),
            Err(e) => {
                self.stack.clear();
                Err(e)
            }
        }
    }

    fn run(&mut self, mut cur: Option<Cont>) -> Result<bool, EngineError> {
        let limit = self.engine.step_limit;
        let mut steps = 0u64;
        loop {
            let cont = match cur.take() {
                Some(c) => c,
                None => match self.backtrack()? {
                    Some(c) => c,
                    None => return Ok(false),
                },
            };
            let Some(frame) = cont else { return Ok(true) };
            steps += 1;
            self.steps += 1;
            if limit.is_some_and(|l| steps > l) {
                return Err(EngineError::StepLimit(limit.unwrap_or_default()));
            }
            if steps.is_multiple_of(1024) {
                if let Some(flag) = &self.engine.interrupt {
                    if flag.swap(false, Ordering::SeqCst) {
                        return Err(EngineError::Interrupted);
                    }
                }
            }
            cur = self.step(&frame)?;
        }
    }

    fn step(&mut self, frame: &Frame) -> Result<Option<Cont>, EngineError> {
        match &frame.goal {
            Goal::Call(Pred::User(p), args) => self.try_clauses(*p, args.clone(), 0, frame.next.clone()),
            Goal::Call(Pred::Builtin(b), args) => self.engine.builtin(*b, args, &frame.next),
            Goal::Label(order, vars) => {
                let Some(v) = select_var(&self.engine.store, vars, *order) else {
                    return Ok(Some(frame.next.clone()));
                };
                let d = self.engine.store.var_domain(v).expect("labeled variables are constrained");
                let first = d.next_value(None).expect("nonempty domain");
                Ok(self.label_trial(v, first, &d, *order, vars.clone(), frame.next.clone()))
            }
        }
    }

    /// Tries `var = value`, leaving a choicepoint for the next larger value.
    fn label_trial(
        &mut self,
        var: VarId,
        value: BigInt,
        dom: &Domain,
        order: VarOrder,
        vars: Rc<[TermId]>,
        cont: Cont,
    ) -> Option<Cont> {
        let store = &mut self.engine.store;
        if dom.next_value(Some(&value)).is_some() {
            self.stack.push(ChoicePoint {
                mark: store.mark(),
                alt: Alt::Label { var, last: value.clone(), order, vars: vars.clone(), cont: cont.clone() },
            });
        }
        store.stats.label_trials += 1;
        let c = store.int(value);
        match store.unify(store.var_cell(var), c) {
            Ok(true) => Some(push(Goal::Label(order, vars), cont)),
            _ => None,
        }
    }

    fn try_clauses(&mut self, pred: usize, args: Vec<TermId>, start: usize, cont: Cont) -> Result<Option<Cont>, EngineError> {
        let entry = &self.engine.db.preds[pred];
        let clauses = entry.clauses.clone();
        if clauses.is_empty() {
            return Err(EngineError::Existence(format!("{}/{}", entry.name, entry.arity)));
        }
        let key = args.first().and_then(|&a| self.engine.goal_key(a));
        let matches = |c: &ClauseTpl| match (&key, &c.key) {
            (Some(k), Some(ck)) => k == ck,
            _ => true,
        };
        let Some(i) = (start..clauses.len()).find(|&i| matches(&clauses[i])) else {
            return Ok(None);
        };
        if let Some(j) = (i + 1..clauses.len()).find(|&j| matches(&clauses[j])) {
            self.stack.push(ChoicePoint {
                mark: self.engine.store.mark(),
                alt: Alt::Clauses { pred, args: args.clone(), next: j, cont: cont.clone() },
            });
        }
        let clause = &clauses[i];
        let mut vars = vec![None; clause.nvars];
        for (arg, t) in args.iter().zip(&clause.head) {
            if !self.engine.unify_head(*arg, t, &mut vars)? {
                return Ok(None);
            }
        }
        let mut goals = Vec::with_capacity(clause.body.len());
        for g in &clause.body {
            let args: Vec<TermId> = g.args.iter().map(|a| self.engine.instantiate(a, &mut vars)).collect();
            goals.push(Goal::Call(g.pred, args));
        }
        let mut cont = cont;
        for g in goals.into_iter().rev() {
            cont = push(g, cont);
        }
        Ok(Some(cont))
    }

    fn backtrack(&mut self) -> Result<Option<Cont>, EngineError> {
        while let Some(cp) = self.stack.pop() {
            self.engine.store.undo_to(cp.mark);
            let resumed = match cp.alt {
                Alt::Clauses { pred, args, next, cont } => self.try_clauses(pred, args, next, cont)?,
                Alt::Label { var, last, order, vars, cont } => {
                    let d = self.engine.store.var_domain(var).expect("labeled variables are constrained");
                    match d.next_value(Some(&last)) {
                        Some(value) => self.label_trial(var, value, &d, order, vars, cont),
                        None => None,
                    }
                }
            };
            if resumed.is_some() {
                return Ok(resumed);
            }
        }
        Ok(None)
    }

    /// Builds the printable answer for the current store.
    fn answer(&self) -> Answer {
        let store = &self.engine.store;
        let mut names: HashMap<VarId, String> = HashMap::new();
        for (name, t) in &self.qvars {
            if name.starts_with('_') {
                continue;
            }
            if let Some(v) = store.unbound_var(*t) {
                names.entry(v).or_insert_with(|| name.clone());
            }
        }
        let lookup = |v: VarId| names.get(&v).cloned();
        let mut items = Vec::new();
        let mut closure: Vec<VarId> = Vec::new();
        let mut seen: HashSet<VarId> = HashSet::new();
        for (name, t) in &self.qvars {
            if name.starts_with('_') {
                continue;
            }
            match store.unbound_var(*t) {
                Some(v) => {
                    if names[&v] != *name {
                        items.push(AnswerItem::Binding { name: name.clone(), value: names[&v].clone() });
                    } else if let Some(d) = store.var_domain(v) {
                        if d != Domain::full() {
                            items.push(AnswerItem::Domain { name: name.clone(), domain: d });
                        }
                    }
                    if seen.insert(v) {
                        closure.push(v);
                    }
                }
                None => {
                    let value = store.render(*t, ANSWER_DEPTH, &lookup).to_string();
                    items.push(AnswerItem::Binding { name: name.clone(), value });
                    for v in reachable_vars(store, *t) {
                        if seen.insert(v) {
                            closure.push(v);
                        }
                    }
                }
            }
        }
        // Pending propagators connected to the query variables.
        let active = store.active_propagators();
        let mut taken = vec![false; active.len()];
        let mut residual = Vec::new();
        loop {
            let mut grew = false;
            for (k, &p) in active.iter().enumerate() {
                if taken[k] {
                    continue;
                }
                let pv = store.propagator_vars(p);
                if pv.iter().any(|v| seen.contains(v)) {
                    taken[k] = true;
                    grew = true;
                    residual.push(p);
                    for v in pv {
                        if seen.insert(v) {
                            closure.push(v);
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        for &v in &closure {
            if names.contains_key(&v) {
                continue;
            }
            if let Some(d) = store.var_domain(v) {
                if d != Domain::full() {
                    items.push(AnswerItem::Domain { name: v.to_string(), domain: d });
                }
            }
        }
        residual.sort();
        for p in residual {
            items.push(AnswerItem::Constraint(store.describe_propagator(p, &lookup)));
        }
        Answer { items }
    }
}

fn reachable_vars(store: &Store, t: TermId) -> Vec<VarId> {
    let mut out = Vec::new();
    let mut visited = HashSet::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        let t = store.deref(t);
        if !visited.insert(t) {
            continue;
        }
        match store.view(t) {
            TermView::Var(v) => out.push(v),
            TermView::Compound(_, args) => stack.extend(args.iter().rev()),
            _ => {}
        }
    }
    out
}

impl Drop for Solutions<'_> {
    fn drop(&mut self) {
        self.engine.store.undo_to(self.base);
    }
}

/// Text of an answer stream in toplevel style: answers separated by ` ;`,
/// closed by `.` or `false.`.
pub fn format_answers(answers: &[Answer], exhausted: bool) -> String {
    let mut s = String::new();
    for (i, a) in answers.iter().enumerate() {
        if i > 0 {
            s.push_str(" ;\n");
        }
        s.push_str(&a.to_string());
    }
    if exhausted {
        if answers.is_empty() {
            s.push_str("false.");
        } else {
            s.push_str(" ;\nfalse.");
        }
    } else if !answers.is_empty() {
        s.push('.');
    }
    s
}
