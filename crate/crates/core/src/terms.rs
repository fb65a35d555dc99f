//! Runtime term store: heap cells, variable bindings, the trail, and
//! unification under the three occurs-check modes.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::domain::Domain;
use crate::propagate::{PropId, Propagator, Scheduler};
use crate::syntax::{SourceTerm, TermKind, CONS, NIL};

pub type Atom = Arc<str>;

/// Index of a heap cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub(crate) u32);

/// Identifier of a logic variable, unique within a store.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_G{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Ref(VarId),
    Int(BigInt),
    Atom(Atom),
    Struct(Atom, Box<[TermId]>),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct VarSlot {
    /// The `Ref` cell standing for this variable.
    pub(crate) cell: TermId,
    pub(crate) binding: Option<TermId>,
    /// Never yet stored inside a compound term or a constraint.
    pub(crate) fresh: bool,
    /// Present iff the variable is constrained.
    pub(crate) dom: Option<Domain>,
    pub(crate) watchers: Vec<PropId>,
}

/// Dereferenced view of a heap cell.
#[derive(Clone, Copy, Debug)]
pub enum TermView<'a> {
    Var(VarId),
    Int(&'a BigInt),
    Atom(&'a str),
    Compound(&'a str, &'a [TermId]),
}

/// Unification mode selected by the `occurs_check` flag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OccursMode {
    /// Rational-tree unification; cyclic terms allowed.
    #[default]
    False,
    /// Finite-tree unification; cyclic bindings fail.
    True,
    /// Finite-tree unification; cyclic bindings raise an error.
    Error,
}

impl FromStr for OccursMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "false" => Ok(OccursMode::False),
            "true" => Ok(OccursMode::True),
            "error" => Ok(OccursMode::Error),
            other => Err(format!("occurs_check expects false, true or error, got `{other}`")),
        }
    }
}

impl fmt::Display for OccursMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OccursMode::False => "false",
            OccursMode::True => "true",
            OccursMode::Error => "error",
        })
    }
}

/// A binding that would create an infinite term under mode `error`.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("occurs check: {var} occurs in {term}")]
pub struct StoError {
    pub var: VarId,
    /// Depth-limited rendering of the term the variable was unified with.
    pub term: String,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum TrailEntry {
    Bind(VarId),
    FreshCleared(VarId),
    Domain(VarId, Option<Domain>),
    Watch(VarId),
    Entail(PropId),
}

/// Position in the trail to which the store can be restored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    heap: usize,
    vars: usize,
    props: usize,
}

/// Instrumentation counters. Never rolled back by backtracking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub unify_steps: u64,
    pub occurs_scans: u64,
    pub occurs_skipped: u64,
    pub propagators_created: u64,
    pub propagator_runs: u64,
    pub episodes: u64,
    /// Largest number of runs performed by a single episode.
    pub max_episode_runs: u64,
    pub label_trials: u64,
}

/// Structural copy of everything backtracking must restore.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    heap: Vec<Node>,
    vars: Vec<VarSlot>,
    props: Vec<Propagator>,
}

/// Term store plus constraint store: one solver state.
#[derive(Clone, Debug, Default)]
pub struct Store {
    pub(crate) heap: Vec<Node>,
    pub(crate) vars: Vec<VarSlot>,
    pub(crate) trail: Vec<TrailEntry>,
    pub(crate) mode: OccursMode,
    pub(crate) props: Vec<Propagator>,
    pub(crate) sched: Scheduler,
    pub stats: Stats,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn mode(&self) -> OccursMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: OccursMode) {
        self.mode = mode;
    }

    fn push(&mut self, node: Node) -> TermId {
        let id = TermId(self.heap.len() as u32);
        self.heap.push(node);
        id
    }

    pub fn new_var(&mut self) -> TermId {
        let var = VarId(self.vars.len() as u32);
        let cell = self.push(Node::Ref(var));
        self.vars.push(VarSlot {
            cell,
            binding: None,
            fresh: true,
            dom: None,
            watchers: Vec::new(),
        });
        cell
    }

    pub fn int(&mut self, n: impl Into<BigInt>) -> TermId {
        self.push(Node::Int(n.into()))
    }

    pub fn atom(&mut self, name: &str) -> TermId {
        self.push(Node::Atom(name.into()))
    }

    pub(crate) fn atom_shared(&mut self, name: Atom) -> TermId {
        self.push(Node::Atom(name))
    }

    /// Allocates `name(args...)`. Every unbound variable written into an
    /// argument cell loses its fresh flag.
    pub fn compound(&mut self, name: &str, args: Vec<TermId>) -> TermId {
        self.compound_shared(name.into(), args)
    }

    pub(crate) fn compound_shared(&mut self, name: Atom, args: Vec<TermId>) -> TermId {
        assert!(!args.is_empty(), "compound terms have arity >= 1");
        for &a in &args {
            if let Some(v) = self.unbound_var(a) {
                self.clear_fresh(v);
            }
        }
        self.push(Node::Struct(name, args.into_boxed_slice()))
    }

    pub fn list(&mut self, items: Vec<TermId>, tail: TermId) -> TermId {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| self.compound(CONS, vec![item, acc]))
    }

    pub(crate) fn clear_fresh(&mut self, v: VarId) {
        let slot = &mut self.vars[v.index()];
        if slot.fresh {
            slot.fresh = false;
            self.trail.push(TrailEntry::FreshCleared(v));
        }
    }

    pub fn is_fresh(&self, v: VarId) -> bool {
        self.vars[v.index()].fresh
    }

    pub fn var_cell(&self, v: VarId) -> TermId {
        self.vars[v.index()].cell
    }

    pub fn deref(&self, mut t: TermId) -> TermId {
        loop {
            match &self.heap[t.0 as usize] {
                Node::Ref(v) => match self.vars[v.index()].binding {
                    Some(next) => t = next,
                    None => return t,
                },
                _ => return t,
            }
        }
    }

    pub fn view(&self, t: TermId) -> TermView<'_> {
        match &self.heap[self.deref(t).0 as usize] {
            Node::Ref(v) => TermView::Var(*v),
            Node::Int(n) => TermView::Int(n),
            Node::Atom(a) => TermView::Atom(a),
            Node::Struct(f, args) => TermView::Compound(f, args),
        }
    }

    /// The unbound variable `t` dereferences to, if any.
    pub fn unbound_var(&self, t: TermId) -> Option<VarId> {
        match self.view(t) {
            TermView::Var(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn node(&self, t: TermId) -> &Node {
        &self.heap[t.0 as usize]
    }

    pub(crate) fn bind(&mut self, v: VarId, t: TermId) {
        debug_assert!(self.vars[v.index()].binding.is_none());
        self.vars[v.index()].binding = Some(t);
        self.trail.push(TrailEntry::Bind(v));
    }

    pub(crate) fn set_domain(&mut self, v: VarId, dom: Domain) {
        let old = self.vars[v.index()].dom.replace(dom);
        self.trail.push(TrailEntry::Domain(v, old));
    }

    pub(crate) fn add_watcher(&mut self, v: VarId, p: PropId) {
        self.vars[v.index()].watchers.push(p);
        self.trail.push(TrailEntry::Watch(v));
    }

    pub(crate) fn log_entail(&mut self, p: PropId) {
        self.trail.push(TrailEntry::Entail(p));
    }

    pub fn is_constrained(&self, v: VarId) -> bool {
        self.vars[v.index()].dom.is_some()
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            heap: self.heap.len(),
            vars: self.vars.len(),
            props: self.props.len(),
        }
    }

    /// Restores bindings, domains, watchers, fresh flags and propagators to
    /// their state at `mark`.
    pub fn undo_to(&mut self, mark: Mark) {
        while self.trail.len() > mark.trail {
            match self.trail.pop().expect("nonempty trail") {
                TrailEntry::Bind(v) => self.vars[v.index()].binding = None,
                TrailEntry::FreshCleared(v) => self.vars[v.index()].fresh = true,
                TrailEntry::Domain(v, old) => self.vars[v.index()].dom = old,
                TrailEntry::Watch(v) => {
                    self.vars[v.index()].watchers.pop();
                }
                TrailEntry::Entail(p) => self.props[p.index()].entailed = false,
            }
        }
        self.heap.truncate(mark.heap);
        self.vars.truncate(mark.vars);
        self.props.truncate(mark.props);
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            heap: self.heap.clone(),
            vars: self.vars.clone(),
            props: self.props.clone(),
        }
    }

    /// True iff no compound argument cell dereferences to a variable whose
    /// fresh flag is still set.
    pub fn check_fresh_invariant(&self) -> bool {
        self.heap.iter().all(|node| match node {
            Node::Struct(_, args) => args
                .iter()
                .all(|&a| self.unbound_var(a).is_none_or(|v| !self.is_fresh(v))),
            _ => true,
        })
    }

    /// Whether `v` is reachable from `t` after dereferencing. Terminates on
    /// cyclic terms.
    pub fn occurs_in(&self, v: VarId, t: TermId) -> bool {
        let mut seen = HashSet::new();
        self.occurs_in_counted(v, t, &mut seen)
    }

    pub(crate) fn occurs_in_counted(&self, v: VarId, t: TermId, seen: &mut HashSet<TermId>) -> bool {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            let t = self.deref(t);
            match self.node(t) {
                Node::Ref(w) if *w == v => return true,
                Node::Struct(_, args) if seen.insert(t) => stack.extend(args.iter().rev()),
                _ => {}
            }
        }
        false
    }

    /// Unifies `a` and `b` under the active occurs-check mode. `Ok(false)` is
    /// failure; partial bindings stay on the trail for the caller to undo.
    pub fn unify(&mut self, a: TermId, b: TermId) -> Result<bool, StoError> {
        let mut stack = vec![(a, b)];
        let mut visited: HashSet<(TermId, TermId)> = HashSet::new();
        while let Some((x, y)) = stack.pop() {
            self.stats.unify_steps += 1;
            let (x, y) = (self.deref(x), self.deref(y));
            if x == y {
                continue;
            }
            let ok = match (self.node(x), self.node(y)) {
                (Node::Ref(v), Node::Ref(w)) => {
                    let (v, w) = (*v, *w);
                    self.bind_var_var(v, w)
                }
                (Node::Ref(v), _) => {
                    let v = *v;
                    self.bind_var_term(v, y)?
                }
                (_, Node::Ref(w)) => {
                    let w = *w;
                    self.bind_var_term(w, x)?
                }
                (Node::Int(m), Node::Int(n)) => m == n,
                (Node::Atom(p), Node::Atom(q)) => p == q,
                (Node::Struct(f, xs), Node::Struct(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        false
                    } else {
                        // A pair already under way is assumed equal; with no
                        // cells allocated during unification this bounds the
                        // work on rational trees.
                        let key = if x < y { (x, y) } else { (y, x) };
                        if visited.insert(key) {
                            let pairs: Vec<_> = xs.iter().copied().zip(ys.iter().copied()).rev().collect();
                            stack.extend(pairs);
                        }
                        true
                    }
                }
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn bind_var_var(&mut self, v: VarId, w: VarId) -> bool {
        let (cv, cw) = (self.is_constrained(v), self.is_constrained(w));
        // `from` gets bound to `to`.
        let (from, to) = match (cv, cw) {
            (true, false) => (w, v),
            (false, true) => (v, w),
            _ if v > w => (v, w),
            _ => (w, v),
        };
        if !self.is_fresh(from) {
            self.clear_fresh(to);
        }
        if cv && cw {
            return self.on_bind_var(from, to);
        }
        let cell = self.var_cell(to);
        self.bind(from, cell);
        true
    }

    fn bind_var_term(&mut self, v: VarId, t: TermId) -> Result<bool, StoError> {
        if self.is_constrained(v) {
            return Ok(match self.node(t) {
                Node::Int(n) => {
                    let n = n.clone();
                    self.on_bind_int(v, n)
                }
                _ => false,
            });
        }
        if matches!(self.node(t), Node::Struct(..)) && self.mode != OccursMode::False {
            if self.is_fresh(v) {
                self.stats.occurs_skipped += 1;
            } else {
                self.stats.occurs_scans += 1;
                if self.occurs_in(v, t) {
                    return match self.mode {
                        OccursMode::Error => Err(StoError {
                            var: v,
                            term: self.print_term(t, 5),
                        }),
                        _ => Ok(false),
                    };
                }
            }
        }
        self.bind(v, t);
        Ok(true)
    }

    /// Canonical text of `t`; cyclic subterms nested deeper than `depth_limit`
    /// print as `...`. Unbound variables print as `_G<id>`.
    pub fn print_term(&self, t: TermId, depth_limit: usize) -> String {
        self.render(t, depth_limit, &|_| None).to_string()
    }

    /// Converts a heap term to a source term, naming variables through
    /// `names` (falling back to `_G<id>`).
    pub fn render(&self, t: TermId, depth_limit: usize, names: &dyn Fn(VarId) -> Option<String>) -> SourceTerm {
        let mut path = Vec::new();
        self.render_at(t, 0, depth_limit, names, &mut path)
    }

    fn render_at(
        &self,
        t: TermId,
        depth: usize,
        limit: usize,
        names: &dyn Fn(VarId) -> Option<String>,
        path: &mut Vec<TermId>,
    ) -> SourceTerm {
        let t = self.deref(t);
        match self.node(t) {
            Node::Ref(v) => SourceTerm::var(names(*v).unwrap_or_else(|| v.to_string())),
            Node::Int(n) => SourceTerm::int(n.clone()),
            Node::Atom(a) => SourceTerm::atom(a.as_ref()),
            Node::Struct(f, args) => {
                if depth >= limit && path.contains(&t) {
                    return SourceTerm::atom("...");
                }
                if f.as_ref() == CONS && args.len() == 2 {
                    return self.render_list(t, depth, limit, names, path);
                }
                path.push(t);
                let rendered = args
                    .iter()
                    .map(|&a| self.render_at(a, depth + 1, limit, names, path))
                    .collect();
                path.pop();
                SourceTerm::compound(f.as_ref(), rendered)
            }
        }
    }

    fn render_list(
        &self,
        mut t: TermId,
        mut depth: usize,
        limit: usize,
        names: &dyn Fn(VarId) -> Option<String>,
        path: &mut Vec<TermId>,
    ) -> SourceTerm {
        let base = path.len();
        let mut items = Vec::new();
        let tail = loop {
            t = self.deref(t);
            match self.node(t) {
                Node::Struct(f, args) if f.as_ref() == CONS && args.len() == 2 => {
                    if depth >= limit && path.contains(&t) {
                        break SourceTerm::atom("...");
                    }
                    path.push(t);
                    items.push(self.render_at(args[0], depth + 1, limit, names, path));
                    t = args[1];
                    depth += 1;
                }
                _ => break self.render_at(t, depth, limit, names, path),
            }
        };
        path.truncate(base);
        SourceTerm::list(items, tail)
    }

    /// Copies a source term onto the heap. Named variables are shared through
    /// `vars`; `_` is always a new variable.
    pub fn from_source(&mut self, t: &SourceTerm, vars: &mut HashMap<String, TermId>) -> TermId {
        match &t.kind {
            TermKind::Var(name) if name == "_" => self.new_var(),
            TermKind::Var(name) => match vars.get(name) {
                Some(&id) => id,
                None => {
                    let id = self.new_var();
                    vars.insert(name.clone(), id);
                    id
                }
            },
            TermKind::Int(n) => self.int(n.clone()),
            TermKind::Atom(a) => self.atom(a),
            TermKind::Compound(f, args) => {
                let args = args.iter().map(|a| self.from_source(a, vars)).collect();
                self.compound(f, args)
            }
        }
    }

    /// Elements of a proper list, or `None`.
    pub fn list_items(&self, mut t: TermId) -> Option<Vec<TermId>> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        loop {
            match self.view(t) {
                TermView::Atom(a) if a == NIL => return Some(out),
                TermView::Compound(f, args) if f == CONS && args.len() == 2 => {
                    if !seen.insert(self.deref(t)) {
                        return None;
                    }
                    out.push(args[0]);
                    t = args[1];
                }
                _ => return None,
            }
        }
    }
}
