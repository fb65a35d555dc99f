//! Labeling: depth-first enumeration of finite domains.
//!
//! The search itself runs as an engine choicepoint; this module holds the
//! options, argument checking and variable selection.

use std::fmt;

use crate::domain::Cardinality;
use crate::engine::{Engine, EngineError};
use crate::terms::{Store, TermId, TermView, VarId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum VarOrder {
    /// First unbound variable in list order.
    #[default]
    Leftmost,
    /// Smallest domain first, ties broken leftmost.
    FirstFail,
}

/// Values are always tried in ascending order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LabelOptions {
    pub var_order: VarOrder,
}

impl fmt::Display for LabelOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.var_order {
            VarOrder::Leftmost => f.write_str("[]"),
            VarOrder::FirstFail => f.write_str("[ff]"),
        }
    }
}

impl LabelOptions {
    /// Reads an option list such as `[]` or `[ff]`.
    pub fn from_term(store: &Store, t: TermId) -> Result<LabelOptions, EngineError> {
        let items = store
            .list_items(t)
            .ok_or_else(|| proper_list_error(store, t))?;
        let mut opts = LabelOptions::default();
        for item in items {
            match store.view(item) {
                TermView::Atom("ff") => opts.var_order = VarOrder::FirstFail,
                TermView::Atom("leftmost") => opts.var_order = VarOrder::Leftmost,
                TermView::Atom("up") => {}
                TermView::Var(_) => return Err(EngineError::Instantiation("labeling/2 option".into())),
                _ => {
                    return Err(EngineError::Domain(format!(
                        "labeling_option, {}",
                        store.print_term(item, 3)
                    )))
                }
            }
        }
        Ok(opts)
    }
}

fn proper_list_error(store: &Store, t: TermId) -> EngineError {
    match store.view(t) {
        TermView::Var(_) => EngineError::Instantiation("labeling/2 expects a list".into()),
        _ => EngineError::Type(format!("list, {}", store.print_term(t, 3))),
    }
}

/// Checks the variable list of `labeling/2`: every element is an integer or
/// a variable with a finite domain.
pub(crate) fn label_vars(store: &Store, t: TermId) -> Result<Vec<TermId>, EngineError> {
    let items = store
        .list_items(t)
        .ok_or_else(|| proper_list_error(store, t))?;
    for &item in &items {
        match store.view(item) {
            TermView::Int(_) => {}
            TermView::Var(v) => {
                let finite = store.var_domain(v).is_some_and(|d| d.is_finite());
                if !finite {
                    return Err(EngineError::Instantiation(format!(
                        "labeling/2 needs finite domains, {} is unbounded",
                        store.print_term(item, 3)
                    )));
                }
            }
            _ => return Err(EngineError::Type(format!("integer, {}", store.print_term(item, 3)))),
        }
    }
    Ok(items)
}

/// The next variable to label, or `None` when all are bound.
pub(crate) fn select_var(store: &Store, vars: &[TermId], order: VarOrder) -> Option<VarId> {
    let mut unbound = vars.iter().filter_map(|&t| store.unbound_var(t));
    match order {
        VarOrder::Leftmost => unbound.next(),
        VarOrder::FirstFail => {
            let mut best: Option<(Cardinality, VarId)> = None;
            for v in unbound {
                let size = store.var_domain(v).map(|d| d.cardinality()).unwrap_or(Cardinality::Infinite);
                if best.as_ref().is_none_or(|(b, _)| size < *b) {
                    best = Some((size, v));
                }
            }
            best.map(|(_, v)| v)
        }
    }
}

/// Counts the answers of `query`, stopping at `limit`. Errors end the count.
pub fn solutions_count(engine: &mut Engine, query: &str, limit: usize) -> usize {
    let Ok(mut answers) = engine.query(query) else {
        return 0;
    };
    let mut n = 0;
    while n < limit {
        match answers.next_answer() {
            Ok(Some(_)) => n += 1,
            _ => break,
        }
    }
    n
}
