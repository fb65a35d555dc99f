//! A small Prolog with integer constraints over unbounded domains.
//!
//! Propagation is guaranteed to terminate: within one propagation episode a
//! variable with an infinite domain wakes its watchers only once.

pub mod domain;
pub mod engine;
pub mod label;
pub mod oracle;
pub mod propagate;
pub mod syntax;
pub mod terms;

pub use domain::{Cardinality, Domain, Ext, Interval};
pub use engine::{format_answers, Answer, AnswerItem, ClauseDb, Engine, EngineError, Solutions};
pub use label::{solutions_count, LabelOptions, VarOrder};
pub use propagate::{Narrowed, Operand, PropId, PropKind, Relation};
pub use syntax::{parse_program, parse_query, parse_term, Clause, SourceTerm, SyntaxError};
pub use terms::{OccursMode, StoError, Store, TermId, VarId};

/// Example programs shipped with the library.
pub mod programs {
    pub const FACTORIAL: &str = include_str!("../programs/factorial.pl");
    pub const MC_CARTHY_91: &str = include_str!("../programs/mc_carthy_91.pl");
    pub const QUEENS: &str = include_str!("../programs/queens.pl");
    pub const COUNTING: &str = include_str!("../programs/counting.pl");

    /// Looks a program up by file stem, e.g. `"queens"`.
    pub fn by_name(name: &str) -> Option<&'static str> {
        Some(match name {
            "factorial" => FACTORIAL,
            "mc_carthy_91" => MC_CARTHY_91,
            "queens" => QUEENS,
            "counting" => COUNTING,
            _ => return None,
        })
    }
}
