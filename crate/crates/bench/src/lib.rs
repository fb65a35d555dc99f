//! Workloads shared by the criterion benches.

use clpz::Engine;

/// Engine with one of the bundled programs loaded.
pub fn engine_with(program: &str) -> Engine {
    let mut e = Engine::new();
    e.consult_str(program).expect("bundled program loads");
    e
}

/// Runs `query` to exhaustion and returns the number of answers.
pub fn count_answers(engine: &mut Engine, query: &str) -> usize {
    clpz::solutions_count(engine, query, usize::MAX)
}

/// Runs `query` and returns whether it has a first answer.
pub fn succeeds(engine: &mut Engine, query: &str) -> bool {
    matches!(engine.query(query).and_then(|mut s| s.next_answer()), Ok(Some(_)))
}
