//! Ground-mode comparison of `is/2` and `#=/2` counting loops.

use std::fmt;
use std::time::{Duration, Instant};

use clpz::{Engine, EngineError};
use thiserror::Error;

/// Timed runs per loop; the median is reported.
const REPEATS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub iterations: u64,
    pub is_time: Duration,
    pub eq_time: Duration,
    /// `eq_time / is_time`.
    pub ratio: f64,
    /// Printed sum computed by both loops.
    pub result: String,
    /// Propagators created by the `#=` loop.
    pub propagators_created: u64,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "iterations:          {}", self.iterations)?;
        writeln!(f, "is/2 loop:           {:.3} ms", self.is_time.as_secs_f64() * 1e3)?;
        writeln!(f, "#=/2 loop:           {:.3} ms", self.eq_time.as_secs_f64() * 1e3)?;
        writeln!(f, "ratio:               {:.3}", self.ratio)?;
        writeln!(f, "result:              {}", self.result)?;
        write!(f, "propagators created: {}", self.propagators_created)
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0} produced no answer")]
    NoAnswer(&'static str),
    #[error("loops disagree: is/2 gave {is}, #=/2 gave {eq}")]
    Mismatch { is: String, eq: String },
}

fn run_loop(engine: &mut Engine, name: &'static str, n: u64) -> Result<(Duration, String, u64), BenchError> {
    let before = engine.store().stats.propagators_created;
    let start = Instant::now();
    let mut answers = engine.query(&format!("{name}({n}, 0, S)."))?;
    let answer = answers.next_answer()?.ok_or(BenchError::NoAnswer(name))?;
    let elapsed = start.elapsed();
    let created = answers.store().stats.propagators_created - before;
    let sum = answer.binding("S").ok_or(BenchError::NoAnswer(name))?.to_string();
    drop(answers);
    Ok((elapsed, sum, created))
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

/// Runs both counting loops `iterations` deep and compares them.
pub fn bench_counting_loops(iterations: u64) -> Result<BenchReport, BenchError> {
    let mut engine = Engine::new();
    engine.consult_str(clpz::programs::COUNTING)?;
    let mut is_times = Vec::new();
    let mut eq_times = Vec::new();
    let mut result = String::new();
    let mut propagators_created = 0;
    for _ in 0..REPEATS {
        let (t, is_sum, _) = run_loop(&mut engine, "count_is", iterations)?;
        is_times.push(t);
        let (t, eq_sum, created) = run_loop(&mut engine, "count_eq", iterations)?;
        eq_times.push(t);
        if is_sum != eq_sum {
            return Err(BenchError::Mismatch { is: is_sum, eq: eq_sum });
        }
        result = is_sum;
        propagators_created += created;
    }
    let is_time = median(is_times);
    let eq_time = median(eq_times);
    Ok(BenchReport {
        iterations,
        is_time,
        eq_time,
        ratio: eq_time.as_secs_f64() / is_time.as_secs_f64().max(1e-9),
        result,
        propagators_created,
    })
}
