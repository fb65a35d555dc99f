//! Toplevel, batch runner and benchmarks for the `clpz` binary.

pub mod bench;
pub mod session;
pub mod transcript;

pub use bench::{bench_counting_loops, BenchError, BenchReport};
pub use session::{Outcome, Session, SessionConfig, SessionError};
pub use transcript::{replay, TranscriptError};
