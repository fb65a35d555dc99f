//! A toplevel session over one engine.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clpz::terms::Stats;
use clpz::{Engine, EngineError, OccursMode, Solutions};
use thiserror::Error;

#[derive(Clone, Debug, Default)]
pub struct SessionConfig {
    pub occurs_check: OccursMode,
    pub consult: Vec<PathBuf>,
    /// Answers to print per query without asking. `None` asks at the
    /// toplevel and prints only the first answer in batch mode.
    pub answers: Option<usize>,
    /// Print propagation counters after every query.
    pub show_runs: bool,
    /// Resolution steps allowed per answer.
    pub step_limit: Option<u64>,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Consult { path: PathBuf, source: EngineError },
}

/// How a query ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Answers { count: usize, exhausted: bool },
    Error(EngineError),
}

pub struct Session {
    engine: Engine,
    config: SessionConfig,
    interrupt: Arc<AtomicBool>,
}

impl Session {
    /// Builds the engine and consults the configured files in order.
    pub fn new(config: SessionConfig) -> Result<Session, SessionError> {
        let mut engine = Engine::with_mode(config.occurs_check);
        engine.set_step_limit(config.step_limit);
        let interrupt = Arc::new(AtomicBool::new(false));
        engine.set_interrupt(interrupt.clone());
        for path in &config.consult {
            let text = std::fs::read_to_string(path).map_err(|source| SessionError::Read {
                path: path.clone(),
                source,
            })?;
            engine.consult_str(&text).map_err(|source| SessionError::Consult {
                path: path.clone(),
                source,
            })?;
        }
        Ok(Session { engine, config, interrupt })
    }

    pub fn engine(&mut self) -> &mut Engine {
        &mut self.engine
    }

    /// Flag that aborts the running query when set.
    pub fn interrupt_flag(&self) -> Arc<AtomicBool> {
        self.interrupt.clone()
    }

    /// Runs one query and writes its answers in toplevel style.
    pub fn run_batch(&mut self, query: &str, out: &mut dyn Write) -> io::Result<Outcome> {
        let cap = self.config.answers.unwrap_or(1);
        self.interrupt.store(false, Ordering::Relaxed);
        let show_runs = self.config.show_runs;
        let before = self.engine.store().stats.clone();
        let mut solutions = match self.engine.query(query) {
            Ok(s) => s,
            Err(e) => {
                writeln!(out, "{e}")?;
                return Ok(Outcome::Error(e));
            }
        };
        let mut count = 0;
        let outcome = loop {
            if count == cap {
                writeln!(out, ".")?;
                break Outcome::Answers { count, exhausted: false };
            }
            match solutions.next_answer() {
                Ok(Some(a)) => {
                    if count > 0 {
                        writeln!(out, " ;")?;
                    }
                    write!(out, "{a}")?;
                    count += 1;
                }
                Ok(None) => {
                    if count > 0 {
                        writeln!(out, " ;")?;
                    }
                    writeln!(out, "false.")?;
                    break Outcome::Answers { count, exhausted: true };
                }
                Err(e) => {
                    if count > 0 {
                        writeln!(out)?;
                    }
                    writeln!(out, "{e}")?;
                    break Outcome::Error(e);
                }
            }
        };
        if show_runs {
            write_runs(out, &before, &solutions)?;
        }
        Ok(outcome)
    }

    /// Reads queries from `input` until end of input or `halt.`. After each
    /// answer a line holding `;` asks for the next one; anything else stops.
    /// With `echo` the reply is written back so the output reads as a
    /// transcript when input is not a terminal.
    pub fn repl(&mut self, input: &mut dyn BufRead, out: &mut dyn Write, echo: bool) -> io::Result<()> {
        loop {
            write!(out, "?- ")?;
            out.flush()?;
            let Some(query) = read_query(input, out)? else {
                writeln!(out)?;
                return Ok(());
            };
            let query = query.trim();
            if query == "halt." {
                return Ok(());
            }
            if query == "." || query.is_empty() {
                continue;
            }
            if self.interactive_query(query, input, out, echo)? {
                return Ok(());
            }
        }
    }

    /// Returns true when input ended while waiting for a reply.
    fn interactive_query(
        &mut self,
        query: &str,
        input: &mut dyn BufRead,
        out: &mut dyn Write,
        echo: bool,
    ) -> io::Result<bool> {
        self.interrupt.store(false, Ordering::Relaxed);
        let cap = self.config.answers;
        let show_runs = self.config.show_runs;
        let before = self.engine.store().stats.clone();
        let mut solutions = match self.engine.query(query) {
            Ok(s) => s,
            Err(e) => {
                writeln!(out, "{e}")?;
                return Ok(false);
            }
        };
        let mut count = 0;
        let mut eof = false;
        loop {
            if cap == Some(count) {
                writeln!(out, ".")?;
                break;
            }
            match solutions.next_answer() {
                Ok(Some(a)) => {
                    write!(out, "{a} ")?;
                    count += 1;
                    if cap.is_some() {
                        writeln!(out, ";")?;
                        continue;
                    }
                    out.flush()?;
                    let mut reply = String::new();
                    if input.read_line(&mut reply)? == 0 {
                        writeln!(out, ".")?;
                        eof = true;
                        break;
                    }
                    if reply.trim() == ";" {
                        if echo {
                            writeln!(out, ";")?;
                        }
                    } else {
                        writeln!(out, ".")?;
                        break;
                    }
                }
                Ok(None) => {
                    writeln!(out, "false.")?;
                    break;
                }
                Err(e) => {
                    if count > 0 {
                        writeln!(out)?;
                    }
                    writeln!(out, "{e}")?;
                    break;
                }
            }
        }
        if show_runs {
            write_runs(out, &before, &solutions)?;
        }
        Ok(eof)
    }
}

/// Collects lines until the text ends with a full stop. `None` at end of input.
fn read_query(input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<Option<String>> {
    let mut text = String::new();
    loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(if text.trim().is_empty() { None } else { Some(text) });
        }
        text.push_str(&line);
        let t = text.trim_end();
        if t.is_empty() {
            text.clear();
            write!(out, "?- ")?;
            out.flush()?;
        } else if t.ends_with('.') {
            return Ok(Some(text));
        } else {
            write!(out, "|    ")?;
            out.flush()?;
        }
    }
}

fn write_runs(out: &mut dyn Write, before: &Stats, solutions: &Solutions<'_>) -> io::Result<()> {
    let now = &solutions.store().stats;
    writeln!(
        out,
        "% propagator runs: {}, episodes: {}, largest episode: {}, propagators created: {}, steps: {}",
        now.propagator_runs - before.propagator_runs,
        now.episodes - before.episodes,
        now.max_episode_runs,
        now.propagators_created - before.propagators_created,
        solutions.steps(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(program: &str, answers: Option<usize>) -> Session {
        let mut s = Session::new(SessionConfig { answers, ..Default::default() }).unwrap();
        s.engine().consult_str(program).unwrap();
        s
    }

    fn batch(s: &mut Session, q: &str) -> (String, Outcome) {
        let mut out = Vec::new();
        let o = s.run_batch(q, &mut out).unwrap();
        (String::from_utf8(out).unwrap(), o)
    }

    #[test]
    fn batch_formats() {
        let mut s = session(clpz::programs::FACTORIAL, Some(10));
        let (text, o) = batch(&mut s, "Y in 1..2, factorial(X,Y).");
        assert_eq!(text, "Y = 1,\nX = 0 ;\nY = 1,\nX = 1 ;\nY = 2,\nX = 2 ;\nfalse.\n");
        assert_eq!(o, Outcome::Answers { count: 3, exhausted: true });
        let (text, _) = batch(&mut s, "fail.");
        assert_eq!(text, "false.\n");
    }

    #[test]
    fn batch_default_is_first_answer() {
        let mut s = session(clpz::programs::FACTORIAL, None);
        let (text, o) = batch(&mut s, "factorial(X,Y).");
        assert_eq!(text, "X = 0,\nY = 1.\n");
        assert_eq!(o, Outcome::Answers { count: 1, exhausted: false });
    }

    #[test]
    fn batch_error() {
        let mut s = session("", None);
        let (text, o) = batch(&mut s, "nope(1).");
        assert_eq!(text, "error(existence_error, procedure nope/1)\n");
        assert!(matches!(o, Outcome::Error(EngineError::Existence(_))));
    }

    #[test]
    fn repl_transcript() {
        let mut s = session(clpz::programs::FACTORIAL, None);
        let input = "Y in 1..2,\nfactorial(X,Y).\n;\n\nnope.\nX = 1.\n\nhalt.\n";
        let mut out = Vec::new();
        s.repl(&mut input.as_bytes(), &mut out, true).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "?- |    Y = 1,\nX = 0 ;\nY = 1,\nX = 1 .\n?- error(existence_error, procedure nope/0)\n?- X = 1 .\n?- "
        );
    }

    #[test]
    fn repl_exhaustion_and_eof() {
        let mut s = session("", None);
        let mut out = Vec::new();
        s.repl(&mut "X in 1..2, labeling([],[X]).\n;\n;\n".as_bytes(), &mut out, true).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "?- X = 1 ;\nX = 2 ;\nfalse.\n?- \n");
    }

    #[test]
    fn show_runs_line() {
        let mut s = Session::new(SessionConfig { show_runs: true, ..Default::default() }).unwrap();
        let (text, _) = batch(&mut s, "X#>Y, Y#>X, X#>0.");
        assert!(text.contains("% propagator runs: "), "{text}");
        assert!(text.contains("propagators created: 3"), "{text}");
    }

    fn repl_output(config: SessionConfig, input: &str) -> String {
        let mut s = Session::new(config).unwrap();
        let mut out = Vec::new();
        s.repl(&mut input.as_bytes(), &mut out, true).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn repl_examples() {
        let text = repl_output(SessionConfig::default(), "X in 0..2, 0/X #= 0, X = 1.\n;\ntrue.\n\n");
        assert_eq!(text, "?- X = 1 ;\nfalse.\n?- true .\n?- \n");
        let config = SessionConfig { occurs_check: OccursMode::Error, ..Default::default() };
        let text = repl_output(config, "X = f(X).\nX = 1.\n\n");
        assert_eq!(text, "?- error(sto_error, _G0 occurs in f(_G0))\n?- X = 1 .\n?- \n");
    }

    #[test]
    fn interrupt_aborts_query_only() {
        let mut s = session(clpz::programs::MC_CARTHY_91, Some(2));
        let flag = s.interrupt_flag();
        let t = std::thread::spawn(move || {
            std::thread::sleep(std::time::Duration::from_millis(100));
            flag.store(true, Ordering::Relaxed);
        });
        let (text, o) = batch(&mut s, "Y #\\= 91, mc_carthy_91(X, Y).");
        t.join().unwrap();
        assert_eq!(o, Outcome::Error(EngineError::Interrupted));
        assert!(text.ends_with("error(interrupted, query aborted)\n"), "{text}");
        let (text, _) = batch(&mut s, "mc_carthy_91(95, Y).");
        assert!(text.starts_with("Y = 91 ;"), "{text}");
    }
}