use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use clpz::oracle::{run_gate, Limits};
use clpz::OccursMode;
use clpz_cli::{bench_counting_loops, Outcome, Session, SessionConfig};

/// Prolog toplevel with integer constraints over unbounded domains.
#[derive(Debug, Parser)]
#[command(name = "clpz", version)]
struct Args {
    /// Occurs-check mode: false, true or error.
    #[arg(long, value_name = "MODE", default_value = "false")]
    occurs_check: OccursMode,
    /// Load a program file before running; may be repeated.
    #[arg(long, value_name = "FILE")]
    consult: Vec<PathBuf>,
    /// Run one query and exit.
    #[arg(long, value_name = "GOAL")]
    query: Option<String>,
    /// Answers to print per query without prompting.
    #[arg(long, value_name = "N")]
    answers: Option<usize>,
    /// Compare is/2 and #=/2 counting loops of N iterations (at least 10000).
    #[arg(long, value_name = "N")]
    bench: Option<u64>,
    /// Run the random commutation and soundness gate over N seeds.
    #[arg(long, value_name = "N")]
    seed_test: Option<u64>,
    /// Print propagator run counts after every query.
    #[arg(long)]
    show_runs: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("clpz: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();

    if let Some(n) = args.bench {
        if n < 10_000 {
            return usage_error("--bench needs at least 10000 iterations");
        }
        return match bench_counting_loops(n) {
            Ok(report) => {
                println!("{report}");
                if report.propagators_created == 0 {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("clpz: {e}");
                ExitCode::from(1)
            }
        };
    }

    if let Some(n) = args.seed_test {
        let report = run_gate(0..n, Limits::default(), 5);
        println!(
            "formulas: {}, commutation checks: {}, mismatches: {}",
            report.formulas,
            report.commutation_checks,
            report.mismatches.len()
        );
        for (seed, m) in &report.mismatches {
            println!("seed {seed}: {m}");
        }
        return if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) };
    }

    let config = SessionConfig {
        occurs_check: args.occurs_check,
        consult: args.consult,
        answers: args.answers,
        show_runs: args.show_runs,
        step_limit: None,
    };
    let mut session = match Session::new(config) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let flag = session.interrupt_flag();
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, std::sync::atomic::Ordering::Relaxed)) {
        eprintln!("clpz: cannot install interrupt handler: {e}");
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let Some(q) = args.query {
        let outcome = session.run_batch(&q, &mut out);
        let _ = out.flush();
        return match outcome {
            Ok(Outcome::Answers { .. }) => ExitCode::SUCCESS,
            Ok(Outcome::Error(_)) => ExitCode::from(1),
            Err(e) => {
                eprintln!("clpz: {e}");
                ExitCode::from(1)
            }
        };
    }

    let stdin = io::stdin();
    let echo = !stdin.is_terminal();
    let mut input = stdin.lock();
    match session.repl(&mut input, &mut out, echo) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clpz: {e}");
            ExitCode::from(1)
        }
    }
}
