//! Replays recorded toplevel transcripts.
//!
//! A transcript starts with `%` directive lines:
//!
//! ```text
//! % consult: factorial
//! % answers: 10
//! % occurs_check: error
//! ```
//!
//! followed by blocks of `?- Query.` and the expected output, separated by
//! blank lines. [`replay`] reruns every query in one session and rebuilds
//! the text, so a correct transcript replays to itself byte for byte.

use thiserror::Error;

use crate::session::{Session, SessionConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("line {line}: unknown directive `{text}`")]
    Directive { line: usize, text: String },
    #[error("line {line}: no bundled program named `{name}`")]
    Program { line: usize, name: String },
    #[error("consulting {name}: {message}")]
    Consult { name: String, message: String },
}

pub fn replay(text: &str) -> Result<String, TranscriptError> {
    let mut config = SessionConfig::default();
    let mut programs = Vec::new();
    let mut header = String::new();
    let mut queries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(q) = line.strip_prefix("?- ") {
            queries.push(q.to_string());
        } else if queries.is_empty() && line.starts_with('%') {
            header.push_str(line);
            header.push('\n');
            let directive = line.trim_start_matches('%').trim();
            let bad = || TranscriptError::Directive { line: i + 1, text: line.to_string() };
            let (key, value) = directive.split_once(':').ok_or_else(bad)?;
            let value = value.trim();
            match key.trim() {
                "consult" => {
                    let program = clpz::programs::by_name(value).ok_or_else(|| TranscriptError::Program {
                        line: i + 1,
                        name: value.to_string(),
                    })?;
                    programs.push((value.to_string(), program));
                }
                "answers" => config.answers = Some(value.parse().map_err(|_| bad())?),
                "occurs_check" => config.occurs_check = value.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
    }
    let mut session = Session::new(config).expect("no files to consult");
    for (name, program) in programs {
        session.engine().consult_str(program).map_err(|e| TranscriptError::Consult {
            name,
            message: e.to_string(),
        })?;
    }
    let mut out = header;
    for q in queries {
        out.push('\n');
        out.push_str("?- ");
        out.push_str(&q);
        out.push('\n');
        let mut buf = Vec::new();
        session.run_batch(&q, &mut buf).expect("writing to memory");
        out.push_str(&String::from_utf8(buf).expect("answers are UTF-8"));
    }
    Ok(out)
}
