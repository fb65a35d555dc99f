use std::io::Write;
use std::process::{Command, Output, Stdio};

fn clpz(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_clpz"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn program(name: &str) -> String {
    format!("{}/../core/programs/{name}.pl", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn batch_query() {
    let fact = program("factorial");
    let o = clpz(&["--consult", &fact, "--answers", "5", "--query", "Y in 1..5, factorial(X,Y)."], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Y = 1,\nX = 0 ;\nY = 1,\nX = 1 ;\nY = 2,\nX = 2 ;\nfalse.\n");
}

#[test]
fn exit_codes() {
    assert_eq!(clpz(&["--query", "nope."], "").status.code(), Some(1));
    assert_eq!(clpz(&["--query", "X = ."], "").status.code(), Some(1));
    assert_eq!(clpz(&["--query", "fail."], "").status.code(), Some(0));
    assert_eq!(clpz(&["--occurs-check=maybe"], "").status.code(), Some(2));
    assert_eq!(clpz(&["--consult", "/no/such/file.pl"], "").status.code(), Some(2));
    assert_eq!(clpz(&["--bench", "10"], "").status.code(), Some(2));
    assert_eq!(clpz(&["--frobnicate"], "").status.code(), Some(2));
}

#[test]
fn occurs_flag() {
    let o = clpz(&["--occurs-check=error", "--query", "X = f(X)."], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("error(sto_error"));
    let o = clpz(&["--occurs-check", "true", "--query", "X = f(X)."], "");
    assert_eq!(stdout(&o), "false.\n");
}

#[test]
fn toplevel_session() {
    let queens = program("queens");
    let o = clpz(&["--consult", &queens], "queens(6,Qs).\n;\n\nnope.\nhalt.\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "?- Qs = [2,4,6,1,3,5] ;\nQs = [3,6,2,5,1,4] .\n?- error(existence_error, procedure nope/0)\n?- "
    );
}

#[test]
fn show_runs_and_seed_test() {
    let o = clpz(&["--show-runs", "--query", "X#>Y, Y#>X, X#>0."], "");
    assert!(stdout(&o).contains("% propagator runs: 7,"), "{}", stdout(&o));
    let o = clpz(&["--seed-test", "50"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("formulas: 50, commutation checks: 250, mismatches: 0"));
}
