use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noderep")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_noderep"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const LAZY: &str = "(\\x.(\\a.a) ((\\a.a) x))(\\y.y (\\a.a))";

#[test]
fn cl_of_the_replication_example() {
    let o = run(&["measure", "cl", "(y y)[y/(\\z.x) w]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[a(1,4)]");
}

#[test]
fn divergent_inference_runs_out_of_fuel() {
    let o = run(&["infer", "--fuel", "100", "(\\x.x x)(\\x.x x)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["reduce", "name", "--fuel", "100", "(\\x.x x)(\\x.x x)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fully_lazy_trace_as_json_lines() {
    let o = run(&["--format", "json", "reduce", "flneed", LAZY]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let kinds: Vec<&str> = lines.iter().map(|v| v["kind"].as_str().unwrap()).collect();
    assert_eq!(
        kinds,
        ["FL_DB", "FL_DB", "FL_DB", "FL_SPL", "FL_LS", "FL_SPL", "FL_LS", "FL_SPL", "FL_LS"]
    );
    for (i, v) in lines.iter().enumerate() {
        assert_eq!(v["step"], i + 1);
        assert!(v["path"].is_array());
        assert!(v["term"].is_string());
        assert!(v["cl"].as_str().unwrap().starts_with('['));
        assert!(v.get("rule").is_none());
    }
}

#[test]
fn rewrite_traces_carry_rule_tags() {
    let o = run(&["--format", "json", "reduce", "sub", "(y y)[y/(\\z.x) w]"]);
    let first: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["rule"], "APP");
    assert_eq!(first["lv"]["y1"], 0);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["reduce", "r-explore", "--seed", "7", "(\\x.x x)((\\y.y) z)"][..],
        &["reduce", "flneed", LAZY][..],
        &["infer", LAZY][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}

#[test]
fn reads_terms_from_stdin() {
    let o = run_stdin(&["reduce", "name", "-"], "(\\x.x) y\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("normal form after"));
}

#[test]
fn user_errors_exit_with_one() {
    let o = run(&["reduce", "name", "x[y//z]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    let o = run(&["reduce", "name", "(y z)[y//\\x.(y y)[y/\\a.a]]"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["check", "bogus", "x"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn skeleton_commands() {
    let o = run(&["skeleton", "mfe", "--theta", "y", "(\\a.a) y (\\a.a) (\\z.z y w)"]);
    assert_eq!(stdout(&o), "skeleton: [] y [] (\\z.z y [])\nmfes: [\\a.a; \\a.a; w]\n");
    let o = run(&["skeleton", "bigstep", "--theta", "y", "\\z.(y (u v)) z"]);
    assert_eq!(stdout(&o).trim(), "(\\z.y x1 z)[x1/u v]");
    let o = run(&["skeleton", "smallstep", "\\y.x[x/\\z.(y (u v)) z]"]);
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn grammar_checks() {
    assert_eq!(stdout(&run(&["check", "ne", "x (\\a.a)"])).trim(), "yes");
    assert_eq!(stdout(&run(&["check", "na", "(\\a.a) x"])).trim(), "no");
}

#[test]
fn inferred_derivations_validate() {
    let o = run(&["infer", LAZY]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (tree, d) = text.rsplit_once("D = ").unwrap();
    assert!(d.trim().starts_with('('));
    let path = std::env::temp_dir().join(format!("noderep-deriv-{}.txt", std::process::id()));
    std::fs::write(&path, tree).unwrap();
    let o = run(&["check", "derivation", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "valid");

    std::fs::write(&path, "AX x:[a, a] |- x : a\n").unwrap();
    let o = run(&["check", "derivation", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(&path).unwrap();

    let o = run(&["--format", "json", "infer", "\\x.x"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["d"], serde_json::json!([1, 1, 0]));
    assert_eq!(v["derivation"]["rule"], "ANS");
}

#[test]
fn diff_reports_agreement() {
    let o = run(&["diff", "(\\x.x x)(\\y.y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agree: true"));
    let o = run(&["diff", "--fuel", "50", "(\\x.x x)(\\x.x x)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unicode_output() {
    let o = run(&["--unicode", "skeleton", "bigstep", "λz.z"]);
    assert_eq!(stdout(&o).trim(), "x1[x1/λz.z]");
}
