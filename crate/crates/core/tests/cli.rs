use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_teamlogic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes `text` to a file unique to this test process.
fn file(name: &str, text: &str) -> String {
    let dir: PathBuf = std::env::temp_dir().join(format!("teamlogic-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn model() -> String {
    file("m.txt", "universe 2\nrel P/1 = {1}\n")
}

fn team() -> String {
    file("t.txt", "vars x y\n0 0\n1 0\n")
}

#[test]
fn eval_exit_codes_follow_the_verdict() {
    let (m, t) = (model(), team());
    let yes = run(&["eval", "--model", &m, "--team", &t, "--formula", "dep(y)"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout(&yes).trim(), "true");
    let no = run(&["eval", "--model", &m, "--team", &t, "--formula", "dep(x)"]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(stdout(&no).trim(), "false");
}

#[test]
fn eval_accepts_semantic_options() {
    let m = model();
    let t = file("x.txt", "vars x\n0\n1\n");
    // downward-closed, so every mode gives the same verdict
    for (f, want) in [("E y. (dep(y) & P(y))", 0), ("E y. (dep(y) & y=x)", 1), ("[most y] (P(y) | x=y)", 1)] {
        for extra in [
            &[][..],
            &["--or-mode", "strict"][..],
            &["--exists-mode", "lax"][..],
            &["--gq-search", "minimal", "--prune"][..],
        ] {
            let mut args = vec!["eval", "--model", &m, "--team", &t, "--formula", f, "--dialect", "dq"];
            args.extend_from_slice(extra);
            assert_eq!(run(&args).status.code(), Some(want), "{f} {extra:?}");
        }
    }
}

#[test]
fn machine_format_is_one_json_record_per_line() {
    let (m, t) = (model(), team());
    let o = run(&["--format", "machine", "eval", "--model", &m, "--team", &t, "--formula", "P(x)"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["result"], false);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_eso_reads_relations_from_teams() {
    let (m, t) = (model(), team());
    // rel(X) = {(0,0),(1,0)}: y is constantly 0
    let o = run(&["eval-eso", "--model", &m, "--formula", "A x. A y. (~R(x,y) | ~P(y))", "--rel", &format!("R={t}")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["eval-eso", "--model", &m, "--formula", "A x. A y. (~R(x,y) | P(x))", "--rel", &format!("R={t}")]);
    assert_eq!(o.status.code(), Some(1));
    let bad = run(&["eval-eso", "--model", &m, "--formula", "top", "--rel", "R"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn translate_prints_output_and_fresh_symbols() {
    let o = run(&["translate", "--to", "dq", "--formula", "Ef f/1. A x. P(f(x))"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert!(first.contains("dep("), "{text}");
    assert!(text.lines().any(|l| l.starts_with("fresh fn ")), "{text}");

    let o = run(&["--format", "machine", "translate", "--to", "eso", "--formula", "dep(x,y)", "--domain", "x,y"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["output"].as_str().unwrap().contains("~R("));

    let o = run(&["translate", "--to", "nf", "--formula", "ER R/1. A x. R(x)"]);
    assert!(stdout(&o).contains("requires universe size >= 2"));
}

#[test]
fn translated_sentence_is_equivalent_to_its_source() {
    let src = "Ef f/1. A x. P(f(x))";
    let o = run(&["translate", "--to", "dq", "--formula", src]);
    let dq = stdout(&o).lines().next().unwrap().to_string();
    // the output uses reserved names, so compare through a renamed copy
    let renamed = dq.replace('_', "w");
    let o = run(&["check-equiv", "--lhs", src, "--rhs", &renamed, "--sizes", "2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn sweep_reports_pass_and_counterexamples() {
    let o = run(&["sweep", "--property", "empty-team", "--quantifiers", "most", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: pass"));

    let o = run(&["sweep", "--property", "downward-closure", "--dialect", "iq", "--formula", "perp(x;;y)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample:"));

    let o = run(&["--format", "machine", "sweep", "--property", "locality", "--count", "40", "--seed", "3", "--sizes", "3"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["instances"], 40);
    assert_eq!(v["seed"], 3);
}

#[test]
fn sweeps_replay_from_the_seed() {
    let args = ["--format", "machine", "sweep", "--property", "downward-closure", "--dialect", "iq", "--count", "60", "--seed", "11", "--all"];
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        v["elapsed_ms"] = 0.into();
        v
    };
    assert_eq!(strip(run(&args)), strip(run(&args)));
}

#[test]
fn large_default_sweeps_fall_back_to_random_instances() {
    let o = run(&[
        "--format", "machine", "sweep", "--property", "empty-team", "--sizes", "2,3", "--signature", "P/1,E/2", "--quantifiers", "most,exists",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["instances"], 500);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_equiv_finds_counterexamples() {
    let o = run(&["check-equiv", "--lhs", "top", "--rhs", "bot", "--sizes", "2,3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["check-equiv", "--lhs", "[exists x] P(x)", "--rhs", "E x. P(x)", "--sizes", "1..3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn quant_subcommands() {
    let o = run(&["quant", "--list"]);
    assert!(stdout(&o).lines().any(|l| l == "most/1"));
    let o = run(&["quant", "--show", "most", "--size", "3"]);
    assert_eq!(stdout(&o), "{0,1}\n{0,2}\n{1,2}\n{0,1,2}\n");
    let o = run(&["quant", "--dual", "exists", "--size", "2"]);
    assert_eq!(stdout(&o), "{0,1}\n");
    let o = run(&["quant", "--validate", "most", "--sizes", "1..4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn loaded_quantifiers_are_validated() {
    let q = file("q.txt", "quant odd/1\non 2 = {{0},{0,1}}\n");
    let o = run(&["--load", &q, "quant", "--validate", "odd", "--sizes", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = file("bad.txt", "quant flip/1\non 2 = {{0}}\n");
    let o = run(&["--load", &bad, "quant", "--validate", "flip", "--sizes", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("monotone=false"));
}

#[test]
fn errors_exit_with_two() {
    let o = run(&["quant", "--show", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown quantifier"));
    let o = run(&["eval", "--model", "/nonexistent", "--team", "/nonexistent", "--formula", "top"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let (m, t) = (model(), team());
    let o = run(&["eval", "--model", &m, "--team", &t, "--formula", "P(x,"]);
    assert_eq!(o.status.code(), Some(2));
}
