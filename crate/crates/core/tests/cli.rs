use std::fs;
use std::path::{Path, PathBuf};

use achem::cli::run_command;
use achem::{parse_chemistry, read_trace, simulate, FeasibilityMode, SchedulerPolicy};
use tempfile::TempDir;

const TOY: &str = "molecules: a, f\nreaction r1: a + f -> 2 a\nreaction r2: 2 a -> a + f\ninit: a, f\n";
const HYPERCYCLE: &str = "molecules: x, y, f1, f2\n\
                          reaction r1: x + f1 -> x + y\n\
                          reaction r2: y + f2 -> y + x\n\
                          init: x, y, 2 f1, 2 f2\n";
const GROWTH: &str = "molecules: a\nreaction r: a -> 2 a\ninit: a\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn achem(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("achem").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulated(dir: &TempDir, spec_text: &str, steps: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let spec = write(dir, "spec.chem", spec_text);
    let trace = dir.path().join("run.trace");
    let mut args = vec!["simulate", s(&spec), "--steps", steps, "--out", s(&trace)];
    args.extend_from_slice(extra);
    let r = achem(&args);
    assert_eq!(r.code, 0, "{}", r.err);
    (spec, trace)
}

#[test]
fn simulate_matches_the_engine() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "toy.chem", TOY);
    let r = achem(&["simulate", s(&spec), "--steps", "4"]);
    assert_eq!(r.code, 0);
    assert!(r.err.is_empty());
    let from_cli = read_trace(r.out.as_bytes()).unwrap();
    let direct = simulate(&parse_chemistry(TOY).unwrap(), 4, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    assert_eq!(from_cli, direct);
    assert_eq!(r.out.lines().count(), 5);
}

#[test]
fn selfrep_reports_witness_and_depleted_set() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = simulated(&dir, TOY, "4", &[]);
    let r = achem(&["selfrep", s(&trace), "--spec", s(&spec), "--entity", "a"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let report: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    let v = &report["verdicts"][0];
    assert_eq!(v["kind"], "level0");
    assert_eq!(v["status"], "potentially-self-reproducing");
    assert_eq!(v["consumed"], serde_json::json!(["f"]));
    assert_eq!(v["witness_paths"][0]["steps"][0]["reaction"], "r1");
    assert!(report["fingerprint"].as_str().unwrap().starts_with("sha256:"));

    let cyclic = achem(&["selfrep", s(&trace), "--spec", s(&spec), "--entity", "a", "--cyclic"]);
    assert_eq!(cyclic.code, 0, "{}", cyclic.err);
    assert!(cyclic.out.contains("actually-self-reproducing"));

    let negative = achem(&["selfrep", s(&trace), "--spec", s(&spec), "--entity", "f"]);
    assert_eq!(negative.code, 1);
    assert!(negative.out.contains("\"rejected\""));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = simulated(&dir, HYPERCYCLE, "10", &["--policy", "round-robin"]);
    let args = ["selfrep", s(&trace), "--spec", s(&spec), "--all"];
    let first = achem(&args);
    let second = achem(&args);
    assert_eq!(first.out, second.out);
    assert_eq!(first.code, second.code);
}

#[test]
fn cycle_command() {
    let dir = TempDir::new().unwrap();
    let (_, trace) = simulated(&dir, TOY, "6", &[]);
    let r = achem(&["cycle", s(&trace)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out.trim(), "cycle: prefix 0 period 2");

    let dir = TempDir::new().unwrap();
    let (_, trace) = simulated(&dir, GROWTH, "10", &[]);
    let r = achem(&["cycle", s(&trace)]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("no cycle within recorded horizon"));
}

#[test]
fn graph_command_writes_dot() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = simulated(&dir, TOY, "2", &[]);
    let dot = dir.path().join("g.dot");
    let state = format!("{}:0", s(&trace));
    let r = achem(&["graph", s(&spec), "--state", &state, "--dot", s(&dot)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph {"));
    assert!(text.contains(r#""f" -> "a" [label="r1"];"#));

    let bad = achem(&["graph", s(&spec), "--state", &format!("{}:99", s(&trace))]);
    assert_eq!(bad.code, 2);
    assert!(bad.out.is_empty());
}

#[test]
fn paths_command() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = simulated(&dir, TOY, "4", &[]);
    let r = achem(&["paths", s(&trace), "--spec", s(&spec), "--from", "f", "--to", "a", "--max-len", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("f =r1@0=> a"));
    let none = achem(&["paths", s(&trace), "--spec", s(&spec), "--from", "a", "--to", "f", "--max-len", "1"]);
    assert_eq!(none.code, 0, "r2 links a to f");
    let budget = achem(&["paths", s(&trace), "--spec", s(&spec), "--from", "a", "--to", "a", "--budget", "1"]);
    assert_eq!(budget.code, 3);
    assert!(budget.err.contains("budget"));
}

#[test]
fn selfrep1_command() {
    let dir = TempDir::new().unwrap();
    let (spec, trace) = simulated(&dir, HYPERCYCLE, "10", &["--policy", "round-robin"]);
    let r = achem(&["selfrep1", s(&trace), "--spec", s(&spec), "--entity", "{x, y}"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let report: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    let v = &report["verdicts"][0];
    assert_eq!(v["subject"], "{x, y}");
    assert_eq!(v["copy_count"], serde_json::json!([1, 2]));

    let cap = achem(&["selfrep1", s(&trace), "--spec", s(&spec), "--entity", "{x, y}", "--max-candidates", "0"]);
    assert_eq!(cap.code, 3);
    assert!(cap.out.contains("inconclusive"));

    let bad = achem(&["selfrep1", s(&trace), "--spec", s(&spec), "--entity", "{x}"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(achem(&[]).code, 2);
    assert_eq!(achem(&["frobnicate"]).code, 2);
    let help = achem(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("simulate"));

    let broken = write(&dir, "broken.chem", "molecules: a\nreaction r: a -> zz\n");
    let r = achem(&["simulate", s(&broken), "--steps", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("2:"), "{}", r.err);

    let bad_trace = write(&dir, "bad.trace", "{\"state\":{},\"t\":0}\n{\"executed\":\"r\",\"state\":{},\"t\":5}\n");
    let r = achem(&["cycle", s(&bad_trace)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line 2"));

    // a trace that does not belong to the chemistry
    let (spec, _) = simulated(&dir, TOY, "2", &[]);
    let other = TempDir::new().unwrap();
    let (_, growth_trace) = simulated(&other, GROWTH, "2", &[]);
    let r = achem(&["selfrep", s(&growth_trace), "--spec", s(&spec), "--entity", "a"]);
    assert_eq!(r.code, 2);

    let r = achem(&["selfrep", "missing.trace", "--spec", s(&spec), "--entity", "a"]);
    assert_eq!(r.code, 2);
    assert!(r.out.is_empty());
}

#[test]
fn strict_mode_on_the_command_line() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "one.chem", "molecules: a, b\nreaction r: a -> b\ninit: a\n");
    let strict = achem(&["simulate", s(&spec), "--steps", "3", "--feasibility", "strict"]);
    assert_eq!(strict.out.lines().count(), 1);
    let standard = achem(&["simulate", s(&spec), "--steps", "3"]);
    assert_eq!(standard.out.lines().count(), 2);
}
