use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn elpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elpp"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn subsumes_true() {
    let o = elpp(&["subsumes", &data("nominal_pair.vel"), "X", "{b}"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true (direct)\n");
}

#[test]
fn subsumes_false_exits_one() {
    let o = elpp(&[
        "subsumes",
        &data("nominal_pair.vel"),
        "(exists r1 . X)",
        "bot",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn subsumes_json_schema() {
    let o = elpp(&[
        "subsumes",
        &data("nominal_pair.vel"),
        "X",
        "{c}",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        json_out(&o),
        json!({"holds": true, "reason": "direct", "trace": null})
    );
    let o = elpp(&[
        "--format",
        "json",
        "subsumes",
        &data("nominal_pair.vel"),
        "A",
        "X",
    ]);
    assert_eq!(
        json_out(&o),
        json!({"holds": false, "reason": null, "trace": null})
    );
}

#[test]
fn subsumes_with_trace() {
    let o = elpp(&[
        "subsumes",
        &data("nominal_pair.vel"),
        "X",
        "{b}",
        "--trace",
        "--format",
        "json",
    ]);
    let v = json_out(&o);
    assert_eq!(v["holds"], json!(true));
    assert!(v["trace"]["fact"].as_str().unwrap().contains("{b}"));
    assert!(v["trace"]["rule"].is_string());
}

#[test]
fn classify_json_is_sorted_pairs() {
    let o = elpp(&["classify", &data("chain.vel"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let pairs = json_out(&o);
    let expected = json!([
        ["P", "P"],
        ["P", "W"],
        ["P", "Z"],
        ["W", "W"],
        ["W", "Z"],
        ["Z", "Z"]
    ]);
    assert_eq!(pairs, expected);
}

#[test]
fn classify_text() {
    let o = elpp(&["classify", &data("nominal_pair.vel")]);
    assert_eq!(stdout(&o), "A <= A\nB <= B\nX <= X\n");
}

#[test]
fn explain_prints_a_tree() {
    let o = elpp(&["explain", &data("nominal_pair.vel"), "(X and A)", "{c}"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("direct\n"), "{text}");
    assert!(text.contains("{c}"), "{text}");
    let o = elpp(&["explain", &data("nominal_pair.vel"), "A", "X"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn normalize_round_trips_through_the_parser() {
    let o = elpp(&["normalize", &data("nested.vel")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("axiom")).count(), 3);
    let reparsed = std::env::temp_dir().join(format!("elpp-normal-{}.vel", std::process::id()));
    std::fs::write(&reparsed, &text).unwrap();
    let again = elpp(&["normalize", reparsed.to_str().unwrap()]);
    std::fs::remove_file(&reparsed).unwrap();
    assert_eq!(stdout(&again), text);

    let o = elpp(&["normalize", &data("nested.vel"), "--format", "json"]);
    let v = json_out(&o);
    assert_eq!(v["axioms"].as_array().unwrap().len(), 3);
    assert_eq!(v["declarations"]["role"], json!(["r"]));
}

#[test]
fn parse_errors_exit_two_with_position() {
    let o = elpp(&["classify", &data("broken.vel")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("broken.vel:2:"), "{err}");
}

#[test]
fn bad_queries_and_usage_exit_two() {
    let o = elpp(&["subsumes", &data("nominal_pair.vel"), "Nope", "X"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("<query>"));
    assert_eq!(elpp(&["subsumes"]).status.code(), Some(2));
    assert_eq!(elpp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        elpp(&["classify", "/nonexistent/kb.vel"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_reports_agreement() {
    let o = elpp(&["check", "--count", "25", "--seed", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json_out(&o);
    let tally = v["tally"].as_object().unwrap();
    let total: u64 = tally.values().map(|n| n.as_u64().unwrap()).sum();
    assert_eq!(total, 25);
    assert!(tally
        .keys()
        .all(|k| k == "agree-true" || k == "agree-false"));
    assert_eq!(v["problems"], json!([]));
}

#[test]
fn check_with_tiny_budget_is_an_invariant_breach() {
    let o = elpp(&["check", "--count", "20", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("inconclusive"));
}

#[test]
fn check_concrete() {
    let o = elpp(&["check", "--count", "25", "--concrete"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
