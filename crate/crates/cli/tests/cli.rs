use std::path::PathBuf;
use std::process::{Command, Output};

fn mapgraded(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapgraded"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mapgraded-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn hh_of_dual_numbers() {
    let o = mapgraded(&["hh", "--cat", "lambda", "--max-degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("HH: 2 1 1"), "{out}");
    assert!(out.contains("convention standard, truncated at degree 2"), "{out}");
}

#[test]
fn hh_of_ground_field_marks_truncation() {
    let o = mapgraded(&["hh", "--cat", "q", "--max-degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "HH: 1 0 0 0*"));
}

#[test]
fn mayer_vietoris_on_vposet() {
    let o = mapgraded(&["mv", "--diagram", "vposet-free", "--max-degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exact: yes (degrees 0..3)"));
}

#[test]
fn bundled_a2_fixture_declares_a2_and_t2() {
    let o = mapgraded(&["validate"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("A2: category, 2 objects, 3 morphisms"));
    assert!(out.contains("T2: graded category, 2 objects over 2 base objects, total dimension 3"));
}

#[test]
fn failed_property_exits_one() {
    let o = mapgraded(&["cover", "--cover", "T2-points", "--degree", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unhit simplex: (u)"));
    let o = mapgraded(&["cover", "--cover", "T2-points", "--degree", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn unknown_reference_is_an_input_error() {
    let p = scratch(
        "unknown.json",
        r#"{ "graded": [ { "kind": "free", "name": "x", "base": "missing" } ] }"#,
    );
    let o = mapgraded(&["-w", p.to_str().unwrap(), "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("undeclared missing"), "{}", stderr(&o));
}

#[test]
fn duplicate_declaration_is_an_input_error() {
    let p = scratch(
        "dup.json",
        r#"{ "categories": [ { "kind": "terminal", "name": "e" } ], "graded": [ { "kind": "ground", "name": "e" } ] }"#,
    );
    let o = mapgraded(&["-w", p.to_str().unwrap(), "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duplicate declaration e"));
}

#[test]
fn parse_errors_carry_file_and_line() {
    let p = scratch("bad.json", "{\n  \"graded\": [\n    { \"kind\": \"ground\", }\n  ]\n}\n");
    let o = mapgraded(&["-w", p.to_str().unwrap(), "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.json:3:"), "{}", stderr(&o));
}

#[test]
fn validation_failure_names_the_declaration() {
    let p = scratch(
        "invalid.json",
        r#"{ "categories": [ { "kind": "table", "name": "c", "objects": ["a"],
              "morphisms": [["f", "a", "a"], ["g", "a", "a"]], "identities": [["a", "f"]] } ] }"#,
    );
    let o = mapgraded(&["-w", p.to_str().unwrap(), "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c is invalid"));
}

#[test]
fn canonical_dump_is_a_fixed_point() {
    let first = stdout(&mapgraded(&["validate", "--canonical", "-"]));
    let p = scratch("canonical.json", &first);
    let o = mapgraded(&["-w", p.to_str().unwrap(), "validate", "--canonical", "-"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), first);
    let again = mapgraded(&["-w", p.to_str().unwrap(), "triangle", "--bimodule", "lambda-diag", "--max-degree", "2"]);
    assert_eq!(stdout(&again), stdout(&mapgraded(&["triangle", "--bimodule", "lambda-diag", "--max-degree", "2"])));
}

#[test]
fn json_lines_carry_settings() {
    let o = mapgraded(&["--json", "--convention", "flipped", "hh", "--cat", "T2", "--max-degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let recs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let per_degree: Vec<_> = recs.iter().filter(|r| r["check"] == "hh").collect();
    assert_eq!(per_degree.len(), 3);
    for r in &recs {
        assert_eq!(r["convention"], "flipped");
        assert_eq!(r["max_degree"], 2);
        assert!(!r["cover_depth"].is_null());
    }
    let dims: Vec<_> = per_degree.iter().map(|r| r["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, [1, 0, 0]);
    assert_eq!(recs.last().unwrap()["verified"], true);
}

#[test]
fn reports_are_deterministic() {
    let args = ["restrict", "--graded", "kV", "--samples", "8", "--seed", "5", "--max-degree", "2"];
    let a = mapgraded(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&mapgraded(&args)));
}

#[test]
fn every_command_runs_on_the_fixtures() {
    let cases: &[&[&str]] = &[
        &["nerve", "--cat", "A2"],
        &["cover", "--cover", "vposet-free"],
        &["restrict", "--graded", "kV", "--along", "V-t0-in"],
        &["glue", "--cover", "vposet-random"],
        &["tensor", "--left", "kk", "--right", "kk"],
        &["hom", "--left", "lambda-diag", "--right", "lambda-diag"],
        &["arrow", "--bimodule", "kk"],
        &["recognize-arrow", "--cat", "A2", "--ideal", "u"],
        &["sheaf-check", "--cover", "opens-chains"],
        &["support", "--functor", "T2-at-0"],
        &["localize", "--cat", "T2", "--ideal", "u"],
        &["triangle", "--bimodule", "kk"],
        &["censor", "--cat", "T2-split", "--along", "A2-ends-in"],
        &["groth", "--pseudo", "vposet-const"],
        &["base-change", "--pseudo", "vposet-const", "--along", "V-t0-in"],
        &["cstar", "--pseudo", "vposet-const", "--anchors", "t0,t1"],
        &["chain-mv", "--pseudo", "vposet-diag"],
        &["compare", "--diagram", "vposet-id"],
    ];
    for args in cases {
        let mut full = args.to_vec();
        full.extend(["--max-degree", "2"]);
        let o = mapgraded(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}{}", stdout(&o), stderr(&o));
    }
}
