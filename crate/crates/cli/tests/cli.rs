use std::process::{Command, Output};

use serde_json::Value;

fn species(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_species"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 diagnostics")
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/output.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

const NGG_11: [&str; 10] = ["--model", "ngg", "--sigma", "0.5", "--beta", "1", "--n", "1", "--j", "1"];

fn with<'a>(command: &'a str, base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![command];
    v.extend_from_slice(base);
    v.extend_from_slice(extra);
    v
}

#[test]
fn pmf_csv_single_step() {
    let o = species(&with("pmf", &NGG_11, &["--m", "1", "--output", "csv"]));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,prob");
    let p: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((p[0] - 0.298_173_681_161_597_04).abs() < 1e-12);
    assert!((p[1] - 0.701_826_318_838_402_96).abs() < 1e-12);
}

#[test]
fn pd_estimate_single_step() {
    let doc = json(&species(&[
        "estimate", "--model", "pd", "--sigma", "0.5", "--theta", "0.5", "--n", "1", "--j", "1", "--m", "1",
    ]));
    assert_eq!(doc["method"], "exact");
    assert!((doc["point"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn simulate_zero_steps() {
    let doc = json(&species(&with("simulate", &NGG_11, &["--m", "0", "--draws", "50"])));
    let ks = doc["k"].as_array().unwrap();
    assert_eq!(ks.len(), 50);
    assert!(ks.iter().all(|k| k.as_u64() == Some(0)));
    assert_eq!(doc["seed"], 42);
    assert_eq!(doc["draws"], 50);
}

#[test]
fn estimate_switches_engine_at_cutoff() {
    let base = ["--model", "ngg", "--sigma", "0.5", "--beta", "1", "--n", "10", "--j", "5", "--draws", "2000"];
    let big = json(&species(&with("estimate", &base, &["--m", "10001"])));
    assert_eq!(big["method"], "asymptotic");
    assert_eq!(big["monte_carlo"]["bias_correction"], "none");
    let small = json(&species(&with("estimate", &base, &["--m", "100"])));
    assert_eq!(small["method"], "exact");
    let forced = json(&species(&with("estimate", &base, &["--m", "100", "--force-asymptotic"])));
    assert_eq!(forced["method"], "asymptotic");
}

#[test]
fn every_command_matches_schema() {
    let validator = schema();
    let runs: Vec<Vec<&str>> = vec![
        with("pmf", &NGG_11, &["--m", "5"]),
        with("estimate", &NGG_11, &["--m", "5"]),
        with("estimate", &NGG_11, &["--m", "5", "--force-asymptotic", "--draws", "1000"]),
        with("hpd", &NGG_11, &["--m", "5"]),
        with("simulate", &NGG_11, &["--m", "5", "--draws", "20"]),
        with("sample-limit", &NGG_11, &["--draws", "20"]),
        with("validate", &NGG_11, &["--m", "5"]),
        vec!["pmf", "--model", "pd", "--sigma", "0.3", "--theta", "-0.1", "--n", "4", "--j", "2", "--m", "6"],
    ];
    for args in runs {
        let doc = json(&species(&args));
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn schema_rejects_malformed_documents() {
    let validator = schema();
    let mut doc = json(&species(&with("hpd", &NGG_11, &["--m", "5"])));
    assert!(validator.is_valid(&doc));
    doc["model"]["theta"] = Value::from(1.0);
    assert!(!validator.is_valid(&doc));
    let mut doc = json(&species(&with("pmf", &NGG_11, &["--m", "2"])));
    doc["command"] = Value::from("hpd");
    assert!(!validator.is_valid(&doc));
}

#[test]
fn identical_config_gives_identical_bytes() {
    for command in ["simulate", "sample-limit", "estimate"] {
        let mut args = with(command, &NGG_11, &["--draws", "1000", "--seed", "7"]);
        if command != "sample-limit" {
            args.extend_from_slice(&["--m", "200"]);
        }
        if command == "estimate" {
            args.push("--force-asymptotic");
        }
        let a = species(&args);
        let b = species(&args);
        assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{command}");
    }
}

#[test]
fn usage_errors_name_the_flag() {
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (with("pmf", &NGG_11, &["--m", "1", "--force-exact", "--force-asymptotic"]), "--force-exact"),
        (with("pmf", &NGG_11, &["--m", "1", "--force-asymptotic"]), "--force-asymptotic"),
        (with("simulate", &NGG_11, &["--m", "1", "--force-exact"]), "--force-exact"),
        (with("pmf", &NGG_11, &[]), "--m"),
        (with("sample-limit", &NGG_11, &["--m", "3"]), "--m"),
        (with("pmf", &NGG_11, &["--m", "1", "--theta", "1"]), "--theta"),
        (vec!["pmf", "--model", "pd", "--sigma", "0.5", "--n", "1", "--j", "1", "--m", "1"], "--theta"),
        (vec!["pmf", "--model", "pd", "--sigma", "0.5", "--theta", "-0.6", "--n", "1", "--j", "1", "--m", "1"], "--theta"),
        (vec!["pmf", "--model", "ngg", "--sigma", "1.5", "--beta", "1", "--n", "1", "--j", "1", "--m", "1"], "--sigma"),
        (vec!["pmf", "--model", "ngg", "--sigma", "0.5", "--beta", "1", "--n", "2", "--j", "3", "--m", "1"], "--j"),
        (with("pmf", &NGG_11, &["--m", "1", "--alpha", "1.5"]), "--alpha"),
        (with("pmf", &NGG_11, &["--m", "1", "--precision-bits", "8"]), "--precision-bits"),
        (with("pmf", &NGG_11, &["--m", "20000"]), "--force-exact"),
        (with("estimate", &NGG_11, &["--m", "20000", "--draws", "10"]), "--draws"),
        (with("pmf", &NGG_11, &["--m", "1", "--output", "xml"]), "--output"),
    ];
    for (args, flag) in cases {
        let o = species(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_exits_cleanly() {
    let o = species(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sample-limit"));
}

#[test]
fn validate_reports_every_check() {
    let doc = json(&species(&[
        "validate", "--model", "pd", "--sigma", "0.4", "--theta", "2", "--n", "6", "--j", "3", "--m", "15",
    ]));
    assert_eq!(doc["passed"], true);
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c["pass"] == true), "{checks:?}");
}

#[test]
fn csv_formats_have_headers() {
    let expect = [
        ("hpd", vec!["--m", "4"], "lo,hi,mass,level"),
        ("estimate", vec!["--m", "4"], "method,m,point,lo,hi,interval_kind,alpha"),
        ("simulate", vec!["--m", "4", "--draws", "3"], "replication,k"),
        ("sample-limit", vec!["--draws", "3"], "draw,z"),
        ("validate", vec!["--m", "4"], "check,pass,detail"),
    ];
    for (command, extra, header) in expect {
        let mut args = with(command, &NGG_11, &extra);
        args.extend_from_slice(&["--output", "csv"]);
        let o = species(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o).lines().next(), Some(header));
    }
}
