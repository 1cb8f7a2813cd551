use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shiftlike"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(out: &Output) -> Vec<(i64, f64)> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,log_value"));
    lines
        .map(|l| {
            let (n, v) = l.split_once(',').unwrap();
            (n.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

fn validator() -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/reports.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let v = validator();
    let msgs: Vec<String> = match v.validate(report) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:#?}");
}

fn status(report: &Value, which: &str) -> String {
    report["sections"]["criterion_verdicts"][which]["aggregate"].as_str().unwrap().to_string()
}

#[test]
fn two_rate_analysis_is_satisfied_with_unit_slope() {
    let r = stdout_json(&run(&["analyze", "--system", "paper-example-sec4", "--horizon", "100", "--q-max", "4", "--no-timestamp"]));
    assert_valid(&r);
    let v = &r["sections"]["criterion_verdicts"];
    assert_eq!(v["aggregate"], "SatisfiedAtHorizon");
    for which in ["shift", "dissipative"] {
        assert_eq!(status(&r, which), "SatisfiedAtHorizon");
        let per_q = v[which]["per_q"].as_array().unwrap();
        assert_eq!(per_q.len(), 5);
        for pq in per_q {
            assert!((pq["decay_slope"].as_f64().unwrap() + 1.0).abs() < 1e-9);
            assert_eq!(pq["horizon"], 100);
            assert!(pq["log_tol"].is_number());
        }
    }
    assert!(r["sections"]["equivalence_discrepancy"]["max_abs_log_discrepancy"].as_f64().unwrap() < 1e-10);
    assert!(r["sections"]["semiconjugacy_residuals"]["max_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["sections"]["distortion"]["bound_estimate"].as_f64().unwrap(), std::f64::consts::E);
    assert!(r["generated_at"].is_null());
}

#[test]
fn negative_controls_are_not_satisfied() {
    for system in ["unweighted", "constant"] {
        let r = stdout_json(&run(&["analyze", "--system", system, "--horizon", "200", "--no-timestamp"]));
        assert_valid(&r);
        assert_eq!(r["sections"]["criterion_verdicts"]["aggregate"], "NotSatisfiedAtHorizon", "{system}");
        assert_eq!(r["sections"]["distortion"]["model"], "homogeneous");
    }
    let r = stdout_json(&run(&["analyze", "--system", "forward-dominant", "--horizon", "100", "--no-timestamp"]));
    assert_eq!(r["sections"]["criterion_verdicts"]["aggregate"], "SatisfiedAtHorizon");
}

#[test]
fn reports_are_deterministic_across_runs_and_thread_counts() {
    let args = ["analyze", "--horizon", "150", "--no-timestamp", "--seed", "7", "--epsilon", "0.1"];
    let a = run(&args);
    let b = run(&args);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    let c = run(&threaded);
    assert!(a.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_valid(&serde_json::from_slice(&a.stdout).unwrap());
}

#[test]
fn timestamp_is_emitted_by_default() {
    let r = stdout_json(&run(&["analyze", "--horizon", "10"]));
    assert!(r["generated_at"].as_str().unwrap().ends_with('Z'));
    assert_valid(&r);
}

#[test]
fn density_config_file_matches_builtin() {
    let from_file = stdout_json(&run(&["analyze", "--system", &config("example-density.json"), "--horizon", "50", "--no-timestamp"]));
    let builtin = stdout_json(&run(&["analyze", "--horizon", "50", "--no-timestamp"]));
    assert_valid(&from_file);
    assert_eq!(from_file["sections"], builtin["sections"]);
    assert_eq!(from_file["config_echo"]["system"]["source"], "file");
}

#[test]
fn profile_config_with_geometric_tails() {
    let r = stdout_json(&run(&["analyze", "--system", &config("two-sided-decay.json"), "--horizon", "100", "--no-timestamp"]));
    assert_valid(&r);
    // tails decay at slopes -1/4 and -1/2, so the products reach 1e-12 well before n = 100
    assert_eq!(r["sections"]["criterion_verdicts"]["aggregate"], "SatisfiedAtHorizon");
}

#[test]
fn witness_section_and_series_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let r = stdout_json(&run(&[
        "analyze", "--horizon", "40", "--q-max", "1", "--epsilon", "0.1", "--series-dir", &d, "--no-timestamp",
    ]));
    assert_valid(&r);
    let w = &r["sections"]["witnesses"];
    assert_eq!(w["general"]["outcome"], "found");
    for key in ["removed_ok", "forward_ok", "backward_ok"] {
        assert_eq!(w["general"]["verification"][key], true);
    }
    assert_eq!(w["sufficient"]["outcome"], "found");
    let refs = r["sections"]["product_series"].as_array().unwrap();
    assert_eq!(refs.len(), 4);
    for f in refs {
        let text = std::fs::read_to_string(dir.path().join(f["file"].as_str().unwrap())).unwrap();
        assert_eq!(text.lines().count(), 41);
    }
}

#[test]
fn two_rate_dissipative_series_matches_closed_form() {
    let rows = csv_rows(&run(&["series", "--what", "dissipative-products", "--q", "0", "--horizon", "300"]));
    assert_eq!(rows.len(), 300);
    let e = std::f64::consts::E;
    let c = (0.5 * (e + 1.0) * (e - 1.0).powi(2)).ln();
    for (n, v) in rows {
        assert!((v - (c - n as f64)).abs() < 1e-10, "n = {n}");
    }
}

#[test]
fn series_edge_cases() {
    let out = run(&["series", "--what", "shift-products", "--horizon", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,log_value\n");

    let rows = csv_rows(&run(&["series", "--what", "dissipative-products", "--system", "constant", "--horizon", "20", "--q", "3"]));
    assert!(rows.iter().all(|&(_, v)| v == rows[0].1));

    let rows = csv_rows(&run(&["series", "--what", "shift-products", "--system", "forward-dominant", "--horizon", "30"]));
    for (n, v) in rows {
        assert!((v + n as f64 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    let rows = csv_rows(&run(&["series", "--what", "distortion", "--horizon", "40"]));
    assert_eq!(rows.len(), 81);
    for (k, v) in rows {
        let expected = if k >= 0 { 0.0 } else { 1.0 };
        assert!((v - expected).abs() < 1e-12, "k = {k}");
    }
}

#[test]
fn witness_search_reverifies() {
    let out = run(&["witness", "--epsilon", "0.1", "--cells=-3..=3", "--no-timestamp"]);
    let r = stdout_json(&out);
    assert_valid(&r);
    let res = &r["result"];
    assert_eq!(res["mode"], "search");
    assert_eq!(res["witness"]["degenerate"], false);
    let check = &res["verification"];
    assert!(check["forward_ok"] == true && check["backward_ok"] == true && check["removed_ok"] == true);
    let achieved = &res["witness"]["achieved"];
    let (f, b) = (achieved["log_forward_scaled"].as_f64().unwrap(), achieved["log_backward_scaled"].as_f64().unwrap());
    assert!(((f - b).exp() - 1.0).abs() < 1e-12);
}

#[test]
fn witness_other_modes_validate() {
    for args in [
        vec!["witness", "--mode", "sufficient", "--epsilon", "0.01", "--n", "2", "--no-timestamp"],
        vec!["witness", "--mode", "transitivity", "--epsilon", "0.01", "--cells", "0..=0", "--no-timestamp"],
        vec!["witness", "--mode", "transitivity", "--p", "2", "--epsilon", "0.001", "--cells=-1..=1", "--refinement", "1"],
    ] {
        let r = stdout_json(&run(&args));
        assert_valid(&r);
        if r["result"]["mode"] == "transitivity" {
            let w = &r["result"]["witness"];
            let p = r["config_echo"]["p"].as_f64().unwrap();
            let bound = w["residual_bound_pow_p"].as_f64().unwrap();
            assert!(w["residual_to_g"].as_f64().unwrap().powf(p) <= bound);
            assert!(w["residual_after_map"].as_f64().unwrap().powf(p) <= bound);
        }
    }
}

#[test]
fn exit_codes() {
    let out = run(&["witness", "--system", "constant", "--epsilon", "0.1", "--k-max", "30"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1..=30"));

    let out = run(&["witness", "--mode", "transitivity", "--p", "2", "--epsilon", "0.25"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "density", "pieces": [{"from": 0, "to": 1, "c": "x", "a": 0}]}"#).unwrap();
    let out = run(&["analyze", "--system", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pieces[0].c"));

    let gap = dir.path().join("gap.json");
    std::fs::write(&gap, r#"{"kind": "profile", "log_mass": {"0": 0.0, "2": 1.0}}"#).unwrap();
    let out = run(&["analyze", "--system", gap.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("log_mass.2"));

    // tabulated range too short for the requested horizon
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"kind": "profile", "log_mass": {"-1": 0.0, "0": 0.0, "1": 0.0}}"#).unwrap();
    assert_eq!(run(&["analyze", "--system", short.to_str().unwrap(), "--horizon", "10"]).status.code(), Some(3));

    assert_eq!(run(&["analyze", "--system", "no-such-system"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--horizon", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["analyze", "--horizon", "20", "--no-timestamp", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_valid(&r);
}

#[test]
fn schema_rejects_non_finite_and_unknown_fields() {
    let mut r = stdout_json(&run(&["analyze", "--horizon", "10", "--no-timestamp"]));
    let v = validator();
    assert!(v.is_valid(&r));
    // serde_json writes NaN and infinities as null
    r["sections"]["profile_summary"]["log_mu_w"] = Value::Null;
    assert!(!v.is_valid(&r));
    r["sections"]["profile_summary"]["log_mu_w"] = 0.5.into();
    r["sections"]["extra"] = 1.into();
    assert!(!v.is_valid(&r));
}
