use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn drfeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drfeas"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn run_ok(args: &[&str]) -> Output {
    let o = drfeas(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    o
}

#[test]
fn run_table_prints_period_three() {
    let p = problem("line_rational.json");
    let o = run_ok(&["run", "--problem", p.to_str().unwrap(), "--horizon", "9", "--format", "table"]);
    let xs: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().last().unwrap().to_string())
        .collect();
    assert_eq!(xs, ["0", "-1", "1", "0", "-1", "1", "0", "-1", "1", "0"]);
}

#[test]
fn run_csv_has_horizon_plus_one_rows() {
    let p = problem("line_sqrt2.json");
    let o = run_ok(&["run", "--problem", p.to_str().unwrap(), "--horizon", "25"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 26);
    assert!(text.lines().nth(4).unwrap().ends_with("-2+√2"), "{text}");
}

#[test]
fn run_reports_halfspace_outcomes() {
    let p = problem("halfspace_above.json");
    let o = run_ok(&["run", "--problem", p.to_str().unwrap(), "--horizon", "5000", "--format", "json"]);
    assert_eq!(json(&o)["outcome"]["kind"], "divergence_detected");
    assert!(String::from_utf8_lossy(&o.stderr).contains("DivergenceDetected"));

    let p = problem("halfspace_touching.json");
    let o = run_ok(&["run", "--problem", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["outcome"]["kind"], "fixed_point_reached");
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"normal":[1],"points":[[0.5]],"x0":[0],"backend":"rational"}"#).unwrap();
    assert_eq!(drfeas(&["run", "--problem", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(drfeas(&["run", "--problem", "/nonexistent.json"]).status.code(), Some(2));
    let p = problem("line_sqrt2.json");
    let o = drfeas(&["run", "--problem", p.to_str().unwrap(), "--backend", "rational"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cycle_reports() {
    let p = problem("line_rational.json");
    let v = json(&run_ok(&["cycle", "--problem", p.to_str().unwrap()]));
    assert_eq!(v["status"], "cycle");
    assert_eq!(v["preperiod"], 0);
    assert_eq!(v["period"], 3);
    assert_eq!(v["rational"], true);
    assert_eq!(v["relation"]["q1"], 2);
    assert_eq!(v["relation"]["q2"], 1);

    let p = problem("line_sqrt2.json");
    let v = json(&run_ok(&["cycle", "--problem", p.to_str().unwrap(), "--horizon", "10000"]));
    assert_eq!(v["status"], "no_cycle");
    assert_eq!(v["rational"], false);

    let p = problem("line_float.json");
    let v = json(&run_ok(&["cycle", "--problem", p.to_str().unwrap(), "--horizon", "1000"]));
    assert_eq!(v["rational"], "unavailable");
    let v = json(&run_ok(&[
        "cycle",
        "--problem",
        p.to_str().unwrap(),
        "--horizon",
        "1000",
        "--heuristic-rationality",
    ]));
    assert_eq!(v["rational"], "heuristic");
    assert_eq!(v["heuristic_ratio"], "10/37");
}

#[test]
fn cycle_needs_doubleton() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("three.json");
    std::fs::write(&f, r#"{"normal":[1],"points":[["-1"],["1"],["2"]],"x0":["0"],"backend":"rational"}"#).unwrap();
    let o = drfeas(&["cycle", "--problem", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cycling analysis requires a doubleton"));
}

#[test]
fn verify_exit_codes() {
    for name in ["line_rational.json", "plane_sqrt2.json", "line_float.json"] {
        let p = problem(name);
        let v = json(&run_ok(&["verify", "--problem", p.to_str().unwrap(), "--horizon", "1000"]));
        assert_eq!(v["verified"], true, "{name}");
    }
    let p = problem("not_absorbing.json");
    let o = drfeas(&["verify", "--problem", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = drfeas(&["verify", "--problem", p.to_str().unwrap(), "--fallback-iterate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_mismatch_exits_one() {
    // x_1 = 0 sits on the tie between -1 and 1; the closed form assumes the
    // higher point is taken there.
    let p = problem("line_symmetric.json");
    run_ok(&["verify", "--problem", p.to_str().unwrap(), "--horizon", "50"]);
    let o = drfeas(&["verify", "--problem", p.to_str().unwrap(), "--tie-policy", "lower_inner", "--horizon", "50"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["verified"], false);
    assert_eq!(v["mismatch"]["n"], 2);
}

#[test]
fn closed_form_csv_and_fallback() {
    let p = problem("line_sqrt2.json");
    let o = run_ok(&["closed-form", "--problem", p.to_str().unwrap(), "--horizon", "7"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "n,k,inner,x_1");
    assert_eq!(text.lines().last().unwrap(), "7,2,-4+3√2,-4+3√2");

    let p = problem("not_absorbing.json");
    let o = run_ok(&["closed-form", "--problem", p.to_str().unwrap(), "--horizon", "4"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("falling back to iteration"));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn map_matches_regardless_of_rationality() {
    let mut outs = Vec::new();
    for name in ["line_rational.json", "line_sqrt2.json"] {
        let p = problem(name);
        let o = run_ok(&["map", "--problem", p.to_str().unwrap(), "--horizon", "5", "--format", "json"]);
        let v = json(&o);
        assert_eq!(v["method"], "map");
        let xs: Vec<String> = v["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["inner"].to_string())
            .collect();
        outs.push(xs);
    }
    assert_eq!(outs[0].len(), 6);
    // Rational backend writes "p/q", surd writes {"a","b"}; compare by value.
    let p = problem("line_rational.json");
    let o = run_ok(&["map", "--problem", p.to_str().unwrap(), "--horizon", "5", "--format", "table"]);
    let xs: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().last().unwrap().to_string())
        .collect();
    assert_eq!(xs, ["0", "0", "-1", "0", "-1", "0"]);
    let p = problem("line_sqrt2.json");
    let o = run_ok(&["map", "--problem", p.to_str().unwrap(), "--horizon", "5", "--format", "table"]);
    let ys: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().last().unwrap().to_string())
        .collect();
    assert_eq!(xs, ys);
}

#[test]
fn beatty_csv() {
    let o = run_ok(&["beatty", "--horizon", "4"]);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "n,u,v,w");
    assert_eq!(lines[1], "0,0,0,0");
    assert_eq!(lines[3], "2,1,1,1");
    assert_eq!(lines[5], "4,1,2,2");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let p = problem("line_rational.json");
    run_ok(&["run", "--problem", p.to_str().unwrap(), "--horizon", "3", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn horizon_zero_is_rejected() {
    let p = problem("line_rational.json");
    let o = drfeas(&["run", "--problem", p.to_str().unwrap(), "--horizon", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
