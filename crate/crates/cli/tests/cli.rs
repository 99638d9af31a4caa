use std::process::{Command, Output};

use serde_json::Value;

fn dualgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualgeo")).args(args).output().expect("spawn dualgeo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

/// `KL(a || b)` for probability vectors.
fn kl(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * (x / y).ln()).sum()
}

#[test]
fn models_lists_five_builtins() {
    let o = dualgeo(&["models"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["euclidean", "sphere", "categorical", "gaussian1d", "alpha_categorical"] {
        assert!(text.lines().any(|l| l == name), "{name}");
    }
    let o = dualgeo(&["models", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 5);
    for entry in list {
        for key in ["name", "params", "chart", "domain", "structure"] {
            assert!(entry[key].is_string(), "{key}");
        }
    }
}

#[test]
fn unknown_subcommand_prints_usage() {
    let o = dualgeo(&["frobnicate"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn div_euclidean_ay() {
    let o = dualgeo(&["div", "--model", "euclidean:2", "--kind", "ay", "-p", "0,0", "-q", "3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = text.lines();
    assert_eq!(rows.next().unwrap(), "kind,p0,p1,q0,q1,value,quad_nodes,converged,error");
    let cells: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert_eq!(cells[5].parse::<f64>().unwrap(), 12.5);
    assert_eq!(cells[7], "true");
}

#[test]
fn div_bernoulli_in_both_orientations() {
    let (a, b) = ([0.5, 0.5], [0.9, 0.1]);
    let run = |kind: &str| {
        let o = dualgeo(&[
            "div", "--model", "categorical:1", "--kind", kind, "--coords", "mixture", "-p", "0.5,0.5", "-q",
            "0.9,0.1", "--format", "json",
        ]);
        assert_eq!(o.status.code(), Some(0));
        json_lines(&o)[0]["value"].as_f64().unwrap()
    };
    // 𝒟(p,q) = KL(q || p) and 𝒟*(p,q) = KL(p || q).
    assert!((run("canonical") - kl(&b, &a)).abs() < 1e-6);
    let dual = run("dual");
    assert!((dual - kl(&a, &b)).abs() < 1e-6);
    assert!((dual - 0.51083).abs() < 1e-5);
}

#[test]
fn div_pseudonorm_on_diagonal_is_zero() {
    let o = dualgeo(&["div", "--model", "categorical:1", "--kind", "pseudonorm", "-p", "0.4", "-q", "0.4", "--format", "json"]);
    assert_eq!(json_lines(&o)[0]["value"].as_f64(), Some(0.0));
}

#[test]
fn div_rejects_bad_input_with_exit_2() {
    assert_eq!(dualgeo(&["div", "--model", "bogus:1", "-p", "0", "-q", "1"]).status.code(), Some(2));
    assert_eq!(dualgeo(&["div", "--model", "euclidean:2", "-p", "0", "-q", "1,2"]).status.code(), Some(2));
    assert_eq!(dualgeo(&["div", "--model", "gaussian1d", "-p", "0,1", "-q", "0,-1"]).status.code(), Some(2));
    assert_eq!(dualgeo(&["div", "--model", "sphere:2:1", "--kind", "oracle", "-p", "1,0", "-q", "1,1"]).status.code(), Some(2));
    assert_eq!(dualgeo(&["div", "--model", "euclidean:1", "-p", "0;1", "-q", "0;1;2"]).status.code(), Some(2));
    assert_eq!(dualgeo(&["div", "--model", "euclidean:1", "-p", "0", "-q", "1", "--quad-nodes", "0"]).status.code(), Some(2));
}

#[test]
fn div_failures_are_flagged_with_exit_3() {
    let o = dualgeo(&[
        "div", "--model", "categorical:1", "-p", "0", "-q", "0.5;1", "--tol-shoot", "1e-30", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r["converged"], Value::Bool(false));
        assert!(r["value"].is_null());
        assert!(r["error"].is_string());
    }
}

#[test]
fn div_batch_keeps_input_order() {
    let o = dualgeo(&[
        "div", "--model", "euclidean:1", "--kind", "ay", "-p", "0", "-q", "3;1;2", "--format", "json", "--threads", "2",
    ]);
    let values: Vec<f64> = json_lines(&o).iter().map(|r| r["value"].as_f64().unwrap()).collect();
    for (v, e) in values.iter().zip([4.5, 0.5, 2.0]) {
        assert!((v - e).abs() < 1e-12, "{values:?}");
    }
    let o = dualgeo(&["div", "--model", "euclidean:1", "--kind", "ay", "-p", "0;1", "-q", "1;-1", "--format", "json"]);
    let values: Vec<f64> = json_lines(&o).iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert!((values[0] - 0.5).abs() < 1e-12 && (values[1] - 2.0).abs() < 1e-12, "{values:?}");
}

#[test]
fn csv_values_round_trip_exactly() {
    let o = dualgeo(&["div", "--model", "categorical:2", "-p", "0.1,-0.3", "-q", "0.7,0.2"]);
    let j = dualgeo(&["div", "--model", "categorical:2", "-p", "0.1,-0.3", "-q", "0.7,0.2", "--format", "json"]);
    let text = stdout(&o);
    let csv_value: f64 = text.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert_eq!(csv_value, json_lines(&j)[0]["value"].as_f64().unwrap());
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dualgeo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.csv");
    let o = dualgeo(&["div", "--model", "euclidean:2", "-p", "0,0", "-q", "1,1", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("kind,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_collapse_on_categorical() {
    let o = dualgeo(&["verify", "--model", "categorical:2", "--suite", "collapse", "--samples", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], Value::Bool(true));
    let oracle = r["checks"].as_array().unwrap().iter().find(|c| c["id"] == "collapse.oracle").unwrap();
    assert!(oracle["max_error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(oracle["samples"], 50);
}

#[test]
fn verify_pathindep_on_alpha_family() {
    let o = dualgeo(&[
        "verify", "--model", "alpha_categorical:2:0.5", "--suite", "pathindep", "--samples", "20", "--seed", "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let spread = r["checks"].as_array().unwrap().iter().find(|c| c["id"] == "pathindep.spread").unwrap();
    assert!(spread["max_error"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn verify_euclidean_all_is_near_machine_precision() {
    let o = dualgeo(&["verify", "--model", "euclidean:3", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.get("duration_seconds").is_none());
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], Value::Bool(true), "{c}");
        assert!(c["max_error"].as_f64().unwrap() < 1e-8, "{c}");
    }
}

#[test]
fn verify_exit_codes() {
    assert_eq!(dualgeo(&["verify", "--model", "euclidean:2", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(dualgeo(&["verify", "--model", "euclidean:2", "--suite", "gradient", "--samples", "0"]).status.code(), Some(2));
    // A single-node rule is far too coarse for the KL oracle.
    let o = dualgeo(&["verify", "--model", "categorical:2", "--suite", "collapse", "--samples", "5", "--quad-nodes", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], Value::Bool(false));
}

#[test]
fn verify_timing_is_opt_in() {
    let o = dualgeo(&["verify", "--model", "euclidean:2", "--suite", "collapse", "--samples", "3", "--timing"]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["duration_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sweep_categorical_grid() {
    let o = dualgeo(&["sweep", "--model", "categorical:2", "-p", "0,0", "--grid", "-2:2:21", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 441);
    assert!(rows.iter().all(|r| r["converged"] == Value::Bool(true)));
    assert_eq!(rows[1]["q"], serde_json::json!([-2.0, -1.8]));
}

#[test]
fn sweep_of_one_point_matches_div() {
    let s = dualgeo(&["sweep", "--model", "gaussian1d", "-p", "0.2,-0.6", "--grid", "0.5:0.5:1,-0.4:-0.4:1", "--format", "json"]);
    let d = dualgeo(&["div", "--model", "gaussian1d", "-p", "0.2,-0.6", "-q", "0.5,-0.4", "--format", "json"]);
    assert_eq!(json_lines(&s)[0]["values"]["canonical"], json_lines(&d)[0]["value"]);
}

#[test]
fn sweep_flags_rows_outside_the_domain() {
    let o = dualgeo(&["sweep", "--model", "gaussian1d", "-p", "0,-0.5", "--grid", "0:0:1,-1:0:3", "--kind", "canonical,oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "q0,q1,canonical,oracle,converged,error");
    assert!(rows[1].contains(",true,"));
    assert!(rows[3].contains(",false,"));
    assert!(rows[3].contains("outside the domain"));
}

#[test]
fn probe_f_bernoulli() {
    let o = dualgeo(&["probe-f", "--model", "categorical:1", "--samples", "20", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 21);
    let s = &lines[20]["summary"];
    assert_eq!(s["rank_agreement"].as_f64(), Some(1.0));
    assert!(s["max_relative_gap"].as_f64().unwrap() <= 1e-6);
    assert_eq!(s["equality_holds"], Value::Bool(true));
}

#[test]
fn probe_f_euclidean_rows_are_equal() {
    let o = dualgeo(&["probe-f", "--model", "euclidean:2", "--samples", "10", "-p", "0,0", "--format", "json"]);
    for row in json_lines(&o).iter().take(10) {
        let (a, b) = (row["dual_forward"].as_f64().unwrap(), row["primal_reverse"].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }
}

#[test]
fn probe_f_alpha_family_reports_agreement() {
    let o = dualgeo(&["probe-f", "--model", "alpha_categorical:2:0.5", "--samples", "100", "--format", "json"]);
    let lines = json_lines(&o);
    let s = &lines.last().unwrap()["summary"];
    assert!(s["rank_agreement"].is_f64());
    assert!(s["skipped"].as_u64().unwrap() <= 20);
    assert!(s["equality_holds"].is_null());
}

#[test]
fn probe_f_needs_ten_samples() {
    assert_eq!(dualgeo(&["probe-f", "--model", "categorical:1", "--samples", "9"]).status.code(), Some(2));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["sweep", "--model", "alpha_categorical:2:0.5", "-p", "0.3,0.3", "--grid", "0.2:0.4:4", "--kind", "canonical,dual,ay"];
    let a = dualgeo(&args);
    let b = dualgeo(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
}
