use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn pwframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwframe"))
        .args(args)
        .env_remove("PWFRAME_EPSILON")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn uc_table_large_levels() {
    let o = pwframe(&["uc-table", "--a", "1.1", "--j", "1000000,2000000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("a,j,target,uc,var_a,var_f,norm_sq\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    let expected = [1.497, 1.498];
    for (row, e) in rows.iter().zip(expected) {
        let uc: f64 = row[3].parse().unwrap();
        assert!((uc - e).abs() < 2e-3, "{uc}");
        // 9 significant digits
        assert_eq!(row[3].split('e').next().unwrap().len(), 10);
    }
}

#[test]
fn uc_table_rows_keep_input_order_across_thread_counts() {
    let args = ["uc-table", "--a", "2,10,100", "--j", "3,7,12", "--target", "scaling"];
    let single = pwframe(&[&["--threads", "1"][..], &args[..]].concat());
    let many = pwframe(&[&["--threads", "4"][..], &args[..]].concat());
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(stdout(&single), stdout(&many));
    let rows = csv_rows(&stdout(&single));
    let keys: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(keys[0], ("2".into(), "3".into()));
    assert_eq!(keys[1], ("2".into(), "7".into()));
    assert_eq!(keys[3], ("10".into(), "3".into()));
}

#[test]
fn uc_table_json_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let o = pwframe(&["uc-table", "--a", "1000", "--j", "10", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let row = &v[0];
    assert_eq!(row["kind"], "wavelet");
    assert_eq!(row["tau"].as_array().unwrap().len(), 2);
    let uc = row["uc"].as_f64().unwrap();
    assert!((uc - 0.500013).abs() < 5e-6);
}

#[test]
fn validation_errors_exit_one() {
    assert_eq!(pwframe(&["uc-table", "--a", "1.0", "--j", "3"]).status.code(), Some(1));
    assert_eq!(pwframe(&["uc-table", "--a", "2", "--j", "3", "--target", "other"]).status.code(), Some(1));
    assert_eq!(pwframe(&["verify", "--a", "1.0"]).status.code(), Some(1));
    assert_eq!(pwframe(&["verify", "--a", "2", "--jmax", "40"]).status.code(), Some(1));
    assert_eq!(pwframe(&["theta", "--alpha", "1", "--b", "1", "--m", "4"]).status.code(), Some(1));
    assert_eq!(pwframe(&["uc-table", "--a", "2"]).status.code(), Some(1));
    assert_eq!(pwframe(&["--epsilon", "0", "uc-table", "--a", "2", "--j", "3"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.csv");
    let o = pwframe(&["uc-table", "--a", "2", "--j", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_detects_corruption() {
    let o = pwframe(&["verify", "--a", "2", "--jmax", "10", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert!(rows.iter().any(|r| r[0] == "cascade"));
    assert!(rows.iter().any(|r| r[0] == "parseval"));
    let bad = pwframe(&["verify", "--a", "2", "--jmax", "4", "--corrupt-mask", "1e-6"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL"));
}

#[test]
fn verify_json_report() {
    let o = pwframe(&["verify", "--a", "10", "--jmax", "5", "--format", "json", "--seed", "99"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 4 * 5);
}

#[test]
fn transform_analyze_constant() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c0.json");
    fs::write(&input, r#"{"kmin": 0, "coeffs": [[1.0, 0.0]]}"#).unwrap();
    let o = pwframe(&["transform", "--input", input.to_str().unwrap(), "--a", "2", "--J", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["J"], 8);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 8);
    for lv in levels {
        let vals = lv["values"].as_array().unwrap();
        let first = vals[0][0].as_f64().unwrap();
        for x in vals {
            assert!((x[0].as_f64().unwrap() - first).abs() < 1e-14);
            assert!(x[1].as_f64().unwrap().abs() < 1e-14);
        }
    }
}

#[test]
fn transform_roundtrip_reports_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("poly.json");
    let coeffs: Vec<String> = (0..65).map(|i| format!("[{}, {}]", (i as f64 * 0.7).sin(), (i as f64 * 0.3).cos())).collect();
    fs::write(&input, format!(r#"{{"kmin": -32, "coeffs": [{}]}}"#, coeffs.join(","))).unwrap();
    let mut errs = Vec::new();
    for j in ["10", "14"] {
        let o = pwframe(&["transform", "--input", input.to_str().unwrap(), "--a", "2", "--J", j, "--mode", "roundtrip"]);
        assert_eq!(o.status.code(), Some(0));
        let rows = csv_rows(&stdout(&o));
        let err: f64 = rows[0][2].parse().unwrap();
        let completeness: f64 = rows[0][3].parse().unwrap();
        assert!(err > 0.0 && completeness > 0.0);
        errs.push(err);
    }
    assert!(errs[1] < errs[0]);
}

#[test]
fn transform_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, r#"{"kmin": 0, "coeffs": [[1.0, 0.0]"#).unwrap();
    let o = pwframe(&["transform", "--input", input.to_str().unwrap(), "--a", "2", "--J", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let missing = dir.path().join("none.json");
    let o = pwframe(&["transform", "--input", missing.to_str().unwrap(), "--a", "2", "--J", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

fn asym_ratios(j: &str, a: &str) -> Vec<(String, f64)> {
    let o = pwframe(&["asym", "--j", j, "--a", a]);
    assert_eq!(o.status.code(), Some(0));
    csv_rows(&stdout(&o)).into_iter().map(|r| (r[0].clone(), r[3].parse().unwrap())).collect()
}

#[test]
fn asym_ratios_near_one() {
    for (name, r) in asym_ratios("10000", "2") {
        assert!((r - 1.0).abs() < 1e-3, "{name}: {r}");
    }
    let q = asym_ratios("5", "1e6");
    let tau = q.iter().find(|(n, _)| n == "tau").unwrap().1;
    assert!((tau - 1.0).abs() < 1e-3);
    for (_, r) in asym_ratios("1", "1.01") {
        assert!(r.is_finite() && r > 0.0);
    }
}

#[test]
fn theta_paths_agree() {
    let o = pwframe(&["theta", "--alpha", "2", "--beta", "2", "--gamma", "1", "--b", "0.01", "--m", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["relative"].as_f64().unwrap() < 1e-12);
}

#[test]
fn eval_grid_and_coefficients() {
    let o = pwframe(&["eval", "--a", "2", "--j", "3", "--kind", "wavelet", "--n", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,re,im\n"));
    assert_eq!(text.lines().count(), 17);

    let o = pwframe(&["eval", "--a", "2", "--j", "2", "--coefficients", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "scaling");
    assert_eq!(v["j"], 2);
    let kmin = v["kmin"].as_i64().unwrap();
    assert_eq!(v["coeffs"].as_array().unwrap().len() as i64, -2 * kmin + 1);
}

#[test]
fn epsilon_env_and_flag_precedence() {
    let count = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pwframe"));
        cmd.env_remove("PWFRAME_EPSILON");
        if let Some(e) = env {
            cmd.env("PWFRAME_EPSILON", e);
        }
        if let Some(f) = flag {
            cmd.args(["--epsilon", f]);
        }
        let o = cmd.args(["eval", "--a", "2", "--j", "1", "--coefficients"]).output().unwrap();
        String::from_utf8(o.stdout).unwrap().lines().count()
    };
    let default = count(None, None);
    let loose = count(Some("1e-4"), None);
    assert!(loose < default);
    assert_eq!(count(Some("1e-4"), Some("1e-16")), default);
}

#[test]
fn output_is_bit_stable() {
    let args = ["uc-table", "--a", "3,30", "--j", "4,9"];
    assert_eq!(stdout(&pwframe(&args)), stdout(&pwframe(&args)));
}

#[test]
fn tighter_epsilon_barely_moves_uc() {
    let get = |eps: &str| -> f64 {
        let o = pwframe(&["--epsilon", eps, "uc-table", "--a", "50", "--j", "8"]);
        csv_rows(&stdout(&o))[0][3].parse().unwrap()
    };
    let (u1, u2) = (get("1e-16"), get("1e-18"));
    assert!((u1 - u2).abs() <= 1e-9 * u1);
}
