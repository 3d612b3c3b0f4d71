use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn ek(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ek")).args(args).output().expect("run ek")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

/// `Σ'|γ|^{-2s}` over ℤ[i] by direct summation with an integral tail estimate.
fn gaussian_direct(s: f64, n_max: i64) -> f64 {
    let mut sum = 0.0;
    for m in -n_max..=n_max {
        for n in -n_max..=n_max {
            let r2 = (m * m + n * n) as f64;
            if r2 > 0.0 && r2 <= (n_max * n_max) as f64 {
                sum += r2.powf(-s);
            }
        }
    }
    // Σ_{|γ|>R} |γ|^{-2s} ≈ ∫_R^∞ 2πr r^{-2s} dr
    let r = n_max as f64;
    sum + 2.0 * std::f64::consts::PI * r.powf(2.0 - 2.0 * s) / (2.0 * s - 2.0)
}

#[test]
fn eval_kstar_matches_direct_sum() {
    let out = ek(&["eval", "kstar", "--a", "0", "--z0", "0,0", "--w0", "0,0", "--s", "3,0", "--lattice", "1,0,0,1"]);
    assert!(out.status.success());
    let j = stdout_json(&out);
    let (re, im) = complex(&j["value"]);
    let want = gaussian_direct(3.0, 2000);
    assert!((re - want).abs() < 1e-9, "{re} vs {want}");
    assert_eq!(im, 0.0);
    assert_eq!(j["is_pole"], Value::Bool(false));
    assert!(j["pole_residue"].is_null());
}

#[test]
fn missing_argument_is_a_usage_error() {
    let out = ek(&["eval", "kstar", "--a", "0", "--lattice", "1,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(ek(&["eval", "kstar", "--a", "0", "--s", "3,0", "--lattice", "1,0,0"]).status.code(), Some(2));
    assert_eq!(ek(&["eval", "kstar", "--a", "0", "--s", "3", "--lattice", "1,0,0,1"]).status.code(), Some(2));
}

#[test]
fn pole_is_a_domain_error() {
    let out = ek(&["eval", "kstar", "--a", "0", "--z0", "0,0", "--w0", "1,1", "--s", "1,0", "--lattice", "1,0,0,1"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("pole") && msg.contains("kstar-regularized"), "{msg}");
    assert!(out.stdout.is_empty());
    assert_eq!(ek(&["eval", "wp", "--z", "1,0"]).status.code(), Some(3));
}

#[test]
fn theta_sigma_wp_eval() {
    for f in ["theta", "sigma", "wp"] {
        let out = ek(&["eval", f, "--z", "0.23,0.11", "--lattice", "1,0,0.3,1.2"]);
        assert!(out.status.success(), "{f}");
        let j = stdout_json(&out);
        assert_eq!(j["function"], Value::from(f));
        let (re, im) = complex(&j["value"]);
        assert!(re.is_finite() && im.is_finite());
    }
    // σ(z) ≈ z near the origin
    let j = stdout_json(&ek(&["eval", "sigma", "--z", "0.001,0"]));
    assert!((complex(&j["value"]).0 - 0.001).abs() < 1e-12);
}

#[test]
fn verify_second_limit_single_report() {
    let out = ek(&["verify", "second-limit", "--lattice", "1,0,0,1", "--z", "0.25,0.4"]);
    assert_eq!(out.status.code(), Some(0));
    let j = stdout_json(&out);
    let reports = j.as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["check"], "second-limit");
    assert_eq!(reports[0]["pass"], true);
    let keys: Vec<&String> = reports[0].as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        ["check", "lattice", "params", "lhs", "rhs", "abs_error", "tolerance", "pass", "runtime_ms"]
    );
}

#[test]
fn verify_all_on_oblique_lattice() {
    let out = ek(&["verify", "all", "--lattice", "1,0,0.3,1.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let j = stdout_json(&out);
    let names: Vec<&str> = j.as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert_eq!(names.first(), Some(&"first-limit"));
    assert_eq!(names.last(), Some(&"padic-dist"));
    assert!(j.as_array().unwrap().iter().all(|r| r["pass"] == true));
    // order does not depend on thread completion
    let again = stdout_json(&ek(&["verify", "all", "--lattice", "1,0,0.3,1.2"]));
    let names_again: Vec<&str> = again.as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert_eq!(names, names_again);
}

#[test]
fn verify_padic_distribution() {
    let out = ek(&["verify", "padic-dist", "--g2", "4", "--g3", "0", "--p", "5", "--N", "8", "--M", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let j = stdout_json(&out);
    assert_eq!(j[0]["pass"], true);
    assert!(j[0]["lattice"].is_null());
    let bad = ek(&["verify", "padic-dist", "--constant-shift", "5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)[0]["pass"], false);
    let irrational = ek(&["verify", "padic-dist", "--g2", "0", "--g3", "4", "--p", "7"]);
    assert_eq!(irrational.status.code(), Some(3));
    assert_eq!(ek(&["verify", "padic-dist", "--p", "4"]).status.code(), Some(2));
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn table_rows_and_eval_consistency() {
    let out = ek(&["table", "--start", "1.1", "--stop", "3.0", "--step", "0.1", "--lattice", "1,0,0,1"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["s", "re", "im", "regularized"]);
    assert_eq!(rows.len() - 1, 20);
    let last = rows.last().unwrap();
    assert_eq!(last[0], "3");
    let eval = stdout_json(&ek(&["eval", "kstar", "--a", "0", "--s", "3,0", "--lattice", "1,0,0,1"]));
    assert_eq!(last[1].parse::<f64>().unwrap(), complex(&eval["value"]).0);
}

#[test]
fn table_marks_the_pole() {
    let out = ek(&["table", "--start", "0.9", "--stop", "1.1", "--step", "0.1"]);
    let rows = csv_rows(&out);
    let pole = rows.iter().find(|r| r[0] == "1").expect("row at s = 1");
    assert_eq!(&pole[1..3], ["pole", "pole"]);
    let reg: f64 = pole[3].parse().unwrap();
    let reg_eval = stdout_json(&ek(&["eval", "kstar-regularized"]));
    assert_eq!(reg, complex(&reg_eval["value"]).0);
    // the regularized column is continuous through s = 1
    let neighbours: Vec<f64> = rows[1..].iter().filter(|r| r[0] != "1").map(|r| r[3].parse().unwrap()).collect();
    assert!(neighbours.iter().all(|v| (v - reg).abs() < 0.05));
    assert_eq!(ek(&["table", "--start", "2", "--stop", "1", "--step", "0.1"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# scaled square lattice\nlattice = 2,0,0,2\noutput = json\nseed = 0xEC_2024").unwrap();
    let path = file.path().to_str().unwrap();
    let args = ["eval", "kstar", "--a", "0", "--s", "3,0", "--config", path];
    let from_file = stdout_json(&ek(&args));
    assert_eq!(from_file["lattice"], serde_json::json!([2.0, 0.0, 0.0, 2.0]));
    // K*_0 scales as |λ|^{-2s}
    let unit = stdout_json(&ek(&["eval", "kstar", "--a", "0", "--s", "3,0"]));
    let ratio = complex(&unit["value"]).0 / complex(&from_file["value"]).0;
    assert!((ratio - 64.0).abs() < 1e-9);
    let mut with_flag: Vec<&str> = args.to_vec();
    with_flag.extend(["--lattice", "1,0,0,1"]);
    assert_eq!(stdout_json(&ek(&with_flag))["lattice"], serde_json::json!([1.0, 0.0, 0.0, 1.0]));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "colour = blue").unwrap();
    assert_eq!(ek(&["verify", "first-limit", "--config", bad.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn printed_numbers_round_trip() {
    let out = ek(&["eval", "theta", "--z", "0.1234567890123,-0.3", "--lattice", "1,0,0.3,1.2"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let j: Value = serde_json::from_str(&text).unwrap();
    let (re, im) = complex(&j["value"]);
    for x in [re, im] {
        let printed = serde_json::to_string(&x).unwrap();
        assert!(text.contains(&printed));
        assert_eq!(printed.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
    assert_eq!(complex(&j["z"]).0, 0.1234567890123);
}

#[test]
fn table_output_mode() {
    let out = ek(&["verify", "prop-c", "--output", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("check=\"prop-c\"") && text.contains("pass=true"));
}
