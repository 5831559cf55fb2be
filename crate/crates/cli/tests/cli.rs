use std::process::{Command, Output};

use cs_minimax::minimax::{minimax, Ball};
use cs_minimax::scalar_risk::minimax_mp;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cs-minimax")).args(args).env("CSMINIMAX_THREADS", "2").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

struct Csv {
    header: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut header = Vec::new();
        let mut lines = text.lines();
        let mut first = None;
        for l in lines.by_ref() {
            match l.strip_prefix("# ") {
                Some(kv) => {
                    let (k, v) = kv.split_once('=').unwrap();
                    header.push((k.to_string(), v.to_string()));
                }
                None => {
                    first = Some(l);
                    break;
                }
            }
        }
        let columns = first.unwrap().split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Self { header, columns, rows }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let j = self.columns.iter().position(|c| c == name).unwrap();
        self.rows.iter().map(|r| r[j].parse().unwrap()).collect()
    }

    fn meta(&self, key: &str) -> &str {
        &self.header.iter().find(|(k, _)| k == key).unwrap().1
    }
}

#[test]
fn scalar_risk_single_row_is_pass_through() {
    let csv = Csv::parse(&stdout(&["scalar-risk", "--xi", "0.1"]));
    let r = minimax_mp(1.0, 0.1).unwrap();
    assert_eq!(csv.col("M_p"), vec![r.value]);
    assert_eq!(csv.col("tau_p"), vec![r.tau]);
    assert_eq!(csv.col("eps_p"), vec![r.epsilon]);
    assert_eq!(csv.meta("version"), env!("CARGO_PKG_VERSION"));
    assert_eq!(csv.meta("command"), "scalar-risk");
}

#[test]
fn scalar_risk_grid_invariants() {
    let csv = Csv::parse(&stdout(&["scalar-risk", "--p", "0.5,1", "--grid", "1e-3:0.5:12:log", "--weak"]));
    assert_eq!(csv.rows.len(), 24);
    let m = csv.col("M_p");
    let w = csv.col("M_p_weak");
    for block in [&m[..12], &m[12..]] {
        assert!(block.windows(2).all(|x| x[1] > x[0]));
    }
    assert!(m.iter().zip(&w).all(|(s, w)| w >= s));
}

#[test]
fn minimax_json_pass_through() {
    let text = stdout(&["minimax", "--mode", "noisy", "--xi", "0.3", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["params"]["sigma"], "1.0000000000000000e0");
    let r = minimax(Ball::Strong, 1.0, 0.25, 0.3, 1.0).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["value"].as_f64().unwrap(), r.value);
    assert_eq!(row["lambda_star"].as_f64().unwrap(), r.lambda_star);
    assert_eq!(row["error"], Value::Null);
}

#[test]
fn se_curve_crosses_diagonal_at_fixed_point() {
    let csv = Csv::parse(&stdout(&["se", "--prior", "three-point:0.1:3", "--tau", "2", "--grid", "0:2:201:lin"]));
    let m_star: f64 = csv.meta("result.m_star").parse().unwrap();
    let m = csv.col("m");
    let psi = csv.col("psi");
    let cross = m.iter().zip(&psi).position(|(m, p)| p < m).unwrap();
    assert!(m[cross - 1] <= m_star && m_star <= m[cross], "{} {} {}", m[cross - 1], m_star, m[cross]);
}

#[test]
fn calibrate_round_trip() {
    let csv = Csv::parse(&stdout(&["calibrate", "--prior", "three-point:0.1:3", "--lambda", "0.7"]));
    let tau = csv.col("tau")[0];
    let back = Csv::parse(&stdout(&["calibrate", "--prior", "three-point:0.1:3", "--tau", &tau.to_string()]));
    assert!((back.col("lambda")[0] - 0.7).abs() < 1e-8);
}

#[test]
fn amp_zero_signal_and_reproducibility() {
    let args = ["amp", "--N", "300", "--n", "100", "--prior", "zero", "--sigma", "0", "--tau", "1.5", "--trials", "2"];
    let a = stdout(&args);
    let csv = Csv::parse(&a);
    assert!(csv.col("empirical_mse").iter().all(|&v| v == 0.0));
    assert_eq!(a, stdout(&args));
}

#[test]
fn amp_acceptance_configuration() {
    let csv = Csv::parse(&stdout(&["amp"]));
    let gap: f64 = csv.meta("result.relative_gap").parse().unwrap();
    assert!(gap <= 0.05, "{gap}");
    assert_eq!(csv.rows.len(), 21);
}

#[test]
fn lasso_solvers_agree() {
    let csv = Csv::parse(&stdout(&["lasso", "--N", "200", "--n", "50", "--solver", "both", "--lambda", "0.5"]));
    let obj = csv.col("objective");
    assert!(((obj[0] - obj[1]) / obj[1]).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["minimax", "--delta", "2"]).status.code(), Some(2));
    assert_eq!(run(&["scalar-risk", "--grid", "1:2"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--only", "A99"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--only", "A3"]).status.code(), Some(0));
    assert_eq!(run(&["validate", "--only", "A1", "--mse0-bias", "1.1"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "--only", "A4"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "--only", "A4", "--allow-known-unattainable"]).status.code(), Some(0));
}

#[test]
fn writes_to_file() {
    let path = std::env::temp_dir().join(format!("cs-minimax-cli-{}.json", std::process::id()));
    let out = run(&["weak-risk", "--xi", "0.5", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["command"], "weak-risk");
    assert!(v["rows"][0]["M_p_weak"].as_f64().unwrap() > 0.0);
}
