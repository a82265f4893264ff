use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CASE_STUDY: &str = r#"
[game]
b_hide = 150000
c_hide = 50000
b_harmony = 200000
c_leak = 300000
b_leak = 250000
c_look = 30000
beta = 0.5
"#;

fn stego(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stego-risk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn validate_case_study() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "game.toml", CASE_STUDY);
    let out = stego(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9);
    assert!(text.contains("50000 < 300000"));
}

#[test]
fn validate_reports_failed_assumption() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.toml",
        &CASE_STUDY.replace("c_hide = 50000", "c_hide = 400000"),
    );
    let out = stego(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    let fail = text.lines().find(|l| l.starts_with("FAIL")).unwrap();
    assert!(fail.contains("c_hide < c_leak"));

    let out = stego(&["validate", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["checks"][0]["assumption"], "adequate_protection");
    assert_eq!(v["checks"][0]["holds"], false);
}

#[test]
fn config_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let empty = write_config(&dir, "empty.toml", "");
    assert_eq!(
        stego(&["validate", "--config", &empty]).status.code(),
        Some(64)
    );

    let typo = write_config(&dir, "typo.toml", &CASE_STUDY.replace("c_look", "c_lok"));
    let out = stego(&["validate", "--config", &typo]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c_lok"));

    let missing = dir.path().join("nope.toml");
    let out = stego(&["solve", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));

    assert_eq!(
        stego(&["curves", "--resolution", "1"]).status.code(),
        Some(64)
    );
    assert_eq!(
        stego(&["sensitivity", "--delta", "0"]).status.code(),
        Some(64)
    );
    assert_eq!(stego(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn solve_case_study_json() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "game.toml", CASE_STUDY);
    let out = stego(&["solve", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((v["p_star"].as_f64().unwrap() - 0.88).abs() < 1e-12);
    assert!((v["q_star"].as_f64().unwrap() - 0.20).abs() < 1e-12);
    assert!((v["defender_payoff"].as_f64().unwrap() - 100_000.0).abs() < 1e-6);
    assert!(v["adversary_payoff"].as_f64().unwrap().abs() < 1e-6);
    assert!(v["residuals"]["a"].as_f64().unwrap() < 1e-6);
    assert!(v["residuals"]["u"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["pure_equilibria"].as_array().unwrap().len(), 0);
    assert_eq!(v["deviations"].as_array().unwrap().len(), 4);
}

#[test]
fn solve_scaled_game() {
    let dir = TempDir::new().unwrap();
    let scaled = CASE_STUDY
        .lines()
        .map(|l| match l.split_once(" = ") {
            Some((k, v)) if k != "beta" => format!("{k} = {}", v.parse::<f64>().unwrap() * 10.0),
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n");
    let cfg = write_config(&dir, "x10.toml", &scaled);
    let v = json_of(&stego(&["solve", "--config", &cfg, "--format", "json"]));
    assert!((v["p_star"].as_f64().unwrap() - 0.88).abs() < 1e-12);
    assert!((v["q_star"].as_f64().unwrap() - 0.20).abs() < 1e-12);
    assert!((v["defender_payoff"].as_f64().unwrap() - 1_000_000.0).abs() < 1e-5);
}

#[test]
fn solve_rejects_invalid_game() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.toml",
        &CASE_STUDY.replace("c_look = 30000", "c_look = 300000"),
    );
    let out = stego(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c_look < b_leak"));
}

#[test]
fn curves_csv() {
    let out = stego(&["curves", "--resolution", "101"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "mix_weight,e_hide,e_not_hide,e_look,e_not_look"
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101);
    let at20 = &rows[20];
    assert_eq!(at20[0], 0.2);
    assert!((at20[1] - 100_000.0).abs() < 1e-6);
    assert!((at20[2] - 100_000.0).abs() < 1e-6);
    assert_eq!(rows[0][2], 200_000.0);
    assert_eq!(rows[0][3], 220_000.0);
    assert_eq!(rows[100][2], -300_000.0);
    assert_eq!(rows[100][3], -30_000.0);
    // adversary curves cross between 0.88 and 0.89 at most, touching at 0.88
    assert!(rows[88][3].abs() < 1e-6);
}

#[test]
fn sensitivity_table() {
    let out = stego(&["sensitivity"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let names: Vec<_> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "dp_dBleak",
            "dp_dClook",
            "dq_dBharmony",
            "dq_dBhide",
            "dq_dChide",
            "dq_dCleak"
        ]
    );
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
        .collect();
    let expected = [4.8e-7, -4.0e-6, 1.6e-6, -2.0e-6, 2.0e-6, -4.0e-7];
    for (row, want) in rows.iter().zip(expected) {
        assert!((row[0] - want).abs() <= want.abs() * 1e-12);
        assert!(row[3] <= 1e-4, "relative gap {}", row[3]);
    }
    let curved = [0, 2, 5];

    let fine = stego(&["sensitivity", "--delta", "0.001", "--format", "json"]);
    let v = json_of(&fine);
    for i in curved {
        let rel = v["rows"][i]["rel_diff"].as_f64().unwrap();
        assert!(rel < rows[i][3], "row {i}: {rel} vs {}", rows[i][3]);
    }
    for i in [1, 3, 4] {
        assert!(rows[i][3] < 1e-12);
    }
}

fn run_sim(dir: &Path, tag: &str, extra: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let summary = dir.join(format!("{tag}.json"));
    let records = dir.join(format!("{tag}.csv"));
    let mut args = vec![
        "simulate",
        "--seed",
        "42",
        "--output",
        summary.to_str().unwrap(),
        "--records",
        records.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = stego(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (fs::read(summary).unwrap(), fs::read(records).unwrap())
}

#[test]
fn simulate_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = run_sim(dir.path(), "a", &["--workers", "1"]);
    let b = run_sim(dir.path(), "b", &["--workers", "1"]);
    let c = run_sim(dir.path(), "c", &["--workers", "4"]);
    assert_eq!(a, b);
    assert_eq!(a, c);

    let v: Value = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(v["scenario"], "positive");
    assert_eq!(v["iterations"], 10_000);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["histogram"]["p_cells"], 21);
    assert_eq!(v["histogram"]["q_cells"], 31);
    let total: u64 = v["histogram"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap().iter().map(|c| c.as_u64().unwrap()))
        .sum();
    assert_eq!(total, 10_000);

    let csv = String::from_utf8(a.1).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "iter,b_leak,c_look,b_harmony,b_hide,c_hide,c_leak,beta,p_star,q_star,advantage,risk"
    );
    assert_eq!(csv.lines().count(), 10_001);

    // nothing but the outputs is left behind
    let mut names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["a.csv", "a.json", "b.csv", "b.json", "c.csv", "c.json"]
    );
}

#[test]
fn simulate_negative_and_zero() {
    let v = json_of(&stego(&[
        "simulate",
        "--scenario",
        "negative",
        "--iterations",
        "2000",
    ]));
    assert!(v["advantage"]["max"].as_f64().unwrap() <= 0.0);
    assert!(v["risk"]["max"].as_f64().unwrap() <= 0.0);

    let v = json_of(&stego(&[
        "simulate",
        "--scenario",
        "zero",
        "--iterations",
        "2000",
    ]));
    for key in ["advantage", "risk"] {
        for stat in ["mean", "min", "max"] {
            assert_eq!(v[key][stat].as_f64().unwrap(), 0.0, "{key}.{stat}");
        }
    }
}

#[test]
fn simulate_from_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "sim.toml",
        r#"
[scenario]
kind = "positive"
iterations = 50
seed = 7
beta_fixed = 0.5
adv_min = 0.01

[scenario.ranges]
b_leak = [250000, 250000]
c_look = [30000, 30000]
b_harmony = [200000, 200000]
b_hide = [150000, 150000]
c_hide = [50000, 50000]
c_leak = [300000, 300000]
"#,
    );
    let out = stego(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["iterations"], 50);
    assert_eq!(v["seed"], 7);
    assert!((v["advantage"]["mean"].as_f64().unwrap() - 0.088).abs() < 1e-12);
    assert!((v["risk"]["max"].as_f64().unwrap() - 44_000.0).abs() < 1e-6);
    assert_eq!(v["histogram"]["counts"][18][6], 50);

    let bad = write_config(&dir, "bad.toml", "[scenario]\nbeta_a = -1.0\n");
    assert_eq!(
        stego(&["simulate", "--config", &bad]).status.code(),
        Some(64)
    );
}
