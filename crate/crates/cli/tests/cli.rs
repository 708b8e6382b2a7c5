use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

fn gramq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gramq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gramq-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_values(o: &Output) -> Vec<serde_json::Value> {
    serde_json::from_slice::<Vec<serde_json::Value>>(&o.stdout).unwrap()
}

#[test]
fn eval_six_near_one_is_ln3() {
    let o = gramq(&["eval", "six", "--quantifier", "qaz", "--alpha", "1.00001", "--z", "1"]);
    assert!(o.status.success());
    let rows = json_values(&o);
    let v = rows[0]["value"].as_f64().unwrap();
    assert!((v - 3f64.ln()).abs() < 1e-4, "{v}");
}

#[test]
fn eval_bb84_l1() {
    let o = gramq(&["eval", "bb84", "--quantifier", "ql1"]);
    let v = json_values(&o)[0]["value"].as_f64().unwrap();
    assert!((v - 1.41).abs() < 0.005);
}

#[test]
fn orthogonal_b92_is_zero_everywhere() {
    let o = gramq(&["eval", "b92", "--x", "0", "--alpha", "0.5"]);
    assert!(o.status.success());
    let rows = json_values(&o);
    assert!(rows.len() >= 5);
    for r in rows {
        assert!(r["value"].as_f64().unwrap().abs() < 1e-9, "{r}");
    }
}

#[test]
fn outside_validity_warns_but_succeeds() {
    let o = gramq(&["eval", "trine", "-q", "qaz", "--alpha", "0.3", "--z", "0.2"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(gramq(&["eval", "no-such-thing"]).status.code(), Some(2));
    assert_eq!(gramq(&["eval", "trine", "-q", "qaz"]).status.code(), Some(2));
    assert_eq!(gramq(&["eval", "trine", "-q", "qaz", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(gramq(&["eval", "trine", "--x", "0.2"]).status.code(), Some(2));

    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "members": [{"p": 1.0, "amplitudes": [[1, 0], [1, 0]]}]}"#).unwrap();
    let o = gramq(&["eval", bad.to_str().unwrap(), "-q", "ql1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("member 0"));
}

#[test]
fn eval_reads_ensemble_files() {
    let path = scratch("pair.json");
    let doc = r#"{"dim": 2, "label": "pair", "members": [
        {"p": 0.5, "amplitudes": [[1, 0], [0, 0]]},
        {"p": 0.5, "amplitudes": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}]}"#;
    std::fs::write(&path, doc).unwrap();
    let o = gramq(&["eval", path.to_str().unwrap(), "-q", "qaz", "--alpha", "2", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("pair,2,1,qaz,"));
    let v: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((v - (1.5f64.sqrt() - 1.0)).abs() < 1e-10);
    assert_eq!(gramq(&["eval", path.to_str().unwrap(), "-q", "qfs_ref"]).status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let a = gramq(&["sweep", "--z", "0.8", "--start", "0.4", "--end", "0.6", "--step", "0.1", "--seed", "5"]);
    let b = gramq(&["sweep", "--z", "0.8", "--start", "0.4", "--end", "0.6", "--step", "0.1", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ensemble,alpha,z,quantifier,value,method"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 18);
    assert_eq!(rows[0][0], "b92");
    assert_eq!(rows[17][0], "six");
    assert!(rows.iter().all(|r| r[5] == "optimizer"));
}

#[test]
fn sweep_rows_round_trip_and_bb84_matches_tetrad() {
    let out = scratch("sweep.csv");
    let o = gramq(&["sweep", "bb84", "tetrad", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 80);
    let limit = rows.iter().find(|r| r[0] == "bb84" && r[1] == "1").unwrap();
    assert_eq!(limit[5], "limit");
    for k in 0..40 {
        let a: f64 = rows[k][4].parse().unwrap();
        let b: f64 = rows[40 + k][4].parse().unwrap();
        assert!((a - b).abs() < 1e-10);
        assert_eq!(format!("{a:.16e}"), rows[k][4]);
    }
}

#[test]
fn sweep_inside_window_gives_single_limit_rows() {
    let o = gramq(&["sweep", "trine", "diag", "--start", "0.9995", "--end", "1.0005", "--step", "0.0001"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",limit")));
}

#[test]
fn unwritable_output_exits_2() {
    let o = gramq(&["sweep", "trine", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table1_rows() {
    let o = gramq(&["table1", "--format", "json", "--restarts", "8"]);
    assert!(o.status.success());
    let rows = json_values(&o);
    let cell = |ens: &str, q: &str| -> f64 {
        let row = rows.iter().find(|r| r["ensemble"] == ens).unwrap();
        let c = row["cells"].as_array().unwrap().iter().find(|c| c["quantifier"] == q).unwrap();
        c["value"].as_f64().unwrap()
    };
    assert!((cell("trine", "ql1") - 1.0).abs() < 0.005);
    assert!((cell("trine", "qhol") - 0.42).abs() < 0.01);
    assert!((cell("trine", "qcomm") - 0.25).abs() < 0.005);
    assert!((cell("trine", "q") - 0.75).abs() < 0.005);
    assert!((cell("diag", "qcomm") - 0.22).abs() < 0.005);
    for row in &rows {
        for c in row["cells"].as_array().unwrap() {
            if c["source"] == "computed" {
                assert!(c["deviation"].as_f64().unwrap() <= 0.01, "{c}");
            }
        }
    }
}

#[test]
fn crossings_report_both_constant_sources() {
    let o = gramq(&["crossings", "--format", "json", "--restarts", "8"]);
    assert!(o.status.success());
    let rows = json_values(&o);
    let star = rows.iter().find(|r| r["rhs"] == "qaz[diag]").unwrap();
    assert!((star["alpha_root"].as_f64().unwrap() - 0.33).abs() < 0.01);
    let trine_l1: Vec<_> = rows.iter().filter(|r| r["ensemble"] == "trine" && r["rhs"] == "ql1").collect();
    assert_eq!(trine_l1.len(), 2);
    assert!(rows.iter().all(|r| r["status"] == "root"));
    assert!(rows.iter().all(|r| r["residual"].as_f64().unwrap().abs() < 1e-8));
}

#[test]
fn verify_quick_passes_fast() {
    let start = Instant::now();
    let o = gramq(&["verify", "--quick"]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn verify_rejects_corrupted_file_before_running() {
    let bad = scratch("corrupt.json");
    std::fs::write(&bad, "{\"dim\": 2, \"members\": [").unwrap();
    let start = Instant::now();
    let o = gramq(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(start.elapsed().as_secs_f64() < 2.0);
}

#[test]
fn ensembles_lists_all_six() {
    let o = gramq(&["ensembles"]);
    let text = stdout(&o);
    for name in ["b92", "diag", "trine", "bb84", "tetrad", "six"] {
        assert!(text.contains(&format!("{name} (n = ")), "{name}");
    }
}
