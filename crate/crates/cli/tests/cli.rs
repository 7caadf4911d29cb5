use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bloch-tsp"))
        .args(args)
        .env("BLOCH_TSP_OUT_DIR", out)
        .output()
        .unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn solve_fixture_is_optimal() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["solve", "--instance", "fixture:cm4"], dir.path());
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("solve.json")).unwrap()).unwrap();
    assert_eq!(report["r"], 1.0);
    assert_eq!(report["decode"]["ranked_cycle"].as_array().unwrap().len(), 4);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 3 * 1000);
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn malformed_instance_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 4, \"entries\": [").unwrap();
    let o = bin(&["solve", "--instance", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "parse");
}

#[test]
fn oversized_brute_oracle_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let n = 12;
    let entries: Vec<String> = (0..n * n)
        .map(|k| if k / n == k % n { "0".into() } else { format!("{}", 1 + (k * 7) % 9) })
        .collect();
    let inst = dir.path().join("big.json");
    fs::write(&inst, format!("{{\"n\": {n}, \"entries\": [{}]}}", entries.join(","))).unwrap();
    let hyper = dir.path().join("h.json");
    fs::write(&hyper, "{\"oracle\": \"brute\"}").unwrap();
    let o = bin(
        &["solve", "--instance", inst.to_str().unwrap(), "--hyper", hyper.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "size_limit");
}

#[test]
fn benchmark_size_limit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["benchmark", "--sizes", "10", "--instances", "1"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_flag_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["brute", "--instance", "fixture:cm4", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
}

#[test]
fn brute_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["brute", "--instance", "fixture:cm1", "--format", "csv"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("tour,D,T,rank_D,rank_T\n"));
    assert_eq!(text.lines().count(), 25);
    assert_eq!(fs::read_to_string(dir.path().join("brute.csv")).unwrap(), text);
}

#[test]
fn out_dir_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = bin(
        &["encode", "--instance", "fixture:cm4", "--out-dir", flag_dir.path().to_str().unwrap()],
        env_dir.path(),
    );
    assert!(o.status.success());
    assert!(flag_dir.path().join("encoding.json").exists());
    assert!(!env_dir.path().join("encoding.json").exists());
}

#[test]
fn benchmark_rows_audit_against_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let hyper = dir.path().join("h.json");
    fs::write(&hyper, "{\"iterations\": 100, \"restarts\": 1}").unwrap();
    let o = bin(
        &["benchmark", "--sizes", "5", "--instances", "3", "--kind", "asymmetric", "--hyper", hyper.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success());
    let mut rows = csv::Reader::from_path(dir.path().join("benchmark_rows.csv")).unwrap();
    let headers = rows.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (dmin, dob, r) = (col("d_min"), col("d_ob"), col("r"));
    let mut count = 0;
    for rec in rows.records() {
        let rec = rec.unwrap();
        let parse = |k: usize| rec[k].parse::<f64>().unwrap();
        assert!((parse(r) - parse(dmin) / parse(dob)).abs() < 1e-15);
        count += 1;
    }
    assert_eq!(count, 3);
    let hist = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 20);
}
