use std::path::Path;
use std::process::{Command, Output};

use ong_core::{binomial_total, NnMode, RandomStream};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ong-lab"))
}

fn write_config(dir: &Path, name: &str, body: Value) -> std::path::PathBuf {
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    p
}

fn config(experiment: &str, out: &Path) -> Value {
    serde_json::json!({
        "experiment": experiment, "d": 1, "alphas": [2.0], "ns": [], "lambdas": [],
        "replicates": 1, "master_seed": 4, "output_dir": out,
        "flags": {"dump_edges": false, "shadow_oracle": false}, "params": {}, "gates": []
    })
}

fn run(args: &[&str], cfg: &Path) -> Output {
    let mut c = bin();
    c.arg(args[0]).arg("--config").arg(cfg).args(&args[1..]);
    c.output().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn constants_run_writes_three_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "c", config("constants", &out));
    let o = run(&["constants"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("experiment,d,alpha,n,lambda,index,label,statistic,value,stderr,reps,theory\n"));
    let summary = read_json(&out.join("summary.json"));
    assert_eq!(summary["passed"], true);
    let c = &summary["constants"][0];
    assert_eq!(c["unit_ball_volume"].as_f64().unwrap().round(), 2.0);
    assert!((c["mu_1d"].as_f64().unwrap() - 5.0 / 12.0).abs() < 1e-12);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["master_seed"], 4);
    assert_eq!(manifest["config"]["experiment"], "constants");
    assert!(manifest["timestamp"].as_str().unwrap().ends_with('Z'));
}

#[test]
fn failing_gate_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut body = config("constants", &out);
    body["gates"] = serde_json::json!([{
        "name": "wrong", "statistic": "mu_1d", "select": {},
        "check": {"kind": "absolute", "target": 0.5, "tolerance": 0.01}
    }]);
    let cfg = write_config(tmp.path(), "c", body);
    let o = run(&["constants"], &cfg);
    assert_eq!(o.status.code(), Some(1));
    let summary = read_json(&out.join("summary.json"));
    assert_eq!(summary["passed"], false);
    assert_eq!(summary["gates"][0]["passed"], false);
}

#[test]
fn invalid_config_exits_two_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let mut body = config("lln", &out);
    body["ns"] = serde_json::json!([100]);
    // alpha = 2 = d is outside the law-of-large-numbers regime in d = 2.
    body["d"] = serde_json::json!(2);
    let cfg = write_config(tmp.path(), "c", body);
    let o = run(&["lln"], &cfg);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "invalid-config");
    assert!(!out.exists());

    let mut missing = config("constants", &out);
    missing.as_object_mut().unwrap().remove("master_seed");
    let cfg = write_config(tmp.path(), "m", missing);
    assert_eq!(run(&["constants"], &cfg).status.code(), Some(2));
}

#[test]
fn subcommand_must_match_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c", config("constants", &tmp.path().join("out")));
    let o = run(&["lln"], &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not match"));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write_config(tmp.path(), "c", config("constants", &blocker));
    let o = run(&["constants"], &cfg);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

fn lln_config(out: &Path, seed: u64) -> Value {
    serde_json::json!({
        "experiment": "lln", "d": 2, "alphas": [1.0, 1.5], "ns": [300, 1200], "lambdas": [],
        "replicates": 1, "master_seed": seed, "output_dir": out,
        "flags": {"dump_edges": false, "shadow_oracle": false}, "params": {}, "gates": []
    })
}

fn csv_value(csv: &str, statistic: &str, alpha: &str, n: &str) -> f64 {
    csv.lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[7] == statistic && f[2] == alpha && f[3] == n)
        .map(|f| f[8].parse().unwrap())
        .unwrap()
}

#[test]
fn manifest_seed_paths_reproduce_the_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "c", lln_config(&out, 99));
    assert_eq!(run(&["lln", "--threads", "2"], &cfg).status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let manifest = read_json(&out.join("manifest.json"));
    for entry in manifest["seed_paths"].as_array().unwrap() {
        let point = entry["point"].as_str().unwrap();
        let n: usize = point.split("n=").nth(1).unwrap().parse().unwrap();
        let mut path: Vec<u64> = entry["path"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        path.push(0);
        let stream = RandomStream::from_path(99, &path);
        let expect = binomial_total(n, 2, 1.5, &stream, NnMode::Grid).unwrap();
        let got = csv_value(&csv, "mean_total", "1.5", &n.to_string());
        assert_eq!(got.to_bits(), expect.to_bits(), "{point}");
    }
}

#[test]
fn seed_override_and_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    let cfg = write_config(tmp.path(), "c", lln_config(&a, 1));
    assert_eq!(run(&["lln"], &cfg).status.code(), Some(0));
    let out_b = b.to_str().unwrap();
    assert_eq!(run(&["lln", "--out", out_b, "--shadow-oracle"], &cfg).status.code(), Some(0));
    let out_c = c.to_str().unwrap();
    assert_eq!(run(&["lln", "--out", out_c, "--seed", "2", "--dump-edges"], &cfg).status.code(), Some(0));
    let ra = std::fs::read(a.join("results.csv")).unwrap();
    let rb = std::fs::read(b.join("results.csv")).unwrap();
    let rc = std::fs::read(c.join("results.csv")).unwrap();
    assert_eq!(ra, rb);
    assert_ne!(ra, rc);
    assert_eq!(read_json(&c.join("manifest.json"))["master_seed"], 2);
    assert_eq!(read_json(&b.join("manifest.json"))["config"]["flags"]["shadow_oracle"], true);
    let edges: Vec<_> = std::fs::read_dir(c.join("edges")).unwrap().collect();
    assert_eq!(edges.len(), 2);
    assert!(!c.join(".edges.partial").exists());
}

#[test]
fn repo_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            ong_lab::ExperimentConfig::from_path(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            count += 1;
        }
    }
    assert!(count >= 12);
}
