use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn walkbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, name: &str, family: &[&str]) -> String {
    let out = dir.join(name).display().to_string();
    let mut args = vec!["generate"];
    args.extend_from_slice(family);
    args.extend_from_slice(&["--out", &out]);
    let o = walkbound(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn analyze_unit_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path(), "p.json", &["unit-path", "--n", "5"]);
    let o = walkbound(&["analyze", &g]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["result"]["expected_t"].as_f64().unwrap() - 25.0).abs() < 1e-9);
    assert_eq!(v["manifest"]["command"], "analyze");
    assert_eq!(v["manifest"]["inputs"][&g].as_str().unwrap().len(), 64);
    let statuses: Vec<&str> = v["result"]["bounds"]["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["status"].as_str().unwrap())
        .collect();
    assert!(statuses.iter().all(|s| *s == "pass"));
}

#[test]
fn analyze_custom_grids() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path(), "f.json", &["fast-path", "--n", "8", "--g", "2"]);
    let o = walkbound(&[
        "analyze",
        &g,
        "--beta-grid",
        "0.2,0.4",
        "--a-grid",
        "1.5,2.0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let verdicts = v["result"]["bounds"]["verdicts"].as_array().unwrap();
    let laplace = verdicts.iter().filter(|x| x["check"] == "laplace").count();
    assert_eq!(laplace, 4);
}

#[test]
fn unreachable_target_is_reported_not_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.json");
    std::fs::write(
        &path,
        r#"{"vertices":["o","a","b","z"],"edges":[["o","a",1.0],["b","z",1.0]],"origin":"o","targets":["z"]}"#,
    )
    .unwrap();
    let o = walkbound(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["expected_t"], "inf");
    assert!(v["result"]["bounds"].is_null());
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let o = walkbound(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(walkbound(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        walkbound(&["generate", "fast-path", "--n", "3", "--g", "2"])
            .status
            .code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path(), "p.json", &["unit-path", "--n", "4"]);
    assert_eq!(
        walkbound(&["decompose", &g, "--beta", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(walkbound(&["--help"]).status.code(), Some(0));
}

#[test]
fn decompose_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path(), "p.json", &["unit-path", "--n", "6"]);
    let o = walkbound(&["decompose", &g, "--beta", "0.6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["result"]["decomposition"]["components"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
    assert!(v["result"]["residuals"]["reconstruction"].as_f64().unwrap() < 1e-9);
}

#[test]
fn simulate_is_reproducible_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path(), "r.json", &["random", "--seed", "5"]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = walkbound(&[
            "simulate",
            &g,
            "--seed",
            "3",
            "--reps",
            "500",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(a.starts_with(b"replication,statistic,k_or_t,value,censored\n"));
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["parameters"]["reps"], 500);
}

#[test]
fn simulate_escape_respects_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "t.json",
        &["recurrent-tree-line", "--depths", "1,2,3", "--length", "10"],
    );
    let ok = walkbound(&[
        "simulate",
        &g,
        "--statistic",
        "speed",
        "--record",
        "5,10",
        "--reps",
        "10",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let beyond = walkbound(&[
        "simulate",
        &g,
        "--statistic",
        "speed",
        "--record",
        "5,11",
        "--reps",
        "10",
    ]);
    assert_eq!(beyond.status.code(), Some(1));
}

#[test]
fn tree_line_resource_cap() {
    let o = walkbound(&[
        "generate",
        "recurrent-tree-line",
        "--depths",
        "20,20",
        "--length",
        "30",
        "--max-vertices",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--max-vertices"));
}

#[test]
fn sweep_csv() {
    let o = walkbound(&[
        "sweep",
        "--family",
        "poly-fast-path",
        "--n-list",
        "100,1000,10000",
        "--p",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,g,closed_form_et,exact_et,mean_bound,asymptotic,ratio"
    );
    let ratios: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn corpus_check_small() {
    let o = walkbound(&["corpus-check", "--seed", "11", "--count", "20"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["graphs"], 20);
}
