use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn upir_lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upir-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("UPIR_LAB_MAX_POINTS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> Vec<u8> {
    let out = upir_lab(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty(), "{args:?} wrote to stderr");
    out.stdout
}

#[test]
fn construct_example36_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["construct", "example36"], dir.path());
    assert_eq!(out, include_bytes!("../../core/tests/golden/example36.cfg"));
}

#[test]
fn construct_pappus_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["construct", "td", "3", "3", "-o", "td.cfg", "--sidecar", "td.json"], dir.path());
    let cfg = fs::read_to_string(dir.path().join("td.cfg")).unwrap();
    assert!(cfg.starts_with("cfg 9 9\n"));
    assert_eq!(cfg, String::from_utf8(ok(&["construct", "pappus"], dir.path())).unwrap());
    let sidecar: Value = serde_json::from_slice(&fs::read(dir.path().join("td.json")).unwrap()).unwrap();
    assert_eq!(sidecar["groups"], serde_json::json!([[0, 1, 2], [3, 4, 5], [6, 7, 8]]));
    assert_eq!(sidecar["parallel_classes"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = upir_lab(&["construct", "affine", "4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("order must be prime"), "{stderr}");
    assert_eq!(stderr.lines().count(), 1);

    assert_eq!(upir_lab(&["construct", "nonsense"], dir.path()).status.code(), Some(1));
    assert_eq!(upir_lab(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(upir_lab(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(upir_lab(&["--version"], dir.path()).status.code(), Some(0));
    assert_eq!(upir_lab(&["construct", "td", "4", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(upir_lab(&["construct", "extend-closed", "2", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(upir_lab(&["analyze", "missing.cfg"], dir.path()).status.code(), Some(3));

    fs::write(dir.path().join("bad.cfg"), "cfg 3 1\n0 1 1\n").unwrap();
    assert_eq!(upir_lab(&["analyze", "bad.cfg"], dir.path()).status.code(), Some(2));
}

#[test]
fn point_limit_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_upir-lab"))
        .args(["construct", "affine", "11"])
        .env("UPIR_LAB_MAX_POINTS", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit is 100"));
    ok(&["construct", "affine", "7"], dir.path());
}

#[test]
fn analyze_fano() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("fano.cfg"), ok(&["construct", "fano"], dir.path())).unwrap();
    let json: Value = serde_json::from_slice(&ok(&["analyze", "fano.cfg"], dir.path())).unwrap();
    assert_eq!(json["open"]["level"], 1);
    assert_eq!(json["closed"]["level"], 7);
    assert_eq!(json["deficiency"], 0);
    assert_eq!(json["triangle_free"], false);
    assert!(json["version"].is_string());
}

#[test]
fn simulate_and_attack_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&["construct", "td", "3", "3", "-o", "td33.cfg"], p);
    let model = r#"{"default":{"background":0.3},"users":{"4":{"repeat":1}}}"#;
    let sim = ["simulate", "--cfg", "td33.cfg", "--protocol", "upir1", "--steps", "300", "--seed", "1", "--model", model];
    let first = ok(&sim, p);
    assert_eq!(first, ok(&sim, p));
    fs::write(p.join("trace.jsonl"), &first).unwrap();

    let attack = ["attack", "--cfg", "td33.cfg", "--trace", "trace.jsonl", "--query", "4"];
    let report = ok(&attack, p);
    assert_eq!(report, ok(&attack, p));
    let json: Value = serde_json::from_slice(&report).unwrap();
    assert_eq!(json["seed"], 1);
    assert_eq!(json["report"]["candidate_set"], serde_json::json!([3, 4, 5]));

    let live = ["attack", "--live", "--cfg", "td33.cfg", "--protocol", "upir1", "--owner", "4", "--seed", "9", "--report", "live.json"];
    let csv = ok(&live, p);
    let report_bytes = fs::read(p.join("live.json")).unwrap();
    assert_eq!(csv, ok(&live, p));
    assert_eq!(report_bytes, fs::read(p.join("live.json")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next(), Some("observation_index,candidate_count"));
    assert!(text.lines().last().unwrap().ends_with(",3"), "{text}");
}

#[test]
fn summary_csv_and_seed_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&["construct", "fano", "-o", "fano.cfg"], p);
    let single = ok(
        &["simulate", "--cfg", "fano.cfg", "--protocol", "upir2", "--steps", "50", "--seed", "2", "--summary"],
        p,
    );
    assert!(String::from_utf8(single).unwrap().starts_with("owner,proxy,count\n"));

    let multi = ["simulate", "--cfg", "fano.cfg", "--protocol", "upir2", "--self-submission", "auto", "--steps", "50", "--seeds", "0..3", "--out-dir", "runs", "--summary"];
    ok(&multi, p);
    let merged = fs::read_to_string(p.join("runs/summary.csv")).unwrap();
    assert_eq!(merged.lines().next(), Some("seed,owner,proxy,count"));
    assert_eq!(merged.matches("seed,").count(), 1);
    let seeds: std::collections::BTreeSet<&str> = merged.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seeds.into_iter().collect::<Vec<_>>(), ["0", "1", "2"]);
    for seed in 0..3 {
        assert!(p.join(format!("runs/trace-seed{seed}.jsonl")).exists());
    }
    assert_eq!(upir_lab(&["simulate", "--cfg", "fano.cfg", "--protocol", "upir1", "--steps", "5", "--seeds", "3..3", "--out-dir", "x"], p).status.code(), Some(1));
}

#[test]
fn experiment_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let spec = r#"{
        "construction": {"name": "td", "params": [3, 3]},
        "protocol": "upir1",
        "steps": 100,
        "seeds": [1, 2],
        "attack_targets": [4],
        "out_dir": "out"
    }"#;
    fs::write(p.join("exp.json"), spec).unwrap();
    ok(&["experiment", "exp.json"], p);
    let out = p.join("out");
    for f in ["config.cfg", "analysis.json", "summary.csv", "attacks.csv", "manifest.json", "trace-seed1.jsonl", "trajectory-owner4-seed2.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["confusion_certificate"], 3);
    let attacks = fs::read_to_string(out.join("attacks.csv")).unwrap();
    assert!(attacks.lines().skip(1).all(|l| l.split(',').nth(3) == Some("3")), "{attacks}");

    fs::write(p.join("empty.json"), spec.replace("[1, 2]", "[]")).unwrap();
    assert_eq!(upir_lab(&["experiment", "empty.json"], p).status.code(), Some(2));
}
