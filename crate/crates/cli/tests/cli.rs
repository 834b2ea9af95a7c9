use std::path::Path;
use std::process::{Command, Output};

fn tnnflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tnnflow"))
        .args(args)
        .env_remove("TNNFLOW_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn pinning_prints_tau() {
    let o = tnnflow(&["pinning", "--n", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("tau = [[0,1,0],[1,0,1],[0,1,0]]"));
    assert!(stdout(&o).contains("e1 = [[0,1,0],[0,0,0],[0,0,0]]"));
}

#[test]
fn embed_reports_dimension() {
    let o = tnnflow(&["embed", "--n", "3", "--J", ""]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("dim = 8"), "{s}");
    assert!(s.contains("eigenvalues = [2.828427124746"), "{s}");
}

#[test]
fn sample_emits_certificates() {
    let o = tnnflow(&["sample", "--n", "3", "--positive", "--count", "3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 3);
    for s in samples {
        assert_eq!(s["certificate"]["class"], "TotallyPositive");
        assert_eq!(s["certificate"]["minors"], 19);
    }
}

#[test]
fn cells_summary_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cells.json");
    let o = tnnflow(&["cells", "--n", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "19 cells: f = (6, 8, 4, 1)"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 19);

    let bad = tnnflow(&["cells", "--n", "4"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn figure_svg() {
    let o = tnnflow(&["figure", "--format", "svg"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("<?xml"));
    assert_eq!(s.matches("class=\"vertex-label\"").count(), 6);
    let bad = tnnflow(&["figure", "--format", "png"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn flow_point_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"point": [1, "0.5", 0, 0, 0, 0, 0]}"#).unwrap();
    let o = tnnflow(&["flow", "--n", "3", "--t", "0", "--from", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["point"][1], "0.50000000000000000");

    let f = dir.path().join("f.json");
    std::fs::write(&f, r#"{"flag": [[1, 0, 0], [2, 1, 0], [1, 1, 1]]}"#).unwrap();
    let o = tnnflow(&["flow", "--n", "3", "--t", "1", "--from", f.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d: f64 = v["discrepancy"].as_str().unwrap().parse().unwrap();
    assert!(d < 1e-8);

    let missing = tnnflow(&["flow", "--from", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

fn verify_bytes(dir: &Path, name: &str, extra: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let mut args = vec!["verify", "--count", "20", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = tnnflow(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = verify_bytes(dir.path(), "a.json", &["--seed", "7"]);
    let b = verify_bytes(dir.path(), "b.json", &["--seed", "7"]);
    assert_eq!(a, b);
    let c = verify_bytes(dir.path(), "c.json", &["--seed", "8"]);
    assert_ne!(a, c);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 5, "count": 2}"#).unwrap();
    let run = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_tnnflow"));
        c.args(args).env_remove("TNNFLOW_SEED");
        if let Some(e) = env {
            c.env("TNNFLOW_SEED", e);
        }
        let o = c.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (v["config"]["seed"].as_u64().unwrap(), v["config"]["count"].as_u64().unwrap())
    };
    let base = ["sample", "--format", "json"];
    assert_eq!(run(&base, Some("9")), (9, 100));
    let with_cfg = ["sample", "--format", "json", "--config", cfg.to_str().unwrap()];
    assert_eq!(run(&with_cfg, Some("9")), (5, 2));
    let with_flag = ["sample", "--format", "json", "--config", cfg.to_str().unwrap(), "--seed", "1"];
    assert_eq!(run(&with_flag, Some("9")), (1, 2));

    std::fs::write(&cfg, r#"{"sead": 5}"#).unwrap();
    let o = tnnflow(&["pinning", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fold_and_rejections() {
    let o = tnnflow(&["fold", "--n", "4", "--count", "10"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(tnnflow(&["fold", "--n", "4", "--J", "1"]).status.code(), Some(2));
    assert_eq!(tnnflow(&["embed", "--n", "3", "--J", "5"]).status.code(), Some(2));
}
