use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sar_rpca::io::MatrixFile;
use sar_rpca::linalg::max_abs;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sar-rpca"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn empty_scene_simulates_to_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("empty.json");
    let mut v = json(&fixture("scaled.json"));
    v["targets"] = serde_json::json!([]);
    v["sampling"]["gate_seconds"] = serde_json::json!([-1e-8, 1e-8]);
    std::fs::write(&scene, serde_json::to_string(&v).unwrap()).unwrap();
    let out = run(&["simulate", "--scenario", scene.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let f = MatrixFile::read(&dir.path().join("D.sarm")).unwrap();
    assert_eq!(max_abs(f.real().unwrap()), 0.0);
    assert_eq!(f.metadata.regime, None);
}

#[test]
fn narrow_gate_exits_with_physics_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--scenario", fixture("narrow_gate.json").to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("target 1"), "{err}");
}

#[test]
fn missing_input_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["decompose"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("D_B.sarm"), "{err}");
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, "{\n  \"windows\": 2,\n  \"colour\": \"blue\"\n}\n").unwrap();
    let out = run(&["eta", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("run.json") && err.contains("line 3"), "{err}");

    let out = run(&["decompose", "--eta", "lots"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_is_deterministic_and_complete() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = run(&["pipeline"], d.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["D.sarm", "D_B.sarm", "L.sarm", "S.sarm", "image_D.pgm", "image_L.pgm", "image_S.pgm", "spectra.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
    let summary = json(&a.path().join("summary.json"));
    for name in ["eta.json", "rpca.json", "separation.json", "image_S.json"] {
        assert!(summary["files"].as_array().unwrap().iter().any(|f| f == name), "{name} missing");
    }
    let s = MatrixFile::read(&a.path().join("S.sarm")).unwrap();
    let d = MatrixFile::read(&a.path().join("D.sarm")).unwrap();
    assert_eq!(s.metadata.scenario_hash, d.metadata.scenario_hash);
    // The S image tracks the mover and finds it.
    let peaks = &json(&a.path().join("image_S.json"))["peaks"];
    let p = &peaks[0]["position_m"];
    assert!((p[0].as_f64().unwrap() + 9.43).abs() < 0.5 && (p[1].as_f64().unwrap() + 3.07).abs() < 0.5, "{peaks}");
}

#[test]
fn windows_and_optimal_eta_improve_capture() {
    let capture = |args: &[&str]| {
        let d = tempfile::tempdir().unwrap();
        let out = run(args, d.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        json(&d.path().join("separation.json"))["capture"].as_f64().unwrap()
    };
    let c1 = capture(&["pipeline", "--eta", "conventional", "--windows", "1"]);
    let c5 = capture(&["pipeline", "--eta", "conventional", "--windows", "5"]);
    let opt = capture(&["pipeline", "--eta", "optimal", "--windows", "1"]);
    assert!(c5 > c1, "{c1} {c5}");
    assert!(opt >= c5, "{opt} {c5}");
}

#[test]
fn stages_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for args in [
        vec!["simulate"],
        vec!["decompose", "--matrix", "original", "--eta", "0.03"],
        vec!["image", "--velocity", "15,0,0"],
        vec!["eta"],
    ] {
        let out = run(&args, p);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let rpca = json(&p.join("rpca.json"));
    assert_eq!(rpca["matrix"], "original");
    assert_eq!(rpca["eta_mode"], 0.03);
    let img = json(&p.join("image_S.json"));
    assert_eq!(img["complex"], false);
    assert_eq!(img["source"], "S");
    let eta = json(&p.join("eta.json"));
    assert!(eta["baseband"]["eta_star"].as_f64().unwrap() > 0.0);
}

#[test]
fn analyze_writes_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["analyze"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let nuclear = csv_column(&dir.path().join("velocity_sweep.csv"), "nuclear_baseband");
    assert!(nuclear.windows(2).all(|w| w[1] > w[0]), "{nuclear:?}");
    let report = json(&dir.path().join("analysis.json"));
    assert!(report["stationary_count_spread"].as_f64().unwrap() < 0.2);
    assert_eq!(csv_column(&dir.path().join("stationary_count.csv"), "stationary_targets").len(), 10);
    assert_eq!(csv_column(&dir.path().join("eta_sweep.csv"), "speed_m_per_s").len(), 6);
}
