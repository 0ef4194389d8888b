use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use auxetikit::elasticity::base_stiffness;
use auxetikit::forest::Surrogate;
use auxetikit::{BaseMaterial, Regime, VoidShape};
use serde_json::Value;

fn bin(dir: &Path) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_auxetikit"));
    c.current_dir(dir).env("RUST_LOG", "warn");
    for (k, _) in std::env::vars() {
        if k.starts_with("AUXETIKIT_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin(dir).args(args).output().unwrap()
}

fn ok_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

/// A directory with a small rect dataset and trained models, shared by
/// the tests that only read it.
fn trained() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap().keep();
        let out = run(&dir, &["generate", "--shape", "rect", "--count", "100", "--n", "64", "--seed", "5"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = run(&dir, &["train", "--shape", "rect", "--n-trees", "20", "--json"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        dir
    })
}

#[test]
fn homogenize_solid_cell() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&run(
        dir.path(),
        &["homogenize", "--shape", "oval", "--d", "0", "--D", "0", "--E", "3500", "--nu", "0.36", "--n", "16"],
    ));
    let d = base_stiffness(&BaseMaterial::new(3500.0, 0.36).unwrap(), Regime::PlaneStrain).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let got = v["stiffness"][i][j].as_f64().unwrap();
            assert!((got - d[(i, j)]).abs() <= 1e-8 * d[(0, 0)]);
        }
    }
    assert_eq!(v["regime"], "plane_strain");
    assert_eq!(v["n"], 16);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cases: [&[&str]; 5] = [
        &["homogenize", "--shape", "rect", "--d", "0.6", "--D", "0.5"],
        &["homogenize", "--shape", "hexagon", "--d", "0.1", "--D", "0.5"],
        &["homogenize", "--shape", "rect", "--d", "0.1", "--D", "0.5", "--E", "-1"],
        &["inverse", "--E", "3500", "--nu", "0.3"],
        &["sweep", "--shape", "rect", "--d", "0.5", "--to", "0.9"],
    ];
    for args in cases {
        let out = run(p, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["homogenize", "--shape", "rect", "--d", "0.3", "--D", "0.5", "--n", "16", "--tol", "1e-300"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn pipeline_reports_scores() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = run(p, &["generate", "--shape", "rect", "--count", "100", "--n", "32", "--json"]);
    let v = ok_json(&out);
    assert_eq!(v["rows"].as_u64().unwrap() + v["failed"].as_u64().unwrap(), 100);
    let out = run(p, &["train", "--shape", "rect", "--target", "c11", "--n-trees", "10", "--json"]);
    let v = ok_json(&out);
    let r2 = v["r2_test"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&r2), "{r2}");
    assert!(p.join("models/rect_c11.json").exists());
    assert!(!p.join("models/rect_c12.json").exists());
}

#[test]
fn predict_matches_in_process() {
    let dir = trained();
    let v = ok_json(&run(
        dir,
        &["predict", "--shape", "rect", "--d", "0.12", "--D", "0.45", "--E", "2", "--nu", "0.33", "--json"],
    ));
    let s = Surrogate::load(dir.join("models"), VoidShape::Rectangular).unwrap();
    let p = s.predict(0.12, 0.45, 0.33);
    assert_eq!(v["c11"].as_f64().unwrap(), p[0] * 2.0);
    assert_eq!(v["c12"].as_f64().unwrap(), p[1] * 2.0);
    assert_eq!(v["c33"].as_f64().unwrap(), p[2] * 2.0);
}

#[test]
fn inverse_accepts_negative_targets() {
    let dir = trained();
    let args = [
        "inverse", "--c11", "400", "--c12", "-200", "--E", "3500", "--nu", "0.36", "--evals", "2000", "--json",
    ];
    let a = ok_json(&run(dir, &args));
    let b = ok_json(&run(dir, &args));
    assert!(a["evaluations"].as_u64().unwrap() <= 2000);
    assert!(a["feasible"].is_boolean());
    assert_eq!(a["d_rel"], b["d_rel"]);
    assert_eq!(a["D_rel"], b["D_rel"]);
    assert_eq!(a["loss"], b["loss"]);
}

#[test]
fn missing_models_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["predict", "--shape", "peanut", "--d", "0.1", "--D", "0.4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("peanut_c11.json"));
}

#[test]
fn generate_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let gen = |workers: &str, out: &str| {
        let o = run(
            p,
            &["generate", "--shape", "diamond", "--count", "24", "--n", "32", "--seed", "11", "--workers", workers, "--data-dir", out],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(p.join(out).join("diamond.csv")).unwrap()
    };
    assert_eq!(gen("1", "a"), gen("4", "b"));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("auxetikit.toml"), "grid_n = 8\nregime = \"plane_stress\"\n").unwrap();
    let args = ["homogenize", "--shape", "rect", "--d", "0", "--D", "0"];
    let v = ok_json(&run(p, &args));
    assert_eq!((v["n"].as_u64(), v["regime"].as_str()), (Some(8), Some("plane_stress")));

    let out = bin(p).args(args).env("AUXETIKIT_GRID_N", "12").output().unwrap();
    let v = ok_json(&out);
    assert_eq!((v["n"].as_u64(), v["regime"].as_str()), (Some(12), Some("plane_stress")));

    let out = bin(p).args(args).args(["--n", "16"]).env("AUXETIKIT_GRID_N", "12").output().unwrap();
    assert_eq!(ok_json(&out)["n"], 16);

    std::fs::write(p.join("broken.toml"), "grid_n = \"many\"").unwrap();
    let out = run(p, &["--config", "broken.toml", "homogenize", "--shape", "rect", "--d", "0", "--D", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["sweep", "--shape", "rect", "--n", "32", "--from", "0.40", "--to", "0.46", "--step", "0.02"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "D_rel,c11_over_E,c12_over_E,c33_over_E,nu_eff,evaluator");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0.4,") && lines[4].starts_with("0.46,"));
}
