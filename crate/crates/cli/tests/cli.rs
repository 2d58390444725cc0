use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn burg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burg"))
        .args(args)
        .env_remove("BURG_THREADS")
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.toml");
    fs::write(
        &path,
        "[solver]\nnu = 0.05\nmax_mode = 32\n\
         [averaging]\nburn_in = 1.0\nsigma = 0.2\nsample_interval = 0.1\nensemble_size = 2\n\
         [statistics]\nspectrum_fit = [1, 8]\nl_values = [0.005, 0.01, 0.02, 0.05, 0.1]\n\
         inertial_range = [0.01, 0.1]\ndissipation_range = [0.005, 0.05]\n",
    )
    .unwrap();
    path
}

#[test]
fn version_prints_package_version() {
    let out = burg(&["version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn simulate_writes_outputs_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("results");
    let out = burg(&[
        "simulate",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--seed",
        "5",
        "--threads",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("report.json").exists());
    assert!(out_dir.join("nu_0.05").join("spectrum.csv").exists());
    // Small ensembles are flagged rather than failed.
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient statistics"));
}

#[test]
fn seed_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |seed: &str, sub: &str| {
        let d = dir.path().join(sub);
        let out = burg(&["simulate", cfg.to_str().unwrap(), "--out-dir", d.to_str().unwrap(), "--seed", seed]);
        assert!(out.status.success());
        fs::read(d.join("nu_0.05").join("spectrum.csv")).unwrap()
    };
    let a = run("1", "a");
    assert_eq!(a, run("1", "b"));
    assert_ne!(a, run("2", "c"));
}

#[test]
fn invalid_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[noise]\nalpha = 2.5\n").unwrap();
    let out = burg(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("noise.alpha"));

    let out = burg(&["simulate", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unstable.toml");
    // A fixed step far above the stability limit of a sine start.
    fs::write(
        &path,
        "[solver]\nnu = 0.05\nmax_mode = 32\ndt = 0.05\ninitial = \"sine\"\n\
         [noise]\nenabled = false\n[statistics]\nspectrum_fit = [1, 8]\n\
         [averaging]\nsigma = 0.2\nsample_interval = 0.1\nensemble_size = 1\n",
    )
    .unwrap();
    let out = burg(&["simulate", path.to_str().unwrap(), "--out-dir", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn quick_verify_passes() {
    let out = burg(&["verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["nonlinear_convolution", "cole_hopf", "parseval", "levy_variance", "merge_equivalence"] {
        assert!(stdout.contains(name), "{name}");
    }
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn fit_reads_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let mut text = String::from("n,E_n\n");
    for n in 1..=20 {
        text.push_str(&format!("{n},{}\n", 3.0 * (n as f64).powf(-2.0)));
    }
    fs::write(&path, text).unwrap();
    let out = burg(&["fit", path.to_str().unwrap(), "--range", "2:16", "--x", "n", "--y", "E_n"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["slope"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert_eq!(v["points"].as_u64(), Some(15));

    let out = burg(&["fit", path.to_str().unwrap(), "--range", "30:40"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_thread_environment_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_burg"))
        .args(["version"])
        .env("BURG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_burg"))
        .args(["--threads", "0", "version"])
        .env("BURG_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "BURG_THREADS overrides --threads");
}
