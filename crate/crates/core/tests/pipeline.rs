use std::fs;
use std::path::Path;

use burgers_core::harness::{parse_config, run_experiment, ExperimentConfig};

fn config(dir: &Path, extra: &str) -> ExperimentConfig {
    parse_config(&format!(
        "[solver]\nnu = 0.04\nmax_mode = 32\n\
         [averaging]\nburn_in = 1.0\nsigma = 0.4\nsample_interval = 0.1\nensemble_size = 3\n\
         [statistics]\np_values = [1, 2]\nl_values = [0.01, 0.02, 0.05, 0.1]\nspectrum_fit = [1, 8]\n\
         inertial_range = [0.01, 0.1]\ndissipation_range = [0.01, 0.05]\n\
         [output]\ndir = \"{}\"\n{extra}",
        dir.display()
    ))
    .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn every_requested_statistic_is_written_once() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&config(dir.path(), "")).unwrap();
    let point = dir.path().join("nu_0.04");

    let structure = rows(&point.join("structure.csv"));
    assert_eq!(structure[0], ["p", "l", "S_p"]);
    assert_eq!(structure.len() - 1, 2 * 4);

    let moments = rows(&point.join("moments.csv"));
    assert_eq!(moments[0], ["n", "k", "value"]);
    assert_eq!(moments.len() - 1, 3);

    let spectrum = rows(&point.join("spectrum.csv"));
    assert_eq!(spectrum[0], ["n", "E_n"]);
    assert_eq!(spectrum.len() - 1, 16);

    let oleinik = rows(&point.join("oleinik.csv"));
    assert_eq!(oleinik[0], ["t", "u_inf", "du_l1", "du_plus"]);
    assert_eq!(oleinik.len() - 1, 5);

    let fits: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(point.join("fits.json")).unwrap()).unwrap();
    for name in ["spectrum", "zeta_1", "zeta_2"] {
        let f = &fits[name];
        assert!(f["slope"].is_number(), "{name}");
        assert!(f["points"].as_u64().unwrap() >= 3);
        assert!(f["range"].is_array());
    }

    let p = &report.points[0];
    assert_eq!(p.trajectories, 3);
    assert_eq!(p.samples, 3 * 5);
    assert!(report.insufficient_statistics);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&config(dir.path(), "")).unwrap();
    let spectrum = rows(&dir.path().join("nu_0.04").join("spectrum.csv"));
    let value = &spectrum[1][1];
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{value}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), "");
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        fs::read(dir.path().join("nu_0.04").join("structure.csv")).unwrap()
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn sweep_points_are_flushed_independently() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&config(dir.path(), "[sweep]\nnu = [0.08, 0.04]\n")).unwrap();
    assert_eq!(report.points.len(), 2);
    for sub in ["nu_0.08", "nu_0.04"] {
        assert!(dir.path().join(sub).join("spectrum.csv").exists(), "{sub}");
    }
    assert!(report.sweep_fit("h1_scaling").is_none(), "two points are too few to fit");
    assert!(report.check("energy_order_one").is_some());
    assert!(report.check("oleinik_du_plus@nu=0.08->0.04").is_some());
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn different_seeds_give_different_statistics() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_experiment(&config(a.path(), "")).unwrap();
    let rb = run_experiment(&config(b.path(), "[noise]\nseed = 99\n")).unwrap();
    assert_ne!(ra.config_hash, rb.config_hash);
    assert_ne!(ra.points[0].moment(0.0, 2.0), rb.points[0].moment(0.0, 2.0));
}
