//! End-to-end checks of the configuration-driven commands: provenance,
//! byte-identical reruns, and validation behavior.

use pointhole::cli::{self, default_benchmark_config, ExperimentConfig, RunOptions};

fn opts(dir: &std::path::Path) -> RunOptions {
    RunOptions { out_dir: dir.to_path_buf(), jobs: 1, seed: 0 }
}

#[test]
fn sweep_writes_artifacts_and_is_byte_identical_on_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = default_benchmark_config();
    cfg.sweep.eps_end_exp = 8;
    cli::run("sweep", &cfg, &opts(tmp.path())).unwrap();
    let csv1 = std::fs::read(tmp.path().join("sweep_resolvent.csv")).unwrap();
    let fits1 = std::fs::read(tmp.path().join("fits.csv")).unwrap();
    // re-read the resolved config and re-run: byte-identical outputs
    let resolved = std::fs::read_to_string(tmp.path().join("resolved_config.toml")).unwrap();
    let cfg2 = ExperimentConfig::from_toml(&resolved).unwrap();
    let tmp2 = tempfile::tempdir().unwrap();
    cli::run("sweep", &cfg2, &opts(tmp2.path())).unwrap();
    let csv2 = std::fs::read(tmp2.path().join("sweep_resolvent.csv")).unwrap();
    let fits2 = std::fs::read(tmp2.path().join("fits.csv")).unwrap();
    assert_eq!(csv1, csv2, "sweep CSV must be byte-identical after a config round trip");
    assert_eq!(fits1, fits2);
    // jobs > 1 must not change the bytes either
    let tmp3 = tempfile::tempdir().unwrap();
    let mut o = opts(tmp3.path());
    o.jobs = 2;
    cli::run("sweep", &cfg, &o).unwrap();
    let csv3 = std::fs::read(tmp3.path().join("sweep_resolvent.csv")).unwrap();
    assert_eq!(csv1, csv3);
}

#[test]
fn report_reads_but_never_writes_the_numeric_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = default_benchmark_config();
    cfg.sweep.eps_end_exp = 8;
    cli::run("sweep", &cfg, &opts(tmp.path())).unwrap();
    let before = std::fs::read(tmp.path().join("sweep_resolvent.csv")).unwrap();
    cli::run("report", &cfg, &opts(tmp.path())).unwrap();
    let after = std::fs::read(tmp.path().join("sweep_resolvent.csv")).unwrap();
    assert_eq!(before, after, "report must be read-only on the numeric CSVs");
    assert!(tmp.path().join("report.svg").exists());
    assert!(tmp.path().join("report.txt").exists());
    let svg = std::fs::read_to_string(tmp.path().join("report.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn empty_eps_grid_is_a_validation_error_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = default_benchmark_config();
    cfg.sweep.eps_start_exp = 6;
    cfg.sweep.eps_end_exp = 6;
    let err = cfg.validate().unwrap_err();
    assert!(matches!(err, pointhole::Error::Config(_)));
    // no artifacts are produced for an invalid config
    assert!(std::fs::read_dir(tmp.path()).unwrap().next().is_none());
}

#[test]
fn coupling_prints_benchmark_constants() {
    // the coupling command on the benchmark config computes the closed-form
    // K and beta; verified through the CSV artifact
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = default_benchmark_config();
    cfg.geometry.domain = cli::config::DomainSpec::Disc { radius: 1.0 };
    cli::run("coupling", &cfg, &opts(tmp.path())).unwrap();
    let text = std::fs::read_to_string(tmp.path().join("coupling.csv")).unwrap();
    let line = text.lines().nth(1).unwrap();
    let cols: Vec<f64> = line
        .split(',')
        .take(4)
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((cols[0] - (-7.4967648341969975)).abs() < 1e-9, "K = {}", cols[0]);
    assert!((cols[1] - 1.1931471805599453).abs() < 1e-12, "beta = {}", cols[1]);
}

#[test]
fn limit_and_perturbed_eigs_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = default_benchmark_config();
    cfg.geometry.domain = cli::config::DomainSpec::Disc { radius: 1.0 };
    cfg.sweep.eps_single = 1e-4;
    cli::run("limit-eigs", &cfg, &opts(tmp.path())).unwrap();
    let text = std::fs::read_to_string(tmp.path().join("limit_eigs.csv")).unwrap();
    assert!(text.starts_with("m,index,lambda"));
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let lambda: f64 = first[2].parse().unwrap();
    assert!((lambda - (-13.661098236)).abs() < 1e-6);
    cli::run("perturbed-eigs", &cfg, &opts(tmp.path())).unwrap();
    let text = std::fs::read_to_string(tmp.path().join("perturbed_eigs.csv")).unwrap();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let lambda: f64 = first[2].parse().unwrap();
    assert!((lambda - (-12.9658086729)).abs() < 1e-6);
}

#[test]
fn provenance_config_written_next_to_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_benchmark_config();
    cli::run("green", &cfg, &opts(tmp.path())).unwrap();
    let resolved = tmp.path().join("resolved_config.toml");
    assert!(resolved.exists());
    let text = std::fs::read_to_string(resolved).unwrap();
    assert!(text.contains("schema = \"pointhole/1\""));
    assert!(tmp.path().join("green_probe.csv").exists());
}
