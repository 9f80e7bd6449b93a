//! End-to-end checks of the `solver` binary and its file artifacts.

use std::path::Path;
use std::process::Command;

fn solver_bin() -> &'static str {
    env!("CARGO_BIN_EXE_solver")
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_PULSE: &str = "case = pulse\np = 2\nn_elements = 8\nn_v = 16\nkn = 0.05\nt_final = 0.05\noutput_interval = 0.025\nthreads = 1\n";

#[test]
fn run_writes_artifacts_with_expected_shapes() {
    let tmp = std::env::temp_dir().join("frbgk_cli_shapes");
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let cfg = write_config(&tmp, SMALL_PULSE);
    let out_dir = tmp.join("out");
    let status = Command::new(solver_bin())
        .args(["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());

    let profile = std::fs::read_to_string(out_dir.join("profile.csv")).unwrap();
    let mut lines = profile.lines();
    assert_eq!(lines.next().unwrap(), "x,rho,u,p,e,theta");
    // one row per solution node: N_e * (p + 1)
    assert_eq!(lines.count(), 8 * 3);

    let series = std::fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    assert!(series.starts_with("t,mass,momentum,energy,mass_err,min_f,residual_linf"));
    assert!(series.lines().count() >= 3);

    assert!(out_dir.join("config.cfg").exists());
    assert!(out_dir.join("report.txt").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = std::env::temp_dir().join("frbgk_cli_determinism");
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let cfg = write_config(&tmp, SMALL_PULSE);
    for name in ["a", "b"] {
        let status = Command::new(solver_bin())
            .args([
                "run",
                cfg.to_str().unwrap(),
                "--out",
                tmp.join(name).to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["profile.csv", "timeseries.csv", "config.cfg"] {
        let a = std::fs::read(tmp.join("a").join(file)).unwrap();
        let b = std::fs::read(tmp.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between reruns");
    }
}

#[test]
fn tabulate_zeta_prints_extent() {
    let out = Command::new(solver_bin())
        .args(["tabulate-zeta", "--delta", "4", "--eps", "1e-6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().parse().unwrap();
    assert!((value - 16.627).abs() < 1e-3);
}

#[test]
fn validate_zeta_suite_writes_report() {
    let tmp = std::env::temp_dir().join("frbgk_cli_validate");
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let out = Command::new(solver_bin())
        .args(["validate", "zeta_table", "--out", tmp.to_str().unwrap()])
        .output()
        .unwrap();
    let report = std::fs::read_to_string(tmp.join("report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 28);
    assert!(report.lines().all(|l| l.contains("\"suite\":\"zeta_table\"")));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("zeta_table"));
}

#[test]
fn bad_config_reports_line() {
    let tmp = std::env::temp_dir().join("frbgk_cli_badcfg");
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let cfg = write_config(&tmp, "case = sod\nwhoops = 1\n");
    let out = Command::new(solver_bin())
        .args(["run", cfg.to_str().unwrap(), "--out", tmp.join("o").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn failed_run_leaves_partial_log() {
    // a wildly over-sized CFL number violates the positivity bound quickly
    let tmp = std::env::temp_dir().join("frbgk_cli_partial");
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let cfg = write_config(
        &tmp,
        "case = sod\np = 3\nn_elements = 20\nn_v = 16\nn_zeta = 16\nkn_h = 0.1\nt_final = 0.2\ncfl = 80\nthreads = 1\n",
    );
    let out_dir = tmp.join("out");
    let out = Command::new(solver_bin())
        .args(["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    // the partial time series (at least the initial row) and a failure
    // report are still written
    let series = std::fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    assert!(series.lines().count() >= 2);
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("run failed"), "report: {report}");
}
