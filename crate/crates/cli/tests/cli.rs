use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mecanum-ekf")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The echoed config without its `output_dir` line, which differs by design.
fn echo_without_dir(dir: &Path) -> String {
    String::from_utf8(read(dir, "effective_config.toml"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("output_dir"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["simulate", "--mode", "fused_camera", "--seed", "7", "--out", dir.to_str().unwrap()]);
    }
    for name in ["trace_fused_camera_seed7.csv", "trajectory_fused_camera_seed7.svg"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
    assert_eq!(echo_without_dir(&a), echo_without_dir(&b));
    let csv = String::from_utf8(read(&a, "trace_fused_camera_seed7.csv")).unwrap();
    assert!(csv.starts_with("t,true_x,true_y,true_theta"));
}

#[test]
fn experiment_output_does_not_depend_on_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["experiment", "camera", "--trials", "6", "--jobs", "1", "--out", a.to_str().unwrap()]);
    ok(&["experiment", "camera", "--trials", "6", "--jobs", "3", "--out", b.to_str().unwrap()]);
    for name in ["camera_rmse.csv", "camera_summary.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
    assert_eq!(echo_without_dir(&a), echo_without_dir(&b));
}

#[test]
fn velocity_table_has_three_modes_and_seven_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let stdout = ok(&["experiment", "velocity", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert!(stdout.contains("model (n=5)") && stdout.contains("odo (n=5)") && stdout.contains("fused (n=5)"));
    // Published values appear next to ours.
    assert!(stdout.contains("[0.3589]"));

    let summary = String::from_utf8(read(&out, "velocity_summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "component,model,odo,fused,model_std_error,odo_std_error,fused_std_error");
    assert_eq!(lines.len(), 8);
    let long = String::from_utf8(read(&out, "velocity_rmse.csv")).unwrap();
    assert_eq!(long.lines().count(), 1 + 3 * 5 * 7);
}

#[test]
fn dt_sweep_with_two_points() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("dt");
    ok(&["experiment", "dt-sweep", "--dts", "0.01,0.1", "--trials", "3", "--out", out.to_str().unwrap()]);
    let curve = String::from_utf8(read(&out, "dt_sweep.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.01,") && lines[2].starts_with("0.1,"));
    assert!(read(&out, "dt_sweep.svg").starts_with(b"<svg"));
}

#[test]
fn cycle_experiment_writes_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cy");
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "cycles = 2\n").unwrap();
    ok(&["experiment", "cycle", "--config", cfg.to_str().unwrap(), "--trials", "2", "--out", out.to_str().unwrap()]);
    let curve = String::from_utf8(read(&out, "cycle_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 2 * 2);
    let echoed = String::from_utf8(read(&out, "effective_config.toml")).unwrap();
    assert!(echoed.contains("path = \"cycle\""));
}

#[test]
fn echoed_config_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    ok(&["simulate", "--mode", "fused", "--seed", "3", "--out", first.to_str().unwrap()]);
    let echo = first.join("effective_config.toml");
    let second = tmp.path().join("second");
    ok(&["simulate", "--mode", "fused", "--config", echo.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(read(&first, "trace_fused_seed3.csv"), read(&second, "trace_fused_seed3.csv"));
}

#[test]
fn invalid_configs_fail_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("[camera]\nfov = 200\n", "fov must be in (0, 180)"),
        ("[clock]\ntruth_dt = 0.01\nfilter_dt = 0.015\n", "filter_dt must be an integer multiple"),
        ("[geometry]\nwheel_radius = 1.0\nwheels = 4\n", "unknown field"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = tmp.path().join(format!("bad{i}.toml"));
        fs::write(&path, text).unwrap();
        let out = run(&["validate-config", "--config", path.to_str().unwrap()]);
        assert!(!out.status.success());
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{stderr}");
    }
}

#[test]
fn empty_config_validates_to_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("empty.toml");
    fs::write(&path, "").unwrap();
    let stdout = ok(&["validate-config", "--config", path.to_str().unwrap()]);
    assert!(stdout.contains("fov = 70.0"));
    assert!(stdout.contains("filter_dt = 0.01"));
}

#[test]
fn missing_config_file_is_an_error() {
    let out = run(&["validate-config", "--config", "/nonexistent/run.toml"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));
}
