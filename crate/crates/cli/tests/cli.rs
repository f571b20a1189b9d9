use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokesheat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV written by the tool (schema line and header dropped).
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# stokesheat "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("run.json");
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn eigens_lists_shear_modes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["eigens", "--lambda-max", "50", "--out-dir", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let shear: Vec<f64> = rows(&d.path().join("out/modes.csv"))
        .iter()
        .filter(|r| r[0] == "0")
        .map(|r| r[3].parse().unwrap())
        .collect();
    assert_eq!(shear.len(), 2);
    assert!((shear[0] - PI * PI).abs() < 1e-12);
    assert!((shear[1] - 4.0 * PI * PI).abs() < 1e-12);
    let checks = rows(&d.path().join("out/orthonormality.csv"));
    assert!(checks.iter().all(|r| r[3] == "true"));
}

#[test]
fn cache_is_reused_and_corrupt_cache_is_rebuilt() {
    let d = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["eigens", "--lambda-max", "60", "--cache", "basis.json", "--out-dir", out];
    let first = run(d.path(), &args("a"));
    assert_eq!(code(&first), 0);
    let second = run(d.path(), &args("b"));
    assert_eq!(code(&second), 0);
    assert!(stderr(&second).contains("loaded basis"));
    assert_eq!(fs::read(d.path().join("a/modes.csv")).unwrap(), fs::read(d.path().join("b/modes.csv")).unwrap());

    fs::write(d.path().join("basis.json"), "{\"schema_version\": 1, \"trunc").unwrap();
    let third = run(d.path(), &args("c"));
    assert_eq!(code(&third), 0);
    assert!(stderr(&third).contains("warning"));
    assert_eq!(fs::read(d.path().join("a/modes.csv")).unwrap(), fs::read(d.path().join("c/modes.csv")).unwrap());
    let fourth = run(d.path(), &args("d"));
    assert!(stderr(&fourth).contains("loaded basis"), "rebuilt cache was not rewritten");

    // a different cutoff must not reuse the cache
    let other = run(d.path(), &["eigens", "--lambda-max", "40", "--cache", "basis.json", "--out-dir", "e"]);
    assert_eq!(code(&other), 0);
    assert!(stderr(&other).contains("other parameters"));
}

#[test]
fn configuration_errors_exit_two_and_name_the_key() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["control", "--lambda-max", "100", "--gamma", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("schedule.gamma"), "{}", stderr(&o));

    let cfg = write_config(d.path(), r#"{"basis": {"Lambda_max": 50}, "schedule": {"gama": 2}}"#);
    let o = run(d.path(), &["eigens", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gama"), "{}", stderr(&o));

    let cfg = write_config(d.path(), r#"{"basis": {"Lambda_max": 50}, "sweeps": {"Lambda_list": []}}"#);
    let o = run(d.path(), &["specineq", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sweeps.Lambda_list"), "{}", stderr(&o));

    let o = run(d.path(), &["observe", "--lambda-max", "50", "--region", "1,1,0.3,0.7"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("region"), "{}", stderr(&o));

    let o = run(d.path(), &["eigens"]);
    assert_eq!(code(&o), 2, "missing Lambda_max");

    let o = run(d.path(), &["eigens", "--lambda-max", "50", "--no-such-flag"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn plan_time_checks_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["specineq", "--lambda-max", "50", "--lambda-list", "25,50"]);
    assert_eq!(code(&o), 2);
    let o = run(d.path(), &["specineq", "--lambda-max", "50", "--lambda-list", "25,50,100"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Lambda_list[2]"), "{}", stderr(&o));
    let o = run(d.path(), &["observe", "--lambda-max", "400", "--lambda-list", "400", "--t-list", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("T_list"), "{}", stderr(&o));
    let o = run(d.path(), &["control", "--lambda-max", "100", "--lambda-cap", "1024"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Lambda_cap"), "{}", stderr(&o));
}

#[test]
fn zero_initial_state_is_controlled_trivially() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        r#"{"basis": {"Lambda_max": 64}, "schedule": {"Lambda_cap": 64, "z0_modes": 0}}"#,
    );
    let o = run(d.path(), &["control", "--config", &cfg, "--out-dir", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = rows(&d.path().join("out/control_summary.csv"));
    let final_norm = summary.iter().find(|r| r[0] == "final_norm").unwrap();
    assert_eq!(final_norm[1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn cap_below_first_eigenvalue_fails_numerically() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["control", "--lambda-max", "80", "--lambda-cap", "5", "--out-dir", "out"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let stages = rows(&d.path().join("out/control_stages.csv"));
    assert!(stages.iter().all(|r| r[7] == "0"), "no mode should be controlled");
}

#[test]
fn control_reaches_tolerance() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["control", "--lambda-max", "128", "--lambda-cap", "128", "--out-dir", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = rows(&d.path().join("out/control_summary.csv"));
    let get = |k: &str| summary.iter().find(|r| r[0] == k).unwrap()[1].clone();
    assert!(get("final_norm").parse::<f64>().unwrap() <= 1e-4);
    assert_eq!(get("pass"), "true");
}

#[test]
fn single_grid_point_observe() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &["observe", "--lambda-max", "50", "--lambda-list", "50", "--t-list", "0.4", "--out-dir", "out"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(&d.path().join("out/observe.csv"));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0].parse::<f64>().unwrap(), 50.0);
    assert!(r[0][3].parse::<f64>().unwrap() > 0.0);
    assert!(rows(&d.path().join("out/observe_fit.csv")).is_empty());
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let d = tempfile::tempdir().unwrap();
    for (threads, out) in [("1", "t1"), ("4", "t4")] {
        let o = run(
            d.path(),
            &["control", "--lambda-max", "128", "--lambda-cap", "128", "--threads", threads, "--out-dir", out],
        );
        assert_eq!(code(&o), 0);
    }
    for f in ["control_stages.csv", "control_summary.csv", "control_coefficients.csv"] {
        assert_eq!(
            fs::read(d.path().join("t1").join(f)).unwrap(),
            fs::read(d.path().join("t4").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn structured_output_is_valid_json() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &["control", "--lambda-max", "80", "--lambda-cap", "80", "--format", "structured", "--out-dir", "out"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("out/control_report.json")).unwrap()).unwrap();
    assert!(v["final_norm"].as_f64().unwrap() <= 1e-4 * v["initial_norm"].as_f64().unwrap());
    assert_eq!(v["stages"].as_array().unwrap().len(), v["segments"].as_array().unwrap().len());

    let o = run(d.path(), &["eigens", "--lambda-max", "30", "--format", "structured", "--out-dir", "e"]);
    assert_eq!(code(&o), 0);
    let modes: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("e/modes.json")).unwrap()).unwrap();
    assert_eq!(modes.as_array().unwrap()[0]["k"], 1);
}

#[test]
fn verify_suite_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["verify", "--lambda-max", "100", "--out-dir", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let checks = rows(&d.path().join("out/verify.csv"));
    assert!(checks.len() >= 9);
    assert!(checks.iter().all(|r| r[3] == "true"));
}

#[test]
fn specineq_writes_records_and_fit() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["specineq", "--lambda-max", "100", "--lambda-list", "25,50,100", "--out-dir", "out"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(&d.path().join("out/specineq.csv"));
    assert_eq!(r.len(), 3);
    let mins: Vec<f64> = r.iter().map(|x| x[2].parse().unwrap()).collect();
    assert!(mins.iter().all(|&m| m > 0.0));
    assert!(mins.windows(2).all(|w| w[1] < w[0]));
    let fit = rows(&d.path().join("out/specineq_fit.csv"));
    assert_eq!(fit.len(), 1);
    assert!(fit[0][0].parse::<f64>().unwrap() > 0.0);
}
