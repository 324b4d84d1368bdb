use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_backreaction");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("BACKREACTION_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV report (comments and the header removed).
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn csv_meta(text: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key}: ");
    text.lines().find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn validate(schema_file: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn coeff(text: &str, name: &str) -> f64 {
    csv_rows(text)
        .into_iter()
        .find(|r| r[0] == name)
        .map(|r| r[1].parse().unwrap())
        .unwrap()
}

#[test]
fn coeffs_constant_field_matches_closed_form() {
    let out = run(&["coeffs", "--system", "const-field", "--eta", "1", "--b", "0", "0", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // φ = 2/(1+√5); β = 1 − √φ; ηα = β/(2√φ).
    let phi = 2.0 / (1.0 + 5f64.sqrt());
    let beta = 1.0 - phi.sqrt();
    assert!((coeff(&text, "beta") - beta).abs() < 1e-14);
    assert!((coeff(&text, "alpha") - beta / (2.0 * phi.sqrt())).abs() < 1e-14);
    assert!((coeff(&text, "beta") - 0.2138486).abs() < 1e-7);
    assert!((coeff(&text, "alpha") - 0.1360098).abs() < 1e-7);
}

#[test]
fn coeffs_without_restoring_force_are_zero() {
    let out = run(&["coeffs", "--system", "elastic", "--eta", "1", "--omega", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(coeff(&text, "beta"), 0.0);
    assert_eq!(coeff(&text, "alpha"), 0.0);
}

#[test]
fn coeffs_elastic_json_validates_and_matches_oracle() {
    let out = run(&["coeffs", "--system", "elastic", "--eta", "1", "--omega", "0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    validate("report.schema.json", &v);
    validate("coeffs.schema.json", &v);
    // Independent oracle: bisection on y(1+y)² = (ηω)².
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * (1.0 + mid).powi(2) < 0.25 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    assert!((v["alpha"].as_f64().unwrap() - y).abs() < 1e-13);
    assert!((v["beta"].as_f64().unwrap() - y / (1.0 + y)).abs() < 1e-13);
    assert!(v["residuals"]["relations"][1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn strong_constant_field_iteration_oscillates_with_period_two() {
    let out = run(&["iterate", "--system", "const-field", "--eta", "1", "--b", "0", "0", "1", "--method", "iterate-term"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert_eq!(text.lines().last(), Some("# status: oscillating period=2"));
}

#[test]
fn elastic_radiation_iteration_converges_to_closed_form() {
    let out = run(&[
        "iterate", "--system", "elastic", "--eta", "1", "--omega", "0.5", "--method", "iterate-term", "--steps", "60",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows = csv_rows(&text);
    let delta: f64 = rows.last().unwrap().last().unwrap().parse().unwrap();
    assert!(delta < 1e-10, "{delta}");
    assert_eq!(csv_meta(&text, "status").as_deref(), Some("converged"));
}

#[test]
fn free_oscillator_iterations_converge_immediately() {
    for method in ["iterate-term", "iterate-solution"] {
        let out = run(&["iterate", "--system", "elastic", "--eta", "1", "--omega", "0", "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let text = stdout(&out);
        assert_eq!(csv_rows(&text).len(), 1, "{method}");
        assert_eq!(csv_meta(&text, "status").as_deref(), Some("converged"));
    }
}

#[test]
fn weak_field_solution_iteration_approaches_exact_motion() {
    let out = run(&[
        "iterate", "--system", "elastic", "--omega", "0.3", "--x0", "1", "0", "0", "--v0", "0", "0", "0", "--method",
        "iterate-solution", "--steps", "80", "--t-end", "2",
    ]);
    let text = stdout(&out);
    let rows = csv_rows(&text);
    let first: f64 = rows[1][3].parse().unwrap();
    let last: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!(last < 1e-9 && last < first * 1e-6, "{first} -> {last}");
}

#[test]
fn reduced_trajectory_tracks_closed_form() {
    let out = run(&[
        "trajectory", "--system", "const-field", "--eta", "1", "--e", "0.1", "0", "0.2", "--b", "0", "0.3", "0.4",
        "--v0", "1", "-0.5", "0", "--tol", "1e-12", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    validate("report.schema.json", &v);
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(cols, ["t", "x", "y", "z", "vx", "vy", "vz", "diff_exact"]);
    let worst = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[7].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
    assert_eq!(v["metadata"]["termination"], "completed");
}

#[test]
fn perturbed_lorentz_dirac_run_records_runaway() {
    let out = run(&[
        "trajectory", "--system", "const-field", "--eta", "1", "--b", "0", "0", "0.5", "--a0", "5", "0", "0",
        "--t-end", "40", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v = json_of(&out);
    validate("report.schema.json", &v);
    assert_eq!(v["metadata"]["termination"], "runaway");
    assert_eq!(v["columns"].as_array().unwrap().len(), 10);
}

#[test]
fn zero_field_rows_keep_constant_velocity() {
    let out = run(&["trajectory", "--system", "const-field", "--v0", "0.3", "-0.2", "0.1", "--t-end", "1"]);
    assert_eq!(out.status.code(), Some(0));
    for row in csv_rows(&stdout(&out)) {
        let v: Vec<f64> = row[4..7].iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!(v, [0.3, -0.2, 0.1]);
    }
}

#[test]
fn exact_self_force_passes_identity_residual() {
    let out = run(&["residual", "--system", "const-field", "--eta", "1", "--b", "0", "0", "0.5", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_meta(&stdout(&out), "status").as_deref(), Some("pass"));
}

#[test]
fn landau_self_force_fails_with_nonzero_residual() {
    let out = run(&[
        "residual", "--system", "const-field", "--eta", "1", "--b", "0", "0", "0.5", "--method", "landau", "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    validate("report.schema.json", &v);
    assert_eq!(v["metadata"]["status"], "fail");
    assert!(v["metadata"]["max_residual"].as_f64().unwrap() > 1e-2);
}

#[test]
fn zero_field_residual_is_exactly_zero() {
    let out = run(&["residual", "--system", "const-field"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(csv_meta(&text, "max_residual").unwrap().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn residual_along_trajectory_uses_jerk_equality() {
    let out = run(&[
        "residual", "--system", "elastic", "--omega", "0.5", "--x0", "1", "0", "0", "--along-trajectory", "--dt",
        "0.001", "--t-end", "3", "--tol", "1e-6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_meta(&stdout(&out), "domain").as_deref(), Some("trajectory"));
}

#[test]
fn csv_output_is_byte_identical_without_timestamp() {
    let args = ["trajectory", "--system", "elastic", "--omega", "0.5", "--x0", "1", "0", "0", "--no-timestamp"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("# generated:"));
    assert!(stdout(&run(&args[..args.len() - 1])).contains("# generated:"));
}

#[test]
fn csv_header_echoes_config_and_uses_17_digits() {
    let out = run(&["coeffs", "--system", "elastic", "--omega", "0.5", "--no-timestamp"]);
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().starts_with("# config: system=elastic; eta=1.0; omega=0.5"));
    let beta = &csv_rows(&text)[0][1];
    let mantissa = beta.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{beta}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["coeffs", "--system", "plasma"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--eta", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["iterate", "--method", "landau"]).status.code(), Some(2));
    assert_eq!(run(&["trajectory", "--solver", "euler"]).status.code(), Some(2));
    assert_eq!(run(&["trajectory", "--method", "iterate-solution"]).status.code(), Some(2));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# oscillator\nsystem = elastic\nomega = 0.5\neta = 2\n").unwrap();
    let out = Command::new(BIN)
        .args(["coeffs", "--eta", "1", "--no-timestamp"])
        .env("BACKREACTION_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# config: system=elastic; eta=1.0; omega=0.5"), "{text}");
    assert!((coeff(&text, "coupling") - 0.5).abs() < 1e-15);

    // An explicit --config wins over the environment variable.
    let other = dir.path().join("other.conf");
    std::fs::write(&other, "system = elastic\nomega = 0.25\n").unwrap();
    let out = Command::new(BIN)
        .args(["coeffs", "--config"])
        .arg(&other)
        .env("BACKREACTION_CONFIG", &path)
        .output()
        .unwrap();
    assert!((coeff(&stdout(&out), "coupling") - 0.25).abs() < 1e-15);

    std::fs::write(&path, "flavour = strange\n").unwrap();
    let out = Command::new(BIN).arg("coeffs").env("BACKREACTION_CONFIG", &path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.json");
    let out = run(&["coeffs", "--b", "0", "0", "0.5", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    validate("coeffs.schema.json", &v);
}

#[test]
fn sweep_is_ordered_and_independent_of_worker_count() {
    let args = |workers: &'static str| {
        run(&[
            "sweep", "--system", "const-field", "--param", "b", "--from", "0.1", "--to", "1.0", "--count", "10",
            "--workers", workers, "--no-timestamp",
        ])
    };
    let (one, many) = (args("1"), args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let text = stdout(&many);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[4][5], "converged");
    assert_eq!(rows[9][5], "oscillating period=2");
}

#[test]
fn sweep_json_validates() {
    let out = run(&[
        "sweep", "--system", "elastic", "--param", "omega", "--from", "0", "--to", "1", "--count", "5", "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    validate("report.schema.json", &json_of(&out));
}
