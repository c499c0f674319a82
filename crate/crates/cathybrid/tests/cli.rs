//! End-to-end checks of the command-line interface: output schemas, exit
//! codes, flag/config merging and byte-level determinism.

use std::process::{Command, Output};

fn cathybrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cathybrid"))
        .args(args)
        .env_remove("CATHYBRID_CUTOFF")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn state_dump_is_parity_pure_json() {
    let out = cathybrid(&[
        "state", "--kind", "sdlps", "--sign", "-", "--l", "0", "--beta", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["sign"], "-");
    let amps = value["amplitudes"].as_array().unwrap();
    assert_eq!(amps.len(), 65);
    for (n, amp) in amps.iter().enumerate() {
        let magnitude = match amp {
            serde_json::Value::Number(x) => x.as_f64().unwrap().abs(),
            serde_json::Value::Array(pair) => pair[0].as_f64().unwrap().abs(),
            other => panic!("unexpected amplitude entry {other}"),
        };
        if n % 2 == 0 {
            assert_eq!(magnitude, 0.0, "even index {n} should be empty");
        }
    }
    assert!(amps[1].as_f64().unwrap().abs() > 0.0);
}

#[test]
fn entangle_reports_the_operating_point() {
    let out = cathybrid(&[
        "entangle", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta", "0.5", "--t",
        "0.25", "--n", "0", "--a0", "0.7071", "--a1", "0.7071",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["n"], 0);
    assert!((value["probability"].as_f64().unwrap() - 0.939).abs() <= 0.02);
    assert!(value["negativity"].as_f64().unwrap() >= 0.98);
    assert_eq!(value["psi_parity"], "even");
    assert_eq!(value["phi_parity"], "odd");
    assert_eq!(value["separable"], false);
}

#[test]
fn unknown_flag_exits_with_config_code() {
    let out = cathybrid(&["state", "--kind", "sdlps", "--sign", "+", "--beta", "1", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_spec_exits_with_config_code() {
    let out = cathybrid(&["state", "--kind", "sdlps", "--sign", "-", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_domain_errors_exit_with_code_three() {
    // heralded count beyond the mode cutoff
    let out = cathybrid(&[
        "entangle", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta", "0.5", "--t",
        "0.5", "--n", "80", "--cutoff", "32",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // displacement too large for the requested cutoff
    let out = cathybrid(&[
        "state", "--kind", "sdlps", "--sign", "+", "--beta", "3.5", "--cutoff", "16",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_is_byte_deterministic() {
    let args = [
        "sweep", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta-min", "0.4",
        "--beta-max", "1.2", "--beta-steps", "3", "--t-min", "0.2", "--t-max", "0.8",
        "--t-steps", "3", "--outcomes", "0,1", "--cutoff", "32",
    ];
    let first = cathybrid(&args);
    let second = cathybrid(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "beta,t,n,probability,negativity,B_abs,separable"
    );
    assert_eq!(text.lines().count(), 1 + 3 * 3 * 2);
}

#[test]
fn sweep_accepts_config_file_with_flag_overrides() {
    let dir = std::env::temp_dir();
    let path = dir.join("cathybrid_cli_test_config.json");
    std::fs::write(
        &path,
        r#"{
            "input": {"kind": "sdlps", "sign": "+", "beta": 0.5, "l": 0},
            "a0": 0.7071067811865476,
            "a1": 0.7071067811865476,
            "outcomes": [0],
            "beta": {"min": 0.5, "max": 0.5, "steps": 1},
            "t": {"min": 0.25, "max": 0.25, "steps": 1},
            "cutoff": 48
        }"#,
    )
    .unwrap();
    let from_file = cathybrid(&["sweep", "--config", path.to_str().unwrap()]);
    assert!(
        from_file.status.success(),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let text = stdout(&from_file);
    assert_eq!(text.lines().count(), 2);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let probability: f64 = row[3].parse().unwrap();
    assert!((probability - 0.939).abs() <= 0.02);

    // the t flag overrides the file's single-point range
    let overridden = cathybrid(&[
        "sweep",
        "--config",
        path.to_str().unwrap(),
        "--t-min",
        "0.5",
        "--t-max",
        "0.5",
    ]);
    assert!(overridden.status.success());
    let text = stdout(&overridden);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let t: f64 = row[1].parse().unwrap();
    assert_eq!(t, 0.5);
    std::fs::remove_file(&path).ok();
}

#[test]
fn search_emits_sorted_hits() {
    let out = cathybrid(&[
        "search", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta-min", "0.4",
        "--beta-max", "0.7", "--beta-steps", "4", "--t-min", "0.15", "--t-max", "0.4",
        "--t-steps", "4", "--n", "0", "--cutoff", "32",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "beta,t,probability,negativity");
    let probabilities: Vec<f64> = lines
        .map(|line| line.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(!probabilities.is_empty());
    for pair in probabilities.windows(2) {
        assert!(pair[0] >= pair[1]);
    }
}

#[test]
fn moments_and_quadrature_emit_csv() {
    let out = cathybrid(&[
        "moments", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta-min", "0.2",
        "--beta-max", "1.0", "--beta-steps", "5", "--cutoff", "32",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "beta,sigma_x1,sigma_x2,fano");
    assert_eq!(text.lines().count(), 6);

    let out = cathybrid(&[
        "quadrature", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta", "1.0",
        "--axis", "x1", "--points", "11", "--cutoff", "32",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next().unwrap(), "x,P");
}

#[test]
fn cutoff_env_variable_sets_the_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_cathybrid"))
        .args(["state", "--kind", "sdlps", "--sign", "+", "--beta", "1"])
        .env("CATHYBRID_CUTOFF", "32")
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["cutoff"], 32);
    assert_eq!(value["amplitudes"].as_array().unwrap().len(), 33);

    // the flag wins over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_cathybrid"))
        .args([
            "state", "--kind", "sdlps", "--sign", "+", "--beta", "1", "--cutoff", "24",
        ])
        .env("CATHYBRID_CUTOFF", "32")
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["cutoff"], 24);
}

#[test]
fn wigner_csv_has_grid_header_and_output_file_option() {
    let dir = std::env::temp_dir();
    let path = dir.join("cathybrid_cli_test_wigner.csv");
    let out = cathybrid(&[
        "wigner", "--kind", "sdlps", "--sign", "+", "--l", "0", "--beta", "1.0", "--range",
        "4", "--points", "9", "--cutoff", "32", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x1,x2,W");
    assert_eq!(text.lines().count(), 1 + 81);
    std::fs::remove_file(&path).ok();
}
