use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qbd_sim::{parse_config, Command as SimCommand, OutputFormat, RunConfig};

fn qbd_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbd-sim"))
        .args(args)
        .env_remove(qbd_sim::CONFIG_ENV)
        .output()
        .expect("spawn qbd-sim")
}

fn stdout(output: &Output) -> String {
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

/// Data rows (comment lines and the column header removed), split on commas.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn flags_override_config_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    fs::write(&file, "# sweep setup\nsteps = 25\nphi-min = 0.2\nseed = 9\n").unwrap();
    let config = parse_config([
        "qbd-sim",
        "sweep",
        "--config",
        file.to_str().unwrap(),
        "--steps",
        "40",
    ])
    .unwrap();
    assert_eq!(config.steps, 40);
    assert_eq!(config.phi_min, 0.2);
    assert_eq!(config.seed, 9);
    assert_eq!(config.phi_max, 3.0);
    assert_eq!(config.phi, FRAC_PI_2);
    assert_eq!(config.n_max, 40);
}

#[test]
fn parse_errors_are_usage_errors() {
    let cases: &[&[&str]] = &[
        &["qbd-sim", "steady", "--q-factor", "-1"],
        &["qbd-sim", "steady", "--q-factor", "abc"],
        &["qbd-sim", "steady", "--temperature-k", "-0.5"],
        &["qbd-sim", "sweep", "--phi-min", "2", "--phi-max", "1"],
        &["qbd-sim", "trajectory", "--initial-n", "40"],
        &["qbd-sim", "trajectory", "--arrival", "bursty"],
        &["qbd-sim", "steady", "--format", "png"],
        &["qbd-sim", "launch"],
        &["qbd-sim", "steady", "--no-such-flag", "1"],
    ];
    for args in cases {
        let err = parse_config(args.iter()).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{args:?}: {err}");
    }
}

#[test]
fn steady_without_atoms_is_bose_einstein() {
    let out = stdout(&qbd_sim(&["steady", "--phi", "0"]));
    let nbar = 1.0 / (6.626_070_15e-34_f64 * 21.456e9 / (1.380_649e-23 * 1.4)).exp_m1();
    let ratio = nbar / (1.0 + nbar);
    let n_max = 40;
    let norm = (1.0 - ratio.powi(n_max + 1)) / (1.0 - ratio);
    let data = rows(&out);
    assert_eq!(data.len(), n_max as usize + 1);
    for (n, row) in data.iter().enumerate() {
        assert_eq!(row[0], n.to_string());
        let p: f64 = row[1].parse().unwrap();
        let expected = ratio.powi(n as i32) / norm;
        assert!((p - expected).abs() < 1e-10, "n = {n}: {p} vs {expected}");
    }
    assert!(out.contains("# mean_n="));
    assert!(out.contains("# tail_mass="));
}

#[test]
fn passage_at_quarter_turn() {
    let out = stdout(&qbd_sim(&["passage", "--phi", "1.5707963267948966", "--n-max", "3"]));
    let data = rows(&out);
    assert_eq!(data.len(), 4);
    let w = |n: usize, k: usize| data[n][k].parse::<f64>().unwrap();
    assert!((w(0, 1) - 1.0).abs() < 1e-12);
    assert!((w(1, 2) - 1.0).abs() < 1e-12);
    for n in 0..4 {
        let total = w(n, 1) + w(n, 2) + w(n, 3);
        assert!((total - 1.0).abs() < 1e-12);
    }
    let s = (FRAC_PI_2 * 2f64.sqrt()).sin();
    assert!((w(2, 3) - 0.25 * (2.0 * FRAC_PI_2 * 2f64.sqrt()).sin().powi(2)).abs() < 1e-12);
    assert!((w(2, 2) - s.powi(4)).abs() < 1e-12);
}

#[test]
fn trajectory_runs_are_byte_identical() {
    let args = ["trajectory", "--seed", "42", "--duration-s", "0.2"];
    let first = stdout(&qbd_sim(&args));
    let second = stdout(&qbd_sim(&args));
    assert_eq!(first, second);
    assert!(rows(&first).len() > 400);
    let other = stdout(&qbd_sim(&["trajectory", "--seed", "43", "--duration-s", "0.2"]));
    assert_ne!(first, other);
}

#[test]
fn header_reproduces_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let csv_arg = csv.to_str().unwrap();
    let args = [
        "sweep",
        "--steps",
        "30",
        "--phi-min",
        "0.3",
        "--temperature-k",
        "0.9",
        "--atom-rate",
        "1234.5",
        "--output",
        csv_arg,
        "--format",
        "csv+svg",
    ];
    stdout(&qbd_sim(&args));
    let text = fs::read_to_string(&csv).unwrap();
    let from_header = RunConfig::from_header(&text).unwrap();
    let mut argv = vec!["qbd-sim"];
    argv.extend(args);
    assert_eq!(from_header, parse_config(argv).unwrap());
    assert_eq!(from_header.command, SimCommand::Sweep);
    assert_eq!(from_header.format, OutputFormat::CsvSvg);
    assert_eq!(rows(&text).len(), 30);

    let svg = fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn trajectory_plot_has_three_panels() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let args = [
        "trajectory",
        "--duration-s",
        "0.05",
        "--output",
        csv.to_str().unwrap(),
        "--format",
        "csv+svg",
    ];
    stdout(&qbd_sim(&args));
    let svg = fs::read_to_string(dir.path().join("traj.svg")).unwrap();
    assert_eq!(svg.matches("<rect x=").count(), 3);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| qbd_sim(args).status.code();
    assert_eq!(code(&["passage", "--n-max", "4"]), Some(0));
    assert_eq!(code(&["steady", "--q-factor", "-1"]), Some(2));
    assert_eq!(code(&["steady", "--phi"]), Some(2));
    assert_eq!(code(&["steady", "--format", "csv+svg"]), Some(2));
    // The n_max = 30 thermal tail exceeds the truncation tolerance.
    assert_eq!(code(&["steady", "--phi", "0", "--n-max", "30"]), Some(3));
    let missing = Path::new("/nonexistent-dir/out.csv");
    assert_eq!(code(&["steady", "--output", missing.to_str().unwrap()]), Some(1));
    assert_eq!(code(&["steady", "--config", "/nonexistent-dir/run.conf"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("env.conf");
    fs::write(&file, "n-max = 5\nphi = 0.5\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_qbd-sim"))
        .arg("passage")
        .env(qbd_sim::CONFIG_ENV, &file)
        .output()
        .unwrap();
    let out = stdout(&output);
    assert!(out.contains("# phi = 0.5\n"));
    assert_eq!(rows(&out).len(), 6);

    fs::write(&file, "colour = blue\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_qbd-sim"))
        .arg("passage")
        .env(qbd_sim::CONFIG_ENV, &file)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("colour"));
}
