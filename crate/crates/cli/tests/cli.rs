use std::path::Path;
use std::process::{Command, Output};

fn dephaser(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dephaser"))
        .args(args)
        .env_remove("DEPHASER_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Header and data rows, comment lines skipped.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let body = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, body)
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let (header, body) = rows(csv);
    let idx = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    body.into_iter().map(|r| r[idx].clone()).collect()
}

#[test]
fn gamma_curve_columns_and_values() {
    let out = dephaser(&[
        "gamma", "--exponent", "1", "--gamma0", "0.3", "--cutoff", "100", "--temperature", "1000",
        "--gamma-method", "closed", "--t-max", "1.0610329539459689e-3", "--samples", "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv.starts_with("# dephaser gamma\n"));
    let (header, body) = rows(&csv);
    assert_eq!(header, ["t", "gamma", "visibility"]);
    let g: f64 = body[1][1].parse().unwrap();
    assert!((g - 1.0).abs() < 1e-11);
    for row in &body {
        for cell in row {
            assert!(cell.parse::<f64>().unwrap().is_finite());
        }
    }
}

#[test]
fn low_temperature_curve_lies_between_extremes() {
    let run = |temp: &str| {
        let out = dephaser(&["gamma", "--temperature", temp, "--t-max", "0.5", "--samples", "26"]);
        assert!(out.status.success(), "{}", stderr(&out));
        column(&stdout(&out), "gamma")
            .iter()
            .map(|c| c.parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let (zero, low, high) = (run("0"), run("1.55"), run("1000"));
    for i in 0..zero.len() {
        assert!(zero[i] <= low[i] + 1e-9 && low[i] <= high[i] + 1e-9, "row {i}");
    }
}

#[test]
fn usage_errors_exit_one_with_one_line() {
    for args in [
        vec!["gamma", "--t-max", "0"],
        vec!["gamma", "--t-max", "1", "--exponent", "2"],
        vec!["gamma", "--t-max", "1", "--no-such-flag"],
        vec!["phase", "--grid", "spin=1,2"],
        vec!["phase", "--gamma-method", "closed", "--temperature", "1.55", "--delta", "generic"],
        vec!["gamma", "--t-max", "1", "--regime", "high_t"],
    ] {
        let out = dephaser(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        let err = stderr(&out);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("dephaser: "));
    }
}

#[test]
fn io_errors_exit_three() {
    let out = dephaser(&["gamma", "--t-max", "0.1", "--samples", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("/nonexistent-dir/x.csv"));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let out = dephaser(&["gamma", "--t-max", "0.1", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn numerical_errors_exit_two() {
    let out = dephaser(&["gamma", "--t-max", "10000", "--samples", "2", "--abs-tol", "1e-12", "--rel-tol", "1e-10"]);
    // 10⁴ time units needs more frequency panels than the default budget
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn flags_override_config_and_config_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[bath]\nexponent = 3\ngamma0 = 0.01\ntemperature = 0.0\n[method]\nkind = \"closed\"\nregime = \"zero_t\"\n[grid]\ntheta0 = [0.5, 1.0]\n",
    )
    .unwrap();
    let out = dephaser(&["phase", "--config", cfg.to_str().unwrap(), "--gamma0", "0.02"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv.contains("# gamma0 = 0.02\n"));
    assert!(csv.contains("# regime = \"zero_t\"\n"));
    assert_eq!(column(&csv, "gamma0"), ["0.02", "0.02"]);
    assert_eq!(column(&csv, "theta0"), ["0.5", "1"]);
    let (header, _) = rows(&csv);
    assert_eq!(
        header,
        [
            "theta0", "omega", "exponent", "gamma0", "cutoff", "temperature", "phi_unitary", "phi_exact",
            "phi_functional", "route_gap", "phi_raw", "winding", "delta_closed", "delta_generic", "residual"
        ]
    );
    for gap in column(&csv, "route_gap") {
        assert!(gap.parse::<f64>().unwrap().abs() < 1e-8);
    }
}

#[test]
fn phase_unitary_limit_from_cli() {
    let out = dephaser(&[
        "phase", "--gamma0", "0", "--grid", "theta0=0.5235987755982988,1.5707963267948966", "--phase-method",
        "integral", "--delta", "generic",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    let exact = column(&csv, "phi_exact");
    let unitary = column(&csv, "phi_unitary");
    for (a, b) in exact.iter().zip(&unitary) {
        assert!((a.parse::<f64>().unwrap() - b.parse::<f64>().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn dectime_reports_verdicts() {
    let out = dephaser(&["dectime", "--exponent", "3", "--grid", "temperature=0,1000", "--gamma0", "0.03"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    assert_eq!(column(&csv, "verdict"), ["saturates", "saturates"]);
    assert_eq!(column(&csv, "regime"), ["zero_t", "high_t"]);
    let plateaus: Vec<f64> = column(&csv, "plateau").iter().map(|c| c.parse().unwrap()).collect();
    assert!((plateaus[0] - 0.03).abs() < 1e-3);
    assert!((plateaus[1] / 0.6 - 1.0).abs() < 1e-2);
    assert_eq!(column(&csv, "margin"), ["inf", "inf"]);

    let out = dephaser(&["dectime", "--temperature", "1000", "--gamma-method", "closed"]);
    let csv = stdout(&out);
    let t_d: f64 = column(&csv, "t_d")[0].parse().unwrap();
    assert!((t_d * std::f64::consts::PI * 300.0 - 1.0).abs() < 1e-6);
    assert_eq!(column(&csv, "observable"), ["0"]);
    assert_eq!(column(&csv, "coarse_observable"), ["0"]);
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in ["gamma0_0.3", "gamma0_0.03"] {
        for name in ["ohmic.csv", "supraohmic.csv", "dectime.csv"] {
            let p = dir.join(sub).join(name);
            files.push((format!("{sub}/{name}"), std::fs::read(&p).unwrap()));
        }
    }
    files
}

#[test]
fn figure1_is_byte_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = dephaser(&["--jobs", "1", "figure1", "--out-dir", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 6);
    let out = Command::new(env!("CARGO_BIN_EXE_dephaser"))
        .args(["figure1", "--out-dir", b.to_str().unwrap()])
        .env("DEPHASER_JOBS", "4")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(tree(&a), tree(&b));
}

#[test]
fn accept_single_criterion() {
    let out = dephaser(&["accept", "--criterion", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("criterion  4 PASS"));
}
