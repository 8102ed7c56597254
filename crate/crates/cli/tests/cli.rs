//! End-to-end checks of the `thomson` binary: flag/config handling, file
//! outputs, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn thomson(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thomson"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn derived_reports_reference_scalars() {
    let dir = tempfile::tempdir().unwrap();
    let out = thomson(&["derived"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let grab = |key: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.trim_start().starts_with(key))
            .unwrap_or_else(|| panic!("missing `{key}` in:\n{text}"));
        line.split(':').nth(1).unwrap().trim().parse().unwrap()
    };
    assert!((grab("gamma_drift_cancel(eta)") - 17.698876).abs() < 1e-4);
    assert!((grab("gamma_90deg_threshold(eta)") - 35.369478).abs() < 1e-4);
    assert!((grab("Theta0/pi (atan2)") - 0.326886).abs() < 1e-5);
    assert!((grab("y_tilde") - 0.009159).abs() < 1e-5); // gamma = 10 default
}

#[test]
fn map_writes_csv_and_pgm_with_digest_suffix() {
    let dir = tempfile::tempdir().unwrap();
    let out = thomson(
        &["--grid", "8x12", "--tau", "0.5", "--gamma", "5", "map"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let csv = files.iter().find(|f| f.starts_with("map_total_") && f.ends_with(".csv"));
    let pgm = files.iter().find(|f| f.starts_with("map_total_") && f.ends_with(".pgm"));
    assert!(csv.is_some() && pgm.is_some(), "files: {files:?}");

    let text = std::fs::read_to_string(dir.path().join(csv.unwrap())).unwrap();
    assert_eq!(text.lines().next().unwrap(), "theta_over_pi,phi_over_pi,value_au,ln_value,converged");
    assert_eq!(text.lines().count(), 8 * 12 + 1);
    let bytes = std::fs::read(dir.path().join(pgm.unwrap())).unwrap();
    assert!(bytes.starts_with(b"P5\n12 8\n65535\n"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "tau = 0.5\ngamma = 5\nn_theta = 6\nn_phi = 8\nouvdir = x\n",
    )
    .unwrap();
    // First exercise the line-numbered unknown-key error.
    let bad = thomson(&["--config", "run.conf", "map"], dir.path());
    assert!(!bad.status.success());
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("line 5") && err.contains("ouvdir"), "{err}");

    std::fs::write(
        dir.path().join("run.conf"),
        "tau = 0.5\ngamma = 5\nn_theta = 6\nn_phi = 8\n",
    )
    .unwrap();
    let a = thomson(&["--config", "run.conf", "--out", "a", "map"], dir.path());
    let b = thomson(&["--config", "run.conf", "--out", "b", "map"], dir.path());
    assert!(a.status.success() && b.status.success());
    let read_only = |sub: &str| {
        let d = dir.path().join(sub);
        let mut names: Vec<_> = std::fs::read_dir(&d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names.into_iter().map(|n| std::fs::read(d.join(n)).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(read_only("a"), read_only("b"));
}

#[test]
fn rejects_out_of_range_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = thomson(&["--gamma", "0.5", "derived"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
    let out = thomson(&["--grid", "181", "map"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn scalecheck_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    // Small pulse to keep the frequency-law evaluation quick.
    let out = thomson(&["--tau", "0.5", "scalecheck"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("frequency scaling: PASS"), "{text}");
    assert!(text.contains("shape scaling: PASS"), "{text}");
}

#[test]
fn betatrack_and_trajectory_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = thomson(&["--tau", "0.5", "--nc", "1", "trajectory"], dir.path());
    assert!(out.status.success());
    let out = thomson(&["--tau", "0.5", "--nc", "1", "betatrack"], dir.path());
    assert!(out.status.success());
    let files: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let tr = files.iter().find(|f| f.starts_with("trajectory_")).unwrap();
    let bt = files.iter().find(|f| f.starts_with("betatrack_")).unwrap();
    let tr_text = std::fs::read_to_string(dir.path().join(tr)).unwrap();
    assert!(tr_text.starts_with("chi,x,y,z,beta_x"));
    let bt_text = std::fs::read_to_string(dir.path().join(bt)).unwrap();
    assert!(bt_text.starts_with("chi,theta_over_pi,phi_over_pi"));
    // Both sample the same chi grid.
    assert_eq!(tr_text.lines().count(), bt_text.lines().count());
}
