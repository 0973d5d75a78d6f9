use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use icflow::flow::read_checkpoint;
use icflow_cli::output::{emit_csv, Table};

fn icflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icflow"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn icflow")
}

fn status_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .last()
        .unwrap_or_default()
        .to_string()
}

fn run_config(dir: &Path, name: &str, text: &str) -> Output {
    fs::write(dir.join(name), text).unwrap();
    icflow(&["run", name], dir)
}

#[test]
fn minimal_config_runs_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "min.cfg",
        "p = 1\nF = sigma_k:1\ninitial = sphere 1\nN_theta = 16\ntheta_end = 2\n",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(status_line(&out), "STATUS=ok REASON=reached_stop");
    let table = Table::read(&dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(table.rows.len(), 3);
    for u in table.column("osc_u").unwrap() {
        assert!(u.abs() < 1e-12);
    }
}

#[test]
fn negative_power_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "bad.cfg", "p = -1\nF = sigma_k:1\ninitial = sphere 1\n");
    assert!(!out.status.success());
    assert_eq!(status_line(&out), "STATUS=fail REASON=validation_error");
    assert!(String::from_utf8_lossy(&out.stderr).contains("`p`"));
    assert!(!dir.path().join("diagnostics.csv").exists());
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "bad.cfg", "p = 1\n\nspeed = 3\n");
    assert_eq!(status_line(&out), "STATUS=fail REASON=parse_error");
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn sigma2_with_p2_on_ellipsoid_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "s2.cfg",
        "p = 2\nF = sigma_k:2\ninitial = ellipsoid 1 1.2\nN_theta = 24\ntheta_end = 1.5\n",
    );
    assert_eq!(status_line(&out), "STATUS=ok REASON=reached_stop", "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_record_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&path, 3, &[], None).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("t,Theta,R_t,"));
    assert!(text.trim_end().ends_with("center_0,center_1,center_2,dt"));
    assert_eq!(Table::read(&path).unwrap().rows.len(), 0);
}

#[test]
fn theta_end_below_initial_radius_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "short.cfg",
        "p = 1\nF = harmonic\ninitial = sphere 2\nN_theta = 16\ntheta_end = 1\n",
    );
    assert_eq!(status_line(&out), "STATUS=fail REASON=validation_error");
}

#[test]
fn row_count_follows_sample_interval_and_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "p = 0.5\nF = sigma_k:1\ninitial = perturbed_sphere 1 2:0.05\nN_theta = 24\n\
               theta_end = 2.3\nsample_interval = 0.3\ncsv = out/a.csv\n";
    fs::create_dir(dir.path().join("out")).unwrap();
    let first = run_config(dir.path(), "a.cfg", cfg);
    assert!(first.status.success());
    let a = fs::read(dir.path().join("out/a.csv")).unwrap();
    let table = Table::read(&dir.path().join("out/a.csv")).unwrap();
    let r0 = table.column("Theta").unwrap()[0];
    let expected = ((2.3 - r0) / 0.3 + 1e-9).floor() as usize + 1;
    assert_eq!(table.rows.len(), expected);
    let second = run_config(dir.path(), "a.cfg", cfg);
    assert!(second.status.success());
    assert_eq!(a, fs::read(dir.path().join("out/a.csv")).unwrap());
}

#[test]
fn fit_recovers_synthetic_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("Theta,osc_u\n");
    for k in 1..=40 {
        let theta = k as f64 * 0.5;
        text.push_str(&format!("{theta:?},{:?}\n", 3.0 * theta.powf(-0.5)));
    }
    fs::write(dir.path().join("s.csv"), text).unwrap();
    let out = icflow(&["fit", "s.csv", "--column", "osc_u"], dir.path());
    assert_eq!(status_line(&out), "STATUS=ok REASON=fitted");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let slope: f64 = stdout
        .split_whitespace()
        .find_map(|w| w.strip_prefix("slope="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 0.5).abs() <= 1e-10, "{slope}");
}

#[test]
fn fit_rejects_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.csv"), "Theta,osc_u\n1.0,1.0\n2.0,0.5\n").unwrap();
    let out = icflow(&["fit", "s.csv", "--column", "w_max"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn injected_concavity_fault_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = icflow(&["check", "--samples", "300", "--inject-fault", "concavity"], dir.path());
    assert!(!out.status.success());
    assert_eq!(status_line(&out), "STATUS=fail REASON=concavity");
}

#[test]
fn builtin_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = icflow(&["check", "--samples", "300", "--seed", "3"], dir.path());
    assert_eq!(status_line(&out), "STATUS=ok REASON=all_passed");
}

#[test]
fn checkpoints_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "ck.cfg",
        "p = 1\nF = sigma_k:1\ninitial = perturbed_sphere 1 2:0.1\nN_theta = 16\ntheta_end = 3\n\
         checkpoint_dir = ck\ncheckpoint_every = 1\n",
    );
    assert!(out.status.success());
    let table = Table::read(&dir.path().join("diagnostics.csv")).unwrap();
    let times = table.column("t").unwrap();
    let u_max = table.column("u_max").unwrap();
    for (k, row) in [0usize, 2, 4].iter().enumerate() {
        let ck = read_checkpoint(&dir.path().join(format!("ck/checkpoint_{k:04}.txt"))).unwrap();
        assert_eq!(ck.t, times[*row]);
        // The CSV measures u about the optimal center, the checkpoint about the origin.
        let surface = ck.surface().unwrap();
        assert!((surface.u().max() - u_max[*row]).abs() < 1e-6 * u_max[*row]);
        let again = ck.to_text();
        assert_eq!(again, fs::read_to_string(dir.path().join(format!("ck/checkpoint_{k:04}.txt"))).unwrap());
    }
    assert!(!dir.path().join("ck/checkpoint_0003.txt").exists());
}
