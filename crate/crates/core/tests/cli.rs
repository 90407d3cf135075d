//! End-to-end tests of the `dkmhd` binary: subcommands, exit codes, CSV
//! emission and the config surface.

use std::path::Path;
use std::process::Command;

fn dkmhd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dkmhd"))
}

const VALID_CONFIG: &str = r#"
[geometry]
r1 = -0.5
r2 = 0.25

[schedule]
mode = "fixed-axes"

[initial]
w1 = 0.01
w2 = 0.01
w3 = 0.1
i1 = 0.01
i2 = 0.01
i3 = 1.0

[resistivity]
eta2 = 0.0

[integration]
t_end = 5.0
sample_dt = 0.1
"#;

#[test]
fn run_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("fixed.toml");
    std::fs::write(&config, VALID_CONFIG).unwrap();
    let out = dir.path().join("fixed.csv");
    let plot_dir = dir.path().join("plots");

    let output = dkmhd()
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--plot-dir")
        .arg(&plot_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("invariant drift"));
    assert!(stdout.contains("stability snapshot"));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,w1,w2,w3,i1,i2,i3,H0,H1,C0,C1,C2,C3,r1,r2,r3"
    );
    assert_eq!(text.lines().count(), 1 + 51); // header + samples every 0.1 over [0, 5]

    assert!(plot_dir.join("w1.dat").exists());
    assert!(plot_dir.join("r3.dat").exists());
}

#[test]
fn preset_runs_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dz.csv");
    let output = dkmhd()
        .arg("preset")
        .arg("dk-dz3ln")
        .arg("--out")
        .arg(&out)
        .arg("--t-end")
        .arg("5")
        .arg("--sample-dt")
        .arg("0.5")
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 11);
}

#[test]
fn validation_errors_exit_1() {
    // unknown preset
    let output = dkmhd().arg("preset").arg("bogus").output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // config with unknown key
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, VALID_CONFIG.replace("eta2 = 0.0", "eta9 = 0.0")).unwrap();
    let output = dkmhd().arg("run").arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("error"), "{stderr}");

    // missing config file
    let output = dkmhd()
        .arg("run")
        .arg(dir.path().join("absent.toml"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    // bad CLI usage
    let output = dkmhd().arg("frobnicate").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn integration_failure_exits_2() {
    // strong resistive growth stepped far outside the fixed-RK4 stability
    // region overflows the state within a few steps
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("blowup.toml");
    std::fs::write(
        &config,
        VALID_CONFIG
            .replace("eta2 = 0.0", "eta2 = 80.0")
            .replace("t_end = 5.0", "t_end = 50.0\nmethod = \"fixed-rk4\""),
    )
    .unwrap();
    let output = dkmhd()
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("blowup.csv"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("t ="), "{stderr}");
}

#[test]
fn stability_subcommands() {
    let output = dkmhd()
        .args([
            "stability",
            "aligned",
            "--w",
            "0.1",
            "--j",
            "1.0",
            "--r1",
            "-0.5",
            "--r2",
            "0.25",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("stable-oscillatory"), "{stdout}");
    assert!(stdout.contains("0.122512500"), "{stdout}");

    // compatibility constant flips the classification
    let output = dkmhd()
        .args([
            "stability",
            "aligned",
            "--w",
            "0.1",
            "--j",
            "1.0",
            "--r1",
            "-0.5",
            "--r2",
            "0.25",
            "--compat-stabpoly",
        ])
        .output()
        .unwrap();
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("unstable-oscillatory"), "{stdout}");
    assert!(stdout.contains("0.490050000"), "{stdout}");

    let output = dkmhd()
        .args([
            "stability",
            "orthogonal",
            "--x",
            "1.0",
            "--k",
            "1.0",
            "--r1",
            "-0.5",
            "--r2",
            "0.25",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("0.534522"), "{stdout}");
    assert!(stdout.contains("0.353553"), "{stdout}");
}

#[test]
fn potential_table_at_reference_start() {
    let output = dkmhd().args(["potential", "euler-flopl"]).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("M->W"), "{stdout}");
    assert!(stdout.contains("U->W"), "{stdout}");
    assert!(stdout.contains("W->M"), "{stdout}");
    assert!(stdout.contains("does not change sign"), "{stdout}");

    // current-carrying scenario rejected
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("with_current.toml");
    std::fs::write(&config, VALID_CONFIG).unwrap();
    let output = dkmhd()
        .args(["potential", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn verify_subcommand_reports_and_selects() {
    let output = dkmhd().args(["verify", "algebra"]).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("PASS algebra/structure-constants-and-curls"));

    // empty selector runs every suite
    let output = dkmhd().arg("verify").output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    for suite in ["hierarchy", "conservation", "algebra", "reduction"] {
        assert!(stdout.contains(&format!("PASS {suite}/")), "{stdout}");
    }

    let output = dkmhd().args(["verify", "bogus"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn csv_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("fixed.toml");
    std::fs::write(&config, VALID_CONFIG).unwrap();
    let out = dir.path().join("fixed.csv");
    let status = dkmhd()
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let rows = dk_mhd::output::read_csv_file(Path::new(&out)).unwrap();
    assert_eq!(rows.len(), 51);
    // re-serialise one row and confirm the text is identical
    let text = std::fs::read_to_string(&out).unwrap();
    let line2 = text.lines().nth(1).unwrap();
    let reparsed: Vec<f64> = line2
        .split(',')
        .map(|f| f.parse::<f64>().unwrap())
        .collect();
    assert_eq!(reparsed[0].to_bits(), rows[0].t.to_bits());
    assert_eq!(reparsed[7].to_bits(), rows[0].h0.to_bits());
}
