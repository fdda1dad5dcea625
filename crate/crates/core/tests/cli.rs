use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fkpi-lab")).args(args).output().expect("binary runs")
}

fn out_dir(d: &Path) -> String {
    d.to_str().unwrap().to_string()
}

#[test]
fn help_lists_configuration_keys() {
    let o = lab(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for key in ["evolution.dt", "illposedness.theta", "transversality.n_max", "resonance.samples", "workers"] {
        assert!(text.contains(key), "help lacks {key}");
    }
}

#[test]
fn unknown_key_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&["transversality", "--output-dir", &out_dir(d.path()), "--set", "transversality.bogus=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn unknown_command_is_rejected() {
    let o = lab(&["integrate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resonance-scan"));
}

#[test]
fn passing_run_exits_zero_and_writes_outputs() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&[
        "transversality",
        "--output-dir",
        &out_dir(d.path()),
        "--set",
        "transversality.samples=300",
        "--set",
        "transversality.n_min=[1,2]",
        "--set",
        "alpha=2.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["records.csv", "summary.json", "manifest.json"] {
        assert!(d.path().join(f).exists(), "{f} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["alpha"], 2.5);
    assert_eq!(manifest["config"]["transversality"]["samples"], 300);
    let csv = std::fs::read_to_string(d.path().join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
}

#[test]
fn failing_verdict_exits_two() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&["resonance-scan", "--output-dir", &out_dir(d.path()), "--set", "alpha=2.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(d.path().join("records.csv").exists());
}

#[test]
fn partial_evolution_section_takes_defaults() {
    let d = tempfile::tempdir().unwrap();
    let o = lab(&["conserve", "--output-dir", &out_dir(d.path()), "--set", "alpha=3", "--set", "evolution.T=0.002"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("records.csv")).unwrap();
    assert!(csv.contains("dt=0.001"), "{csv}");
}
