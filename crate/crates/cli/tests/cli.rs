//! The binary end to end: exit codes, report lines, CSV, transcripts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn swarmauth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmauth")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_fixture(name: &str) -> Output {
    swarmauth(&["run", "--config", fixture(name).to_str().unwrap()])
}

#[test]
fn run_nr5g_reports_21_6_and_22_0() {
    let o = run_fixture("nr5g.toml");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("method=nr-5g t=5 n_drones=1 total_ms=21.600 "));
    let o = run_fixture("nr5g_hash.toml");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("total_ms=22.000"));
}

#[test]
fn run_inclusion_reports_6_06() {
    let o = run_fixture("inclusion_t5.toml");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("total_ms=6.060"));
    assert!(stdout(&o).contains("outcome=accepted"));
}

#[test]
fn impostor_exits_2() {
    let o = run_fixture("impostor.toml");
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("outcome=rejected(verification-failed)"));
}

#[test]
fn config_errors_exit_1() {
    let o = run_fixture("malformed.toml");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
    assert_eq!(run_fixture("missing.toml").status.code(), Some(1));
    assert_eq!(swarmauth(&["run"]).status.code(), Some(1));
    assert_eq!(swarmauth(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(swarmauth(&["--help"]).status.code(), Some(0));
}

#[test]
fn transcript_export_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let cfg = fixture("unification_t4.toml");
    for p in [&a, &b] {
        let o = swarmauth(&["run", "--config", cfg.to_str().unwrap(), "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.lines().next().unwrap().starts_with("t_us="));
    assert!(text.contains("kind=unified_key_broadcast"));
    assert_eq!(text.lines().last(), Some("outcome=accepted"));

    let c = dir.path().join("c.txt");
    let o = swarmauth(&["run", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(text, std::fs::read_to_string(&c).unwrap());
}

#[test]
fn sweeps_write_stable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("t.csv");
    let b = dir.path().join("t2.csv");
    for p in [&a, &b] {
        let o =
            swarmauth(&["sweep", "--variable", "threshold", "--from", "2", "--to", "20", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("from t=18"));
    }
    let csv = std::fs::read(&a).unwrap();
    assert_eq!(csv, std::fs::read(&b).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next(), Some("scenario,method,t,n_drones,time_ms"));
    assert_eq!(text.lines().count(), 1 + 2 * 19);
    assert!(text.contains("inclusion,group-auth,5,4,6.060"));

    let o = swarmauth(&["sweep", "--variable", "n_drones", "--from", "25", "--to", "100", "--step", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("bulk,group-auth,5,100,66.060"), "{text}");
    assert!(text.contains("bulk,nr-5g,5,100,2160.000"));

    let empty = swarmauth(&["sweep", "--variable", "threshold", "--from", "9", "--to", "3"]);
    assert_eq!(empty.status.code(), Some(1));
    let zero = swarmauth(&["sweep", "--variable", "threshold", "--step", "0"]);
    assert_eq!(zero.status.code(), Some(1));
    assert_eq!(swarmauth(&["sweep", "--variable", "depth"]).status.code(), Some(1));
}

#[test]
fn attacks_exit_0_and_unknown_mode_exits_1() {
    for mode in ["replay", "mitm", "eavesdrop"] {
        let o = swarmauth(&["attack", "--mode", mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}: {}", stdout(&o));
        assert!(stdout(&o).contains("result=thwarted"));
    }
    let cfg = fixture("unification_t4.toml");
    let o = swarmauth(&["attack", "--mode", "replay", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(swarmauth(&["attack", "--mode", "dos"]).status.code(), Some(1));
    assert_eq!(swarmauth(&["attack", "--mode", "none"]).status.code(), Some(1));
    assert_eq!(swarmauth(&["attack"]).status.code(), Some(1));
}
