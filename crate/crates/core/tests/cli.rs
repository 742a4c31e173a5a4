use std::path::Path;
use std::process::{Command, Output};

use gapspec::cli::{exit_code, parse_level_csv, LevelRow};
use gapspec::{GapError, LevelStatus, Side};

fn gapspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapspec"))
        .args(args)
        .env("GAPSPEC_THREADS", "1")
        .output()
        .expect("run gapspec")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn rows(out: &Output) -> Vec<LevelRow> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    parse_level_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn pauli_merged_levels_carry_hydrogen_degeneracies() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.json",
        r#"{"model": {"kind": "pauli", "nu": 1.0, "channels": [0, 1, 2]},
            "grid": {"r_max": 60, "n": 1500}, "levels": 3, "sides": ["plus"]}"#,
    );
    let rows = rows(&gapspec(&["solve", "--config", &config]));
    let merged: Vec<&LevelRow> = rows.iter().filter(|r| r.channel.starts_with("merged:")).collect();
    let expected = [(0.75, 1), (0.9375, 4), (1.0 - 1.0 / 36.0, 9)];
    let mut i = 0;
    for (value, count) in expected {
        for _ in 0..count {
            let r = merged[i];
            assert_eq!(r.k, i + 1);
            assert!((r.lambda - value).abs() / value < 2e-3, "{r:?}");
            i += 1;
        }
    }
    assert_eq!(merged[1].multiplicity, 3);
    assert_eq!(merged[5].multiplicity, 5);
    let text = String::from_utf8(gapspec(&["solve", "--config", &config]).stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# profile l=0 a_minus=")));
}

#[test]
fn dirac_ground_state_row() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.json",
        r#"{"model": {"kind": "dirac", "potential": {"kind": "coulomb", "nu": 0.5}, "kappas": [-1]},
            "grid": {"r_max": 30, "n": 300}, "levels": 1, "sides": ["plus"]}"#,
    );
    let rows = rows(&gapspec(&["solve", "--config", &config]));
    let own: Vec<&LevelRow> = rows.iter().filter(|r| r.channel == "kappa=-1").collect();
    assert_eq!(own.len(), 1);
    assert_eq!(own[0].status, LevelStatus::Interior);
    assert!((own[0].lambda - 0.75f64.sqrt()).abs() < 1e-3);
    assert_eq!(own[0].multiplicity, 2);
}

#[test]
fn sweep_branch_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "sweep.json",
        r#"{"model": {"kind": "dirac", "potential": {"kind": "constant", "c": 0.0}, "kappas": [-1]},
            "grid": {"r_max": 30, "n": 150}, "levels": 1,
            "sweep": {"tau": {"max": 1.0, "steps": 10},
                      "perturbation": {"kind": "potential", "potential": {"kind": "soft_coulomb", "nu": 1.0, "a": 1.0}},
                      "declared": {"a_minus": -1.0, "a_plus": 0.0}}}"#,
    );
    let out = gapspec(&["sweep", "--config", &config]);
    let rows = rows(&out);
    for side in [Side::Plus, Side::Minus] {
        let branch: Vec<&LevelRow> = rows.iter().filter(|r| r.side == side && r.k == 1).collect();
        assert_eq!(branch.len(), 11);
        assert_eq!(branch[0].tau, Some(0.0));
        assert!((branch[0].lambda - side.sign()).abs() <= 5e-3);
        assert_eq!(branch[10].tau, Some(1.0));
    }
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hypotheses_hold=true"), "{text}");
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "run.json",
        r#"{"model": {"kind": "dirac", "potential": {"kind": "coulomb", "nu": 0.5}, "kappas": [-1, 1]},
            "grid": {"r_max": 30, "n": 200}, "levels": 2, "output": "out.csv"}"#,
    );
    let other = dir.path().join("again.csv");
    assert!(gapspec(&["solve", "--config", &config]).status.success());
    assert!(gapspec(&["solve", "--config", &config, "--output", other.to_str().unwrap()]).status.success());
    let first = std::fs::read(dir.path().join("out.csv")).unwrap();
    assert_eq!(first, std::fs::read(&other).unwrap());

    let rows = parse_level_csv(std::str::from_utf8(&first).unwrap()).unwrap();
    assert!(!rows.is_empty());
    for r in rows.iter().filter(|r| r.status == LevelStatus::Interior) {
        assert!(r.residual <= 1e-8, "{r:?}");
        assert!(r.lambda > -1.0 && r.lambda < 1.0);
    }
}

#[test]
fn json_mirror() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.txt", "1 1\n2 1\n1 -2\n");
    let config = write(dir.path(), "run.json", r#"{"model": {"kind": "matrix-file", "path": "a.txt"}, "levels": 1}"#);
    let out = gapspec(&["solve", "--config", &config, "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let levels = doc["levels"].as_array().unwrap();
    assert_eq!(levels[0]["side"], "plus");
    assert!((levels[0]["lambda"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-10);
    assert_eq!(doc["profiles"][0]["profile"]["a_minus"], -2.0);
}

#[test]
fn check_reports_matches_and_uncharacterized() {
    let dir = tempfile::tempdir().unwrap();
    // Uncoupled, with a+ = -1 below a- = 0.5: the first plus level clamps at a-,
    // the second is the eigenvalue 3, and -1, 0.5 lie in [a+, a-].
    write(dir.path(), "a.txt", "2 1\n-1 0 0\n0 3 0\n0 0 0.5\n");
    let config = write(dir.path(), "run.json", r#"{"model": {"kind": "matrix-file", "path": "a.txt"}, "levels": 2, "sides": ["plus"]}"#);
    let out = gapspec(&["check", "--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# check matrix consistent=true"), "{text}");
    assert!(text.contains("matrix,matched,plus,2,3.0000000000000000e0,3.0000000000000000e0,"), "{text}");
    assert_eq!(text.matches("matrix,not_characterized,").count(), 2, "{text}");
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(
        dir.path(),
        "typo.json",
        r#"{"model": {"kind": "pauli", "nu": 1.0, "channels": [0]}, "grid": {"r_max": 10, "n": 50}, "levles": 1}"#,
    );
    let out = gapspec(&["solve", "--config", &typo]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("levles"));

    let missing = write(dir.path(), "missing.json", r#"{"model": {"kind": "matrix-file", "path": "nope.txt"}, "levels": 1}"#);
    let out = gapspec(&["solve", "--config", &missing]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.txt"));

    let wrong = write(
        dir.path(),
        "wrong.json",
        r#"{"command": "sweep", "model": {"kind": "matrix-file", "path": "nope.txt"}, "levels": 1}"#,
    );
    assert_eq!(gapspec(&["solve", "--config", &wrong]).status.code(), Some(2));

    let kappa = write(
        dir.path(),
        "kappa.json",
        r#"{"model": {"kind": "dirac", "potential": {"kind": "coulomb", "nu": 0.5}, "kappas": [0]},
            "grid": {"r_max": 10, "n": 50}, "levels": 1}"#,
    );
    assert_eq!(gapspec(&["solve", "--config", &kappa]).status.code(), Some(2));
    assert_eq!(gapspec(&["solve", "--config", dir.path().join("absent.json").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn numerical_failures_map_to_3() {
    let e = GapError::NonConvergence { side: Side::Plus, k: 1, iterations: 200, lo: 0.0, hi: 1.0 };
    assert_eq!(exit_code(&e), 3);
    assert_eq!(exit_code(&GapError::AtTau { tau: 0.1, source: Box::new(e) }), 3);
    assert_eq!(exit_code(&GapError::Config("x".into())), 2);
}
