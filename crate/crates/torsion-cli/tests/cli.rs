//! End-to-end tests of the binary: golden values, exit codes, report
//! shapes, and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torsion-cli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_golden(dir: &Path) -> PathBuf {
    let path = dir.join("golden.json");
    std::fs::write(
        &path,
        r#"{"length": 1, "dims": [1, 1], "d": [[[[2.0, 0.0]]]], "dstar": [[[[3.0, 0.0]]]]}"#,
    )
    .unwrap();
    path
}

fn report_at(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn golden_two_term_torsion() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_golden(dir.path());
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "torsion",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = report_at(&out_path);
    assert_eq!(report["results"]["value"][0].as_f64().unwrap(), 6.0);
    assert!(report["results"]["value"][1].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(report["results"]["basis"], "acyclic");
}

#[test]
fn identity_complex_torsion_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("identity.json");
    std::fs::write(
        &input,
        r#"{"length": 1, "dims": [2, 2],
            "d": [[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]],
            "dstar": [[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "torsion",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = report_at(&out_path);
    assert!((report["results"]["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_json_fails_with_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, "{\"length\": 1,\n  \"dims\": [1, ").unwrap();
    let out = run(&["torsion", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn threshold_collision_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_golden(dir.path());
    let out = run(&["spectral", "--input", input.to_str().unwrap(), "--K", "6"]);
    assert_eq!(exit_code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degree 0"), "{err}");
    assert!(err.contains("6"), "{err}");
}

#[test]
fn invalid_complex_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("invalid.json");
    std::fs::write(
        &input,
        r#"{"length": 2, "dims": [1, 1, 1],
            "d": [[[[1.0, 0.0]]], [[[1.0, 0.0]]]],
            "dstar": [[[[0.0, 0.0]]], [[[0.0, 0.0]]]]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "validate",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    let report = report_at(&out_path);
    assert_eq!(report["results"]["valid"], Value::Bool(false));
    assert_eq!(report["results"]["violations"][0]["degree"], 0);
}

#[test]
fn spectral_above_spectrum_has_unit_regularized_term() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_golden(dir.path());
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "spectral",
        "--input",
        input.to_str().unwrap(),
        "--K",
        "10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = report_at(&out_path);
    assert_eq!(report["results"]["ray_singer_term"][0].as_f64().unwrap(), 1.0);
    assert_eq!(report["results"]["ray_singer_term"][1].as_f64().unwrap(), 0.0);
    assert_eq!(report["results"]["small_dims"], serde_json::json!([1, 1]));
}

#[test]
fn sweep_with_explicit_and_suggested_ladders() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_golden(dir.path());
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "sweep-k",
        "--input",
        input.to_str().unwrap(),
        "--K-ladder",
        "1,5,10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = report_at(&out_path);
    assert!(report["results"]["max_pairwise_rel_dev"].as_f64().unwrap() < 1e-10);
    let out = run(&["sweep-k", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn cw_circle_holonomy_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "cw",
        "--builtin",
        "circle",
        "--holonomy",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = report_at(&out_path);
    assert!((report["results"]["modulus"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn cw_lens_with_unit_root() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let theta = 2.0 * std::f64::consts::PI / 5.0;
    let holonomy = format!("{},{}", theta.cos(), theta.sin());
    let out = run(&[
        "cw",
        "--builtin",
        "lens",
        "--lens-p",
        "5",
        "--lens-q",
        "1",
        "--holonomy",
        &holonomy,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = report_at(&out_path);
    assert_eq!(report["results"]["acyclic"], Value::Bool(true));
    assert_eq!(report["results"]["lens_dual_exponent"], 1);
    let expect = (2.0 * (theta / 2.0).sin()).powi(4);
    assert!((report["results"]["modulus"].as_f64().unwrap() - expect).abs() < 1e-10);
}

#[test]
fn cw_trivial_holonomy_reports_homology_dims() {
    let out = run(&["cw", "--builtin", "circle", "--holonomy", "1"]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[1, 1]"), "{err}");
}

#[test]
fn cw_accepts_dual_pair_file_with_representation_file() {
    let dir = tempfile::tempdir().unwrap();
    // serialize the builtin pair through the library and read it back
    let pair = torsion::cw::builtin_circle_subdivided(2);
    let pair_json = torsion::formats::DualPairJson::from_pair(&pair);
    let pair_path = dir.path().join("pair.json");
    std::fs::write(&pair_path, serde_json::to_string(&pair_json).unwrap()).unwrap();
    let rep_path = dir.path().join("rep.json");
    std::fs::write(&rep_path, r#"{"t": [[[2.0, 0.0]]]}"#).unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "cw",
        "--input",
        pair_path.to_str().unwrap(),
        "--rep",
        rep_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = report_at(&out_path);
    assert!((report["results"]["modulus"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn claims_commands_run_clean() {
    for which in ["a", "b", "c"] {
        let out = run(&["claims", "--which", which, "--trials", "15", "--seed", "11"]);
        assert_eq!(
            exit_code(&out),
            0,
            "claims {which}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn probe_command_runs_clean() {
    let out = run(&["probe", "--dim", "6", "--trials", "60", "--seed", "5"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn zero_trials_is_a_usage_error() {
    let out = run(&["claims", "--which", "b", "--trials", "0"]);
    assert_eq!(exit_code(&out), 2);
}

/// Report text with the wall-clock line removed; everything else must be
/// byte-identical across reruns.
fn normalized(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|line| !line.contains("wall_clock_seconds"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_are_reproducible_for_every_command() {
    let dir = tempfile::tempdir().unwrap();
    let golden = write_golden(dir.path());
    let golden_arg = golden.to_str().unwrap().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), "--input".into(), golden_arg.clone()],
        vec!["torsion".into(), "--input".into(), golden_arg.clone()],
        vec![
            "spectral".into(),
            "--input".into(),
            golden_arg.clone(),
            "--K".into(),
            "1".into(),
        ],
        vec![
            "sweep-k".into(),
            "--input".into(),
            golden_arg.clone(),
            "--K-ladder".into(),
            "1,5,10".into(),
        ],
        vec![
            "cw".into(),
            "--builtin".into(),
            "circle".into(),
            "--holonomy".into(),
            "2".into(),
        ],
        vec![
            "claims".into(),
            "--which".into(),
            "b".into(),
            "--trials".into(),
            "10".into(),
            "--seed".into(),
            "42".into(),
        ],
        vec![
            "probe".into(),
            "--dim".into(),
            "5".into(),
            "--trials".into(),
            "25".into(),
            "--seed".into(),
            "9".into(),
        ],
    ];
    for (idx, args) in commands.iter().enumerate() {
        let first = dir.path().join(format!("first_{idx}.json"));
        let second = dir.path().join(format!("second_{idx}.json"));
        for out_path in [&first, &second] {
            let mut full: Vec<String> = args.clone();
            full.push("--out".into());
            full.push(out_path.to_str().unwrap().into());
            let out = bin().args(&full).output().unwrap();
            assert_eq!(
                exit_code(&out),
                0,
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        assert_eq!(
            normalized(&first),
            normalized(&second),
            "command {args:?} is not reproducible"
        );
    }
}
