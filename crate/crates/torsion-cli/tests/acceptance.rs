//! Acceptance suite: every check runs at its pinned tolerance and prints
//! one PASS line (visible with `cargo test -- --nocapture`). A failed
//! criterion fails its test.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;

use torsion::bicomplex::{eigen_torsion, torsion, BasisRecord, Bicomplex};
use torsion::cw::{builtin_circle, builtin_circle_subdivided, comb_torsion, Representation};
use torsion::linalg::CMatrix;
use torsion::suites::{
    direct_sum_suite, eigenvalue_product_suite, pairing_dual_suite, spectrum_bounds_suite,
    threshold_sweep_suite,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn acceptance_1_eigenvalue_product_equivalence() {
    let start = Instant::now();
    let outcome = eigenvalue_product_suite(100, 20_240_001, 1e-8).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    assert!(elapsed < 10.0, "suite took {elapsed:.2} s");
    println!(
        "acceptance 1: PASS - torsion matches the inverse q-weighted Laplacian determinant \
         product on {} doubly acyclic complexes (worst rel err {:.3e}, {:.2} s)",
        outcome.trials, outcome.worst_rel_err, elapsed
    );
}

#[test]
fn acceptance_2_pairing_dual_square() {
    let outcome = pairing_dual_suite(100, 20_240_002, 1e-8).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    println!(
        "acceptance 2: PASS - dual-pairing torsion equals the squared torsion isomorphism, \
         sign included, on {} complexes (worst rel err {:.3e})",
        outcome.trials, outcome.worst_rel_err
    );
}

#[test]
fn acceptance_3_direct_sum_stability() {
    let outcome = direct_sum_suite(100, 20_240_003, 1e-8).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    println!(
        "acceptance 3: PASS - direct sums with doubly acyclic summands multiply torsions, \
         sign included, on {} pairs (worst rel err {:.3e})",
        outcome.trials, outcome.worst_rel_err
    );
}

#[test]
fn acceptance_4_threshold_independence_and_identities() {
    let (outcome, trials) = threshold_sweep_suite(50, 20_240_004, 1e-8, 1e-10).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    let max_value_dev = trials
        .iter()
        .map(|t| t.max_pairwise_rel_dev)
        .fold(0.0f64, f64::max);
    let max_identity_dev = trials
        .iter()
        .map(|t| t.ratio_identity_dev.max(t.zeta_identity_dev))
        .fold(0.0f64, f64::max);
    println!(
        "acceptance 4: PASS - total torsion agrees across every usable threshold on {} \
         complexes (worst value dev {:.3e}); squared-ratio and zeta-difference identities \
         hold to {:.3e}",
        trials.len(),
        max_value_dev,
        max_identity_dev
    );
}

#[test]
fn acceptance_5_spectrum_bounds() {
    let outcome = spectrum_bounds_suite(500, 20_240_005, 10, false).unwrap();
    assert!(
        outcome.passed(),
        "violations: {:?}",
        outcome.failure_details
    );
    println!(
        "acceptance 5: PASS - {} randomized probes stay inside the strip and the parabola \
         (worst margin {:.3e})",
        outcome.trials, outcome.worst_rel_err
    );
}

#[test]
fn acceptance_6_golden_value() {
    let bc = Bicomplex::new(
        vec![1, 1],
        vec![CMatrix::from_real_rows(&[vec![2.0]])],
        vec![CMatrix::from_real_rows(&[vec![3.0]])],
    )
    .unwrap();
    let direct = torsion(&bc, BasisRecord::Acyclic).unwrap().value;
    assert!((direct - c(6.0, 0.0)).norm() < 1e-12);
    // arbiter for the determinant-product exponent: the q-weighted form
    // gives 6 on this input, the unweighted form would give 1
    let via_spectrum = eigen_torsion(&bc).unwrap();
    assert!((via_spectrum - c(6.0, 0.0)).norm() < 1e-12);
    println!("acceptance 6: PASS - two-term golden complex has torsion exactly 6 on both routes");
}

#[test]
fn acceptance_7_circle_torsion_modulus() {
    let mut worst = 0.0f64;
    for j in 1..=50 {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / 51.0;
        let lambda = Complex64::from_polar(1.0, theta);
        let rep = Representation::scalar("t", lambda).unwrap();
        let value = comb_torsion(&builtin_circle(), &rep, BasisRecord::Acyclic)
            .unwrap()
            .value;
        // value pinned by the torsion definition evaluated on the explicit
        // two-term bicomplex, not by a closed form
        let by_hand = Bicomplex::new(
            vec![1, 1],
            vec![CMatrix::from_rows(&[vec![lambda - c(1.0, 0.0)]])],
            vec![CMatrix::from_rows(&[vec![c(1.0, 0.0) / lambda - c(1.0, 0.0)]])],
        )
        .unwrap();
        let oracle = torsion(&by_hand, BasisRecord::Acyclic).unwrap().value;
        assert!(
            (value - oracle).norm() <= 1e-10 * oracle.norm(),
            "theta {theta}: {value} vs oracle {oracle}"
        );
        let expected_modulus = 4.0 * (0.5 * theta).sin().powi(2);
        let dev = (value.norm() - expected_modulus).abs() / expected_modulus;
        worst = worst.max(dev);
        assert!(dev <= 1e-8, "theta {theta}: modulus dev {dev:.3e}");
    }
    println!(
        "acceptance 7: PASS - circle torsion modulus equals the squared chord at 50 sampled \
         holonomies (worst rel dev {worst:.3e})"
    );
}

#[test]
fn acceptance_8_circle_subdivision_invariance() {
    let mut worst = 0.0f64;
    for j in 0..10 {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 10.0;
        let radius = 0.8 + 0.05 * j as f64;
        let lambda = Complex64::from_polar(radius, theta);
        let rep = Representation::scalar("t", lambda).unwrap();
        let one_cell = comb_torsion(&builtin_circle_subdivided(1), &rep, BasisRecord::Acyclic)
            .unwrap()
            .value;
        let two_cell = comb_torsion(&builtin_circle_subdivided(2), &rep, BasisRecord::Acyclic)
            .unwrap()
            .value;
        let dev = (one_cell - two_cell).norm() / one_cell.norm();
        worst = worst.max(dev);
        assert!(dev <= 1e-8, "holonomy {lambda}: dev {dev:.3e}");
    }
    println!(
        "acceptance 8: PASS - one-cell and two-cell circle structures agree at 10 sampled \
         holonomies (worst rel dev {worst:.3e})"
    );
}

fn normalized_report(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|line| !line.contains("wall_clock_seconds"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn acceptance_9_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.json");
    std::fs::write(
        &input,
        r#"{"length": 1, "dims": [1, 1], "d": [[[[2.0, 0.0]]]], "dstar": [[[[3.0, 0.0]]]]}"#,
    )
    .unwrap();
    let input_arg = input.to_str().unwrap().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), "--input".into(), input_arg.clone()],
        vec!["torsion".into(), "--input".into(), input_arg.clone()],
        vec![
            "spectral".into(),
            "--input".into(),
            input_arg.clone(),
            "--K".into(),
            "1".into(),
        ],
        vec![
            "sweep-k".into(),
            "--input".into(),
            input_arg.clone(),
            "--K-ladder".into(),
            "1,5,10".into(),
        ],
        vec![
            "cw".into(),
            "--builtin".into(),
            "lens".into(),
            "--lens-p".into(),
            "5".into(),
            "--lens-q".into(),
            "1".into(),
            "--holonomy".into(),
            "0.30901699437494745,0.9510565162951535".into(),
        ],
        vec![
            "claims".into(),
            "--which".into(),
            "c".into(),
            "--trials".into(),
            "20".into(),
            "--seed".into(),
            "123".into(),
        ],
        vec![
            "probe".into(),
            "--dim".into(),
            "6".into(),
            "--trials".into(),
            "50".into(),
            "--seed".into(),
            "321".into(),
        ],
    ];
    for (idx, args) in commands.iter().enumerate() {
        let first = dir.path().join(format!("a{idx}.json"));
        let second = dir.path().join(format!("b{idx}.json"));
        for out in [&first, &second] {
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_torsion-cli"))
                .args(args)
                .arg("--out")
                .arg(out)
                .output()
                .unwrap();
            assert_eq!(status.status.code(), Some(0), "{args:?}");
        }
        assert_eq!(
            normalized_report(&first),
            normalized_report(&second),
            "command {args:?} not byte-identical"
        );
    }
    println!(
        "acceptance 9: PASS - identical seeds reproduce byte-identical reports (minus wall \
         clock) for all {} commands",
        commands.len()
    );
}
