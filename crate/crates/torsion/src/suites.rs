//! Seeded randomized check suites. Each suite derives one generator stream
//! per trial index, so any single trial is reproducible in isolation, and
//! the whole run is a pure function of (trials, seed).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bicomplex::{
    eigen_torsion, embed_basis_left, milnor_tau, pairing_dual, random_bicomplex, torsion,
    BasisRecord, Bicomplex, BicomplexError, CochainComplex, RandomMode,
};
use crate::linalg::{rank, CMatrix, SubspaceBasis};
use crate::spectral::{
    k_ratio_check, random_probe, strip_and_parabola_check, suggest_thresholds, total_torsion,
    SpectralError,
};

/// Outcome of one randomized suite: how many trials ran, how many failed,
/// and the worst relative error seen across the passing comparisons.
#[derive(Clone, Debug, Default)]
pub struct SuiteOutcome {
    pub trials: usize,
    pub failures: usize,
    pub worst_rel_err: f64,
    pub failure_details: Vec<String>,
}

impl SuiteOutcome {
    fn record(&mut self, rel_err: f64, tol: f64, context: impl FnOnce() -> String) {
        self.worst_rel_err = self.worst_rel_err.max(rel_err);
        if !(rel_err <= tol) {
            self.failures += 1;
            self.failure_details
                .push(format!("{} (rel err {rel_err:.3e})", context()));
        }
    }

    fn record_error(&mut self, context: String) {
        self.failures += 1;
        self.failure_details.push(context);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}

/// Exactness-compatible dims: n_q = s_q + s_{q+1} for a random interior
/// rank profile, so a doubly acyclic complex of these dims exists.
fn acyclic_dims(rng: &mut ChaCha8Rng, max_len: usize, max_rank: usize) -> Vec<usize> {
    let n = rng.gen_range(1..=max_len);
    let s: Vec<usize> = (0..=n + 1)
        .map(|q| {
            if q == 0 || q == n + 1 {
                0
            } else {
                rng.gen_range(1..=max_rank)
            }
        })
        .collect();
    (0..=n).map(|q| s[q] + s[q + 1]).collect()
}

/// Eigenvalue product formula: for seeded doubly acyclic bicomplexes the
/// torsion equals the inverse q-weighted product of Laplacian determinants,
/// and the boundary/coboundary ranks agree degree-wise.
pub fn eigenvalue_product_suite(
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<SuiteOutcome, BicomplexError> {
    let mut outcome = SuiteOutcome {
        trials,
        ..Default::default()
    };
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let dims = acyclic_dims(&mut rng, 4, 3);
        let bc = random_bicomplex(&dims, rng.gen(), RandomMode::DoublyAcyclic)?;
        for q in 0..=bc.length() {
            let down = rank(&bc.dstar_in(q));
            let up = rank(&bc.d_out(q));
            if down != up {
                outcome.record_error(format!(
                    "trial {t}: rank mismatch at degree {q} ({down} vs {up})"
                ));
            }
        }
        let direct = match torsion(&bc, BasisRecord::Acyclic) {
            Ok(t) => t.value,
            Err(e) => {
                outcome.record_error(format!("trial {t}: torsion failed: {e}"));
                continue;
            }
        };
        let via_spectrum = match eigen_torsion(&bc) {
            Ok(v) => v,
            Err(e) => {
                outcome.record_error(format!("trial {t}: eigenvalue route failed: {e}"));
                continue;
            }
        };
        outcome.record(rel_err(via_spectrum, direct), tol, || {
            format!("trial {t}: dims {dims:?}: {via_spectrum} vs {direct}")
        });
    }
    Ok(outcome)
}

/// Pairing duality: the torsion of the transpose-dual bicomplex equals the
/// square of the up-complex torsion isomorphism, sign included.
pub fn pairing_dual_suite(
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<SuiteOutcome, BicomplexError> {
    let mut outcome = SuiteOutcome {
        trials,
        ..Default::default()
    };
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        // random cochain complex with nontrivial cohomology
        let mut found = None;
        for _ in 0..200 {
            let len = rng.gen_range(1..=3usize);
            let dims: Vec<usize> = (0..=len).map(|_| rng.gen_range(1..=4usize)).collect();
            let candidate = random_bicomplex(&dims, rng.gen(), RandomMode::PairingDual)?;
            let (v, _) = candidate.betti_numbers()?;
            if v.iter().sum::<usize>() > 0 {
                found = Some(candidate);
                break;
            }
        }
        let Some(bc0) = found else {
            outcome.record_error(format!("trial {t}: no complex with cohomology found"));
            continue;
        };
        let cx = CochainComplex::new(
            bc0.dims().to_vec(),
            (0..bc0.length()).map(|q| bc0.d_out(q)).collect(),
        )?;
        let lh: Vec<SubspaceBasis> = (0..=bc0.length())
            .map(|q| bc0.cohomology(q).map(|c| c.1))
            .collect::<Result<_, _>>()?;
        let (bc, duals) = match pairing_dual(&cx, None, &lh) {
            Ok(x) => x,
            Err(e) => {
                outcome.record_error(format!("trial {t}: dual construction failed: {e}"));
                continue;
            }
        };
        let chambers: Vec<SubspaceBasis> =
            bc.dims().iter().map(|&n| SubspaceBasis::standard(n)).collect();
        let tau = match milnor_tau(&bc, &lh, &chambers) {
            Ok(v) => v,
            Err(e) => {
                outcome.record_error(format!("trial {t}: tau failed: {e}"));
                continue;
            }
        };
        let choice = crate::bicomplex::GradedBasisChoice {
            cohomology: lh,
            homology: duals,
        };
        let value = match torsion(&bc, BasisRecord::Chosen(choice)) {
            Ok(t) => t.value,
            Err(e) => {
                outcome.record_error(format!("trial {t}: torsion failed: {e}"));
                continue;
            }
        };
        outcome.record(rel_err(value, tau * tau), tol, || {
            format!(
                "trial {t}: dims {:?}: torsion {value} vs tau^2 {}",
                bc.dims(),
                tau * tau
            )
        });
    }
    Ok(outcome)
}

/// Direct-sum stability: adding a doubly acyclic summand multiplies the
/// torsion by the summand's scalar torsion, sign included.
pub fn direct_sum_suite(
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<SuiteOutcome, BicomplexError> {
    let mut outcome = SuiteOutcome {
        trials,
        ..Default::default()
    };
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let len = rng.gen_range(1..=3usize);
        let dims: Vec<usize> = (0..=len).map(|_| rng.gen_range(1..=4usize)).collect();
        let left = random_bicomplex(&dims, rng.gen(), RandomMode::Arbitrary)?;
        let basis = left.standard_basis_choice()?;
        let acyclic_dims = acyclic_dims(&mut rng, 4, 3);
        let right = random_bicomplex(&acyclic_dims, rng.gen(), RandomMode::DoublyAcyclic)?;
        let sum = left.direct_sum(&right);
        let embedded = embed_basis_left(&basis, &left, &right);

        let t_left = match torsion(&left, BasisRecord::Chosen(basis)) {
            Ok(x) => x.value,
            Err(e) => {
                outcome.record_error(format!("trial {t}: left torsion failed: {e}"));
                continue;
            }
        };
        let t_right = match torsion(&right, BasisRecord::Acyclic) {
            Ok(x) => x.value,
            Err(e) => {
                outcome.record_error(format!("trial {t}: right torsion failed: {e}"));
                continue;
            }
        };
        let t_sum = match torsion(&sum, BasisRecord::Chosen(embedded)) {
            Ok(x) => x.value,
            Err(e) => {
                outcome.record_error(format!("trial {t}: sum torsion failed: {e}"));
                continue;
            }
        };
        outcome.record(rel_err(t_sum, t_left * t_right), tol, || {
            format!("trial {t}: {t_sum} vs {t_left} * {t_right}")
        });
    }
    Ok(outcome)
}

/// Replace the down-differential by a mild conjugation of the Hermitian
/// adjoint of the up-differential. The square-zero condition holds for any
/// conjugating family, and the Laplacian becomes a perturbation of the
/// Hermitian one, keeping its spectrum near the positive real axis, which
/// is what makes threshold ladders usable.
fn near_adjoint(
    base: &Bicomplex,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Bicomplex, BicomplexError> {
    let dims = base.dims().to_vec();
    let n = base.length();
    let frames: Vec<CMatrix> = dims
        .iter()
        .map(|&k| {
            let noise = CMatrix::from_fn(k, k, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            CMatrix::identity(k).add(&noise.scale(Complex64::new(eps, 0.0)))
        })
        .collect();
    let inverses: Vec<CMatrix> = frames
        .iter()
        .map(|m| {
            if m.rows() == 0 {
                Ok(CMatrix::zeros(0, 0))
            } else {
                crate::linalg::inverse(m)
            }
        })
        .collect::<Result<_, _>>()?;
    let dstar = (0..n)
        .map(|q| {
            frames[q]
                .mul(&base.d_out(q).conj_transpose())
                .mul(&inverses[q + 1])
        })
        .collect();
    let d = (0..n).map(|q| base.d_out(q)).collect();
    Bicomplex::new(dims, d, dstar)
}

/// Complex with nontrivial homology plus doubly acyclic summands at
/// distinct spectral scales, all with near-adjoint down-differentials:
/// the threshold ladder has several usable rungs.
pub fn layered_bicomplex(seed: u64) -> Result<Bicomplex, BicomplexError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = |bc: &Bicomplex, s: f64| -> Result<Bicomplex, BicomplexError> {
        let z = Complex64::new(s, 0.0);
        Bicomplex::new(
            bc.dims().to_vec(),
            (0..bc.length()).map(|q| bc.d_out(q).scale(z)).collect(),
            (0..bc.length()).map(|q| bc.dstar_in(q).scale(z)).collect(),
        )
    };
    let len = rng.gen_range(1..=2usize);
    let dims: Vec<usize> = (0..=len).map(|_| rng.gen_range(1..=3usize)).collect();
    let with_h_base = random_bicomplex(&dims, rng.gen(), RandomMode::PairingDual)?;
    let with_h = near_adjoint(&with_h_base, 0.25, &mut rng)?;
    let acyclic1_base = random_bicomplex(&[1, 2, 1], rng.gen(), RandomMode::DoublyAcyclic)?;
    let acyclic1 = near_adjoint(&acyclic1_base, 0.25, &mut rng)?;
    let acyclic2_base = random_bicomplex(&[2, 3, 1], rng.gen(), RandomMode::DoublyAcyclic)?;
    let acyclic2 = near_adjoint(&acyclic2_base, 0.25, &mut rng)?;
    let spread = 1.5 + 1.0 * rng.gen::<f64>();
    Ok(with_h
        .direct_sum(&scale(&acyclic1, 1.0)?)
        .direct_sum(&scale(&acyclic2, spread)?))
}

/// Per-trial outcome of a threshold sweep.
#[derive(Clone, Debug)]
pub struct SweepTrial {
    pub thresholds_used: usize,
    pub max_pairwise_rel_dev: f64,
    pub ratio_identity_dev: f64,
    pub zeta_identity_dev: f64,
}

/// Threshold independence: for seeded random bicomplexes, the total torsion
/// agrees across every usable suggested threshold, and the two-threshold
/// identities hold on the actual spectra.
pub fn threshold_sweep_suite(
    trials: usize,
    seed: u64,
    value_tol: f64,
    identity_tol: f64,
) -> Result<(SuiteOutcome, Vec<SweepTrial>), SpectralError> {
    let mut outcome = SuiteOutcome {
        trials,
        ..Default::default()
    };
    let mut per_trial = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let bc = layered_bicomplex(rng.gen())?;
        let basis = BasisRecord::Chosen(bc.standard_basis_choice()?);
        let ladder = suggest_thresholds(&bc, 1e-6)?;
        let mut values: Vec<(f64, Complex64)> = Vec::new();
        for &k in &ladder {
            if let Ok(total) = total_torsion(&bc, k, basis.clone(), 1e-6) {
                values.push((k, total.value));
            }
        }
        if values.len() < 2 {
            outcome.record_error(format!(
                "trial {t}: only {} usable thresholds out of {}",
                values.len(),
                ladder.len()
            ));
            continue;
        }
        let mut max_dev = 0.0f64;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                max_dev = max_dev.max(rel_err(values[j].1, values[i].1));
            }
        }
        let (k_low, _) = values[0];
        let (k_high, _) = values[values.len() - 1];
        let report = k_ratio_check(&bc, k_low, k_high, 1e-6)?;
        per_trial.push(SweepTrial {
            thresholds_used: values.len(),
            max_pairwise_rel_dev: max_dev,
            ratio_identity_dev: report.ratio_rel_dev,
            zeta_identity_dev: report.max_zeta_dev(),
        });
        outcome.record(max_dev, value_tol, || {
            format!("trial {t}: total torsion drifts across thresholds")
        });
        outcome.record(report.ratio_rel_dev, identity_tol, || {
            format!("trial {t}: squared ratio identity")
        });
        outcome.record(report.max_zeta_dev(), identity_tol, || {
            format!("trial {t}: zeta difference identity")
        });
    }
    Ok((outcome, per_trial))
}

/// Spectrum bounds: randomized Hermitian-plus-perturbation probes must keep
/// eigenvalues inside the strip and the parabola.
pub fn spectrum_bounds_suite(
    trials: usize,
    seed: u64,
    max_dim: usize,
    force_zero_perturbation: bool,
) -> Result<SuiteOutcome, SpectralError> {
    let mut outcome = SuiteOutcome {
        trials,
        ..Default::default()
    };
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let dim = rng.gen_range(1..=max_dim.max(1));
        let alpha_scale = if force_zero_perturbation {
            0.0
        } else {
            0.5 * rng.gen::<f64>()
        };
        let probe = random_probe(dim, alpha_scale, &mut rng)?;
        let report = strip_and_parabola_check(&probe)?;
        let margin = report.strip_margin.max(report.parabola_margin).max(0.0);
        outcome.record(margin, 1e-8, || {
            format!(
                "trial {t}: dim {dim} strip {:.3e} parabola {:.3e}",
                report.strip_margin, report.parabola_margin
            )
        });
    }
    Ok(outcome)
}
