//! Command-line front end: JSON ingestion and validation, torsion and
//! spectral reports, deterministic randomized check suites, and the
//! cell-complex builtins.
//!
//! Exit codes: 0 pass, 1 check failure, 2 input error, 3 threshold
//! collision.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use torsion::bicomplex::{torsion, BasisRecord, Bicomplex, GradedBasisChoice};
use torsion::cw::{
    builtin_circle_subdivided, builtin_lens, comb_torsion, lens_dual_exponent, theta_bicomplex,
    DualPair, Representation,
};
use torsion::formats::{representation_from_json, BicomplexJson, DualPairJson, RepresentationJson};
use torsion::spectral::{
    k_ratio_check, ray_singer_term, split, suggest_thresholds, total_torsion, zeta_prime_at_zero,
    SpectralError,
};
use torsion::suites::{
    direct_sum_suite, eigenvalue_product_suite, pairing_dual_suite, spectrum_bounds_suite,
};

use report::{complex_json, complex_list_json, digest_bytes, digest_config, CheckLine, Report};

#[derive(Parser)]
#[command(
    name = "torsion-cli",
    about = "Torsion invariants of finite complexes with coboundary and boundary differentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the full JSON report here; the summary always goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Relative tolerance for value comparisons.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Minimum distance of Laplacian eigenvalue real parts from a threshold.
    #[arg(long, global = true, default_value_t = 1e-6)]
    gap_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the square-zero conditions of a bicomplex file.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Torsion of a bicomplex file (bases from the file, or none when
    /// doubly acyclic).
    Torsion {
        #[arg(long)]
        input: PathBuf,
    },
    /// Spectral report at one threshold: eigenvalues, zeta derivatives,
    /// regularized term, total torsion.
    Spectral {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "K")]
        k: f64,
    },
    /// Total torsion across a ladder of thresholds plus the two-threshold
    /// identities.
    SweepK {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated thresholds; suggested gap midpoints when absent.
        #[arg(long = "K-ladder", value_delimiter = ',')]
        k_ladder: Option<Vec<f64>>,
    },
    /// Combinatorial torsion of a cell-complex pair under a holonomy
    /// representation.
    Cw {
        /// Dual-pair JSON file (otherwise use --builtin).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Representation JSON file mapping generator names to matrices.
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<BuiltinKind>,
        /// Holonomy of the generator 't' as 're,im' (scalar representations).
        #[arg(long)]
        holonomy: Option<String>,
        #[arg(long)]
        lens_p: Option<u64>,
        #[arg(long)]
        lens_q: Option<u64>,
        /// Number of circle cells (1 = minimal structure).
        #[arg(long, default_value_t = 1)]
        subdivisions: usize,
    },
    /// Randomized property suites: a = pairing duality, b = eigenvalue
    /// product, c = direct-sum stability.
    Claims {
        #[arg(long)]
        which: WhichClaim,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized strip/parabola spectrum bounds for Hermitian-plus-
    /// perturbation probes.
    Probe {
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinKind {
    Circle,
    Lens,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichClaim {
    A,
    B,
    C,
}

enum CliError {
    Input(String),
    Collision(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Collision(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) => m,
            CliError::Collision(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn spectral_err(e: SpectralError) -> CliError {
    match e {
        SpectralError::ThresholdCollision { .. } => CliError::Collision(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.wall_clock_seconds = start.elapsed().as_secs_f64();
            let passed = report.passed;
            if let Err(e) = report.emit(cli.out.as_deref()) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Validate { input } => cmd_validate(input),
        Command::Torsion { input } => cmd_torsion(input),
        Command::Spectral { input, k } => cmd_spectral(input, *k, cli.gap_tol),
        Command::SweepK { input, k_ladder } => {
            cmd_sweep_k(input, k_ladder.as_deref(), cli.tol, cli.gap_tol)
        }
        Command::Cw {
            input,
            rep,
            builtin,
            holonomy,
            lens_p,
            lens_q,
            subdivisions,
        } => cmd_cw(CwArgs {
            input: input.as_deref(),
            rep: rep.as_deref(),
            builtin: *builtin,
            holonomy: holonomy.as_deref(),
            lens_p: *lens_p,
            lens_q: *lens_q,
            subdivisions: *subdivisions,
        }),
        Command::Claims {
            which,
            trials,
            seed,
        } => cmd_claims(*which, *trials, *seed, cli.tol),
        Command::Probe { dim, trials, seed } => cmd_probe(*dim, *trials, *seed),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8], what: &str) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| {
        CliError::Input(format!(
            "{what} parse error at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn load_bicomplex(path: &Path) -> Result<(Bicomplex, Option<GradedBasisChoice>, String), CliError> {
    let bytes = read_file(path)?;
    let digest = digest_bytes(&bytes);
    let json: BicomplexJson = parse_json(&bytes, "bicomplex")?;
    let (bc, basis) = json.to_bicomplex().map_err(input_err)?;
    Ok((bc, basis, digest))
}

/// Basis from the file, or the acyclic marker when both homologies vanish.
fn resolve_basis(
    bc: &Bicomplex,
    basis: Option<GradedBasisChoice>,
) -> Result<BasisRecord, CliError> {
    match basis {
        Some(choice) => Ok(BasisRecord::Chosen(choice)),
        None => {
            let (v, u) = bc.betti_numbers().map_err(input_err)?;
            if v.iter().all(|&x| x == 0) && u.iter().all(|&x| x == 0) {
                Ok(BasisRecord::Acyclic)
            } else {
                Err(CliError::Input(format!(
                    "bicomplex is not doubly acyclic (cohomology dims {v:?}, homology dims {u:?}); supply cohomology_basis/homology_basis blocks"
                )))
            }
        }
    }
}

fn cmd_validate(input: &Path) -> Result<Report, CliError> {
    let (bc, _, digest) = load_bicomplex(input)?;
    let validation = bc.validate();
    let violations: Vec<serde_json::Value> = validation
        .violations
        .iter()
        .map(|v| {
            json!({
                "degree": v.degree,
                "constraint": v.constraint,
                "residual": v.residual,
            })
        })
        .collect();
    let results = json!({
        "valid": validation.is_valid(),
        "dims": bc.dims(),
        "violations": violations,
    });
    let checks = vec![CheckLine {
        name: "square-zero".into(),
        pass: validation.is_valid(),
        detail: if validation.is_valid() {
            String::new()
        } else {
            validation.to_string()
        },
    }];
    Ok(Report::new(
        "validate",
        digest,
        json!({"input": input.display().to_string()}),
        results,
        checks,
    ))
}

fn cmd_torsion(input: &Path) -> Result<Report, CliError> {
    let (bc, basis, digest) = load_bicomplex(input)?;
    let record = resolve_basis(&bc, basis)?;
    let acyclic = matches!(record, BasisRecord::Acyclic);
    let scalar = torsion(&bc, record).map_err(input_err)?;
    let results = json!({
        "value": complex_json(scalar.value),
        "modulus": scalar.value.norm(),
        "sign_exponent": scalar.sign_exponent,
        "basis": if acyclic { "acyclic" } else { "chosen" },
    });
    let checks = vec![CheckLine {
        name: "torsion-nonzero".into(),
        pass: scalar.value.norm() > 0.0,
        detail: format!("value {}", scalar.value),
    }];
    Ok(Report::new(
        "torsion",
        digest,
        json!({"input": input.display().to_string()}),
        results,
        checks,
    ))
}

fn cmd_spectral(input: &Path, k: f64, gap_tol: f64) -> Result<Report, CliError> {
    let (bc, basis, digest) = load_bicomplex(input)?;
    let record = resolve_basis(&bc, basis)?;
    let split_data = split(&bc, k, gap_tol).map_err(spectral_err)?;
    let rs = ray_singer_term(&split_data).map_err(spectral_err)?;
    let total = total_torsion(&bc, k, record, gap_tol).map_err(spectral_err)?;
    let mut degrees = Vec::new();
    for (q, deg) in split_data.degrees.iter().enumerate() {
        let mut eigs = deg.small_eigs.clone();
        eigs.extend_from_slice(&deg.large_eigs);
        let zp = zeta_prime_at_zero(&deg.large_eigs).map_err(spectral_err)?;
        degrees.push(json!({
            "degree": q,
            "eigenvalues": complex_list_json(&eigs),
            "small_dim": deg.small_basis.cols(),
            "large_count": deg.large_eigs.len(),
            "zeta_prime_at_zero": complex_json(zp),
        }));
    }
    let small_validation = split_data.small.validate();
    let max_residual = small_validation
        .violations
        .iter()
        .map(|v| v.residual)
        .fold(0.0f64, f64::max);
    let results = json!({
        "K": k,
        "gap_tol": gap_tol,
        "degrees": degrees,
        "small_dims": split_data.small_dims(),
        "ray_singer_term": complex_json(rs),
        "total_torsion": complex_json(total.value),
        "sign_exponent": total.sign_exponent,
        "residuals": {"small_complex_square_violation": max_residual},
    });
    let checks = vec![CheckLine {
        name: "small-subcomplex-closed".into(),
        pass: small_validation.is_valid(),
        detail: format!("max residual {max_residual:.3e}"),
    }];
    Ok(Report::new(
        "spectral",
        digest,
        json!({"input": input.display().to_string(), "K": k, "gap_tol": gap_tol}),
        results,
        checks,
    ))
}

fn cmd_sweep_k(
    input: &Path,
    ladder: Option<&[f64]>,
    tol: f64,
    gap_tol: f64,
) -> Result<Report, CliError> {
    let (bc, basis, digest) = load_bicomplex(input)?;
    let record = resolve_basis(&bc, basis)?;
    let explicit = ladder.is_some();
    let ladder: Vec<f64> = match ladder {
        Some(ks) => {
            if ks.len() < 2 {
                return Err(CliError::Input(
                    "the threshold ladder needs at least two values".into(),
                ));
            }
            let mut ks = ks.to_vec();
            ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ks
        }
        None => suggest_thresholds(&bc, gap_tol).map_err(spectral_err)?,
    };
    let mut used = Vec::new();
    let mut totals = Vec::new();
    for &k in &ladder {
        match total_torsion(&bc, k, record.clone(), gap_tol) {
            Ok(t) => {
                used.push(k);
                totals.push(t.value);
            }
            Err(e) if explicit => return Err(spectral_err(e)),
            Err(_) => {} // suggested rung unusable for this input; skip
        }
    }
    if used.len() < 2 {
        return Err(CliError::Input(format!(
            "only {} of {} thresholds usable; cannot compare across the ladder",
            used.len(),
            ladder.len()
        )));
    }
    let mut max_dev = 0.0f64;
    for i in 0..totals.len() {
        for j in i + 1..totals.len() {
            let dev = (totals[j] - totals[i]).norm() / totals[i].norm().max(1e-300);
            max_dev = max_dev.max(dev);
        }
    }
    let ratio = k_ratio_check(&bc, used[0], used[used.len() - 1], gap_tol).map_err(spectral_err)?;
    let results = json!({
        "ladder": ladder,
        "used": used,
        "totals": complex_list_json(&totals),
        "max_pairwise_rel_dev": max_dev,
        "ratio_identity_dev": ratio.ratio_rel_dev,
        "zeta_identity_dev": ratio.max_zeta_dev(),
        "eigenvalues_between": ratio.between_counts,
    });
    let checks = vec![
        CheckLine {
            name: "threshold-independence".into(),
            pass: max_dev <= tol,
            detail: format!("max pairwise rel dev {max_dev:.3e}"),
        },
        CheckLine {
            name: "squared-ratio-identity".into(),
            pass: ratio.ratio_rel_dev <= 1e-10,
            detail: format!("rel dev {:.3e}", ratio.ratio_rel_dev),
        },
        CheckLine {
            name: "zeta-difference-identity".into(),
            pass: ratio.max_zeta_dev() <= 1e-10,
            detail: format!("max abs dev {:.3e}", ratio.max_zeta_dev()),
        },
    ];
    Ok(Report::new(
        "sweep-k",
        digest,
        json!({
            "input": input.display().to_string(),
            "ladder": if explicit { json!("explicit") } else { json!("suggested") },
            "tol": tol,
            "gap_tol": gap_tol,
        }),
        results,
        checks,
    ))
}

struct CwArgs<'a> {
    input: Option<&'a Path>,
    rep: Option<&'a Path>,
    builtin: Option<BuiltinKind>,
    holonomy: Option<&'a str>,
    lens_p: Option<u64>,
    lens_q: Option<u64>,
    subdivisions: usize,
}

fn parse_holonomy(text: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Input(format!("bad holonomy component '{s}': {e}")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(CliError::Input("holonomy must be 're' or 're,im'".into())),
    }
}

fn cmd_cw(args: CwArgs<'_>) -> Result<Report, CliError> {
    let (pair, source, digest, lens_exponent): (DualPair, String, String, Option<u64>) =
        match (&args.input, args.builtin) {
            (Some(path), None) => {
                let bytes = read_file(path)?;
                let digest = digest_bytes(&bytes);
                let json: DualPairJson = parse_json(&bytes, "dual pair")?;
                let pair = json.to_pair().map_err(input_err)?;
                (pair, format!("file:{}", path.display()), digest, None)
            }
            (None, Some(BuiltinKind::Circle)) => {
                let m = args.subdivisions.max(1);
                let desc = format!(
                    "builtin:circle;subdivisions={m};holonomy={}",
                    args.holonomy.unwrap_or("")
                );
                (
                    builtin_circle_subdivided(m),
                    format!("builtin:circle({m})"),
                    digest_config(&desc),
                    None,
                )
            }
            (None, Some(BuiltinKind::Lens)) => {
                let p = args
                    .lens_p
                    .ok_or_else(|| CliError::Input("lens builtin needs --lens-p".into()))?;
                let q = args
                    .lens_q
                    .ok_or_else(|| CliError::Input("lens builtin needs --lens-q".into()))?;
                let pair = builtin_lens(p, q).map_err(input_err)?;
                let desc = format!(
                    "builtin:lens;p={p};q={q};holonomy={}",
                    args.holonomy.unwrap_or("")
                );
                (
                    pair,
                    format!("builtin:lens({p},{q})"),
                    digest_config(&desc),
                    Some(lens_dual_exponent(p, q)),
                )
            }
            _ => {
                return Err(CliError::Input(
                    "pass exactly one of --input or --builtin".into(),
                ))
            }
        };

    let rep: Representation = match (&args.rep, args.holonomy) {
        (Some(path), None) => {
            let bytes = read_file(path)?;
            let json: RepresentationJson = parse_json(&bytes, "representation")?;
            representation_from_json(&json).map_err(input_err)?
        }
        (None, Some(text)) => {
            Representation::scalar("t", parse_holonomy(text)?).map_err(input_err)?
        }
        _ => {
            return Err(CliError::Input(
                "pass exactly one of --rep or --holonomy".into(),
            ))
        }
    };

    let bc = theta_bicomplex(&pair, &rep).map_err(input_err)?;
    let (h_up, h_down) = bc.betti_numbers().map_err(input_err)?;
    let acyclic = h_up.iter().all(|&x| x == 0) && h_down.iter().all(|&x| x == 0);
    if !acyclic {
        return Err(CliError::Input(format!(
            "twisted complex is not acyclic: cohomology dims {h_up:?}, homology dims {h_down:?}; torsion needs explicit bases"
        )));
    }
    let scalar = comb_torsion(&pair, &rep, BasisRecord::Acyclic).map_err(input_err)?;
    let mut results = json!({
        "source": source,
        "fiber_dim": rep.fiber_dim(),
        "cohomology_dims": h_up,
        "homology_dims": h_down,
        "acyclic": acyclic,
        "value": complex_json(scalar.value),
        "modulus": scalar.value.norm(),
        "sign_exponent": scalar.sign_exponent,
    });
    if let Some(exp) = lens_exponent {
        results["lens_dual_exponent"] = json!(exp);
    }
    let checks = vec![CheckLine {
        name: "torsion-nonzero".into(),
        pass: scalar.value.norm() > 0.0,
        detail: format!("modulus {:.6e}", scalar.value.norm()),
    }];
    Ok(Report::new(
        "cw",
        digest,
        json!({"source": results["source"].clone()}),
        results,
        checks,
    ))
}

fn cmd_claims(which: WhichClaim, trials: usize, seed: u64, tol: f64) -> Result<Report, CliError> {
    if trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let (name, outcome) = match which {
        WhichClaim::A => (
            "pairing-duality",
            pairing_dual_suite(trials, seed, tol).map_err(input_err)?,
        ),
        WhichClaim::B => (
            "eigenvalue-product",
            eigenvalue_product_suite(trials, seed, tol).map_err(input_err)?,
        ),
        WhichClaim::C => (
            "direct-sum-stability",
            direct_sum_suite(trials, seed, tol).map_err(input_err)?,
        ),
    };
    let results = json!({
        "suite": name,
        "trials": outcome.trials,
        "failures": outcome.failures,
        "worst_rel_err": outcome.worst_rel_err,
        "failure_details": outcome.failure_details,
    });
    let checks = vec![CheckLine {
        name: format!("{name}-suite"),
        pass: outcome.passed(),
        detail: format!(
            "{} trials, {} failures, worst rel err {:.3e}",
            outcome.trials, outcome.failures, outcome.worst_rel_err
        ),
    }];
    let which_letter = match which {
        WhichClaim::A => "a",
        WhichClaim::B => "b",
        WhichClaim::C => "c",
    };
    Ok(Report::new(
        "claims",
        digest_config(&format!(
            "claims:{which_letter};trials={trials};seed={seed};tol={tol}"
        )),
        json!({"which": which_letter, "trials": trials, "seed": seed, "tol": tol}),
        results,
        checks,
    ))
}

fn cmd_probe(dim: usize, trials: usize, seed: u64) -> Result<Report, CliError> {
    if dim == 0 {
        return Err(CliError::Input("dimension must be at least 1".into()));
    }
    if trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let outcome = spectrum_bounds_suite(trials, seed, dim, false).map_err(spectral_err)?;
    let results = json!({
        "dim": dim,
        "trials": outcome.trials,
        "violations": outcome.failures,
        "worst_margin": outcome.worst_rel_err,
        "failure_details": outcome.failure_details,
    });
    let checks = vec![CheckLine {
        name: "strip-and-parabola".into(),
        pass: outcome.passed(),
        detail: format!(
            "{} trials, {} violations, worst margin {:.3e}",
            outcome.trials, outcome.failures, outcome.worst_rel_err
        ),
    }];
    Ok(Report::new(
        "probe",
        digest_config(&format!("probe:dim={dim};trials={trials};seed={seed}")),
        json!({"dim": dim, "trials": trials, "seed": seed}),
        results,
        checks,
    ))
}
