//! Spectral splitting of a bicomplex at a real-part threshold K, exact
//! finite-spectrum zeta functions with principal-value logarithms, the
//! zeta-regularized large-eigenvalue term, and the total torsion whose
//! value does not depend on the admissible threshold chosen.

use num_complex::Complex64;
use thiserror::Error;

use crate::bicomplex::{
    torsion, BasisRecord, Bicomplex, BicomplexError, GradedBasisChoice, TorsionScalar,
};
use crate::linalg::{
    eigenvalues, inverse, operator_norm, rank_kernel_image, CMatrix, InvariantPair, LinalgError,
    SubspaceBasis,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("degree {degree}: Laplacian eigenvalue {eigenvalue} has real part within {gap_tol:.3e} of K = {threshold}")]
    ThresholdCollision {
        degree: usize,
        eigenvalue: Complex64,
        threshold: f64,
        gap_tol: f64,
    },

    #[error("eigenvalue {eigenvalue} sits on the principal branch cut (non-positive real axis)")]
    BranchCut { eigenvalue: Complex64 },

    #[error("degree {degree}: restricted differential leaves the small subcomplex (residual {residual:.3e})")]
    NonClosure { degree: usize, residual: f64 },

    #[error("degree {degree}: projected basis loses rank; representatives degenerate under this split")]
    DegenerateProjection { degree: usize },

    #[error("base operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error(transparent)]
    Bicomplex(#[from] BicomplexError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Combinatorial Laplacian Delta_q = d d* + d* d restricted to degree q.
pub fn laplacian(bc: &Bicomplex, q: usize) -> CMatrix {
    bc.laplacian(q)
}

/// Per-degree outcome of splitting at K.
#[derive(Clone, Debug)]
pub struct DegreeSplit {
    /// Orthonormal basis of the span of generalized eigenvectors with
    /// Re(lambda) < K.
    pub small_basis: CMatrix,
    /// Orthonormal basis whose span is the orthocomplement of the large
    /// invariant subspace; the skew projector onto the small subspace is
    /// V (W^H V)^{-1} W^H.
    pub left_basis: CMatrix,
    pub small_eigs: Vec<Complex64>,
    pub large_eigs: Vec<Complex64>,
}

/// A threshold K, the small generalized-eigenmode subcomplex expressed in
/// the per-degree orthonormal coordinates, and the large eigenvalues.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub threshold: f64,
    pub small: Bicomplex,
    pub degrees: Vec<DegreeSplit>,
}

impl SpectralSplit {
    pub fn small_dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.small_basis.cols()).collect()
    }

    pub fn large_counts(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.large_eigs.len()).collect()
    }
}

/// Split the bicomplex at the threshold K. Every degree's Laplacian must
/// keep its spectrum clear of the line Re = K by at least `gap_tol`.
pub fn split(bc: &Bicomplex, k: f64, gap_tol: f64) -> Result<SpectralSplit, SpectralError> {
    bc.ensure_valid()?;
    let n = bc.length();
    let mut degrees: Vec<DegreeSplit> = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let delta = bc.laplacian(q);
        let eigs = eigenvalues(&delta)?;
        for &z in &eigs {
            if (z.re - k).abs() < gap_tol {
                return Err(SpectralError::ThresholdCollision {
                    degree: q,
                    eigenvalue: z,
                    threshold: k,
                    gap_tol,
                });
            }
        }
        let InvariantPair { v, w, selected } =
            crate::linalg::invariant_pair(&delta, |z| z.re < k)?;
        let large: Vec<Complex64> = eigs.into_iter().filter(|z| z.re > k).collect();
        degrees.push(DegreeSplit {
            small_basis: v,
            left_basis: w,
            small_eigs: selected,
            large_eigs: large,
        });
    }

    // restricted differentials by left-inverse compression; the small
    // subspaces are invariant, so the compression residual must vanish
    let small_dims: Vec<usize> = degrees.iter().map(|d| d.small_basis.cols()).collect();
    // a compression that is zero up to rounding must be flushed to an exact
    // zero: rank decisions on the small complex would otherwise resolve the
    // noise at its own scale
    let flush = |m: CMatrix, ambient_scale: f64| -> CMatrix {
        if m.frobenius_norm() < 1e-9 * ambient_scale.max(1.0) {
            CMatrix::zeros(m.rows(), m.cols())
        } else {
            m
        }
    };
    let mut d_small = Vec::with_capacity(n);
    let mut dstar_small = Vec::with_capacity(n);
    for q in 0..n {
        let d_q = bc.d_out(q);
        let image = d_q.mul(&degrees[q].small_basis);
        let compressed = degrees[q + 1].small_basis.conj_transpose().mul(&image);
        let resid = image
            .sub(&degrees[q + 1].small_basis.mul(&compressed))
            .frobenius_norm();
        if resid > 1e-8 * d_q.frobenius_norm().max(1.0) {
            return Err(SpectralError::NonClosure {
                degree: q,
                residual: resid,
            });
        }
        d_small.push(flush(compressed, d_q.frobenius_norm()));

        let ds_q = bc.dstar_in(q);
        let image = ds_q.mul(&degrees[q + 1].small_basis);
        let compressed = degrees[q].small_basis.conj_transpose().mul(&image);
        let resid = image
            .sub(&degrees[q].small_basis.mul(&compressed))
            .frobenius_norm();
        if resid > 1e-8 * ds_q.frobenius_norm().max(1.0) {
            return Err(SpectralError::NonClosure {
                degree: q + 1,
                residual: resid,
            });
        }
        dstar_small.push(flush(compressed, ds_q.frobenius_norm()));
    }
    let small = Bicomplex::new(small_dims, d_small, dstar_small)?;
    small.ensure_valid()?;
    Ok(SpectralSplit {
        threshold: k,
        small,
        degrees,
    })
}

/// zeta'_q(0) for the exact finite spectrum above the threshold:
/// the negative sum of principal logarithms. Eigenvalues on the closed
/// non-positive real axis make the principal power ill-defined and are
/// hard errors, never silently re-branched.
pub fn zeta_prime_at_zero(large_eigs: &[Complex64]) -> Result<Complex64, SpectralError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &z in large_eigs {
        if z.norm() == 0.0 || (std::f64::consts::PI - z.arg().abs()) < 1e-9 {
            return Err(SpectralError::BranchCut { eigenvalue: z });
        }
        acc -= z.ln();
    }
    Ok(acc)
}

/// exp((1/2) sum_q (-1)^q q zeta'_q(0)) over the large spectra of a split.
pub fn ray_singer_term(split: &SpectralSplit) -> Result<Complex64, SpectralError> {
    let mut exponent = Complex64::new(0.0, 0.0);
    for (q, deg) in split.degrees.iter().enumerate() {
        let zp = zeta_prime_at_zero(&deg.large_eigs)?;
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        exponent += Complex64::new(0.5 * sign * q as f64, 0.0) * zp;
    }
    Ok(exponent.exp())
}

/// Express ambient representatives inside the small subcomplex: apply the
/// split's skew projector and read off coordinates in the orthonormal
/// basis. Aborts when a family of representatives loses rank under the
/// projection.
pub fn project_basis(
    split: &SpectralSplit,
    basis: &GradedBasisChoice,
) -> Result<GradedBasisChoice, SpectralError> {
    let project_family = |family: &[SubspaceBasis]| -> Result<Vec<SubspaceBasis>, SpectralError> {
        let mut out = Vec::with_capacity(family.len());
        for (q, reps) in family.iter().enumerate() {
            let deg = &split.degrees[q];
            let m = deg.small_basis.cols();
            if reps.count() == 0 {
                out.push(SubspaceBasis::empty(m));
                continue;
            }
            if reps.count() > m {
                return Err(SpectralError::DegenerateProjection { degree: q });
            }
            let wh_v = deg.left_basis.conj_transpose().mul(&deg.small_basis);
            let core = inverse(&wh_v)?;
            let coords = core
                .mul(&deg.left_basis.conj_transpose())
                .mul(reps.matrix());
            let decomp = rank_kernel_image(&coords, coords.default_rank_tol());
            if decomp.rank != reps.count() {
                return Err(SpectralError::DegenerateProjection { degree: q });
            }
            out.push(SubspaceBasis::new(coords));
        }
        Ok(out)
    };
    Ok(GradedBasisChoice {
        cohomology: project_family(&basis.cohomology)?,
        homology: project_family(&basis.homology)?,
    })
}

/// Total torsion at threshold K: the torsion of the small subcomplex (with
/// the ambient basis representatives projected into it) times the squared
/// zeta-regularized large-eigenvalue term. Independent of the admissible K.
pub fn total_torsion(
    bc: &Bicomplex,
    k: f64,
    basis: BasisRecord,
    gap_tol: f64,
) -> Result<TorsionScalar, SpectralError> {
    let split_data = split(bc, k, gap_tol)?;
    let projected = match &basis {
        BasisRecord::Acyclic => BasisRecord::Acyclic,
        BasisRecord::Chosen(choice) => BasisRecord::Chosen(project_basis(&split_data, choice)?),
    };
    let small_torsion = torsion(&split_data.small, projected)?;
    let rs = ray_singer_term(&split_data)?;
    Ok(TorsionScalar {
        value: small_torsion.value * rs * rs,
        sign_exponent: small_torsion.sign_exponent,
        basis,
    })
}

/// Admissible thresholds: midpoints of the gaps between consecutive
/// distinct real parts of the Laplacian spectra, one value above the whole
/// spectrum, and one below it when every real part is positive. Candidates
/// that would leave a branch-cut eigenvalue (zero, or on the negative real
/// axis) above the threshold are dropped, since the zeta term is undefined
/// there.
pub fn suggest_thresholds(bc: &Bicomplex, gap_tol: f64) -> Result<Vec<f64>, SpectralError> {
    let mut spectrum: Vec<Complex64> = Vec::new();
    for q in 0..=bc.length() {
        spectrum.extend(eigenvalues(&bc.laplacian(q))?);
    }
    if spectrum.is_empty() {
        return Ok(vec![0.0]);
    }
    let mut res: Vec<f64> = spectrum.iter().map(|z| z.re).collect();
    res.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut candidates = Vec::new();
    let min = res[0];
    let max = res[res.len() - 1];
    if min > 10.0 * gap_tol {
        candidates.push(0.5 * min);
    }
    for w in res.windows(2) {
        if w[1] - w[0] > 10.0 * gap_tol {
            candidates.push(0.5 * (w[0] + w[1]));
        }
    }
    candidates.push(max + 1.0);
    let zeta_defined_above = |k: f64| {
        spectrum.iter().all(|z| {
            z.re < k || (z.norm() > gap_tol && (std::f64::consts::PI - z.arg().abs()) > 1e-9)
        })
    };
    Ok(candidates.into_iter().filter(|&k| zeta_defined_above(k)).collect())
}

/// Residuals of the two threshold-change identities between K and L.
#[derive(Clone, Debug)]
pub struct KRatioReport {
    /// (RS(K)/RS(L))^2.
    pub ratio_squared: Complex64,
    /// Inverse q-weighted product of the eigenvalues with Re in (K, L).
    pub eigenvalue_side: Complex64,
    pub ratio_rel_dev: f64,
    /// Per degree: |zeta'_K(0) - zeta'_L(0) + sum log lambda|.
    pub zeta_dev: Vec<f64>,
    pub between_counts: Vec<usize>,
}

impl KRatioReport {
    pub fn max_zeta_dev(&self) -> f64 {
        self.zeta_dev.iter().copied().fold(0.0, f64::max)
    }
}

/// Verify on the actual spectra that crossing the eigenvalues between K
/// and L shifts each zeta derivative by the sum of their principal
/// logarithms and the squared regularized term by the inverse q-weighted
/// eigenvalue product.
pub fn k_ratio_check(
    bc: &Bicomplex,
    k: f64,
    l: f64,
    gap_tol: f64,
) -> Result<KRatioReport, SpectralError> {
    assert!(k < l, "thresholds must satisfy K < L");
    let split_k = split(bc, k, gap_tol)?;
    let split_l = split(bc, l, gap_tol)?;
    let rs_k = ray_singer_term(&split_k)?;
    let rs_l = ray_singer_term(&split_l)?;
    let ratio = rs_k / rs_l;
    let ratio_squared = ratio * ratio;

    let mut eigenvalue_side = ONE;
    let mut zeta_dev = Vec::new();
    let mut between_counts = Vec::new();
    for q in 0..=bc.length() {
        let between: Vec<Complex64> = split_k.degrees[q]
            .large_eigs
            .iter()
            .copied()
            .filter(|z| z.re < l)
            .collect();
        between_counts.push(between.len());
        if !between.is_empty() {
            let prod: Complex64 = between.iter().product();
            let exponent = if q % 2 == 0 { q as i32 } else { -(q as i32) };
            eigenvalue_side /= prod.powi(exponent);
        }
        let zk = zeta_prime_at_zero(&split_k.degrees[q].large_eigs)?;
        let zl = zeta_prime_at_zero(&split_l.degrees[q].large_eigs)?;
        let log_sum: Complex64 = between.iter().map(|z| z.ln()).sum();
        zeta_dev.push((zk - zl + log_sum).norm());
    }
    let ratio_rel_dev =
        (ratio_squared - eigenvalue_side).norm() / eigenvalue_side.norm().max(1e-300);
    Ok(KRatioReport {
        ratio_squared,
        eigenvalue_side,
        ratio_rel_dev,
        zeta_dev,
        between_counts,
    })
}

/// Hermitian base operator plus an arbitrary perturbation; the pair whose
/// spectrum obeys the strip and parabola bounds.
#[derive(Clone, Debug)]
pub struct PerturbationProbe {
    base: CMatrix,
    perturbation: CMatrix,
}

impl PerturbationProbe {
    pub fn new(base: CMatrix, perturbation: CMatrix) -> Result<Self, SpectralError> {
        if !base.is_square() || !perturbation.is_square() || base.rows() != perturbation.rows() {
            return Err(SpectralError::Linalg(LinalgError::DimensionMismatch(
                "base and perturbation must be square of equal size".into(),
            )));
        }
        let resid = base.sub(&base.conj_transpose()).frobenius_norm();
        if resid > 1e-12 * base.frobenius_norm().max(1.0) {
            return Err(SpectralError::NotHermitian { residual: resid });
        }
        Ok(PerturbationProbe { base, perturbation })
    }

    pub fn base(&self) -> &CMatrix {
        &self.base
    }

    pub fn perturbation(&self) -> &CMatrix {
        &self.perturbation
    }

    pub fn perturbation_norm(&self) -> Result<f64, SpectralError> {
        Ok(operator_norm(&self.perturbation)?)
    }
}

/// Random probe: Hermitian base with a perturbation rescaled to the
/// requested operator norm. Deterministic in the generator state.
pub fn random_probe(
    dim: usize,
    norm_scale: f64,
    rng: &mut impl rand::Rng,
) -> Result<PerturbationProbe, SpectralError> {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    });
    let herm = g.add(&g.conj_transpose()).scale(Complex64::new(0.5, 0.0));
    let mut alpha = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    });
    let norm = operator_norm(&alpha)?;
    if norm > 0.0 {
        alpha = alpha.scale(Complex64::new(norm_scale / norm, 0.0));
    }
    PerturbationProbe::new(herm, alpha)
}

/// Margins of the spectrum bounds for D + alpha and (D + alpha)^2.
#[derive(Clone, Debug)]
pub struct SpectrumBoundsReport {
    pub alpha_norm: f64,
    /// max over eigenvalues of |Im lambda| - ||alpha||.
    pub strip_margin: f64,
    /// max over eigenvalues of (Im mu)^2/(4 a^2) - a^2 - Re mu; for a = 0,
    /// the larger of |Im mu| and -Re mu (real non-negativity).
    pub parabola_margin: f64,
    pub strip_ok: bool,
    pub parabola_ok: bool,
    pub sum_eigs: Vec<Complex64>,
    pub square_eigs: Vec<Complex64>,
}

/// Check that the spectrum of D + alpha lies in the strip
/// |Im lambda| <= ||alpha|| and the spectrum of (D + alpha)^2 on or inside
/// the parabola Re >= (Im)^2/(4 ||alpha||^2) - ||alpha||^2, with a 1e-8
/// numerical allowance.
pub fn strip_and_parabola_check(
    probe: &PerturbationProbe,
) -> Result<SpectrumBoundsReport, SpectralError> {
    let tol = 1e-8;
    let a = probe.perturbation_norm()?;
    let sum = probe.base.add(&probe.perturbation);
    let sum_eigs = eigenvalues(&sum)?;
    let strip_margin = sum_eigs
        .iter()
        .map(|z| z.im.abs() - a)
        .fold(f64::NEG_INFINITY, f64::max);
    let square = sum.mul(&sum);
    let square_eigs = eigenvalues(&square)?;
    let parabola_margin = if a > 0.0 {
        square_eigs
            .iter()
            .map(|z| z.im * z.im / (4.0 * a * a) - a * a - z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        square_eigs
            .iter()
            .map(|z| z.im.abs().max(-z.re))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(SpectrumBoundsReport {
        alpha_norm: a,
        strip_margin,
        parabola_margin,
        strip_ok: strip_margin <= tol,
        parabola_ok: parabola_margin <= tol,
        sum_eigs,
        square_eigs,
    })
}
