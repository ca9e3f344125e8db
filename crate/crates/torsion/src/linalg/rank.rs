//! Numerical rank, kernel/image bases, and change-of-basis determinants.

use num_complex::Complex64;

use super::error::LinalgError;
use super::lu::{det, lu_decompose};
use super::matrix::{CMatrix, SubspaceBasis};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Outcome of row reduction at a tolerance: rank, pivot columns, kernel and
/// image bases, plus the pivot magnitudes needed to detect an ambiguous rank.
#[derive(Clone, Debug)]
pub struct RankDecomposition {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    pub kernel: SubspaceBasis,
    pub image: SubspaceBasis,
    pub tol: f64,
    /// Smallest pivot magnitude accepted as nonzero (infinity if rank 0).
    pub min_accepted: f64,
    /// Largest candidate pivot magnitude rejected as zero (0 if full rank).
    pub max_rejected: f64,
}

impl RankDecomposition {
    /// Rank is ambiguous when accepted and rejected pivots both come within
    /// a factor of 10 of the tolerance. Torsion is discontinuous in rank, so
    /// callers reject such inputs instead of classifying them silently.
    pub fn is_ambiguous(&self) -> bool {
        self.min_accepted < 10.0 * self.tol || self.max_rejected > 0.1 * self.tol
    }

    pub fn ensure_unambiguous(&self) -> Result<(), LinalgError> {
        if self.is_ambiguous() {
            Err(LinalgError::AmbiguousRank {
                tol: self.tol,
                accepted: self.min_accepted,
                rejected: self.max_rejected,
            })
        } else {
            Ok(())
        }
    }
}

/// Row reduction with partial pivoting, scanning columns left to right.
///
/// The image basis is made of the pivot columns of the *original* matrix;
/// the kernel basis comes from back-substitution in the reduced system, so
/// each kernel vector has a 1 in one free coordinate.
pub fn rank_kernel_image(a: &CMatrix, tol: f64) -> RankDecomposition {
    assert!(tol > 0.0, "tolerance must be positive");
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut min_accepted = f64::INFINITY;
    let mut max_rejected = 0.0f64;
    let mut rank = 0usize;

    for j in 0..n {
        // best remaining pivot in this column
        let (mut best, mut best_mag) = (rank, 0.0f64);
        for i in rank..m {
            let mag = r[(i, j)].norm();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag <= tol {
            max_rejected = max_rejected.max(best_mag);
            continue;
        }
        min_accepted = min_accepted.min(best_mag);
        if best != rank {
            for col in 0..n {
                let tmp = r[(rank, col)];
                r[(rank, col)] = r[(best, col)];
                r[(best, col)] = tmp;
            }
        }
        // normalize pivot row and eliminate the column everywhere else
        let pivot = r[(rank, j)];
        for col in j..n {
            let v = r[(rank, col)] / pivot;
            r[(rank, col)] = v;
        }
        for i in 0..m {
            if i == rank {
                continue;
            }
            let factor = r[(i, j)];
            if factor.norm() == 0.0 {
                continue;
            }
            for col in j..n {
                let sub = factor * r[(rank, col)];
                r[(i, col)] -= sub;
            }
        }
        pivot_cols.push(j);
        rank += 1;
        if rank == m {
            // remaining columns are all free; nothing left to reject
            break;
        }
    }

    // kernel vectors: one per free column
    let free: Vec<usize> = (0..n).filter(|j| !pivot_cols.contains(j)).collect();
    let mut kernel_vecs: Vec<Vec<Complex64>> = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![ZERO; n];
        v[f] = Complex64::new(1.0, 0.0);
        for (row, &p) in pivot_cols.iter().enumerate() {
            v[p] = -r[(row, f)];
        }
        kernel_vecs.push(v);
    }

    let image_vecs: Vec<Vec<Complex64>> = pivot_cols.iter().map(|&j| a.col(j)).collect();

    RankDecomposition {
        rank,
        pivot_cols,
        kernel: SubspaceBasis::from_vectors(n, &kernel_vecs),
        image: SubspaceBasis::from_vectors(m, &image_vecs),
        tol,
        min_accepted,
        max_rejected,
    }
}

/// Convenience: rank at the matrix's scale-aware default tolerance.
pub fn rank(a: &CMatrix) -> usize {
    rank_kernel_image(a, a.default_rank_tol()).rank
}

/// Least-squares coordinates of the columns of `y` in the basis `x`,
/// solved through the normal equations. Errors if a column of `y` sits
/// outside span(x) beyond `tol` (relative to the data scale).
pub fn coordinates_in_basis(
    x: &CMatrix,
    y: &CMatrix,
    tol: f64,
) -> Result<CMatrix, LinalgError> {
    if x.rows() != y.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "ambient dimensions differ: {} vs {}",
            x.rows(),
            y.rows()
        )));
    }
    let k = x.cols();
    if k == 0 {
        if y.cols() == 0 {
            return Ok(CMatrix::zeros(0, 0));
        }
        if y.frobenius_norm() > tol {
            return Err(LinalgError::NotInSpan {
                residual: y.frobenius_norm(),
                tol,
            });
        }
        return Ok(CMatrix::zeros(0, y.cols()));
    }
    let xh = x.conj_transpose();
    let gram = xh.mul(x);
    let rhs = xh.mul(y);
    let lu = lu_decompose(&gram)?;
    let mut coords = CMatrix::zeros(k, y.cols());
    for j in 0..y.cols() {
        let col = lu.solve(&rhs.col(j))?;
        for i in 0..k {
            coords[(i, j)] = col[i];
        }
    }
    let resid = x.mul(&coords).sub(y).frobenius_norm();
    let scale = y.frobenius_norm().max(x.frobenius_norm()).max(1.0);
    if resid > tol * scale {
        return Err(LinalgError::NotInSpan {
            residual: resid,
            tol: tol * scale,
        });
    }
    Ok(coords)
}

/// The scalar [Y/X] with wedge(Y) = [Y/X] wedge(X): determinant of the
/// coordinates of Y in the basis X. Empty bases give 1.
pub fn change_of_basis_det(
    y: &SubspaceBasis,
    x: &SubspaceBasis,
    tol: f64,
) -> Result<Complex64, LinalgError> {
    if y.ambient_dim() != x.ambient_dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "ambient dimensions differ: {} vs {}",
            y.ambient_dim(),
            x.ambient_dim()
        )));
    }
    if y.count() != x.count() {
        return Err(LinalgError::DimensionMismatch(format!(
            "basis sizes differ: {} vs {}",
            y.count(),
            x.count()
        )));
    }
    if x.count() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let coords = coordinates_in_basis(x.matrix(), y.matrix(), tol)?;
    det(&coords)
}
