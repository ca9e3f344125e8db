//! Pivoted LU factorization, determinants and linear solves.

use num_complex::Complex64;

use super::error::LinalgError;
use super::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-pivoted factorization P*A = L*U with unit diagonal on L.
///
/// Singular input is not an error: U simply carries a zero on its
/// diagonal, so `det` comes out 0.
#[derive(Clone, Debug)]
pub struct PivotedLu {
    lower: CMatrix,
    upper: CMatrix,
    perm: Vec<usize>,
    sign: i8,
}

impl PivotedLu {
    pub fn lower(&self) -> &CMatrix {
        &self.lower
    }

    pub fn upper(&self) -> &CMatrix {
        &self.upper
    }

    /// Row permutation: row `i` of P*A is row `perm[i]` of A.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn det(&self) -> Complex64 {
        let n = self.upper.rows();
        let mut d = Complex64::new(self.sign as f64, 0.0);
        for i in 0..n {
            d *= self.upper[(i, i)];
        }
        d
    }

    /// Solve A x = b through the factors. Fails on an exactly zero pivot.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        let n = self.upper.rows();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs length {} vs system size {}",
                b.len(),
                n
            )));
        }
        // forward: L y = P b
        let mut y = vec![ZERO; n];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lower[(i, j)] * y[j];
            }
            y[i] = s;
        }
        // backward: U x = y
        let mut x = vec![ZERO; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.upper[(i, j)] * x[j];
            }
            let p = self.upper[(i, i)];
            if p.norm() == 0.0 {
                return Err(LinalgError::Singular);
            }
            x[i] = s / p;
        }
        Ok(x)
    }
}

/// Partial-pivot LU. The empty matrix factors trivially with det 1.
pub fn lu_decompose(a: &CMatrix) -> Result<PivotedLu, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1i8;

    for k in 0..n {
        let (mut best, mut best_mag) = (k, work[(k, k)].norm());
        for i in k + 1..n {
            let mag = work[(i, k)].norm();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best != k {
            for j in 0..n {
                let tmp = work[(k, j)];
                work[(k, j)] = work[(best, j)];
                work[(best, j)] = tmp;
            }
            perm.swap(k, best);
            sign = -sign;
        }
        let pivot = work[(k, k)];
        if pivot.norm() == 0.0 {
            continue; // singular column; leave zero on U's diagonal
        }
        for i in k + 1..n {
            let factor = work[(i, k)] / pivot;
            work[(i, k)] = factor;
            for j in k + 1..n {
                let sub = factor * work[(k, j)];
                work[(i, j)] -= sub;
            }
        }
    }

    let mut lower = CMatrix::identity(n);
    let mut upper = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j < i {
                lower[(i, j)] = work[(i, j)];
            } else {
                upper[(i, j)] = work[(i, j)];
            }
        }
    }
    Ok(PivotedLu {
        lower,
        upper,
        perm,
        sign,
    })
}

/// Determinant via pivoted LU: product of U's diagonal times the
/// permutation sign. det of the empty matrix is 1.
pub fn det(a: &CMatrix) -> Result<Complex64, LinalgError> {
    Ok(lu_decompose(a)?.det())
}

/// Solve A x = b for square A.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    lu_decompose(a)?.solve(b)
}

/// Matrix inverse via LU column solves.
pub fn inverse(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = a.rows();
    let lu = lu_decompose(a)?;
    let mut out = CMatrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e[j] = ONE;
        let col = lu.solve(&e)?;
        e[j] = ZERO;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_support::{c, cm, random_matrix};

    #[test]
    fn scalar_case() {
        let lu = lu_decompose(&cm(&[&[(2.0, 0.0)]])).unwrap();
        assert_eq!(lu.lower()[(0, 0)], c(1.0, 0.0));
        assert_eq!(lu.upper()[(0, 0)], c(2.0, 0.0));
        assert_eq!(lu.sign(), 1);
    }

    #[test]
    fn identity_factors_trivially() {
        let lu = lu_decompose(&CMatrix::identity(4)).unwrap();
        assert_eq!(lu.lower(), &CMatrix::identity(4));
        assert_eq!(lu.upper(), &CMatrix::identity(4));
        assert_eq!(lu.sign(), 1);
    }

    #[test]
    fn random_reconstruction() {
        let a = random_matrix(5, 5, 7);
        let lu = lu_decompose(&a).unwrap();
        let pa = CMatrix::from_fn(5, 5, |i, j| a[(lu.permutation()[i], j)]);
        let recon = lu.lower().mul(lu.upper());
        let rel = pa.sub(&recon).frobenius_norm() / a.frobenius_norm();
        assert!(rel < 1e-12, "relative reconstruction error {rel}");
    }

    #[test]
    fn singular_input_yields_zero_diagonal() {
        let a = cm(&[&[(1.0, 0.0), (2.0, 0.0)], &[(2.0, 0.0), (4.0, 0.0)]]);
        let lu = lu_decompose(&a).unwrap();
        assert!(lu.upper()[(1, 1)].norm() < 1e-14);
        assert!(lu.det().norm() < 1e-14);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            lu_decompose(&CMatrix::zeros(2, 3)),
            Err(LinalgError::NonSquare { .. })
        ));
    }

    #[test]
    fn det_trivial_cases() {
        assert_eq!(det(&cm(&[&[(2.0, 0.0)]])).unwrap(), c(2.0, 0.0));
        let swap = cm(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]]);
        assert_eq!(det(&swap).unwrap(), c(-1.0, 0.0));
        assert_eq!(det(&CMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    }

    /// Laplace cofactor expansion, the independent determinant oracle.
    fn det_cofactor(a: &CMatrix) -> Complex64 {
        let n = a.rows();
        if n == 0 {
            return c(1.0, 0.0);
        }
        if n == 1 {
            return a[(0, 0)];
        }
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let minor = CMatrix::from_fn(n - 1, n - 1, |r, s| {
                a[(r + 1, if s < j { s } else { s + 1 })]
            });
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += a[(0, j)] * det_cofactor(&minor) * c(sign, 0.0);
        }
        acc
    }

    #[test]
    fn det_matches_cofactor_oracle() {
        for seed in 0..8 {
            let a = random_matrix(4, 4, 100 + seed);
            let expect = det_cofactor(&a);
            let got = det(&a).unwrap();
            assert!(
                (got - expect).norm() <= 1e-10 * expect.norm().max(1.0),
                "seed {seed}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn solve_and_inverse_round_trip() {
        let a = random_matrix(6, 6, 42);
        let b: Vec<_> = (0..6).map(|i| c(i as f64 + 1.0, -(i as f64))).collect();
        let x = solve(&a, &b).unwrap();
        let r: Vec<_> = a
            .mul_vec(&x)
            .iter()
            .zip(&b)
            .map(|(got, want)| (got - want).norm())
            .collect();
        assert!(r.iter().all(|&e| e < 1e-10));
        let inv = inverse(&a).unwrap();
        let resid = a.mul(&inv).sub(&CMatrix::identity(6)).frobenius_norm();
        assert!(resid < 1e-10);
    }
}
