//! Eigenvalues of general complex matrices via Hessenberg reduction and
//! shifted QR iteration, plus ordered-Schur invariant subspaces and the
//! spectral projectors built from them.

use num_complex::Complex64;

use super::error::LinalgError;
use super::lu::inverse;
use super::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unitary triangularization A = Q T Q^H with T upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Unitary Givens rotation [[c, s], [-conj(s), c]] sending (f, g) to (r, 0).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64, Complex64) {
    if g.norm() == 0.0 {
        return (1.0, ZERO, f);
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm(), Complex64::new(g.norm(), 0.0));
    }
    let fa = f.norm();
    let d = (fa * fa + g.norm_sqr()).sqrt();
    let c = fa / d;
    let phase = f / fa;
    let s = phase * g.conj() / d;
    (c, s, phase * d)
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary
/// transform: A = Q H Q^H.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (q, h);
    }
    for k in 0..n - 2 {
        let m = n - k - 1; // length of the column tail
        let mut v: Vec<Complex64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        v[0] -= alpha;
        let vv = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        // left: H <- (I - beta v v^H) H on rows k+1..n
        for j in k..n {
            let w: Complex64 = (0..m).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            let w = w * beta;
            for i in 0..m {
                let sub = w * v[i];
                h[(k + 1 + i, j)] -= sub;
            }
        }
        // right: H <- H (I - beta v v^H) on cols k+1..n
        for i in 0..n {
            let u: Complex64 = (0..m).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            let u = u * beta;
            for j in 0..m {
                let sub = u * v[j].conj();
                h[(i, k + 1 + j)] -= sub;
            }
        }
        // accumulate Q <- Q (I - beta v v^H)
        for i in 0..n {
            let u: Complex64 = (0..m).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            let u = u * beta;
            for j in 0..m {
                let sub = u * v[j].conj();
                q[(i, k + 1 + j)] -= sub;
            }
        }
    }
    // entries below the subdiagonal are rounding residue
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = ZERO;
        }
    }
    (q, h)
}

fn wilkinson_shift(t: &CMatrix, h: usize) -> Complex64 {
    let a = t[(h - 1, h - 1)];
    let b = t[(h - 1, h)];
    let c = t[(h, h - 1)];
    let d = t[(h, h)];
    let half = Complex64::new(0.5, 0.0);
    let mean = (a + d) * half;
    let disc = (((a - d) * half) * ((a - d) * half) + b * c).sqrt();
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// One explicit shifted QR step on the active window [l, h] of T,
/// accumulating the rotations into Q.
fn qr_step(t: &mut CMatrix, q: &mut CMatrix, l: usize, h: usize, shift: Complex64) {
    let n = t.rows();
    for i in l..=h {
        t[(i, i)] -= shift;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(h - l);
    for i in l..h {
        let (c, s, r) = givens(t[(i, i)], t[(i + 1, i)]);
        t[(i, i)] = r;
        t[(i + 1, i)] = ZERO;
        for j in i + 1..n {
            let x = t[(i, j)];
            let y = t[(i + 1, j)];
            t[(i, j)] = Complex64::new(c, 0.0) * x + s * y;
            t[(i + 1, j)] = -s.conj() * x + Complex64::new(c, 0.0) * y;
        }
        rots.push((c, s));
    }
    for (idx, i) in (l..h).enumerate() {
        let (c, s) = rots[idx];
        let cc = Complex64::new(c, 0.0);
        for r in 0..=i + 1 {
            let x = t[(r, i)];
            let y = t[(r, i + 1)];
            t[(r, i)] = cc * x + s.conj() * y;
            t[(r, i + 1)] = -s * x + cc * y;
        }
        for r in 0..n {
            let x = q[(r, i)];
            let y = q[(r, i + 1)];
            q[(r, i)] = cc * x + s.conj() * y;
            q[(r, i + 1)] = -s * x + cc * y;
        }
    }
    for i in l..=h {
        t[(i, i)] += shift;
    }
}

/// Complex Schur decomposition by shifted QR with deflation.
///
/// Retries with an exceptional shift every tenth stalled sweep; a block that
/// refuses to deflate after a bounded number of sweeps is reported as a
/// convergence failure so the caller may retry under a random unitary
/// similarity.
pub fn schur(a: &CMatrix) -> Result<Schur, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.all_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Schur {
            q: CMatrix::zeros(0, 0),
            t: CMatrix::zeros(0, 0),
        });
    }
    let (mut q, mut t) = hessenberg(a);
    let scale = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let negligible = |t: &CMatrix, i: usize| -> bool {
        let local = t[(i - 1, i - 1)].norm() + t[(i, i)].norm();
        let thresh = if local > 0.0 {
            eps * local
        } else {
            eps * scale
        };
        t[(i, i - 1)].norm() <= thresh
    };

    let mut h = n - 1;
    let mut block_iters = 0usize;
    let mut total_iters = 0usize;
    let max_block_iters = 120usize;

    loop {
        // clear negligible subdiagonals, then find the active block [l, h]
        let mut l = h;
        while l > 0 {
            if negligible(&t, l) {
                t[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == h {
            if h == 0 {
                break;
            }
            h -= 1;
            block_iters = 0;
            continue;
        }
        block_iters += 1;
        total_iters += 1;
        if block_iters > max_block_iters {
            return Err(LinalgError::ConvergenceFailure {
                sweeps: total_iters,
            });
        }
        let shift = if block_iters % 10 == 0 {
            // exceptional shift to break symmetric stalls
            t[(h, h)] + Complex64::new(0.75 * t[(h, h - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&t, h)
        };
        qr_step(&mut t, &mut q, l, h, shift);
    }
    Ok(Schur { q, t })
}

/// Eigenvalues with multiplicity, in Schur order.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>, LinalgError> {
    Ok(schur(a)?.eigenvalues())
}

/// Group eigenvalues into clusters at an absolute tolerance, reporting a
/// representative and its multiplicity. Used to read multiplicities off a
/// computed spectrum.
pub fn cluster_multiplicities(eigs: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite eigenvalues")
    });
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for z in sorted {
        match out.last_mut() {
            Some((rep, count)) if (*rep - z).norm() <= tol => {
                *count += 1;
            }
            _ => out.push((z, 1)),
        }
    }
    out
}

/// Move the diagonal entries flagged by `select` to the leading positions of
/// T through unitary adjacent swaps.
fn reorder_schur(s: &mut Schur, select: &[bool]) {
    let n = s.t.rows();
    let mut sel = select.to_vec();
    let mut target = 0usize;
    for i in 0..n {
        if !sel[i] {
            continue;
        }
        let mut j = i;
        while j > target {
            swap_adjacent(&mut s.t, &mut s.q, j - 1);
            sel.swap(j - 1, j);
            j -= 1;
        }
        target += 1;
    }
}

/// Unitary swap of the adjacent diagonal pair (k, k+1) of T.
fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, k: usize) {
    let n = t.rows();
    let f = t[(k, k + 1)];
    let g = t[(k + 1, k + 1)] - t[(k, k)];
    if f.norm() == 0.0 && g.norm() == 0.0 {
        return; // equal eigenvalues, nothing to move
    }
    let (c, s, _) = givens(f, g);
    let cc = Complex64::new(c, 0.0);
    // rows k, k+1 across columns k..n
    for j in k..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = cc * x + s * y;
        t[(k + 1, j)] = -s.conj() * x + cc * y;
    }
    // columns k, k+1 across rows 0..=k+1
    for r in 0..=k + 1 {
        let x = t[(r, k)];
        let y = t[(r, k + 1)];
        t[(r, k)] = cc * x + s.conj() * y;
        t[(r, k + 1)] = -s * x + cc * y;
    }
    for r in 0..q.rows() {
        let x = q[(r, k)];
        let y = q[(r, k + 1)];
        q[(r, k)] = cc * x + s.conj() * y;
        q[(r, k + 1)] = -s * x + cc * y;
    }
    t[(k + 1, k)] = ZERO;
}

/// Orthonormal bases of the right and left invariant subspaces attached to
/// the eigenvalue set flagged by `select`, together with the selected
/// eigenvalues (with multiplicity).
///
/// `v` spans the right invariant subspace; `w` spans the orthogonal
/// complement of the right invariant subspace of the complementary set, so
/// the projector onto span(v) along that complement is v (w^H v)^{-1} w^H.
pub struct InvariantPair {
    pub v: CMatrix,
    pub w: CMatrix,
    pub selected: Vec<Complex64>,
}

pub fn invariant_pair(
    a: &CMatrix,
    select: impl Fn(Complex64) -> bool,
) -> Result<InvariantPair, LinalgError> {
    let base = schur(a)?;
    let eigs = base.eigenvalues();
    let mask: Vec<bool> = eigs.iter().map(|&z| select(z)).collect();
    let m = mask.iter().filter(|&&b| b).count();
    let n = a.rows();

    let mut right = base.clone();
    reorder_schur(&mut right, &mask);
    let v = right.q.col_slice(0, m);
    let selected = right.eigenvalues()[0..m].to_vec();

    let co_mask: Vec<bool> = mask.iter().map(|&b| !b).collect();
    let mut left = base;
    reorder_schur(&mut left, &co_mask);
    let w = left.q.col_slice(n - m, n);

    Ok(InvariantPair { v, w, selected })
}

/// Projector onto the span of the generalized eigenvectors whose eigenvalues
/// satisfy Re(lambda) < K, along the complementary invariant subspace.
#[derive(Clone, Debug)]
pub struct SpectralProjector {
    matrix: CMatrix,
    selected: Vec<Complex64>,
    threshold: f64,
}

impl SpectralProjector {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn selected_eigenvalues(&self) -> &[Complex64] {
        &self.selected
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn rank(&self) -> usize {
        self.selected.len()
    }
}

pub fn spectral_projector(
    a: &CMatrix,
    threshold: f64,
    gap_tol: f64,
) -> Result<SpectralProjector, LinalgError> {
    let eigs = eigenvalues(a)?;
    for &z in &eigs {
        if (z.re - threshold).abs() < gap_tol {
            return Err(LinalgError::ThresholdCollision {
                eigenvalue: z,
                threshold,
                gap_tol,
            });
        }
    }
    let pair = invariant_pair(a, |z| z.re < threshold)?;
    let n = a.rows();
    let m = pair.selected.len();
    let matrix = if m == 0 {
        CMatrix::zeros(n, n)
    } else if m == n {
        CMatrix::identity(n)
    } else {
        let core = inverse(&pair.w.conj_transpose().mul(&pair.v))?;
        pair.v.mul(&core).mul(&pair.w.conj_transpose())
    };
    Ok(SpectralProjector {
        matrix,
        selected: pair.selected,
        threshold,
    })
}

/// Operator 2-norm: square root of the largest eigenvalue of A^H A.
pub fn operator_norm(a: &CMatrix) -> Result<f64, LinalgError> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let gram = a.conj_transpose().mul(a);
    let eigs = eigenvalues(&gram)?;
    Ok(eigs.iter().map(|z| z.re).fold(0.0, f64::max).max(0.0).sqrt())
}
