//! Deterministic generators for random bicomplexes, used by the check
//! suites. Everything is a pure function of (dims, seed, mode).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Bicomplex, BicomplexError};
use crate::linalg::{inverse, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomMode {
    /// Both differentials exact: cohomology and homology vanish.
    DoublyAcyclic,
    /// Random up-differential, down-differential its transpose under the
    /// standard bilinear pairing; cohomology may be nontrivial.
    PairingDual,
    /// Independent random differentials with independently sampled ranks.
    Arbitrary,
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random unitary by modified Gram-Schmidt on a Gaussian matrix.
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    loop {
        let g = gaussian_matrix(rng, n, n);
        let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| g.col(j)).collect();
        let mut ok = true;
        for j in 0..n {
            for _pass in 0..2 {
                for i in 0..j {
                    let proj: Complex64 = cols[i]
                        .iter()
                        .zip(&cols[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    for k in 0..n {
                        let sub = proj * cols[i][k];
                        cols[j][k] -= sub;
                    }
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for k in 0..n {
                cols[j][k] /= norm;
            }
        }
        if ok {
            return CMatrix::from_cols(n, &cols);
        }
    }
}

/// Well-conditioned random invertible map: unitary times a mild diagonal
/// scaling, so the generated complexes stay numerically tame.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut m = random_unitary(rng, n);
    for j in 0..n {
        let s = Complex64::new(0.6 + rng.gen::<f64>(), 0.0);
        for i in 0..n {
            m[(i, j)] *= s;
        }
    }
    m
}

fn random_frames(
    rng: &mut ChaCha8Rng,
    dims: &[usize],
) -> Result<(Vec<CMatrix>, Vec<CMatrix>), BicomplexError> {
    let frames: Vec<CMatrix> = dims.iter().map(|&n| random_invertible(rng, n)).collect();
    let inverses = frames
        .iter()
        .map(|m| {
            if m.rows() == 0 {
                Ok(CMatrix::zeros(0, 0))
            } else {
                inverse(m)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((frames, inverses))
}

/// Exactness-forced rank profile: s[q+1] = n_q - s[q] with s[0] = 0.
fn exact_ranks(dims: &[usize]) -> Result<Vec<usize>, BicomplexError> {
    let n = dims.len() - 1;
    let mut s = vec![0usize; n + 2];
    for q in 0..=n {
        let rest = dims[q] as isize - s[q] as isize;
        if rest < 0 {
            return Err(BicomplexError::DimsObstruction(format!(
                "partial alternating sum turns negative at degree {q}"
            )));
        }
        s[q + 1] = rest as usize;
    }
    if s[n + 1] != 0 {
        return Err(BicomplexError::DimsObstruction(
            "alternating sum of dims is nonzero".into(),
        ));
    }
    Ok(s)
}

/// Up-differential family of prescribed ranks: in the frame coordinates,
/// d_q carries the last s[q+1] coordinates of C^q onto the first s[q+1]
/// coordinates of C^{q+1}. Since s[q+1] <= n_q - s[q] and the image of
/// d_{q-1} occupies the first s[q] coordinates, d.d = 0 holds exactly and
/// rank(d_q) = s[q+1].
fn build_up(dims: &[usize], s: &[usize], frames: &[CMatrix], inverses: &[CMatrix]) -> Vec<CMatrix> {
    let n = dims.len() - 1;
    (0..n)
        .map(|q| {
            let rank = s[q + 1];
            let mut core = CMatrix::zeros(dims[q + 1], dims[q]);
            for i in 0..rank {
                core[(i, dims[q] - rank + i)] = Complex64::new(1.0, 0.0);
            }
            frames[q + 1].mul(&core).mul(&inverses[q])
        })
        .collect()
}

/// Down-differential family: d*_{q+1} carries the first r[q] coordinates of
/// C^{q+1} onto the last r[q] coordinates of C^q. With
/// r[q-1] + r[q] <= n_q the composite d*_q d*_{q+1} vanishes.
fn build_down(
    dims: &[usize],
    r: &[usize],
    frames: &[CMatrix],
    inverses: &[CMatrix],
) -> Vec<CMatrix> {
    let n = dims.len() - 1;
    (0..n)
        .map(|q| {
            let rank = r[q];
            let mut core = CMatrix::zeros(dims[q], dims[q + 1]);
            for i in 0..rank {
                core[(dims[q] - rank + i, i)] = Complex64::new(1.0, 0.0);
            }
            frames[q].mul(&core).mul(&inverses[q + 1])
        })
        .collect()
}

/// Ranks for a random up-differential leaving room for cohomology:
/// s[q+1] sampled in 0..=min(n_q - s[q], n_{q+1}).
fn sampled_up_ranks(rng: &mut ChaCha8Rng, dims: &[usize]) -> Vec<usize> {
    let n = dims.len() - 1;
    let mut s = vec![0usize; n + 2];
    for q in 0..n {
        let room = (dims[q] - s[q]).min(dims[q + 1]);
        s[q + 1] = if room == 0 { 0 } else { rng.gen_range(0..=room) };
    }
    s
}

/// Ranks r[q] = rank(d*_{q+1}) for an independent down-differential,
/// sampled from the top degree down with r[q-1] + r[q] <= n_q.
fn sampled_down_ranks(rng: &mut ChaCha8Rng, dims: &[usize]) -> Vec<usize> {
    let n = dims.len() - 1;
    let mut r = vec![0usize; n + 2];
    for q in (0..n).rev() {
        let room = dims[q].min(dims[q + 1] - r[q + 1]);
        r[q] = if room == 0 { 0 } else { rng.gen_range(0..=room) };
    }
    r
}

/// Deterministic random bicomplex. Identical (dims, seed, mode) inputs give
/// identical output across runs.
pub fn random_bicomplex(
    dims: &[usize],
    seed: u64,
    mode: RandomMode,
) -> Result<Bicomplex, BicomplexError> {
    if dims.is_empty() {
        return Err(BicomplexError::Shape("dims must be non-empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mode {
        RandomMode::DoublyAcyclic => {
            let s = exact_ranks(dims)?;
            let (g, g_inv) = random_frames(&mut rng, dims)?;
            let d = build_up(dims, &s, &g, &g_inv);
            let (h, h_inv) = random_frames(&mut rng, dims)?;
            // dim B_q = dim B^{q+1} forces the same rank profile downward
            let dstar = build_down(dims, &s[1..], &h, &h_inv);
            Bicomplex::new(dims.to_vec(), d, dstar)
        }
        RandomMode::PairingDual => {
            let s = sampled_up_ranks(&mut rng, dims);
            let (g, g_inv) = random_frames(&mut rng, dims)?;
            let d = build_up(dims, &s, &g, &g_inv);
            let dstar = d.iter().map(CMatrix::transpose).collect();
            Bicomplex::new(dims.to_vec(), d, dstar)
        }
        RandomMode::Arbitrary => {
            let s = sampled_up_ranks(&mut rng, dims);
            let (g, g_inv) = random_frames(&mut rng, dims)?;
            let d = build_up(dims, &s, &g, &g_inv);
            let r = sampled_down_ranks(&mut rng, dims);
            let (h, h_inv) = random_frames(&mut rng, dims)?;
            let dstar = build_down(dims, &r, &h, &h_inv);
            Bicomplex::new(dims.to_vec(), d, dstar)
        }
    }
}
