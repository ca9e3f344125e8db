//! Finite cell complexes with flat-bundle coefficients given by a holonomy
//! representation, the dual complex, the center-restriction identification
//! of a cell's flat sections with its dual cell's, and the combinatorial
//! torsion of the resulting bicomplex. Ships generators for circles
//! (with subdivisions) and lens spaces.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::bicomplex::{torsion, BasisRecord, Bicomplex, BicomplexError, TorsionScalar};
use crate::linalg::{det, inverse, CMatrix, LinalgError};

#[derive(Debug, Error)]
pub enum CwError {
    #[error("structural problem: {0}")]
    Shape(String),

    #[error("holonomy word names unknown generator '{0}'")]
    UnknownGenerator(String),

    #[error("representation matrix for '{0}' is singular")]
    SingularHolonomy(String),

    #[error("twisted coboundary does not square to zero at degree {degree} (residual {residual:.3e}); the complex/representation pair is invalid")]
    SquareNonzero { degree: usize, residual: f64 },

    #[error("down-differential from the dual complex does not square to zero at degree {degree} (residual {residual:.3e}); dual data is inconsistent")]
    ThetaSquareNonzero { degree: usize, residual: f64 },

    #[error("cell pairing is not a degree-wise bijection: {0}")]
    PairingInvalid(String),

    #[error("invalid lens parameters p = {p}, q = {q}: need p >= 2 and gcd(q, p) = 1")]
    InvalidLensParameters { p: u64, q: u64 },

    #[error(transparent)]
    Bicomplex(#[from] BicomplexError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One face of a cell: which cell one dimension down, with which sign, and
/// through which holonomy word. Words are evaluated left to right; an
/// inverse generator is written with a '-' prefix on its name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub face: usize,
    pub sign: i8,
    pub word: Vec<String>,
}

impl Incidence {
    pub fn new(face: usize, sign: i8, word: &[&str]) -> Self {
        Incidence {
            face,
            sign,
            word: word.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Cells per dimension with signed, group-word-labeled incidences.
#[derive(Clone, Debug)]
pub struct FlatCellComplex {
    dim: usize,
    cells: Vec<usize>,
    /// incidences[k-1][j] lists the faces of the j-th k-cell.
    incidences: Vec<Vec<Vec<Incidence>>>,
    generators: Vec<String>,
}

impl FlatCellComplex {
    pub fn new(
        dim: usize,
        cells: Vec<usize>,
        incidences: Vec<Vec<Vec<Incidence>>>,
        generators: Vec<String>,
    ) -> Result<Self, CwError> {
        if cells.len() != dim + 1 {
            return Err(CwError::Shape(format!(
                "dimension {dim} complex needs {} cell counts, got {}",
                dim + 1,
                cells.len()
            )));
        }
        if incidences.len() != dim {
            return Err(CwError::Shape(format!(
                "need incidence lists for dimensions 1..={dim}, got {}",
                incidences.len()
            )));
        }
        for k in 1..=dim {
            let lists = &incidences[k - 1];
            if lists.len() != cells[k] {
                return Err(CwError::Shape(format!(
                    "dimension {k} has {} cells but {} incidence lists",
                    cells[k],
                    lists.len()
                )));
            }
            for (j, faces) in lists.iter().enumerate() {
                for inc in faces {
                    if inc.face >= cells[k - 1] {
                        return Err(CwError::Shape(format!(
                            "cell {j} of dimension {k} references face {} but dimension {} has only {} cells",
                            inc.face,
                            k - 1,
                            cells[k - 1]
                        )));
                    }
                    if inc.sign != 1 && inc.sign != -1 {
                        return Err(CwError::Shape("incidence signs must be +1 or -1".into()));
                    }
                }
            }
        }
        if generators.iter().any(|g| g.starts_with('-') || g.is_empty()) {
            return Err(CwError::Shape(
                "generator names must be non-empty and must not start with '-'".into(),
            ));
        }
        Ok(FlatCellComplex {
            dim,
            cells,
            incidences,
            generators,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn incidences(&self) -> &[Vec<Vec<Incidence>>] {
        &self.incidences
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(q, &n)| if q % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

/// Holonomy representation: one invertible matrix per generator name, all
/// of one fiber dimension.
#[derive(Clone, Debug)]
pub struct Representation {
    matrices: BTreeMap<String, CMatrix>,
    fiber_dim: usize,
}

impl Representation {
    pub fn new(matrices: BTreeMap<String, CMatrix>) -> Result<Self, CwError> {
        let mut fiber_dim = None;
        for (name, m) in &matrices {
            if !m.is_square() {
                return Err(CwError::Shape(format!(
                    "representation matrix for '{name}' is not square"
                )));
            }
            match fiber_dim {
                None => fiber_dim = Some(m.rows()),
                Some(k) if k != m.rows() => {
                    return Err(CwError::Shape(
                        "representation matrices must share one fiber dimension".into(),
                    ))
                }
                _ => {}
            }
            let d = det(m)?;
            if d.norm() < 1e-12 * m.frobenius_norm().max(1.0) {
                return Err(CwError::SingularHolonomy(name.clone()));
            }
        }
        let fiber_dim = fiber_dim.unwrap_or(1);
        if fiber_dim == 0 {
            return Err(CwError::Shape("fiber dimension must be at least 1".into()));
        }
        Ok(Representation {
            matrices,
            fiber_dim,
        })
    }

    /// One-generator scalar representation, the common case for circles and
    /// lens spaces.
    pub fn scalar(name: &str, value: Complex64) -> Result<Self, CwError> {
        let mut map = BTreeMap::new();
        map.insert(
            name.to_string(),
            CMatrix::from_rows(&[vec![value]]),
        );
        Representation::new(map)
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn matrices(&self) -> &BTreeMap<String, CMatrix> {
        &self.matrices
    }

    /// Evaluate a holonomy word left to right; '-name' means the inverse.
    pub fn evaluate(&self, word: &[String]) -> Result<CMatrix, CwError> {
        let mut acc = CMatrix::identity(self.fiber_dim);
        for token in word {
            let (name, inverted) = match token.strip_prefix('-') {
                Some(rest) => (rest, true),
                None => (token.as_str(), false),
            };
            let m = self
                .matrices
                .get(name)
                .ok_or_else(|| CwError::UnknownGenerator(name.to_string()))?;
            let factor = if inverted { inverse(m)? } else { m.clone() };
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }
}

/// Twisted cochain differentials d_q of the flat-section complex: the
/// (tau, sigma) block of d_q is the signed sum of holonomy-word values over
/// the incidences of the (q+1)-cell tau on the q-cell sigma.
pub fn twist(cw: &FlatCellComplex, rep: &Representation) -> Result<Vec<CMatrix>, CwError> {
    let k = rep.fiber_dim();
    let mut d = Vec::with_capacity(cw.dim);
    for q in 0..cw.dim {
        let rows = k * cw.cells[q + 1];
        let cols = k * cw.cells[q];
        let mut m = CMatrix::zeros(rows, cols);
        for (tau, faces) in cw.incidences[q].iter().enumerate() {
            for inc in faces {
                let block = rep.evaluate(&inc.word)?;
                let signed = block.scale(Complex64::new(inc.sign as f64, 0.0));
                for i in 0..k {
                    for j in 0..k {
                        m[(tau * k + i, inc.face * k + j)] += signed[(i, j)];
                    }
                }
            }
        }
        d.push(m);
    }
    for q in 0..cw.dim.saturating_sub(1) {
        let comp = d[q + 1].mul(&d[q]);
        let scale = d[q + 1].frobenius_norm() * d[q].frobenius_norm();
        let resid = comp.frobenius_norm();
        if resid > 1e-10 * scale.max(1.0) {
            return Err(CwError::SquareNonzero {
                degree: q,
                residual: resid,
            });
        }
    }
    Ok(d)
}

/// Primal complex, dual complex, and the degree-wise bijection between
/// primal q-cells and dual (n-q)-cells.
#[derive(Clone, Debug)]
pub struct DualPair {
    pub primal: FlatCellComplex,
    pub dual: FlatCellComplex,
    /// pairing[q][i] = index of the dual (n-q)-cell matched with primal
    /// q-cell i.
    pub pairing: Vec<Vec<usize>>,
}

impl DualPair {
    pub fn new(
        primal: FlatCellComplex,
        dual: FlatCellComplex,
        pairing: Vec<Vec<usize>>,
    ) -> Result<Self, CwError> {
        let n = primal.dim;
        if dual.dim != n {
            return Err(CwError::PairingInvalid(
                "primal and dual must have equal dimension".into(),
            ));
        }
        if pairing.len() != n + 1 {
            return Err(CwError::PairingInvalid(format!(
                "need {} pairing lists, got {}",
                n + 1,
                pairing.len()
            )));
        }
        for q in 0..=n {
            if dual.cells[n - q] != primal.cells[q] {
                return Err(CwError::PairingInvalid(format!(
                    "primal has {} cells of dimension {q} but dual has {} of dimension {}",
                    primal.cells[q],
                    dual.cells[n - q],
                    n - q
                )));
            }
            let p = &pairing[q];
            if p.len() != primal.cells[q] {
                return Err(CwError::PairingInvalid(format!(
                    "pairing list for dimension {q} has {} entries, expected {}",
                    p.len(),
                    primal.cells[q]
                )));
            }
            let mut seen = vec![false; primal.cells[q]];
            for &target in p {
                if target >= primal.cells[q] || seen[target] {
                    return Err(CwError::PairingInvalid(format!(
                        "pairing for dimension {q} is not a bijection"
                    )));
                }
                seen[target] = true;
            }
        }
        Ok(DualPair {
            primal,
            dual,
            pairing,
        })
    }
}

/// Build the bicomplex on the primal twisted cochains: d from the primal
/// coboundary, and the degree-lowering differential obtained by
/// transporting the dual coboundary through the center-restriction
/// identification (the block permutation given by the cell pairing, the
/// identity on each fiber).
pub fn theta_bicomplex(pair: &DualPair, rep: &Representation) -> Result<Bicomplex, CwError> {
    let n = pair.primal.dim;
    let k = rep.fiber_dim();
    let d = twist(&pair.primal, rep)?;
    let d_dual = twist(&pair.dual, rep)?;

    // theta_q : C^q(primal) -> C^{n-q}(dual) as a block permutation
    let theta: Vec<CMatrix> = (0..=n)
        .map(|q| {
            let size = k * pair.primal.cells[q];
            let mut m = CMatrix::zeros(size, size);
            for i in 0..pair.primal.cells[q] {
                let target = pair.pairing[q][i];
                for f in 0..k {
                    m[(target * k + f, i * k + f)] = Complex64::new(1.0, 0.0);
                }
            }
            m
        })
        .collect();

    // delta_q = theta_{q-1}^{-1} d'_{n-q} theta_q, lowering degree by one
    let mut dstar = Vec::with_capacity(n);
    for q in 1..=n {
        let lowered = theta[q - 1]
            .transpose() // permutation inverse
            .mul(&d_dual[n - q])
            .mul(&theta[q]);
        dstar.push(lowered);
    }

    for q in 2..=n {
        // delta_{q-1} . delta_q must vanish
        let comp = dstar[q - 2].mul(&dstar[q - 1]);
        let scale = dstar[q - 2].frobenius_norm() * dstar[q - 1].frobenius_norm();
        let resid = comp.frobenius_norm();
        if resid > 1e-10 * scale.max(1.0) {
            return Err(CwError::ThetaSquareNonzero {
                degree: q,
                residual: resid,
            });
        }
    }

    let dims: Vec<usize> = pair.primal.cells.iter().map(|&c| k * c).collect();
    Ok(Bicomplex::new(dims, d, dstar)?)
}

/// Combinatorial torsion of the pair under the representation: the torsion
/// of the theta-bicomplex. With the acyclic marker the result is a plain
/// complex number; non-acyclic inputs then fail with the homology
/// dimensions in the error.
pub fn comb_torsion(
    pair: &DualPair,
    rep: &Representation,
    basis: BasisRecord,
) -> Result<TorsionScalar, CwError> {
    let bc = theta_bicomplex(pair, rep)?;
    Ok(torsion(&bc, basis)?)
}

/// Minimal circle: one 0-cell, one 1-cell wrapping through the generator.
pub fn builtin_circle() -> DualPair {
    builtin_circle_subdivided(1)
}

/// Circle subdivided into `m >= 1` vertices and edges. The dual complex is
/// again an m-fold circle on the edge centers; dual edges are oriented
/// against the base orientation, which is the convention that keeps the
/// torsion equal across subdivisions.
pub fn builtin_circle_subdivided(m: usize) -> DualPair {
    assert!(m >= 1, "need at least one cell");
    let generators = vec!["t".to_string()];
    let mut primal_edges = Vec::with_capacity(m);
    let mut dual_edges = Vec::with_capacity(m);
    for i in 0..m {
        if i + 1 < m {
            primal_edges.push(vec![
                Incidence::new(i + 1, 1, &[]),
                Incidence::new(i, -1, &[]),
            ]);
        } else {
            primal_edges.push(vec![
                Incidence::new(0, 1, &["t"]),
                Incidence::new(m - 1, -1, &[]),
            ]);
        }
        if i == 0 {
            dual_edges.push(vec![
                Incidence::new(m - 1, 1, &["-t"]),
                Incidence::new(0, -1, &[]),
            ]);
        } else {
            dual_edges.push(vec![
                Incidence::new(i - 1, 1, &[]),
                Incidence::new(i, -1, &[]),
            ]);
        }
    }
    let primal =
        FlatCellComplex::new(1, vec![m, m], vec![primal_edges], generators.clone()).unwrap();
    let dual = FlatCellComplex::new(1, vec![m, m], vec![dual_edges], generators).unwrap();
    let idx: Vec<usize> = (0..m).collect();
    DualPair::new(primal, dual, vec![idx.clone(), idx]).unwrap()
}

/// Lens space with one cell per dimension 0..=3 over the cyclic group:
/// boundary words t - 1, then 1 + t + ... + t^{p-1}, then t^q - 1. The dual
/// complex is the index-reversed structure, so its 1-cells attach along
/// t^q - 1; [`lens_dual_exponent`] reports that exponent.
pub fn builtin_lens(p: u64, q_twist: u64) -> Result<DualPair, CwError> {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    if p < 2 || gcd(q_twist % p, p) != 1 {
        return Err(CwError::InvalidLensParameters { p, q: q_twist });
    }
    let word_t_pow = |k: u64| -> Vec<Incidence> {
        // t^k - 1 as two incidences on the unique face cell
        let reps: Vec<&str> = std::iter::repeat("t").take(k as usize).collect();
        vec![Incidence::new(0, 1, &reps), Incidence::new(0, -1, &[])]
    };
    let norm_element = || -> Vec<Incidence> {
        (0..p)
            .map(|k| {
                let reps: Vec<&str> = std::iter::repeat("t").take(k as usize).collect();
                Incidence::new(0, 1, &reps)
            })
            .collect()
    };
    let generators = vec!["t".to_string()];
    let primal = FlatCellComplex::new(
        3,
        vec![1, 1, 1, 1],
        vec![vec![word_t_pow(1)], vec![norm_element()], vec![word_t_pow(q_twist)]],
        generators.clone(),
    )?;
    let dual = FlatCellComplex::new(
        3,
        vec![1, 1, 1, 1],
        vec![vec![word_t_pow(q_twist)], vec![norm_element()], vec![word_t_pow(1)]],
        generators,
    )?;
    DualPair::new(primal, dual, vec![vec![0]; 4])
}

/// The exponent on the dual 1-cell attachment produced by
/// [`builtin_lens`]: the index-reversed dual reuses the twist parameter.
pub fn lens_dual_exponent(_p: u64, q_twist: u64) -> u64 {
    q_twist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicomplex::GradedBasisChoice;
    use crate::linalg::SubspaceBasis;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(got: Complex64, want: Complex64, tol: f64) {
        assert!(
            (got - want).norm() <= tol * want.norm().max(1.0),
            "got {got}, want {want}"
        );
    }

    fn scalar_rep(lambda: Complex64) -> Representation {
        Representation::scalar("t", lambda).unwrap()
    }

    #[test]
    fn circle_twist_is_holonomy_minus_one() {
        let pair = builtin_circle();
        let rep = scalar_rep(c(2.0, 0.0));
        let d = twist(&pair.primal, &rep).unwrap();
        assert_eq!(d.len(), 1);
        assert_close(d[0].entries()[0], c(1.0, 0.0), 1e-15);
        // Euler characteristic of the twisted complex vanishes
        assert_eq!(pair.primal.euler_characteristic(), 0);
    }

    #[test]
    fn trivial_representation_matches_untwisted_tensor_identity() {
        let pair = builtin_circle_subdivided(3);
        let fiber = 2usize;
        let mut map = BTreeMap::new();
        map.insert("t".to_string(), CMatrix::identity(fiber));
        let rep = Representation::new(map).unwrap();
        let d = twist(&pair.primal, &rep).unwrap();
        let untwisted = twist(&pair.primal, &scalar_rep(c(1.0, 0.0))).unwrap();
        // block (i, j) of d must be untwisted[i][j] * identity
        for (big, small) in d.iter().zip(&untwisted) {
            assert_eq!(big.rows(), fiber * small.rows());
            for bi in 0..small.rows() {
                for bj in 0..small.cols() {
                    for fi in 0..fiber {
                        for fj in 0..fiber {
                            let expect = if fi == fj {
                                small[(bi, bj)]
                            } else {
                                c(0.0, 0.0)
                            };
                            assert_close(big[(bi * fiber + fi, bj * fiber + fj)], expect, 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lens_middle_differential_vanishes_at_unit_root() {
        let pair = builtin_lens(5, 1).unwrap();
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0);
        let rep = scalar_rep(zeta);
        let d = twist(&pair.primal, &rep).unwrap();
        assert!(d[1].entries()[0].norm() < 1e-12, "geometric series over the orbit sums to zero");
        assert_close(d[0].entries()[0], zeta - c(1.0, 0.0), 1e-14);
    }

    #[test]
    fn twist_rejects_invalid_pairing_of_complex_and_representation() {
        // a holonomy that is not a 5th root of unity breaks d.d = 0
        let pair = builtin_lens(5, 1).unwrap();
        let rep = scalar_rep(c(2.0, 0.0));
        assert!(matches!(
            twist(&pair.primal, &rep),
            Err(CwError::SquareNonzero { .. })
        ));
    }

    #[test]
    fn theta_bicomplex_on_circle() {
        let lambda = c(2.0, 0.0);
        let bc = theta_bicomplex(&builtin_circle(), &scalar_rep(lambda)).unwrap();
        assert_eq!(bc.dims(), &[1, 1]);
        assert_close(bc.d_out(0).entries()[0], c(1.0, 0.0), 1e-15);
        assert_close(bc.dstar_out(1).entries()[0], c(-0.5, 0.0), 1e-15);
        assert!(bc.validate().is_valid());
    }

    #[test]
    fn theta_bicomplex_trivial_holonomy_is_zero() {
        let bc = theta_bicomplex(&builtin_circle(), &scalar_rep(c(1.0, 0.0))).unwrap();
        assert_eq!(bc.d_out(0).frobenius_norm(), 0.0);
        assert_eq!(bc.dstar_out(1).frobenius_norm(), 0.0);
    }

    #[test]
    fn theta_bicomplex_on_lens_alternates() {
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0);
        let bc = theta_bicomplex(&builtin_lens(5, 2).unwrap(), &scalar_rep(zeta)).unwrap();
        assert_eq!(bc.dims(), &[1, 1, 1, 1]);
        let zq = zeta * zeta;
        assert_close(bc.d_out(0).entries()[0], zeta - c(1.0, 0.0), 1e-14);
        assert!(bc.d_out(1).entries()[0].norm() < 1e-12);
        assert_close(bc.d_out(2).entries()[0], zq - c(1.0, 0.0), 1e-14);
        assert_close(bc.dstar_out(1).entries()[0], zeta - c(1.0, 0.0), 1e-14);
        assert!(bc.dstar_out(2).entries()[0].norm() < 1e-12);
        assert_close(bc.dstar_out(3).entries()[0], zq - c(1.0, 0.0), 1e-14);
    }

    #[test]
    fn circle_torsion_matches_explicit_bicomplex_evaluation() {
        let lambda = c(2.0, 0.0);
        let got = comb_torsion(&builtin_circle(), &scalar_rep(lambda), BasisRecord::Acyclic)
            .unwrap()
            .value;
        // independent route: evaluate the torsion definition on the two-term
        // bicomplex written down by hand
        let by_hand = Bicomplex::new(
            vec![1, 1],
            vec![CMatrix::from_rows(&[vec![lambda - c(1.0, 0.0)]])],
            vec![CMatrix::from_rows(&[vec![c(1.0, 0.0) / lambda - c(1.0, 0.0)]])],
        )
        .unwrap();
        let expect = torsion(&by_hand, BasisRecord::Acyclic).unwrap().value;
        assert_close(got, expect, 1e-12);
        assert!((got.norm() - 0.5).abs() < 1e-12, "modulus |l-1||1/l-1| = 1/2");
        assert_close(got, c(-0.5, 0.0), 1e-12);
    }

    #[test]
    fn circle_unit_holonomy_torsion_is_squared_chord() {
        for k in 1..10 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 11.0;
            let lambda = Complex64::from_polar(1.0, theta);
            let t = comb_torsion(&builtin_circle(), &scalar_rep(lambda), BasisRecord::Acyclic)
                .unwrap()
                .value;
            let chord = 4.0 * (0.5 * theta).sin().powi(2);
            assert_close(t, c(chord, 0.0), 1e-10);
        }
    }

    #[test]
    fn circle_modulus_formula_off_the_unit_circle() {
        // |torsion| = |l - 1| |1/l - 1| at 50 sampled holonomies of varied radius
        for j in 0..50 {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.3) / 50.0;
            let radius = 0.5 + 0.03 * j as f64;
            let lambda = Complex64::from_polar(radius, theta);
            let t = comb_torsion(&builtin_circle(), &scalar_rep(lambda), BasisRecord::Acyclic)
                .unwrap()
                .value;
            let expect = (lambda - c(1.0, 0.0)).norm() * (c(1.0, 0.0) / lambda - c(1.0, 0.0)).norm();
            assert!(
                (t.norm() - expect).abs() <= 1e-8 * expect,
                "holonomy {lambda}: modulus {} vs {expect}",
                t.norm()
            );
        }
    }

    #[test]
    fn circle_subdivision_invariance() {
        for k in [1usize, 3, 7] {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 17.0;
            let lambda = Complex64::from_polar(1.2, theta);
            let rep = scalar_rep(lambda);
            let reference = comb_torsion(&builtin_circle(), &rep, BasisRecord::Acyclic)
                .unwrap()
                .value;
            for m in [2usize, 3, 5] {
                let got = comb_torsion(
                    &builtin_circle_subdivided(m),
                    &rep,
                    BasisRecord::Acyclic,
                )
                .unwrap()
                .value;
                assert_close(got, reference, 1e-10);
            }
        }
    }

    #[test]
    fn circle_trivial_holonomy_needs_bases() {
        let err = comb_torsion(
            &builtin_circle(),
            &scalar_rep(c(1.0, 0.0)),
            BasisRecord::Acyclic,
        );
        match err {
            Err(CwError::Bicomplex(BicomplexError::NonAcyclic {
                cohomology,
                homology,
            })) => {
                assert_eq!(cohomology, vec![1, 1]);
                assert_eq!(homology, vec![1, 1]);
            }
            other => panic!("expected non-acyclic diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn circle_trivial_holonomy_with_bases() {
        let pair = builtin_circle();
        let rep = scalar_rep(c(1.0, 0.0));
        let bc = theta_bicomplex(&pair, &rep).unwrap();
        let choice = GradedBasisChoice {
            cohomology: vec![SubspaceBasis::standard(1), SubspaceBasis::standard(1)],
            homology: vec![SubspaceBasis::standard(1), SubspaceBasis::standard(1)],
        };
        let t = torsion(&bc, BasisRecord::Chosen(choice)).unwrap();
        assert_close(t.value, c(1.0, 0.0), 1e-12);
    }

    #[test]
    fn lens_torsion_value_and_modulus() {
        let p = 5u64;
        let q = 1u64;
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64);
        let rep = scalar_rep(zeta);
        let pair = builtin_lens(p, q).unwrap();
        let got = comb_torsion(&pair, &rep, BasisRecord::Acyclic).unwrap().value;
        // definitional oracle on the explicit four-term bicomplex
        let zq = zeta.powu(lens_dual_exponent(p, q) as u32);
        let one = c(1.0, 0.0);
        let m1 = |z: Complex64| CMatrix::from_rows(&[vec![z - one]]);
        let zero = CMatrix::zeros(1, 1);
        let by_hand = Bicomplex::new(
            vec![1, 1, 1, 1],
            vec![m1(zeta), zero.clone(), m1(zq)],
            vec![m1(zeta), zero, m1(zq)],
        )
        .unwrap();
        let expect = torsion(&by_hand, BasisRecord::Acyclic).unwrap().value;
        assert_close(got, expect, 1e-12);
        let modulus = ((zeta - one).norm() * (zq - one).norm()).powi(2);
        assert!((got.norm() - modulus).abs() < 1e-10 * modulus);
    }

    #[test]
    fn lens_with_matrix_representation_of_unit_roots() {
        // fiber dimension 2: a conjugated diagonal of distinct 5th roots
        let p = 5u64;
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64);
        let v = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.5, 0.2), c(-1.0, 0.3)],
        ]);
        let diag = CMatrix::from_rows(&[
            vec![zeta, c(0.0, 0.0)],
            vec![c(0.0, 0.0), zeta * zeta],
        ]);
        let m = v.mul(&diag).mul(&inverse(&v).unwrap());
        let mut map = BTreeMap::new();
        map.insert("t".to_string(), m);
        let rep = Representation::new(map).unwrap();
        let pair = builtin_lens(p, 2).unwrap();
        let t = comb_torsion(&pair, &rep, BasisRecord::Acyclic).unwrap();
        assert!(t.value.norm() > 0.0);
        // block representation equals the product of the two scalar runs
        let t1 = comb_torsion(&pair, &scalar_rep(zeta), BasisRecord::Acyclic)
            .unwrap()
            .value;
        let t2 = comb_torsion(&pair, &scalar_rep(zeta * zeta), BasisRecord::Acyclic)
            .unwrap()
            .value;
        assert_close(t.value, t1 * t2, 1e-10);
    }

    #[test]
    fn lens_trivial_representation_homology() {
        let pair = builtin_lens(5, 1).unwrap();
        let bc = theta_bicomplex(&pair, &scalar_rep(c(1.0, 0.0))).unwrap();
        let (v, _) = bc.betti_numbers().unwrap();
        assert_eq!(v, vec![1, 0, 0, 1]);
    }

    #[test]
    fn builtin_cell_counts() {
        let circle = builtin_circle();
        assert_eq!(circle.primal.cells(), &[1, 1]);
        let lens = builtin_lens(5, 1).unwrap();
        assert_eq!(lens.primal.cells(), &[1, 1, 1, 1]);
        assert_eq!(lens.primal.euler_characteristic(), 0);
    }

    #[test]
    fn invalid_lens_parameters_rejected() {
        assert!(matches!(
            builtin_lens(1, 1),
            Err(CwError::InvalidLensParameters { .. })
        ));
        assert!(matches!(
            builtin_lens(6, 2),
            Err(CwError::InvalidLensParameters { .. })
        ));
    }

    #[test]
    fn unknown_generator_rejected() {
        let pair = builtin_circle();
        let rep = Representation::scalar("s", c(2.0, 0.0)).unwrap();
        assert!(matches!(
            twist(&pair.primal, &rep),
            Err(CwError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn singular_holonomy_rejected() {
        assert!(matches!(
            Representation::scalar("t", c(0.0, 0.0)),
            Err(CwError::SingularHolonomy(_))
        ));
    }

    #[test]
    fn inverse_words_evaluate() {
        let rep = scalar_rep(c(2.0, 0.0));
        let w = vec!["t".to_string(), "-t".to_string(), "t".to_string()];
        let m = rep.evaluate(&w).unwrap();
        assert_close(m.entries()[0], c(2.0, 0.0), 1e-15);
    }
}
