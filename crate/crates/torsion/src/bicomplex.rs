//! Finite graded complexes carrying an up-differential `d` and a
//! down-differential `d*`, their cohomology and homology, the torsion
//! isomorphisms tau and tau', the sign exponent, and the torsion scalar
//! relative to chosen cohomology/homology bases.
//!
//! Conventions: a complex of length `N` has degrees `0..=N`; `d[q]` maps
//! degree `q` to `q+1` and `dstar[q]` maps degree `q+1` to `q`. The
//! determinant of an empty basis is 1, so zero-dimensional degrees are
//! harmless everywhere.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    change_of_basis_det, det, eigenvalues, inverse, rank_kernel_image, CMatrix, LinalgError,
    RankDecomposition, SubspaceBasis,
};

mod random;
pub use random::{random_bicomplex, RandomMode};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum BicomplexError {
    #[error("structural problem: {0}")]
    Shape(String),

    #[error("non-finite entry in a differential")]
    NonFinite,

    #[error("bicomplex fails validation: {0}")]
    Invalid(ValidationReport),

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("degree {degree}: expected {expected} basis vectors, got {got}")]
    BasisCount {
        degree: usize,
        expected: usize,
        got: usize,
    },

    #[error("degree {degree}: representative is not closed under the differential (residual {residual:.3e})")]
    NotClosed { degree: usize, residual: f64 },

    #[error("degree {degree}: degenerate basis choice ({detail})")]
    DegenerateBasis { degree: usize, detail: String },

    #[error("complex is not doubly acyclic: cohomology dims {cohomology:?}, homology dims {homology:?}")]
    NonAcyclic {
        cohomology: Vec<usize>,
        homology: Vec<usize>,
    },

    #[error("degree {degree}: Laplacian eigenvalue {eigenvalue} is within {tol:.3e} of zero")]
    NearZeroEigenvalue {
        degree: usize,
        eigenvalue: Complex64,
        tol: f64,
    },

    #[error("requested dimensions admit no acyclic complex: {0}")]
    DimsObstruction(String),

    #[error("degree {degree}: pairing between homology and cohomology classes is degenerate")]
    PairingDegenerate { degree: usize },
}

/// Outcome of checking the two square-zero conditions; report-only.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub degree: usize,
    pub constraint: String,
    pub residual: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            write!(
                f,
                "[q={} {} residual {:.3e}] ",
                v.degree, v.constraint, v.residual
            )?;
        }
        Ok(())
    }
}

/// Graded complex with differentials in both directions.
#[derive(Clone, Debug)]
pub struct Bicomplex {
    dims: Vec<usize>,
    d: Vec<CMatrix>,
    dstar: Vec<CMatrix>,
}

impl Bicomplex {
    /// Structural constructor: shapes must match `dims`; the square-zero
    /// conditions are checked separately by [`Bicomplex::validate`].
    pub fn new(
        dims: Vec<usize>,
        d: Vec<CMatrix>,
        dstar: Vec<CMatrix>,
    ) -> Result<Self, BicomplexError> {
        if dims.is_empty() {
            return Err(BicomplexError::Shape("dims must be non-empty".into()));
        }
        let n = dims.len() - 1;
        if d.len() != n || dstar.len() != n {
            return Err(BicomplexError::Shape(format!(
                "length {n} complex needs {n} up and {n} down differentials, got {} and {}",
                d.len(),
                dstar.len()
            )));
        }
        for q in 0..n {
            if d[q].rows() != dims[q + 1] || d[q].cols() != dims[q] {
                return Err(BicomplexError::Shape(format!(
                    "d[{q}] must be {}x{}, got {}x{}",
                    dims[q + 1],
                    dims[q],
                    d[q].rows(),
                    d[q].cols()
                )));
            }
            if dstar[q].rows() != dims[q] || dstar[q].cols() != dims[q + 1] {
                return Err(BicomplexError::Shape(format!(
                    "dstar[{q}] must be {}x{}, got {}x{}",
                    dims[q],
                    dims[q + 1],
                    dstar[q].rows(),
                    dstar[q].cols()
                )));
            }
        }
        if d.iter().chain(dstar.iter()).any(|m| !m.all_finite()) {
            return Err(BicomplexError::NonFinite);
        }
        Ok(Bicomplex { dims, d, dstar })
    }

    /// Complex with zero differentials in every degree.
    pub fn zero_differentials(dims: Vec<usize>) -> Self {
        let n = dims.len() - 1;
        let d = (0..n)
            .map(|q| CMatrix::zeros(dims[q + 1], dims[q]))
            .collect();
        let dstar = (0..n)
            .map(|q| CMatrix::zeros(dims[q], dims[q + 1]))
            .collect();
        Bicomplex { dims, d, dstar }
    }

    pub fn length(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, q: usize) -> usize {
        self.dims[q]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// d_q : C^q -> C^{q+1}; zero-shaped at the top degree.
    pub fn d_out(&self, q: usize) -> CMatrix {
        if q < self.length() {
            self.d[q].clone()
        } else {
            CMatrix::zeros(0, self.dims[q])
        }
    }

    /// d_{q-1} : C^{q-1} -> C^q; zero-shaped at degree zero.
    pub fn d_in(&self, q: usize) -> CMatrix {
        if q == 0 {
            CMatrix::zeros(self.dims[0], 0)
        } else {
            self.d[q - 1].clone()
        }
    }

    /// d*_q : C^q -> C^{q-1}; zero-shaped at degree zero.
    pub fn dstar_out(&self, q: usize) -> CMatrix {
        if q == 0 {
            CMatrix::zeros(0, self.dims[0])
        } else {
            self.dstar[q - 1].clone()
        }
    }

    /// d*_{q+1} : C^{q+1} -> C^q; zero-shaped at the top degree.
    pub fn dstar_in(&self, q: usize) -> CMatrix {
        if q < self.length() {
            self.dstar[q].clone()
        } else {
            CMatrix::zeros(self.dims[q], 0)
        }
    }

    /// Check d.d = 0 and d*.d* = 0 at a norm-scaled tolerance.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.length();
        for q in 0..n.saturating_sub(1) {
            let comp = self.d[q + 1].mul(&self.d[q]);
            let scale = self.d[q + 1].frobenius_norm() * self.d[q].frobenius_norm();
            let resid = comp.frobenius_norm();
            if resid > 1e-10 * scale.max(1.0) {
                report.violations.push(Violation {
                    degree: q,
                    constraint: "d.d = 0".into(),
                    residual: resid,
                });
            }
            let comp = self.dstar[q].mul(&self.dstar[q + 1]);
            let scale = self.dstar[q].frobenius_norm() * self.dstar[q + 1].frobenius_norm();
            let resid = comp.frobenius_norm();
            if resid > 1e-10 * scale.max(1.0) {
                report.violations.push(Violation {
                    degree: q + 2,
                    constraint: "d*.d* = 0".into(),
                    residual: resid,
                });
            }
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<(), BicomplexError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(BicomplexError::Invalid(report))
        }
    }

    /// Combinatorial Laplacian in degree q:
    /// Delta_q = d_{q-1} d*_q + d*_{q+1} d_q, with out-of-range terms zero.
    pub fn laplacian(&self, q: usize) -> CMatrix {
        let nq = self.dims[q];
        let mut delta = CMatrix::zeros(nq, nq);
        if q > 0 {
            delta = delta.add(&self.d_in(q).mul(&self.dstar_out(q)));
        }
        if q < self.length() {
            delta = delta.add(&self.dstar_in(q).mul(&self.d_out(q)));
        }
        delta
    }

    /// Block-diagonal direct sum; the shorter complex is padded with
    /// zero-dimensional degrees.
    pub fn direct_sum(&self, other: &Bicomplex) -> Bicomplex {
        let n = self.length().max(other.length());
        let dims: Vec<usize> = (0..=n)
            .map(|q| {
                self.dims.get(q).copied().unwrap_or(0) + other.dims.get(q).copied().unwrap_or(0)
            })
            .collect();
        let block = |ka: &CMatrix, kb: &CMatrix| -> CMatrix {
            CMatrix::from_fn(ka.rows() + kb.rows(), ka.cols() + kb.cols(), |i, j| {
                if i < ka.rows() && j < ka.cols() {
                    ka[(i, j)]
                } else if i >= ka.rows() && j >= ka.cols() {
                    kb[(i - ka.rows(), j - ka.cols())]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        };
        let dim_at = |bc: &Bicomplex, q: usize| bc.dims.get(q).copied().unwrap_or(0);
        let pad_d = |bc: &Bicomplex, q: usize| -> CMatrix {
            if q < bc.length() {
                bc.d[q].clone()
            } else {
                CMatrix::zeros(dim_at(bc, q + 1), dim_at(bc, q))
            }
        };
        let pad_dstar = |bc: &Bicomplex, q: usize| -> CMatrix {
            if q < bc.length() {
                bc.dstar[q].clone()
            } else {
                CMatrix::zeros(dim_at(bc, q), dim_at(bc, q + 1))
            }
        };
        let d = (0..n)
            .map(|q| block(&pad_d(self, q), &pad_d(other, q)))
            .collect();
        let dstar = (0..n)
            .map(|q| block(&pad_dstar(self, q), &pad_dstar(other, q)))
            .collect();
        Bicomplex { dims, d, dstar }
    }

    /// Largest row norm across all differentials: the scale at which rank
    /// decisions about this complex are made. A differential that is zero
    /// up to rounding must not be ranked at its own noise scale.
    fn rank_scale(&self) -> f64 {
        self.d
            .iter()
            .chain(self.dstar.iter())
            .map(CMatrix::max_row_norm)
            .fold(0.0, f64::max)
    }

    fn ranked(&self, m: &CMatrix) -> Result<RankDecomposition, BicomplexError> {
        let scale = self.rank_scale().max(m.max_row_norm());
        let dim = m.rows().max(m.cols()).max(1) as f64;
        let tol = (1e-10 * dim * scale).max(1e-300);
        let decomp = rank_kernel_image(m, tol);
        decomp.ensure_unambiguous()?;
        Ok(decomp)
    }

    /// Cohomology of the up-differential at degree q: the dimension and
    /// cocycle representatives projecting to a basis.
    pub fn cohomology(&self, q: usize) -> Result<(usize, SubspaceBasis), BicomplexError> {
        self.homology_of(&self.d_out(q), &self.d_in(q), q)
    }

    /// Homology of the down-differential at degree q.
    pub fn homology(&self, q: usize) -> Result<(usize, SubspaceBasis), BicomplexError> {
        self.homology_of(&self.dstar_out(q), &self.dstar_in(q), q)
    }

    fn homology_of(
        &self,
        out: &CMatrix,
        into: &CMatrix,
        q: usize,
    ) -> Result<(usize, SubspaceBasis), BicomplexError> {
        let nq = self.dims[q];
        let kernel = self.ranked(out)?.kernel;
        let image = self.ranked(into)?.image;
        let s = image.count();
        // columns of the kernel independent modulo the image
        let stacked = image.matrix().hstack(kernel.matrix());
        let decomp = self.ranked(&stacked)?;
        let reps: Vec<Vec<Complex64>> = decomp
            .pivot_cols
            .iter()
            .filter(|&&j| j >= s)
            .map(|&j| kernel.matrix().col(j - s))
            .collect();
        let expected = kernel.count() - s;
        if reps.len() != expected {
            return Err(BicomplexError::DegenerateBasis {
                degree: q,
                detail: format!(
                    "rank bookkeeping inconsistent: {} representatives for expected dimension {}",
                    reps.len(),
                    expected
                ),
            });
        }
        Ok((expected, SubspaceBasis::from_vectors(nq, &reps)))
    }

    /// All cohomology and homology dimensions at once.
    pub fn betti_numbers(&self) -> Result<(Vec<usize>, Vec<usize>), BicomplexError> {
        let mut v = Vec::new();
        let mut u = Vec::new();
        for q in 0..=self.length() {
            v.push(self.cohomology(q)?.0);
            u.push(self.homology(q)?.0);
        }
        Ok((v, u))
    }

    /// Representatives for every cohomology and homology group, packaged as
    /// a basis choice. Empty in acyclic degrees.
    pub fn standard_basis_choice(&self) -> Result<GradedBasisChoice, BicomplexError> {
        let mut cohomology = Vec::new();
        let mut homology = Vec::new();
        for q in 0..=self.length() {
            cohomology.push(self.cohomology(q)?.1);
            homology.push(self.homology(q)?.1);
        }
        Ok(GradedBasisChoice {
            cohomology,
            homology,
        })
    }

    /// The sign exponent
    /// S = sum_q [dim B_{q-1} dim B^{q+1} + dim B^{q+1} dim H_q + dim B_{q-1} dim H^q].
    pub fn sign_exponent(&self) -> Result<usize, BicomplexError> {
        let n = self.length();
        // s_up[q] = dim B^q = rank d_{q-1}; r_down[q] = dim B_{q-1} = rank d*_q
        let mut s_up = vec![0usize; n + 2];
        let mut r_down = vec![0usize; n + 2];
        for q in 0..=n {
            s_up[q + 1] = self.ranked(&self.d_out(q))?.rank;
            r_down[q] = self.ranked(&self.dstar_out(q))?.rank;
        }
        let mut total = 0usize;
        for q in 0..=n {
            let b_up_next = s_up[q + 1];
            let b_down_prev = r_down[q];
            let u_q = self.dims[q] - r_down[q] - r_down[q + 1];
            let v_q = self.dims[q] - s_up[q] - s_up[q + 1];
            total += b_down_prev * b_up_next + b_up_next * u_q + b_down_prev * v_q;
        }
        Ok(total)
    }
}

/// Per degree: cocycle representatives for the cohomology of d and cycle
/// representatives for the homology of d*.
#[derive(Clone, Debug)]
pub struct GradedBasisChoice {
    pub cohomology: Vec<SubspaceBasis>,
    pub homology: Vec<SubspaceBasis>,
}

impl GradedBasisChoice {
    pub fn empty(dims: &[usize]) -> Self {
        GradedBasisChoice {
            cohomology: dims.iter().map(|&n| SubspaceBasis::empty(n)).collect(),
            homology: dims.iter().map(|&n| SubspaceBasis::empty(n)).collect(),
        }
    }
}

/// Basis the torsion scalar is relative to.
#[derive(Clone, Debug)]
pub enum BasisRecord {
    /// Both differentials acyclic; the torsion is a plain number.
    Acyclic,
    Chosen(GradedBasisChoice),
}

/// A trivialized torsion element: nonzero value, the sign exponent that
/// entered it, and the bases it is relative to.
#[derive(Clone, Debug)]
pub struct TorsionScalar {
    pub value: Complex64,
    pub sign_exponent: usize,
    pub basis: BasisRecord,
}

fn standard_chambers(dims: &[usize]) -> Vec<SubspaceBasis> {
    dims.iter().map(|&n| SubspaceBasis::standard(n)).collect()
}

fn closure_check(
    map: &CMatrix,
    reps: &SubspaceBasis,
    degree: usize,
) -> Result<(), BicomplexError> {
    if reps.count() == 0 {
        return Ok(());
    }
    let image = map.mul(reps.matrix());
    let resid = image.frobenius_norm();
    let scale = map.frobenius_norm().max(1.0) * reps.matrix().frobenius_norm().max(1.0);
    if resid > 1e-8 * scale {
        return Err(BicomplexError::NotClosed {
            degree,
            residual: resid,
        });
    }
    Ok(())
}

/// Hadamard bound (product of column norms), the scale against which an
/// assembled basis determinant is judged degenerate.
fn hadamard_bound(m: &CMatrix) -> f64 {
    (0..m.cols())
        .map(|j| m.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// The torsion isomorphism of the up-complex relative to cohomology
/// representatives `lh` and chamber bases `chambers`:
///
///   tau = [ prod_q [ b^q, lh^q, lift(b^{q+1}) / c^q ]^{(-1)^q} ]^{-1}
///
/// where b^q is an image basis of d_{q-1} and the lifts are the pivot
/// columns of d_q. The value does not depend on the choice of image bases
/// or of the lifts.
pub fn milnor_tau(
    bc: &Bicomplex,
    lh: &[SubspaceBasis],
    chambers: &[SubspaceBasis],
) -> Result<Complex64, BicomplexError> {
    tau_generic(bc, lh, chambers, Direction::Up)
}

/// Mirror of [`milnor_tau`] for the down-differential:
///
///   tau' = [ prod_q [ b_q, lh'_q, lift(b_{q-1}) / c^q ]^{(-1)^q} ]^{-1}.
pub fn milnor_tau_prime(
    bc: &Bicomplex,
    lh_prime: &[SubspaceBasis],
    chambers: &[SubspaceBasis],
) -> Result<Complex64, BicomplexError> {
    tau_generic(bc, lh_prime, chambers, Direction::Down)
}

enum Direction {
    Up,
    Down,
}

fn tau_generic(
    bc: &Bicomplex,
    reps: &[SubspaceBasis],
    chambers: &[SubspaceBasis],
    dir: Direction,
) -> Result<Complex64, BicomplexError> {
    let n = bc.length();
    if reps.len() != n + 1 || chambers.len() != n + 1 {
        return Err(BicomplexError::Shape(format!(
            "need {} per-degree bases, got {} representatives and {} chambers",
            n + 1,
            reps.len(),
            chambers.len()
        )));
    }
    let mut product = ONE;
    for q in 0..=n {
        let nq = bc.dim(q);
        if chambers[q].ambient_dim() != nq || chambers[q].count() != nq {
            return Err(BicomplexError::BasisCount {
                degree: q,
                expected: nq,
                got: chambers[q].count(),
            });
        }
        let (into, out) = match dir {
            Direction::Up => (bc.d_in(q), bc.d_out(q)),
            Direction::Down => (bc.dstar_in(q), bc.dstar_out(q)),
        };
        closure_check(&out, &reps[q], q)?;
        let image = bc.ranked(&into)?.image;
        let out_decomp = bc.ranked(&out)?;
        let lift_vecs: Vec<Vec<Complex64>> = out_decomp
            .pivot_cols
            .iter()
            .map(|&j| {
                let mut v = vec![Complex64::new(0.0, 0.0); nq];
                v[j] = ONE;
                v
            })
            .collect();
        let lifts = SubspaceBasis::from_vectors(nq, &lift_vecs);
        let total = image.count() + reps[q].count() + lifts.count();
        if total != nq {
            return Err(BicomplexError::BasisCount {
                degree: q,
                expected: nq,
                got: total,
            });
        }
        let assembled = image
            .matrix()
            .hstack(reps[q].matrix())
            .hstack(lifts.matrix());
        let det_q = change_of_basis_det(
            &SubspaceBasis::new(assembled.clone()),
            &chambers[q],
            1e-9,
        )?;
        if det_q.norm() <= 1e-10 * hadamard_bound(&assembled).max(1e-30) {
            return Err(BicomplexError::DegenerateBasis {
                degree: q,
                detail: format!(
                    "assembled block basis is numerically singular (|det| = {:.3e})",
                    det_q.norm()
                ),
            });
        }
        if q % 2 == 0 {
            product *= det_q;
        } else {
            product /= det_q;
        }
    }
    Ok(ONE / product)
}

/// Torsion of the bicomplex relative to a basis choice, using the standard
/// chamber basis in every degree: (-1)^S tau / tau'. The result does not
/// depend on the chamber.
pub fn torsion(bc: &Bicomplex, basis: BasisRecord) -> Result<TorsionScalar, BicomplexError> {
    torsion_with_chambers(bc, basis, &standard_chambers(bc.dims()))
}

/// Same as [`torsion`] but against explicit chamber bases; exposed so the
/// chamber independence is testable.
pub fn torsion_with_chambers(
    bc: &Bicomplex,
    basis: BasisRecord,
    chambers: &[SubspaceBasis],
) -> Result<TorsionScalar, BicomplexError> {
    bc.ensure_valid()?;
    let choice = match &basis {
        BasisRecord::Acyclic => {
            let (v, u) = bc.betti_numbers()?;
            if v.iter().any(|&x| x > 0) || u.iter().any(|&x| x > 0) {
                return Err(BicomplexError::NonAcyclic {
                    cohomology: v,
                    homology: u,
                });
            }
            GradedBasisChoice::empty(bc.dims())
        }
        BasisRecord::Chosen(choice) => choice.clone(),
    };
    let tau = milnor_tau(bc, &choice.cohomology, chambers)?;
    let tau_prime = milnor_tau_prime(bc, &choice.homology, chambers)?;
    let s = bc.sign_exponent()?;
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    Ok(TorsionScalar {
        value: Complex64::new(sign, 0.0) * tau / tau_prime,
        sign_exponent: s,
        basis,
    })
}

/// A plain cochain complex (up-differential only), the input to
/// [`pairing_dual`].
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub dims: Vec<usize>,
    pub d: Vec<CMatrix>,
}

impl CochainComplex {
    pub fn new(dims: Vec<usize>, d: Vec<CMatrix>) -> Result<Self, BicomplexError> {
        let n = dims.len() - 1;
        let dstar = (0..n)
            .map(|q| CMatrix::zeros(dims[q], dims[q + 1]))
            .collect();
        let bc = Bicomplex::new(dims, d, dstar)?;
        Ok(CochainComplex {
            dims: bc.dims,
            d: bc.d,
        })
    }

    pub fn length(&self) -> usize {
        self.dims.len() - 1
    }
}

/// Equip a cochain complex with the dual differential of `d` under the
/// bilinear pairing that declares the chamber bases orthonormal (no
/// conjugation), and produce homology representatives dual to the given
/// cohomology basis under that pairing.
///
/// With standard chambers the dual differential is the plain transpose of
/// each d_q.
pub fn pairing_dual(
    cx: &CochainComplex,
    chambers: Option<&[SubspaceBasis]>,
    cohomology_basis: &[SubspaceBasis],
) -> Result<(Bicomplex, Vec<SubspaceBasis>), BicomplexError> {
    let n = cx.length();
    let standard = standard_chambers(&cx.dims);
    let chambers = chambers.unwrap_or(&standard);
    if chambers.len() != n + 1 || cohomology_basis.len() != n + 1 {
        return Err(BicomplexError::Shape(format!(
            "need {} chamber and cohomology bases, got {} and {}",
            n + 1,
            chambers.len(),
            cohomology_basis.len()
        )));
    }
    let p: Vec<CMatrix> = chambers.iter().map(|c| c.matrix().clone()).collect();
    let p_inv: Vec<CMatrix> = p
        .iter()
        .map(|m| {
            if m.rows() == 0 {
                Ok(CMatrix::zeros(0, 0))
            } else {
                inverse(m)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut dstar = Vec::with_capacity(n);
    for q in 0..n {
        // d*_{q+1} = P_q (P_{q+1}^{-1} d_q P_q)^T P_{q+1}^{-1}
        let in_chamber = p_inv[q + 1].mul(&cx.d[q]).mul(&p[q]);
        dstar.push(p[q].mul(&in_chamber.transpose()).mul(&p_inv[q + 1]));
    }
    let bc = Bicomplex::new(cx.dims.clone(), cx.d.clone(), dstar)?;
    bc.ensure_valid()?;

    // homology representatives z with (z_i, lh^{q,j}) = delta_ij in chamber
    // coordinates
    let mut duals = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let (u_q, reps) = bc.homology(q)?;
        let v_q = cohomology_basis[q].count();
        if u_q != v_q {
            return Err(BicomplexError::BasisCount {
                degree: q,
                expected: u_q,
                got: v_q,
            });
        }
        if u_q == 0 {
            duals.push(SubspaceBasis::empty(bc.dim(q)));
            continue;
        }
        let z_coords = p_inv[q].mul(reps.matrix());
        let h_coords = p_inv[q].mul(cohomology_basis[q].matrix());
        let gram = z_coords.transpose().mul(&h_coords);
        let gram_inv =
            inverse(&gram).map_err(|_| BicomplexError::PairingDegenerate { degree: q })?;
        // dual_i = sum_j gram_inv[i][j] z_j
        let dual_mat = reps.matrix().mul(&gram_inv.transpose());
        duals.push(SubspaceBasis::new(dual_mat));
    }
    Ok((bc, duals))
}

/// Torsion of a doubly acyclic bicomplex through the eigenvalues of its
/// combinatorial Laplacians:
///
///   [ prod_q det(Delta_q)^{(-1)^q q} ]^{-1}.
///
/// Errors when any Laplacian eigenvalue is too close to zero, in which case
/// the eigenvalue formula does not apply.
pub fn eigen_torsion(bc: &Bicomplex) -> Result<Complex64, BicomplexError> {
    bc.ensure_valid()?;
    let mut acc = ONE;
    for q in 0..=bc.length() {
        let delta = bc.laplacian(q);
        if delta.rows() == 0 {
            continue;
        }
        let eigs = eigenvalues(&delta)?;
        let tol = 1e-8 * delta.frobenius_norm().max(1.0);
        for &z in &eigs {
            if z.norm() < tol {
                return Err(BicomplexError::NearZeroEigenvalue {
                    degree: q,
                    eigenvalue: z,
                    tol,
                });
            }
        }
        let det_q: Complex64 = eigs.iter().product();
        let exponent = if q % 2 == 0 { q as i32 } else { -(q as i32) };
        acc *= det_q.powi(exponent);
    }
    Ok(ONE / acc)
}

/// det(Delta_q) via LU, a cross-check route independent of the eigenvalue
/// product.
pub fn laplacian_determinant(bc: &Bicomplex, q: usize) -> Result<Complex64, BicomplexError> {
    Ok(det(&bc.laplacian(q))?)
}

/// Embed a basis choice for `a` into `a.direct_sum(b)` by zero-padding each
/// representative.
pub fn embed_basis_left(
    basis: &GradedBasisChoice,
    a: &Bicomplex,
    b: &Bicomplex,
) -> GradedBasisChoice {
    let n = a.length().max(b.length());
    let pad = |per_degree: &[SubspaceBasis]| -> Vec<SubspaceBasis> {
        (0..=n)
            .map(|q| {
                let dim_a = a.dims().get(q).copied().unwrap_or(0);
                let dim_b = b.dims().get(q).copied().unwrap_or(0);
                let vecs: Vec<Vec<Complex64>> = per_degree
                    .get(q)
                    .map(|s| {
                        s.vectors()
                            .into_iter()
                            .map(|mut v| {
                                v.resize(dim_a + dim_b, Complex64::new(0.0, 0.0));
                                v
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                SubspaceBasis::from_vectors(dim_a + dim_b, &vecs)
            })
            .collect()
    };
    GradedBasisChoice {
        cohomology: pad(&basis.cohomology),
        homology: pad(&basis.homology),
    }
}
