//! Serialized forms of the domain types. Complex numbers appear everywhere
//! as two-element arrays [re, im] of IEEE-754 doubles; matrices as nested
//! row-major arrays of those pairs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bicomplex::{Bicomplex, BicomplexError, GradedBasisChoice};
use crate::cw::{CwError, DualPair, FlatCellComplex, Incidence, Representation};
use crate::linalg::{CMatrix, SubspaceBasis};

pub type PairJson = [f64; 2];
pub type MatrixJson = Vec<Vec<PairJson>>;
/// Per degree: a list of coordinate vectors.
pub type BasisBlockJson = Vec<Vec<Vec<PairJson>>>;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed data: {0}")]
    BadShape(String),

    #[error("non-finite number in input")]
    NonFinite,

    #[error(transparent)]
    Bicomplex(#[from] BicomplexError),

    #[error(transparent)]
    Cw(#[from] CwError),
}

fn matrix_from_json(m: &MatrixJson, rows: usize, cols: usize, what: &str) -> Result<CMatrix, FormatError> {
    if m.len() != rows {
        return Err(FormatError::BadShape(format!(
            "{what}: expected {rows} rows, got {}",
            m.len()
        )));
    }
    let mut out = CMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(FormatError::BadShape(format!(
                "{what}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(FormatError::NonFinite);
            }
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(out)
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn basis_block_from_json(
    block: &BasisBlockJson,
    dims: &[usize],
    what: &str,
) -> Result<Vec<SubspaceBasis>, FormatError> {
    if block.len() != dims.len() {
        return Err(FormatError::BadShape(format!(
            "{what}: expected {} per-degree lists, got {}",
            dims.len(),
            block.len()
        )));
    }
    let mut out = Vec::with_capacity(dims.len());
    for (q, vectors) in block.iter().enumerate() {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != dims[q] {
                return Err(FormatError::BadShape(format!(
                    "{what}: degree {q} vector {j} has length {}, expected {}",
                    v.len(),
                    dims[q]
                )));
            }
            if v.iter().any(|&[re, im]| !re.is_finite() || !im.is_finite()) {
                return Err(FormatError::NonFinite);
            }
            cols.push(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
        }
        out.push(SubspaceBasis::from_vectors(dims[q], &cols));
    }
    Ok(out)
}

fn basis_block_to_json(block: &[SubspaceBasis]) -> BasisBlockJson {
    block
        .iter()
        .map(|b| {
            b.vectors()
                .into_iter()
                .map(|v| v.into_iter().map(|z| [z.re, z.im]).collect())
                .collect()
        })
        .collect()
}

/// On-disk form of a bicomplex, with optional cohomology/homology basis
/// blocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BicomplexJson {
    pub length: usize,
    pub dims: Vec<usize>,
    pub d: Vec<MatrixJson>,
    pub dstar: Vec<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology_basis: Option<BasisBlockJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homology_basis: Option<BasisBlockJson>,
}

impl BicomplexJson {
    pub fn to_bicomplex(&self) -> Result<(Bicomplex, Option<GradedBasisChoice>), FormatError> {
        if self.dims.len() != self.length + 1 {
            return Err(FormatError::BadShape(format!(
                "length {} complex needs {} dims, got {}",
                self.length,
                self.length + 1,
                self.dims.len()
            )));
        }
        if self.d.len() != self.length || self.dstar.len() != self.length {
            return Err(FormatError::BadShape(format!(
                "length {} complex needs {} up and {} down differentials, got {} and {}",
                self.length,
                self.length,
                self.length,
                self.d.len(),
                self.dstar.len()
            )));
        }
        let mut d = Vec::with_capacity(self.length);
        let mut dstar = Vec::with_capacity(self.length);
        for q in 0..self.length {
            d.push(matrix_from_json(
                &self.d[q],
                self.dims[q + 1],
                self.dims[q],
                &format!("d[{q}]"),
            )?);
            dstar.push(matrix_from_json(
                &self.dstar[q],
                self.dims[q],
                self.dims[q + 1],
                &format!("dstar[{q}]"),
            )?);
        }
        let bc = Bicomplex::new(self.dims.clone(), d, dstar)?;
        let basis = match (&self.cohomology_basis, &self.homology_basis) {
            (None, None) => None,
            (coh, hom) => {
                let cohomology = match coh {
                    Some(block) => basis_block_from_json(block, &self.dims, "cohomology_basis")?,
                    None => self.dims.iter().map(|&n| SubspaceBasis::empty(n)).collect(),
                };
                let homology = match hom {
                    Some(block) => basis_block_from_json(block, &self.dims, "homology_basis")?,
                    None => self.dims.iter().map(|&n| SubspaceBasis::empty(n)).collect(),
                };
                Some(GradedBasisChoice {
                    cohomology,
                    homology,
                })
            }
        };
        Ok((bc, basis))
    }

    pub fn from_bicomplex(bc: &Bicomplex, basis: Option<&GradedBasisChoice>) -> Self {
        let n = bc.length();
        BicomplexJson {
            length: n,
            dims: bc.dims().to_vec(),
            d: (0..n).map(|q| matrix_to_json(&bc.d_out(q))).collect(),
            dstar: (0..n).map(|q| matrix_to_json(&bc.dstar_in(q))).collect(),
            cohomology_basis: basis.map(|b| basis_block_to_json(&b.cohomology)),
            homology_basis: basis.map(|b| basis_block_to_json(&b.homology)),
        }
    }
}

/// Incidence entry [face, sign, word]; inverse generators carry a '-'
/// prefix on the name.
pub type IncidenceJson = (usize, i8, Vec<String>);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatCellComplexJson {
    pub dim: usize,
    pub cells: Vec<usize>,
    pub incidences: Vec<Vec<Vec<IncidenceJson>>>,
    pub generators: Vec<String>,
}

impl FlatCellComplexJson {
    pub fn to_complex(&self) -> Result<FlatCellComplex, FormatError> {
        let incidences = self
            .incidences
            .iter()
            .map(|per_cell| {
                per_cell
                    .iter()
                    .map(|faces| {
                        faces
                            .iter()
                            .map(|(face, sign, word)| Incidence {
                                face: *face,
                                sign: *sign,
                                word: word.clone(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(FlatCellComplex::new(
            self.dim,
            self.cells.clone(),
            incidences,
            self.generators.clone(),
        )?)
    }

    pub fn from_complex(cw: &FlatCellComplex) -> Self {
        FlatCellComplexJson {
            dim: cw.dim(),
            cells: cw.cells().to_vec(),
            incidences: cw
                .incidences()
                .iter()
                .map(|per_cell| {
                    per_cell
                        .iter()
                        .map(|faces| {
                            faces
                                .iter()
                                .map(|inc| (inc.face, inc.sign, inc.word.clone()))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            generators: cw.generators().to_vec(),
        }
    }
}

/// Dual pair: the primal complex's fields at top level plus the dual
/// complex and the degree-wise cell pairing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualPairJson {
    #[serde(flatten)]
    pub primal: FlatCellComplexJson,
    pub dual: FlatCellComplexJson,
    pub pairing: Vec<Vec<usize>>,
}

impl DualPairJson {
    pub fn to_pair(&self) -> Result<DualPair, FormatError> {
        Ok(DualPair::new(
            self.primal.to_complex()?,
            self.dual.to_complex()?,
            self.pairing.clone(),
        )?)
    }

    pub fn from_pair(pair: &DualPair) -> Self {
        DualPairJson {
            primal: FlatCellComplexJson::from_complex(&pair.primal),
            dual: FlatCellComplexJson::from_complex(&pair.dual),
            pairing: pair.pairing.clone(),
        }
    }
}

/// Representation: generator name to complex matrix.
pub type RepresentationJson = BTreeMap<String, MatrixJson>;

pub fn representation_from_json(map: &RepresentationJson) -> Result<Representation, FormatError> {
    let mut matrices = BTreeMap::new();
    for (name, m) in map {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        matrices.insert(
            name.clone(),
            matrix_from_json(m, rows, cols, &format!("representation['{name}']"))?,
        );
    }
    Ok(Representation::new(matrices)?)
}

pub fn representation_to_json(rep: &Representation) -> RepresentationJson {
    rep.matrices()
        .iter()
        .map(|(name, m)| (name.clone(), matrix_to_json(m)))
        .collect()
}
