//! Dense complex-matrix kernel: determinants, rank/kernel/image,
//! eigenvalues of non-normal matrices, and spectral projectors selected by
//! a real-part threshold.
//!
//! Everything here is a pure function of its inputs; all types are
//! immutable after construction and safe to share across threads.

mod error;
mod eig;
mod lu;
mod matrix;
mod rank;

pub use error::LinalgError;
pub use eig::{
    cluster_multiplicities, eigenvalues, invariant_pair, operator_norm, schur,
    spectral_projector, InvariantPair, Schur, SpectralProjector,
};
pub use lu::{det, inverse, lu_decompose, solve, PivotedLu};
pub use matrix::{CMatrix, SubspaceBasis};
pub use rank::{
    change_of_basis_det, coordinates_in_basis, rank, rank_kernel_image, RankDecomposition,
};
