//! Torsion invariants of finite complexes that carry both a coboundary
//! (degree +1) and a boundary (degree -1) differential.
//!
//! The crate computes the torsion of such bicomplexes relative to chosen
//! cohomology and homology bases, the eigenvalue product formula through
//! the non-self-adjoint combinatorial Laplacian, the zeta-regularized
//! large-eigenvalue contribution above a spectral threshold, and the
//! combinatorial torsion of flat-bundle cell complexes identified with
//! their duals along cell centers.

pub mod bicomplex;
pub mod cw;
pub mod formats;
pub mod linalg;
pub mod spectral;
pub mod suites;

pub use linalg::{CMatrix, SubspaceBasis};
