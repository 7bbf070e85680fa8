//! Exact construction and verification of mutually unbiased bases.
//!
//! The crate builds complete systems of mutually unbiased bases (MUBs) and
//! mutually unbiased Hadamard matrices (MUHs) in prime-power dimensions, and
//! verifies arbitrary vector systems against:
//!
//! - the Welch bounds and their equality criterion via Schur products of rows
//!   ([`welch`]),
//! - pairwise unbiasedness, the density-matrix criterion and the
//!   Schur-product orthogonality criterion for `n` flat matrices ([`mubcheck`]),
//! - L-graph coverage for homogeneous systems ([`lgraph`]),
//! - planarity conditions on functions between Abelian groups ([`constructions`]),
//! - relative difference set properties ([`rds`]).
//!
//! All verdicts are available in two backends: exact cyclotomic arithmetic
//! and double precision with an explicit tolerance.

pub mod backend;
pub mod constructions;
pub mod error;
pub mod field;
pub mod flatmat;
pub mod group;
pub mod io;
pub mod lgraph;
pub mod mubcheck;
pub mod rds;
pub mod vector;
pub mod welch;

pub use backend::{BackendKind, Scalar, DEFAULT_TOL};
pub use error::{Error, Result};
pub use flatmat::{Cyclo, CyclotomicInt, FlatMatrix, Phase, PhaseRow};
pub use group::{AbelianGroup, GroupElement, TorusElement};
pub use vector::{ExactVector, FloatVector, Vector, VectorSystem};
