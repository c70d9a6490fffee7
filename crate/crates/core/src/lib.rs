//! Matrix-valued *-polynomials in free unitary generators.
//!
//! The crate factors any matrix polynomial `x` into a chain
//! `α₀ D₁ α₁ ⋯ D_m α_m` of scalar matrices and block-diagonal factors of
//! degree at most one, evaluates polynomials and factors under concrete
//! unitary representations, and measures how the norm of `x` compares with
//! the product bound `∏‖α_ℓ‖ · ∏‖D_ℓ‖` as the matrix size grows.
//!
//! Modules:
//! - [`ncpoly`]: words, polynomials and their free *-algebra operations.
//! - [`factorizer`]: constructive factorization and its rewrites.
//! - [`repnorm`]: representations, evaluation, operator norms, ensembles.
//! - [`balancer`]: heuristic reduction of the factorization cost.
//! - [`harness`]: norm-transfer experiments over random ensembles.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balancer;
pub mod corpus;
pub mod error;
pub mod factorizer;
pub mod format;
pub mod harness;
pub mod matrix;
pub mod ncpoly;
pub mod repnorm;
pub mod selftest;

pub use error::{Error, Result};
pub use factorizer::{BlockDiagonal, DegreeOneFactor, Factorization, FormTag};
pub use matrix::ScalarMatrix;
pub use ncpoly::{Letter, MatPoly, Word};
pub use num_complex::Complex64;
pub use repnorm::{EnsembleKind, EnsembleSpec, NormEstimate, Representation};
