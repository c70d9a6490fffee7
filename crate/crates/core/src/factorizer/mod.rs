//! Factorizations `x = α₀ D₁ α₁ ⋯ D_m α_m` of matrix polynomials into scalar
//! matrices `α_ℓ` and block-diagonal factors `D_ℓ` whose blocks have degree ≤ 1.
//!
//! [`factor`] builds one for any [`MatPoly`] by the monomial/sum construction;
//! the functions in [`rewrite`] reshape a factorization without changing what
//! it expands to.

mod build;
pub mod rewrite;
mod types;

pub use build::{combine_sum, factor, factor_monomial, zero_factorization};
pub use rewrite::{
    absorb_scalars, dehermitize_bracket, equalize_length, equalize_sizes, hermitize,
    hermitize_factorization, multiply_chain, single_blockify, split_scalar_blocks,
};
pub use types::{BlockDiagonal, DegreeOneFactor, Factorization, FormTag};
