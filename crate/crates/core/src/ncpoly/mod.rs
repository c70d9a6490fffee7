//! Exact algebra on rectangular matrix-valued *-polynomials in free
//! generators `x_1, x_2, …` and their adjoints.
//!
//! Generators are free at this level: `x_j x_j*` is a degree-2 word, not the
//! unit. Unitarity only enters when a polynomial is evaluated under a
//! [`Representation`](crate::repnorm::Representation).

mod poly;
mod word;

pub use poly::{MatPoly, PRUNE_THRESHOLD};
pub use word::{Letter, Word, DEFAULT_MAX_GENERATORS};
