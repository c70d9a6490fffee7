//! Seeded random instances: polynomials on a fixed coefficient grid,
//! degree-1 factors, and explicit products of norm-bounded factors.
//!
//! Every generator takes an explicit RNG so callers control streams.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::factorizer::DegreeOneFactor;
use crate::matrix::ScalarMatrix;
use crate::ncpoly::{Letter, MatPoly, Word};
use crate::Complex64;

/// Real and imaginary parts are drawn from this grid.
pub const COEFF_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyShape {
    pub max_rows: usize,
    pub max_cols: usize,
    pub gens: u32,
    pub max_degree: usize,
    pub max_terms: usize,
    pub square: bool,
}

impl Default for PolyShape {
    fn default() -> Self {
        Self {
            max_rows: 3,
            max_cols: 3,
            gens: 2,
            max_degree: 4,
            max_terms: 6,
            square: false,
        }
    }
}

pub fn grid_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ScalarMatrix {
    ScalarMatrix::from_fn(rows, cols, |_, _| {
        let re = COEFF_GRID[rng.random_range(0..COEFF_GRID.len())];
        let im = COEFF_GRID[rng.random_range(0..COEFF_GRID.len())];
        Complex64::new(re, im)
    })
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ScalarMatrix {
    ScalarMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_word<R: Rng + ?Sized>(degree: usize, gens: u32, rng: &mut R) -> Word {
    Word::from_letters(
        (0..degree)
            .map(|_| {
                let j = rng.random_range(1..=gens);
                if rng.random_bool(0.5) {
                    Letter::x_star(j)
                } else {
                    Letter::x(j)
                }
            })
            .collect(),
    )
}

/// Random polynomial with `1..=max_terms` grid-coefficient terms. Generated
/// coefficients are never all zero, though cancellation between repeated
/// words can still shrink the support.
pub fn random_poly<R: Rng + ?Sized>(shape: &PolyShape, rng: &mut R) -> MatPoly {
    let rows = rng.random_range(1..=shape.max_rows);
    let cols = if shape.square {
        rows
    } else {
        rng.random_range(1..=shape.max_cols)
    };
    random_poly_with(rows, cols, shape, rng)
}

pub fn random_poly_with<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    shape: &PolyShape,
    rng: &mut R,
) -> MatPoly {
    let count = rng.random_range(1..=shape.max_terms);
    let terms: Vec<(Word, ScalarMatrix)> = (0..count)
        .map(|_| {
            let d = rng.random_range(0..=shape.max_degree);
            let w = random_word(d, shape.gens, rng);
            let mut c = grid_matrix(rows, cols, rng);
            if c.iter().all(|z| z.norm() == 0.0) {
                c[(0, 0)] = Complex64::new(1.0, 0.0);
            }
            (w, c)
        })
        .collect();
    MatPoly::from_terms(rows, cols, terms).expect("consistent shapes")
}

/// A degree-1 factor `a₀ ⊗ 1 + Σ a_j ⊗ x_j + Σ b_j ⊗ x_j*` with Gaussian
/// coefficients on a random subset of the letters (at least one letter).
pub fn random_degree_one<R: Rng + ?Sized>(n: usize, gens: u32, rng: &mut R) -> DegreeOneFactor {
    let a0 = gaussian_matrix(n, n, rng);
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for j in 1..=gens {
        if rng.random_bool(0.6) {
            a.insert(j, gaussian_matrix(n, n, rng));
        }
        if rng.random_bool(0.4) {
            b.insert(j, gaussian_matrix(n, n, rng));
        }
    }
    if a.is_empty() && b.is_empty() {
        a.insert(1, gaussian_matrix(n, n, rng));
    }
    DegreeOneFactor::new(a0, a, b).expect("square coefficients")
}

/// `m` scalar factors `c₀ + c₁ l` with `l` a single random letter, each
/// scaled so `|c₀| + |c₁| = r` for a random `r ∈ [0.5, 1]`.
pub fn random_single_letter_chain<R: Rng + ?Sized>(m: usize, gens: u32, rng: &mut R) -> Vec<MatPoly> {
    (0..m)
        .map(|_| {
            let c0 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let c1 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let r: f64 = rng.random_range(0.5..=1.0);
            let s = r / (c0.norm() + c1.norm());
            let l = random_word(1, gens, rng);
            MatPoly::from_terms(
                1,
                1,
                [
                    (Word::unit(), ScalarMatrix::from_element(1, 1, c0 * s)),
                    (l, ScalarMatrix::from_element(1, 1, c1 * s)),
                ],
            )
            .expect("1x1 terms")
        })
        .collect()
}
