use std::collections::BTreeMap;

use num_complex::Complex64;

use super::word::Word;
use crate::error::{Error, Result};
use crate::matrix::{self, ScalarMatrix};

/// Coefficients whose largest entry modulus falls below this are dropped
/// after every arithmetic operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// A `rows × cols` matrix whose entries are *-polynomials, stored as a finite
/// map `Word → coefficient matrix`. Terms iterate in graded-lex word order.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    terms: BTreeMap<Word, ScalarMatrix>,
}

fn check_positive(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "polynomial shape must be positive, got {rows}x{cols}"
        )));
    }
    Ok(())
}

impl MatPoly {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "polynomial shape must be positive");
        Self {
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff ⊗ w`.
    pub fn monomial(coeff: ScalarMatrix, w: Word) -> Self {
        let mut p = Self::zero(coeff.nrows(), coeff.ncols());
        p.accumulate(w, &coeff);
        p.prune();
        p
    }

    /// `coeff ⊗ 1`.
    pub fn constant(coeff: ScalarMatrix) -> Self {
        Self::monomial(coeff, Word::unit())
    }

    /// `I_n ⊗ 1`.
    pub fn identity(n: usize) -> Self {
        Self::constant(matrix::identity(n))
    }

    /// Builds a polynomial from (word, coefficient) pairs; repeated words are summed.
    pub fn from_terms<I>(rows: usize, cols: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, ScalarMatrix)>,
    {
        check_positive(rows, cols)?;
        let mut p = Self::zero(rows, cols);
        for (w, c) in terms {
            if c.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch {
                    op: "from_terms",
                    left: (rows, cols),
                    right: c.shape(),
                });
            }
            p.accumulate(w, &c);
        }
        p.prune();
        Ok(p)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ScalarMatrix)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Option<&ScalarMatrix> {
        self.terms.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest word length in the support; `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    /// Largest generator index used, `0` if none.
    pub fn max_gen(&self) -> u32 {
        self.terms.keys().map(Word::max_gen).max().unwrap_or(0)
    }

    fn accumulate(&mut self, w: Word, c: &ScalarMatrix) {
        match self.terms.get_mut(&w) {
            Some(existing) => *existing += c,
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    fn prune(&mut self) {
        self.terms
            .retain(|_, c| matrix::max_abs(c) >= PRUNE_THRESHOLD);
    }

    pub fn add(&self, other: &MatPoly) -> Result<MatPoly> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.accumulate(w.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &MatPoly) -> Result<MatPoly> {
        self.add(&other.scale_by(Complex64::new(-1.0, 0.0)))
    }

    /// The ⊙ product: coefficients multiply, words concatenate freely.
    pub fn matmul(&self, other: &MatPoly) -> Result<MatPoly> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = MatPoly::zero(self.rows, other.cols);
        for (v, a) in &self.terms {
            for (w, b) in &other.terms {
                out.accumulate(v.concat(w), &(a * b));
            }
        }
        out.prune();
        Ok(out)
    }

    /// `(a ⊗ l_1…l_d)* = a* ⊗ l_d*…l_1*`, summed over terms.
    pub fn adjoint(&self) -> MatPoly {
        let mut out = MatPoly::zero(self.cols, self.rows);
        for (w, a) in &self.terms {
            out.accumulate(w.adjoint(), &a.adjoint());
        }
        out
    }

    /// Block-diagonal stacking `diag(self, other)`, word by word.
    pub fn direct_sum(&self, other: &MatPoly) -> MatPoly {
        let mut out = MatPoly::zero(self.rows + other.rows, self.cols + other.cols);
        let z_self = matrix::zeros(self.rows, self.cols);
        let z_other = matrix::zeros(other.rows, other.cols);
        let words: std::collections::BTreeSet<&Word> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for w in words {
            let a = self.terms.get(w).unwrap_or(&z_self);
            let b = other.terms.get(w).unwrap_or(&z_other);
            out.terms.insert(w.clone(), matrix::block_diag(a, b));
        }
        out
    }

    /// Replaces every coefficient `a` by `left · a · right`.
    pub fn scale(&self, left: &ScalarMatrix, right: &ScalarMatrix) -> Result<MatPoly> {
        if left.ncols() != self.rows || self.cols != right.nrows() {
            return Err(Error::ShapeMismatch {
                op: "scale",
                left: left.shape(),
                right: right.shape(),
            });
        }
        check_positive(left.nrows(), right.ncols())?;
        let mut out = MatPoly::zero(left.nrows(), right.ncols());
        for (w, a) in &self.terms {
            out.terms.insert(w.clone(), left * a * right);
        }
        out.prune();
        Ok(out)
    }

    pub fn scale_left(&self, left: &ScalarMatrix) -> Result<MatPoly> {
        self.scale(left, &matrix::identity(self.cols))
    }

    pub fn scale_right(&self, right: &ScalarMatrix) -> Result<MatPoly> {
        self.scale(&matrix::identity(self.rows), right)
    }

    pub fn scale_by(&self, s: Complex64) -> MatPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    /// Coefficient-wise max-entry distance; shapes must agree.
    pub fn max_coeff_diff(&self, other: &MatPoly) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.terms.values().map(matrix::max_abs).fold(0.0, f64::max))
    }

    /// Coefficient-wise max-entry distance that also counts terms the
    /// subtraction pruned, so tolerances below [`PRUNE_THRESHOLD`] still see them.
    pub fn max_coeff_diff_unpruned(&self, other: &MatPoly) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op: "compare",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let zero = matrix::zeros(self.rows, self.cols);
        let words: std::collections::BTreeSet<&Word> =
            self.terms.keys().chain(other.terms.keys()).collect();
        Ok(words
            .into_iter()
            .map(|w| {
                let a = self.terms.get(w).unwrap_or(&zero);
                let b = other.terms.get(w).unwrap_or(&zero);
                matrix::max_abs_diff(a, b)
            })
            .fold(0.0, f64::max))
    }
}
