use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::factorizer::{BlockDiagonal, DegreeOneFactor, Factorization};
use crate::matrix::{self, ScalarMatrix};
use crate::ncpoly::{Letter, MatPoly, Word};

/// Tolerance on `‖U*U − I‖_max` for accepted generator matrices.
pub const UNITARITY_TOL: f64 = 1e-10;

/// An assignment `j ↦ U_j` of `N × N` unitaries to generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    dim: usize,
    unitaries: BTreeMap<u32, ScalarMatrix>,
    label: String,
}

impl Representation {
    /// Checks every matrix is `dim × dim` and unitary to [`UNITARITY_TOL`].
    pub fn new(
        dim: usize,
        unitaries: BTreeMap<u32, ScalarMatrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        for (&j, u) in &unitaries {
            if u.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch {
                    op: "representation",
                    left: (dim, dim),
                    right: u.shape(),
                });
            }
            let defect = matrix::max_abs_diff(&(u.adjoint() * u), &matrix::identity(dim));
            if defect > UNITARITY_TOL {
                return Err(Error::Verification(format!(
                    "generator x{j} is not unitary (defect {defect:e})"
                )));
            }
        }
        Ok(Self::new_unchecked(dim, unitaries, label))
    }

    pub(crate) fn new_unchecked(
        dim: usize,
        unitaries: BTreeMap<u32, ScalarMatrix>,
        label: impl Into<String>,
    ) -> Self {
        Self {
            dim,
            unitaries,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn unitaries(&self) -> &BTreeMap<u32, ScalarMatrix> {
        &self.unitaries
    }

    pub fn generator(&self, j: u32) -> Result<&ScalarMatrix> {
        self.unitaries.get(&j).ok_or(Error::MissingGenerator(j))
    }

    /// `U_j` or `U_j*`.
    pub fn letter_matrix(&self, l: Letter) -> Result<ScalarMatrix> {
        let u = self.generator(l.gen())?;
        Ok(if l.is_starred() { u.adjoint() } else { u.clone() })
    }

    /// `ρ(l₁ ⋯ l_d) = ρ(l₁) ⋯ ρ(l_d)`; the unit word maps to `I_N`.
    pub fn word_matrix(&self, w: &Word) -> Result<ScalarMatrix> {
        let mut letters = w.letters().iter();
        let Some(&first) = letters.next() else {
            return Ok(matrix::identity(self.dim));
        };
        letters.try_fold(self.letter_matrix(first)?, |acc, &l| {
            let u = self.generator(l.gen())?;
            Ok(if l.is_starred() { acc * u.adjoint() } else { acc * u })
        })
    }
}

/// `Σ a_w ⊗ ρ(w)`, a `(rows·N) × (cols·N)` matrix.
pub fn eval(p: &MatPoly, rep: &Representation) -> Result<ScalarMatrix> {
    let n = rep.dim();
    let mut out = matrix::zeros(p.rows() * n, p.cols() * n);
    for (w, a) in p.terms() {
        let rho = rep.word_matrix(w)?;
        matrix::kron_add_into(&mut out, a, &rho);
    }
    Ok(out)
}

pub fn eval_factor(y: &DegreeOneFactor, rep: &Representation) -> Result<ScalarMatrix> {
    let n = rep.dim();
    let mut out = matrix::zeros(y.size() * n, y.size() * n);
    for (letter, a) in y.coefficients() {
        match letter {
            None => matrix::kron_add_into(&mut out, a, &matrix::identity(n)),
            Some(l) => matrix::kron_add_into(&mut out, a, &rep.letter_matrix(l)?),
        }
    }
    Ok(out)
}

/// Per-block evaluations of a block-diagonal factor, in block order.
pub fn eval_block_diagonal(d: &BlockDiagonal, rep: &Representation) -> Result<Vec<ScalarMatrix>> {
    d.blocks().iter().map(|y| eval_factor(y, rep)).collect()
}

/// `(α₀⊗I) D₁⁽ᴺ⁾ (α₁⊗I) ⋯ D_m⁽ᴺ⁾ (α_m⊗I)`, substituted factor by factor.
pub fn eval_factorization(f: &Factorization, rep: &Representation) -> Result<ScalarMatrix> {
    let n = rep.dim();
    let alphas = f.alphas();
    let mut acc = matrix::kron_identity(&alphas[0], n);
    for (d, alpha) in f.diags().iter().zip(&alphas[1..]) {
        let mut full = matrix::zeros(d.size() * n, d.size() * n);
        let mut offset = 0;
        for blk in eval_block_diagonal(d, rep)? {
            let s = blk.nrows();
            full.view_mut((offset, offset), (s, s)).copy_from(&blk);
            offset += s;
        }
        acc = acc * full * matrix::kron_identity(alpha, n);
    }
    Ok(acc)
}
