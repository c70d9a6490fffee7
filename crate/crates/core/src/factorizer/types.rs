use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{self, ScalarMatrix};
use crate::ncpoly::{Letter, MatPoly, Word};

/// Which degree-1 shape a block has.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormTag {
    /// `a₀ ⊗ 1 + Σ a_j ⊗ x_j`
    TypeA,
    /// `a₀ ⊗ 1 + Σ b_j ⊗ x_j*`
    TypeB,
    /// Both `x_j` and `x_j*` terms present.
    Mixed,
}

/// `a₀ ⊗ 1 + Σ a_j ⊗ x_j + Σ b_j ⊗ x_j*` with square `size × size` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeOneFactor {
    size: usize,
    a0: ScalarMatrix,
    a: BTreeMap<u32, ScalarMatrix>,
    b: BTreeMap<u32, ScalarMatrix>,
}

impl DegreeOneFactor {
    pub fn new(
        a0: ScalarMatrix,
        a: BTreeMap<u32, ScalarMatrix>,
        b: BTreeMap<u32, ScalarMatrix>,
    ) -> Result<Self> {
        let size = a0.nrows();
        if size == 0 {
            return Err(Error::InvalidArgument("degree-1 factor of size 0".into()));
        }
        for m in std::iter::once(&a0).chain(a.values()).chain(b.values()) {
            if m.shape() != (size, size) {
                return Err(Error::ShapeMismatch {
                    op: "degree-one factor",
                    left: (size, size),
                    right: m.shape(),
                });
            }
        }
        if a.keys().chain(b.keys()).any(|&j| j == 0) {
            return Err(Error::GeneratorOutOfRange { index: 0, max: u32::MAX });
        }
        Ok(Self { size, a0, a, b })
    }

    /// `I_n ⊗ 1`.
    pub fn unit(n: usize) -> Self {
        Self {
            size: n,
            a0: matrix::identity(n),
            a: BTreeMap::new(),
            b: BTreeMap::new(),
        }
    }

    /// The zero block of size `n`.
    pub fn zero(n: usize) -> Self {
        Self {
            size: n,
            a0: matrix::zeros(n, n),
            a: BTreeMap::new(),
            b: BTreeMap::new(),
        }
    }

    /// `I_n ⊗ l` for a single letter.
    pub fn letter(n: usize, l: Letter) -> Self {
        let mut f = Self::zero(n);
        let slot = if l.is_starred() { &mut f.b } else { &mut f.a };
        slot.insert(l.gen(), matrix::identity(n));
        f
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn a0(&self) -> &ScalarMatrix {
        &self.a0
    }

    pub fn a(&self) -> &BTreeMap<u32, ScalarMatrix> {
        &self.a
    }

    pub fn b(&self) -> &BTreeMap<u32, ScalarMatrix> {
        &self.b
    }

    pub fn form(&self) -> FormTag {
        if self.b.is_empty() {
            FormTag::TypeA
        } else if self.a.is_empty() {
            FormTag::TypeB
        } else {
            FormTag::Mixed
        }
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_empty() && self.b.is_empty() && matrix::is_identity(&self.a0)
    }

    /// `a₀ = a₀*` and `b_j = a_j*` for every generator, to within `tol` per entry.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        if matrix::max_abs_diff(&self.a0, &self.a0.adjoint()) > tol {
            return false;
        }
        let zero = matrix::zeros(self.size, self.size);
        let gens: std::collections::BTreeSet<u32> =
            self.a.keys().chain(self.b.keys()).copied().collect();
        gens.into_iter().all(|j| {
            let aj = self.a.get(&j).unwrap_or(&zero);
            let bj = self.b.get(&j).unwrap_or(&zero);
            matrix::max_abs_diff(bj, &aj.adjoint()) <= tol
        })
    }

    pub fn max_gen(&self) -> u32 {
        self.a.keys().chain(self.b.keys()).copied().max().unwrap_or(0)
    }

    pub fn to_poly(&self) -> MatPoly {
        let mut terms = vec![(Word::unit(), self.a0.clone())];
        terms.extend(
            self.a
                .iter()
                .map(|(&j, m)| (Word::from_letters(vec![Letter::x(j)]), m.clone())),
        );
        terms.extend(
            self.b
                .iter()
                .map(|(&j, m)| (Word::from_letters(vec![Letter::x_star(j)]), m.clone())),
        );
        MatPoly::from_terms(self.size, self.size, terms).expect("square coefficients")
    }

    /// Applies `f` to every coefficient; `f` must preserve the square shape.
    pub fn map_coeffs(&self, mut f: impl FnMut(&ScalarMatrix) -> ScalarMatrix) -> Self {
        let out = Self {
            size: self.size,
            a0: f(&self.a0),
            a: self.a.iter().map(|(&j, m)| (j, f(m))).collect(),
            b: self.b.iter().map(|(&j, m)| (j, f(m))).collect(),
        };
        debug_assert_eq!(out.a0.shape(), (self.size, self.size));
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let s = Complex64::new(s, 0.0);
        self.map_coeffs(|m| m * s)
    }

    /// Iterates `(Option<letter>, coefficient)`; `None` is the unit term.
    pub fn coefficients(&self) -> impl Iterator<Item = (Option<Letter>, &ScalarMatrix)> {
        std::iter::once((None, &self.a0))
            .chain(self.a.iter().map(|(&j, m)| (Some(Letter::x(j)), m)))
            .chain(self.b.iter().map(|(&j, m)| (Some(Letter::x_star(j)), m)))
    }
}

/// `diag(y₁, …, y_K)` with each `y_k` a [`DegreeOneFactor`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiagonal {
    blocks: Vec<DegreeOneFactor>,
}

impl BlockDiagonal {
    pub fn new(blocks: Vec<DegreeOneFactor>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("block diagonal with no blocks".into()));
        }
        Ok(Self { blocks })
    }

    pub fn single(block: DegreeOneFactor) -> Self {
        Self { blocks: vec![block] }
    }

    pub fn unit(n: usize) -> Self {
        Self::single(DegreeOneFactor::unit(n))
    }

    pub fn blocks(&self) -> &[DegreeOneFactor] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(DegreeOneFactor::size).sum()
    }

    /// At most one block differs from the unit.
    pub fn is_single(&self) -> bool {
        self.blocks.iter().filter(|b| !b.is_unit()).count() <= 1
    }

    pub fn concat(&self, other: &BlockDiagonal) -> BlockDiagonal {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        BlockDiagonal { blocks }
    }

    pub fn map_blocks(&self, f: impl FnMut(&DegreeOneFactor) -> DegreeOneFactor) -> Self {
        Self {
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn max_gen(&self) -> u32 {
        self.blocks.iter().map(DegreeOneFactor::max_gen).max().unwrap_or(0)
    }

    pub fn to_poly(&self) -> MatPoly {
        let mut it = self.blocks.iter();
        let first = it.next().expect("non-empty").to_poly();
        it.fold(first, |acc, b| acc.direct_sum(&b.to_poly()))
    }
}

/// `α₀ D₁ α₁ ⋯ D_m α_m`, `m ≥ 1`, with dimensions chained
/// `α_{ℓ-1}.cols = size(D_ℓ) = α_ℓ.rows`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    alphas: Vec<ScalarMatrix>,
    diags: Vec<BlockDiagonal>,
    out_rows: usize,
    out_cols: usize,
}

impl Factorization {
    pub fn new(alphas: Vec<ScalarMatrix>, diags: Vec<BlockDiagonal>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Verification(msg));
        if diags.is_empty() {
            return bad("factorization needs at least one diagonal factor".into());
        }
        if alphas.len() != diags.len() + 1 {
            return bad(format!(
                "{} scalar factors for {} diagonal factors",
                alphas.len(),
                diags.len()
            ));
        }
        for (l, d) in diags.iter().enumerate() {
            let n = d.size();
            if alphas[l].ncols() != n || alphas[l + 1].nrows() != n {
                return bad(format!(
                    "dimension chain broken at D{}: size {n}, neighbours {:?} / {:?}",
                    l + 1,
                    alphas[l].shape(),
                    alphas[l + 1].shape()
                ));
            }
        }
        let out_rows = alphas[0].nrows();
        let out_cols = alphas[alphas.len() - 1].ncols();
        if out_rows == 0 || out_cols == 0 {
            return bad("empty output shape".into());
        }
        Ok(Self {
            alphas,
            diags,
            out_rows,
            out_cols,
        })
    }

    pub fn m(&self) -> usize {
        self.diags.len()
    }

    pub fn alphas(&self) -> &[ScalarMatrix] {
        &self.alphas
    }

    pub fn diags(&self) -> &[BlockDiagonal] {
        &self.diags
    }

    pub fn out_shape(&self) -> (usize, usize) {
        (self.out_rows, self.out_cols)
    }

    /// `(N_1, …, N_m)`.
    pub fn sizes(&self) -> Vec<usize> {
        self.diags.iter().map(BlockDiagonal::size).collect()
    }

    pub fn max_gen(&self) -> u32 {
        self.diags.iter().map(BlockDiagonal::max_gen).max().unwrap_or(0)
    }

    pub fn alpha_norms(&self) -> Vec<f64> {
        self.alphas.iter().map(matrix::spectral_norm).collect()
    }

    /// `∏ ‖α_ℓ‖`, an upper-bound witness for the factorization norm.
    pub fn cost(&self) -> f64 {
        self.alpha_norms().iter().product()
    }

    pub fn into_parts(self) -> (Vec<ScalarMatrix>, Vec<BlockDiagonal>) {
        (self.alphas, self.diags)
    }

    /// Multiplies the chain out symbolically.
    pub fn expand(&self) -> MatPoly {
        let mut acc = self.diags[0]
            .to_poly()
            .scale(&self.alphas[0], &self.alphas[1])
            .expect("chained dimensions");
        for (d, alpha) in self.diags.iter().zip(&self.alphas[1..]).skip(1) {
            acc = acc
                .matmul(&d.to_poly())
                .and_then(|p| p.scale_right(alpha))
                .expect("chained dimensions");
        }
        acc
    }
}
