//! Expansion-preserving rewrites of a [`Factorization`].

use std::collections::BTreeMap;

use super::types::{BlockDiagonal, DegreeOneFactor, Factorization};
use crate::error::{Error, Result};
use crate::matrix::{self, ScalarMatrix};
use crate::ncpoly::MatPoly;

/// Inserts unit diagonal factors and identity scalars just before `α_m`
/// until the length is `target_m`. The inserted factors have the size of
/// `D_m`, so each summand keeps its own rows through the padding.
pub fn equalize_length(f: &Factorization, target_m: usize) -> Result<Factorization> {
    if target_m < f.m() {
        return Err(Error::InvalidArgument(format!(
            "cannot shorten a length-{} factorization to {target_m}",
            f.m()
        )));
    }
    let (mut alphas, mut diags) = f.clone().into_parts();
    let last = alphas.pop().expect("m ≥ 1");
    let size = last.nrows();
    for _ in f.m()..target_m {
        diags.push(BlockDiagonal::unit(size));
        alphas.push(matrix::identity(size));
    }
    alphas.push(last);
    Factorization::new(alphas, diags)
}

/// Replaces every block whose coefficients are all diagonal matrices by its
/// `1 × 1` diagonal entries. Such a block is already the direct sum of those
/// entries, so the alphas do not change.
pub fn split_scalar_blocks(f: &Factorization) -> Factorization {
    let (alphas, diags) = f.clone().into_parts();
    let diags = diags
        .iter()
        .map(|d| {
            let mut blocks = Vec::with_capacity(d.size());
            for y in d.blocks() {
                let diagonal = y.coefficients().all(|(_, c)| {
                    (0..c.nrows()).all(|i| (0..c.ncols()).all(|j| i == j || c[(i, j)] == matrix::ZERO))
                });
                if !diagonal || y.size() == 1 {
                    blocks.push(y.clone());
                    continue;
                }
                for i in 0..y.size() {
                    let entry = |c: &ScalarMatrix| ScalarMatrix::from_element(1, 1, c[(i, i)]);
                    let pick = |m: &BTreeMap<u32, ScalarMatrix>| -> BTreeMap<u32, ScalarMatrix> {
                        m.iter()
                            .filter(|(_, c)| c[(i, i)] != matrix::ZERO)
                            .map(|(&j, c)| (j, entry(c)))
                            .collect()
                    };
                    blocks.push(
                        DegreeOneFactor::new(entry(y.a0()), pick(y.a()), pick(y.b())).expect("1x1 coefficients"),
                    );
                }
            }
            BlockDiagonal::new(blocks).expect("non-empty")
        })
        .collect();
    Factorization::new(alphas, diags).expect("sizes unchanged")
}

/// Splits every diagonal factor with several non-unit blocks into a product of
/// factors `diag(y_k, 1, …, 1)`, one per non-unit block, with permutation
/// matrices absorbed into the neighbouring scalar factors to move `y_k` into
/// the leading position. The remaining blocks are `1 × 1` units.
pub fn single_blockify(f: &Factorization) -> Factorization {
    let (old_alphas, old_diags) = f.clone().into_parts();
    let mut alphas = vec![old_alphas[0].clone()];
    let mut diags = Vec::new();

    for (d, next_alpha) in old_diags.iter().zip(&old_alphas[1..]) {
        if d.is_single() {
            diags.push(d.clone());
            alphas.push(next_alpha.clone());
            continue;
        }
        let total = d.size();
        let mut offset = 0;
        let mut pieces: Vec<(ScalarMatrix, BlockDiagonal)> = Vec::new();
        for block in d.blocks() {
            let s = block.size();
            if !block.is_unit() {
                let order: Vec<usize> = (offset..offset + s)
                    .chain((0..total).filter(|&i| i < offset || i >= offset + s))
                    .collect();
                let perm = matrix::permutation_matrix(&order);
                let mut blocks = vec![block.clone()];
                blocks.extend((0..total - s).map(|_| DegreeOneFactor::unit(1)));
                pieces.push((perm, BlockDiagonal::new(blocks).expect("non-empty")));
            }
            offset += s;
        }
        // D = Π P_kᵀ F_k P_k, so the chain reads
        // α_prev P_1ᵀ F_1 (P_1 P_2ᵀ) F_2 ⋯ F_K (P_K α_next).
        let last = alphas.last_mut().expect("α₀ present");
        *last = &*last * pieces[0].0.transpose();
        for k in 0..pieces.len() {
            diags.push(pieces[k].1.clone());
            let right = match pieces.get(k + 1) {
                Some((p_next, _)) => &pieces[k].0 * p_next.transpose(),
                None => &pieces[k].0 * next_alpha,
            };
            alphas.push(right);
        }
    }
    Factorization::new(alphas, diags).expect("blockify keeps the chain consistent")
}

/// Pads every diagonal factor with a zero block up to the largest size, so
/// all interior scalar factors become square and only `α₀`, `α_m` may stay
/// rectangular.
pub fn equalize_sizes(f: &Factorization) -> Factorization {
    let sizes = f.sizes();
    let target = sizes.iter().copied().max().unwrap_or(0);
    let m = f.m();
    let (old_alphas, old_diags) = f.clone().into_parts();

    let diags: Vec<BlockDiagonal> = old_diags
        .iter()
        .map(|d| {
            let pad = target - d.size();
            if pad == 0 {
                d.clone()
            } else {
                d.concat(&BlockDiagonal::single(DegreeOneFactor::zero(pad)))
            }
        })
        .collect();

    let mut alphas = Vec::with_capacity(m + 1);
    for (l, a) in old_alphas.iter().enumerate() {
        let pad_rows = if l == 0 { 0 } else { target - sizes[l - 1] };
        let pad_cols = if l == m { 0 } else { target - sizes[l] };
        alphas.push(matrix::block_diag(a, &matrix::zeros(pad_rows, pad_cols)));
    }
    Factorization::new(alphas, diags).expect("padding keeps the chain consistent")
}

/// Folds the scalars into the diagonal factors: `P₁ = α₀D₁α₁`, `P_ℓ = D_ℓα_ℓ`.
/// Each `P_ℓ` has degree at most one and `P₁ ⋯ P_m` expands to the same polynomial.
pub fn absorb_scalars(f: &Factorization) -> Vec<MatPoly> {
    let a = f.alphas();
    f.diags()
        .iter()
        .enumerate()
        .map(|(l, d)| {
            let p = d.to_poly();
            if l == 0 {
                p.scale(&a[0], &a[1])
            } else {
                p.scale_right(&a[l + 1])
            }
            .expect("chained dimensions")
        })
        .collect()
}

/// Symbolic product of a chain of polynomials.
pub fn multiply_chain(factors: &[MatPoly]) -> Result<MatPoly> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty factor chain".into()))?;
    rest.iter().try_fold(first.clone(), |acc, p| acc.matmul(p))
}

/// `ĥ = (0 y; y* 0)`, a self-adjoint degree-1 factor of twice the size.
pub fn hermitize(y: &DegreeOneFactor) -> DegreeOneFactor {
    let n = y.size();
    let z = matrix::zeros(n, n);
    let anti = |top: &ScalarMatrix, bottom: &ScalarMatrix| {
        let mut m = matrix::zeros(2 * n, 2 * n);
        m.view_mut((0, n), (n, n)).copy_from(top);
        m.view_mut((n, 0), (n, n)).copy_from(bottom);
        m
    };
    let a0 = anti(y.a0(), &y.a0().adjoint());
    let gens: std::collections::BTreeSet<u32> =
        y.a().keys().chain(y.b().keys()).copied().collect();
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for j in gens {
        let aj = y.a().get(&j).unwrap_or(&z);
        let bj = y.b().get(&j).unwrap_or(&z);
        // y* contributes a_j* ⊗ x_j* and b_j* ⊗ x_j.
        a.insert(j, anti(aj, &bj.adjoint()));
        b.insert(j, anti(bj, &aj.adjoint()));
    }
    DegreeOneFactor::new(a0, a, b).expect("square blocks")
}

/// The scalar pair `((I 0), (0; I))` with `(I 0) · ĥ · (0; I) = y`.
pub fn dehermitize_bracket(h: &DegreeOneFactor) -> (ScalarMatrix, ScalarMatrix) {
    let n = h.size() / 2;
    let mut row = matrix::zeros(n, 2 * n);
    row.view_mut((0, 0), (n, n)).copy_from(&matrix::identity(n));
    let mut col = matrix::zeros(2 * n, n);
    col.view_mut((n, 0), (n, n)).copy_from(&matrix::identity(n));
    (row, col)
}

/// Replaces every block by its hermitization and folds the extraction
/// brackets into the adjacent scalar factors. Bracket norms are 1, so the
/// cost is unchanged.
pub fn hermitize_factorization(f: &Factorization) -> Factorization {
    let (mut alphas, old_diags) = f.clone().into_parts();
    let mut diags = Vec::with_capacity(old_diags.len());
    for (l, d) in old_diags.iter().enumerate() {
        let mut rows = matrix::zeros(0, 0);
        let mut cols = matrix::zeros(0, 0);
        let mut blocks = Vec::with_capacity(d.blocks().len());
        for y in d.blocks() {
            let h = hermitize(y);
            let (r, c) = dehermitize_bracket(&h);
            rows = matrix::block_diag(&rows, &r);
            cols = matrix::block_diag(&cols, &c);
            blocks.push(h);
        }
        alphas[l] = &alphas[l] * rows;
        alphas[l + 1] = cols * &alphas[l + 1];
        diags.push(BlockDiagonal::new(blocks).expect("non-empty"));
    }
    Factorization::new(alphas, diags).expect("brackets keep the chain consistent")
}
