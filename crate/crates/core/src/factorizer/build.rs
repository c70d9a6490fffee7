use super::rewrite::equalize_length;
use super::types::{BlockDiagonal, DegreeOneFactor, Factorization};
use crate::error::{Error, Result};
use crate::matrix::{self, ScalarMatrix};
use crate::ncpoly::{MatPoly, Word};

/// `coeff ⊗ w` as `coeff · (I⊗l₁) · I · (I⊗l₂) ⋯ (I⊗l_d) · I`.
///
/// The unit word gives `coeff · (I⊗1) · I` with `m = 1`.
pub fn factor_monomial(coeff: &ScalarMatrix, w: &Word) -> Factorization {
    let n = coeff.ncols();
    let diags: Vec<BlockDiagonal> = if w.is_unit() {
        vec![BlockDiagonal::unit(n)]
    } else {
        w.letters()
            .iter()
            .map(|&l| BlockDiagonal::single(DegreeOneFactor::letter(n, l)))
            .collect()
    };
    let mut alphas = Vec::with_capacity(diags.len() + 1);
    alphas.push(coeff.clone());
    alphas.extend((0..diags.len()).map(|_| matrix::identity(n)));
    Factorization::new(alphas, diags).expect("monomial chain is well formed")
}

/// Factorization of the zero `rows × cols` polynomial: `0 · (I⊗1) · I`.
pub fn zero_factorization(rows: usize, cols: usize) -> Factorization {
    Factorization::new(
        vec![matrix::zeros(rows, cols), matrix::identity(cols)],
        vec![BlockDiagonal::unit(cols)],
    )
    .expect("zero chain is well formed")
}

/// `x + y = (1 1) · diag(x, y) · (1; 1)` applied factor by factor.
pub fn combine_sum(f: &Factorization, g: &Factorization) -> Result<Factorization> {
    if f.out_shape() != g.out_shape() {
        return Err(Error::ShapeMismatch {
            op: "combine_sum",
            left: f.out_shape(),
            right: g.out_shape(),
        });
    }
    let m = f.m().max(g.m());
    let f = equalize_length(f, m)?;
    let g = equalize_length(g, m)?;
    let (fa, fd) = (f.alphas(), f.diags());
    let (ga, gd) = (g.alphas(), g.diags());

    let mut alphas = Vec::with_capacity(m + 1);
    alphas.push(matrix::hcat(&fa[0], &ga[0]));
    for l in 1..m {
        alphas.push(matrix::block_diag(&fa[l], &ga[l]));
    }
    alphas.push(matrix::vcat(&fa[m], &ga[m]));
    let diags = fd.iter().zip(gd).map(|(x, y)| x.concat(y)).collect();
    Factorization::new(alphas, diags)
}

/// Folds [`factor_monomial`] over the terms of `p` in canonical order.
pub fn factor(p: &MatPoly) -> Factorization {
    let mut terms = p.terms();
    let Some((w, c)) = terms.next() else {
        return zero_factorization(p.rows(), p.cols());
    };
    terms.fold(factor_monomial(c, w), |acc, (w, c)| {
        combine_sum(&acc, &factor_monomial(c, w)).expect("terms share the polynomial's shape")
    })
}
