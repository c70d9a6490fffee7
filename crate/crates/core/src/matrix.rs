//! Dense complex matrix helpers shared by every module.
//!
//! Scalar coefficients are plain `nalgebra` dynamic matrices; this module only
//! adds the handful of block and tensor constructions the algebra needs.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix with double-precision entries.
pub type ScalarMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn zeros(rows: usize, cols: usize) -> ScalarMatrix {
    ScalarMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> ScalarMatrix {
    ScalarMatrix::identity(n, n)
}

/// Largest entry modulus, `‖A‖_max`.
pub fn max_abs(a: &ScalarMatrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest singular value of a small dense matrix.
pub fn spectral_norm(a: &ScalarMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn is_identity(a: &ScalarMatrix) -> bool {
    a.is_square()
        && a.iter().enumerate().all(|(k, z)| {
            let (i, j) = (k % a.nrows(), k / a.nrows());
            *z == if i == j { ONE } else { ZERO }
        })
}

/// Block-diagonal stacking `diag(a, b)`; blocks may be rectangular.
pub fn block_diag(a: &ScalarMatrix, b: &ScalarMatrix) -> ScalarMatrix {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Horizontal join `[a b]`.
pub fn hcat(a: &ScalarMatrix, b: &ScalarMatrix) -> ScalarMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hcat row mismatch");
    let mut out = zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Vertical join `[a; b]`.
pub fn vcat(a: &ScalarMatrix, b: &ScalarMatrix) -> ScalarMatrix {
    assert_eq!(a.ncols(), b.ncols(), "vcat column mismatch");
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Kronecker product `a ⊗ b`, indexed so that `(a ⊗ b)[(i·p + r, j·q + c)] = a[(i,j)]·b[(r,c)]`.
pub fn kron(a: &ScalarMatrix, b: &ScalarMatrix) -> ScalarMatrix {
    let (p, q) = b.shape();
    let mut out = zeros(a.nrows() * p, a.ncols() * q);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            let mut blk = out.view_mut((i * p, j * q), (p, q));
            blk.zip_apply(b, |o, x| *o = s * x);
        }
    }
    out
}

/// Adds `a ⊗ b` into `out` without materialising the product.
pub fn kron_add_into(out: &mut ScalarMatrix, a: &ScalarMatrix, b: &ScalarMatrix) {
    let (p, q) = b.shape();
    debug_assert_eq!(out.shape(), (a.nrows() * p, a.ncols() * q));
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            let mut blk = out.view_mut((i * p, j * q), (p, q));
            blk.zip_apply(b, |o, x| *o += s * x);
        }
    }
}

/// `a ⊗ I_n`.
pub fn kron_identity(a: &ScalarMatrix, n: usize) -> ScalarMatrix {
    let mut out = zeros(a.nrows() * n, a.ncols() * n);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let s = a[(i, j)];
            for k in 0..n {
                out[(i * n + k, j * n + k)] = s;
            }
        }
    }
    out
}

/// Column permutation matrix `P` with `(P v)[k] = v[order[k]]`.
pub fn permutation_matrix(order: &[usize]) -> ScalarMatrix {
    let n = order.len();
    let mut p = zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        p[(k, src)] = ONE;
    }
    p
}

/// Max-entry distance between two matrices of equal shape.
pub fn max_abs_diff(a: &ScalarMatrix, b: &ScalarMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}
