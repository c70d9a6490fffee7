use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ScalarMatrix;

/// Largest dimension handled by a dense SVD; above it, power iteration.
pub const SVD_MAX_DIM: usize = 1024;
pub const POWER_ITERATION_TOL: f64 = 1e-9;
pub const POWER_ITERATION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    FullSvd,
    PowerIteration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    pub rel_tol: f64,
    pub representation_label: String,
}

impl NormEstimate {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.representation_label = label.into();
        self
    }
}

/// Largest singular value, by full SVD up to [`SVD_MAX_DIM`] and by power
/// iteration on `A*A` beyond.
pub fn operator_norm(a: &ScalarMatrix) -> Result<NormEstimate> {
    if a.nrows().max(a.ncols()) <= SVD_MAX_DIM {
        Ok(full_svd_norm(a))
    } else {
        power_iteration_norm(a, POWER_ITERATION_TOL, POWER_ITERATION_CAP)
    }
}

pub fn full_svd_norm(a: &ScalarMatrix) -> NormEstimate {
    let value = if a.is_empty() {
        0.0
    } else {
        a.clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0_f64, |acc, &s| acc.max(s))
    };
    NormEstimate {
        value,
        method: NormMethod::FullSvd,
        rel_tol: 1e-12,
        representation_label: String::new(),
    }
}

fn normalized(v: DVector<Complex64>) -> DVector<Complex64> {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Power iteration on `A*A` from the normalized all-ones vector.
///
/// If the start vector lies in the kernel a fixed perturbation is tried,
/// then the heaviest column's basis vector. Stops once successive estimates
/// of `‖A‖` agree to `rel_tol` relative.
pub fn power_iteration_norm(a: &ScalarMatrix, rel_tol: f64, cap: usize) -> Result<NormEstimate> {
    let estimate = |value| NormEstimate {
        value,
        method: NormMethod::PowerIteration,
        rel_tol,
        representation_label: String::new(),
    };
    let n = a.ncols();
    if n == 0 || a.iter().all(|z| z.norm() == 0.0) {
        return Ok(estimate(0.0));
    }

    let starts = [
        DVector::from_element(n, Complex64::new(1.0, 0.0)),
        DVector::from_fn(n, |i, _| {
            Complex64::new(1.0 + (0.618_033_988_75 * (i + 1) as f64).fract(), 0.0)
        }),
        {
            let heaviest = (0..n)
                .max_by(|&i, &j| a.column(i).norm().total_cmp(&a.column(j).norm()))
                .unwrap_or(0);
            let mut e = DVector::zeros(n);
            e[heaviest] = Complex64::new(1.0, 0.0);
            e
        },
    ];
    let mut v = starts
        .into_iter()
        .map(normalized)
        .find(|v| (a * v).norm() > 0.0)
        .expect("heaviest column is non-zero");

    let mut prev = 0.0_f64;
    let mut last_change = f64::INFINITY;
    for _ in 0..cap {
        let av = a * &v;
        let sigma = av.norm();
        let w = a.adjoint() * av;
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(estimate(sigma));
        }
        v = w / Complex64::new(wn, 0.0);
        last_change = (sigma - prev).abs() / sigma;
        if last_change <= rel_tol {
            // ‖A v‖ with v from the last A*A step is the sharper estimate.
            return Ok(estimate((a * &v).norm().max(sigma)));
        }
        prev = sigma;
    }
    Err(Error::NonConvergence {
        iterations: cap,
        last_change,
    })
}
