//! Concrete unitary representations, polynomial evaluation, operator norms
//! and seeded random ensembles.
//!
//! Every norm here is relative to a chosen finite-dimensional representation
//! (or an ensemble of them); [`NormEstimate`] carries that provenance.

mod eval;
mod norm;
mod sampling;

pub use eval::{eval, eval_block_diagonal, eval_factor, eval_factorization, Representation};
pub use norm::{
    full_svd_norm, operator_norm, power_iteration_norm, NormEstimate, NormMethod,
    POWER_ITERATION_CAP, POWER_ITERATION_TOL, SVD_MAX_DIM,
};
pub use sampling::{
    haar_unitary, random_permutation_matrix, sample_representation, shift_matrix,
    shift_representation, stream_rng, stream_seed, EnsembleKind, EnsembleSpec,
};

use rayon::prelude::*;

use crate::error::Result;
use crate::factorizer::DegreeOneFactor;
use crate::matrix::{max_abs, spectral_norm};
use crate::ncpoly::MatPoly;

/// Order statistics of operator norms over an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSummary {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub norms: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

impl NormSummary {
    pub fn from_norms(kind: EnsembleKind, dim: usize, norms: Vec<f64>) -> Self {
        let max = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = norms.iter().sum::<f64>() / norms.len() as f64;
        Self {
            kind,
            dim,
            median: median(&norms),
            norms,
            max,
            mean,
        }
    }

    /// CSV with columns `kind,N,sample_index,norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,N,sample_index,norm\n");
        for (i, v) in self.norms.iter().enumerate() {
            out.push_str(&format!("{},{},{},{:.16e}\n", self.kind, self.dim, i, v));
        }
        out
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Operator norm of `p` under each representation drawn from `spec`.
///
/// Samples are evaluated in parallel; the result is ordered by sample index
/// and does not depend on the thread count.
pub fn proxy_norm(p: &MatPoly, spec: &EnsembleSpec) -> Result<NormSummary> {
    spec.validate()?;
    let norms = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let rep = sample_representation(spec, i as u64);
            let m = eval(p, &rep)?;
            Ok(operator_norm(&m)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NormSummary::from_norms(spec.kind, spec.dim, norms))
}

/// `‖eval_factor(y, rep)‖`. A block with a single nonzero coefficient `c`
/// is `c ⊗ U` with `U` unitary, so its norm is `‖c‖` and no large SVD is
/// needed.
pub fn factor_norm(y: &DegreeOneFactor, rep: &Representation) -> Result<f64> {
    let mut live = y.coefficients().filter(|(_, c)| max_abs(c) > 0.0);
    match (live.next(), live.next()) {
        (None, _) => Ok(0.0),
        (Some((l, c)), None) => {
            if let Some(l) = l {
                rep.generator(l.gen())?;
            }
            Ok(spectral_norm(c))
        }
        _ => Ok(operator_norm(&eval_factor(y, rep)?)?.value),
    }
}
