use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eval::Representation;
use crate::error::{Error, Result};
use crate::matrix::{self, ScalarMatrix, ONE};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    HaarUnitary,
    UniformPermutation,
    CirculantShift,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::HaarUnitary => "haar_unitary",
            EnsembleKind::UniformPermutation => "uniform_permutation",
            EnsembleKind::CirculantShift => "circulant_shift",
        })
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" | "haar_unitary" => Ok(EnsembleKind::HaarUnitary),
            "perm" | "permutation" | "uniform_permutation" => Ok(EnsembleKind::UniformPermutation),
            "shift" | "circulant" | "circulant_shift" => Ok(EnsembleKind::CirculantShift),
            other => Err(Error::InvalidArgument(format!("unknown ensemble kind `{other}`"))),
        }
    }
}

/// A seeded family of random representations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub gen_count: u32,
    pub seed: u64,
    pub samples: usize,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.samples == 0 {
            return Err(Error::InvalidArgument(
                "ensemble needs dim ≥ 1 and samples ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless per-stream seed derived from `(master, sample, generator)`.
pub fn stream_seed(master: u64, sample: u64, gen: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ sample) ^ gen.rotate_left(32))
}

pub fn stream_rng(master: u64, sample: u64, gen: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, sample, gen))
}

/// Haar-distributed `N × N` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` pushed back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ScalarMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ScalarMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        col *= phase;
    }
    q
}

/// Uniform random permutation matrix via Fisher–Yates.
pub fn random_permutation_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ScalarMatrix {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    matrix::permutation_matrix(&order)
}

/// Cyclic shift `e_i ↦ e_{i+1 mod N}`.
pub fn shift_matrix(n: usize) -> ScalarMatrix {
    let mut s = matrix::zeros(n, n);
    for i in 0..n {
        s[((i + 1) % n, i)] = ONE;
    }
    s
}

/// Every generator `1..=k` mapped to the same cyclic shift on `N` points.
pub fn shift_representation(n: usize, k: u32) -> Representation {
    let s = shift_matrix(n);
    Representation::new_unchecked(
        n,
        (1..=k).map(|j| (j, s.clone())).collect(),
        format!("circulant_shift(N={n})"),
    )
}

/// Sample `index` of the ensemble; each generator uses its own derived stream.
pub fn sample_representation(spec: &EnsembleSpec, index: u64) -> Representation {
    if spec.kind == EnsembleKind::CirculantShift {
        return shift_representation(spec.dim, spec.gen_count);
    }
    let unitaries = (1..=spec.gen_count)
        .map(|j| {
            let mut rng = stream_rng(spec.seed, index, u64::from(j));
            let u = match spec.kind {
                EnsembleKind::HaarUnitary => haar_unitary(spec.dim, &mut rng),
                EnsembleKind::UniformPermutation => random_permutation_matrix(spec.dim, &mut rng),
                EnsembleKind::CirculantShift => unreachable!(),
            };
            (j, u)
        })
        .collect();
    Representation::new_unchecked(
        spec.dim,
        unitaries,
        format!("{}(N={},seed={},sample={index})", spec.kind, spec.dim, spec.seed),
    )
}
