//! Norm transfer over random unitary ensembles: factor once, substitute
//! sampled unitaries into each diagonal factor, and compare
//! `∏‖α_ℓ‖·∏‖D_ℓ⁽ᴺ⁾‖` with the direct norm `‖x⁽ᴺ⁾‖`.

use rayon::prelude::*;

use crate::corpus::{random_poly_with, PolyShape};
use crate::error::{Error, Result};
use crate::factorizer::{factor, hermitize_factorization, Factorization};
use crate::matrix::max_abs_diff;
use crate::ncpoly::{Letter, MatPoly, Word};
use crate::repnorm::{eval, eval_factor, factor_norm, median, operator_norm, sample_representation, stream_rng, stream_seed, EnsembleKind, EnsembleSpec};

/// Slack allowed in the per-sample submultiplicative bound.
pub const BOUND_TOL: f64 = 1e-7;
/// Hermiticity tolerance for substituted self-adjoint factors.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct TransferConfig {
    pub polynomial: MatPoly,
    pub kind: EnsembleKind,
    pub sizes: Vec<usize>,
    pub samples_per_size: usize,
    pub seed: u64,
    pub self_adjoint: bool,
    /// Slack for the probability variant.
    pub epsilon: Option<f64>,
    /// Per-factor references for the probability variant. Defaults to the
    /// median factor norm at the largest size.
    pub factor_references: Option<Vec<f64>>,
    /// Reference for the polynomial itself. Defaults to `cost · ∏ references`.
    pub poly_reference: Option<f64>,
}

impl TransferConfig {
    pub fn new(polynomial: MatPoly, kind: EnsembleKind, sizes: Vec<usize>, samples_per_size: usize, seed: u64) -> Self {
        Self {
            polynomial,
            kind,
            sizes,
            samples_per_size,
            seed,
            self_adjoint: false,
            epsilon: None,
            factor_references: None,
            poly_reference: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes[0] == 0 || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("sizes must be positive and strictly increasing".into()));
        }
        if self.samples_per_size == 0 {
            return Err(Error::InvalidArgument("samples_per_size must be at least 1".into()));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(Error::InvalidArgument("epsilon must be positive".into()));
            }
        }
        Ok(())
    }

    /// Ensemble used at size `n`; the seed is mixed with `n` so sizes draw
    /// independent streams.
    pub fn ensemble(&self, n: usize) -> EnsembleSpec {
        EnsembleSpec {
            kind: self.kind,
            dim: n,
            gen_count: self.polynomial.max_gen().max(1),
            seed: stream_seed(self.seed, n as u64, u64::MAX),
            samples: self.samples_per_size,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferSample {
    pub n: usize,
    pub sample: usize,
    pub direct_norm: f64,
    pub factor_norms: Vec<f64>,
    pub bound: f64,
    pub exceed: bool,
}

impl TransferSample {
    pub fn max_factor_norm(&self) -> f64 {
        self.factor_norms.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Fraction of samples with some factor norm above its reference + ε.
    pub factor_exceed_fraction: Option<f64>,
    /// Fraction of samples with direct norm above the polynomial reference + ε.
    pub poly_exceed_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub kind: EnsembleKind,
    pub m: usize,
    pub cost: f64,
    pub self_adjoint: bool,
    pub samples: Vec<TransferSample>,
    pub per_size: Vec<SizeSummary>,
    pub factor_references: Option<Vec<f64>>,
    pub poly_reference: Option<f64>,
    /// Where the references came from: `user` or `largest-N median`.
    pub reference_label: Option<String>,
}

impl TransferReport {
    /// CSV with columns `N,sample,direct_norm,bound,max_factor_norm,exceed_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,sample,direct_norm,bound,max_factor_norm,exceed_flag\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{}\n",
                s.n,
                s.sample,
                s.direct_norm,
                s.bound,
                s.max_factor_norm(),
                u8::from(s.exceed)
            ));
        }
        out
    }

    /// CSV with columns `N,max,mean,median,factor_exceed_fraction,poly_exceed_fraction`;
    /// fractions are empty outside the probability variant.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("N,max,mean,median,factor_exceed_fraction,poly_exceed_fraction\n");
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.16e}"));
        for s in &self.per_size {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{},{}\n",
                s.n,
                s.max,
                s.mean,
                s.median,
                opt(s.factor_exceed_fraction),
                opt(s.poly_exceed_fraction)
            ));
        }
        out
    }
}

fn check_hermitian(a: &crate::matrix::ScalarMatrix, what: &str) -> Result<()> {
    let err = max_abs_diff(a, &a.adjoint());
    if err > HERMITIAN_TOL {
        return Err(Error::Verification(format!("{what} is not Hermitian (error {err:e})")));
    }
    Ok(())
}

fn sample_all(cfg: &TransferConfig, f: &Factorization, hermitian: bool) -> Result<Vec<TransferSample>> {
    let cost = f.cost();
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.samples_per_size).map(move |i| (n, i)))
        .collect();
    jobs.par_iter()
        .map(|&(n, i)| {
            let rep = sample_representation(&cfg.ensemble(n), i as u64);
            let direct_norm = operator_norm(&eval(&cfg.polynomial, &rep)?)?.value;
            let mut factor_norms = Vec::with_capacity(f.m());
            for (l, d) in f.diags().iter().enumerate() {
                let mut best = 0.0_f64;
                for y in d.blocks() {
                    let norm = if hermitian {
                        let a = eval_factor(y, &rep)?;
                        check_hermitian(&a, &format!("factor {} at N={n}, sample {i}", l + 1))?;
                        operator_norm(&a)?.value
                    } else {
                        factor_norm(y, &rep)?
                    };
                    best = best.max(norm);
                }
                factor_norms.push(best);
            }
            let bound = cost * factor_norms.iter().product::<f64>();
            if direct_norm > bound + BOUND_TOL {
                return Err(Error::Verification(format!(
                    "bound violated at N={n}, sample {i}: direct {direct_norm:e} > bound {bound:e}"
                )));
            }
            Ok(TransferSample {
                n,
                sample: i,
                direct_norm,
                factor_norms,
                bound,
                exceed: false,
            })
        })
        .collect()
}

fn summarize(cfg: &TransferConfig, samples: &[TransferSample]) -> Vec<SizeSummary> {
    cfg.sizes
        .iter()
        .map(|&n| {
            let norms: Vec<f64> = samples.iter().filter(|s| s.n == n).map(|s| s.direct_norm).collect();
            SizeSummary {
                n,
                max: norms.iter().copied().fold(0.0, f64::max),
                mean: norms.iter().sum::<f64>() / norms.len() as f64,
                median: median(&norms),
                factor_exceed_fraction: None,
                poly_exceed_fraction: None,
            }
        })
        .collect()
}

fn run_with(cfg: &TransferConfig, f: &Factorization, hermitian: bool) -> Result<TransferReport> {
    let samples = sample_all(cfg, f, hermitian)?;
    let per_size = summarize(cfg, &samples);
    Ok(TransferReport {
        kind: cfg.kind,
        m: f.m(),
        cost: f.cost(),
        self_adjoint: hermitian,
        samples,
        per_size,
        factor_references: None,
        poly_reference: None,
        reference_label: None,
    })
}

/// Factors once and checks `direct ≤ bound + BOUND_TOL` for every sample.
/// Dispatches to [`run_transfer_sa`] when `cfg.self_adjoint` is set.
pub fn run_transfer(cfg: &TransferConfig) -> Result<TransferReport> {
    cfg.validate()?;
    if cfg.self_adjoint {
        return run_transfer_sa(cfg);
    }
    run_with(cfg, &factor(&cfg.polynomial), false)
}

/// Like [`run_transfer`] with every block hermitized and its bracket folded
/// into the neighbouring alphas; each substituted block is checked Hermitian.
pub fn run_transfer_sa(cfg: &TransferConfig) -> Result<TransferReport> {
    cfg.validate()?;
    let f = hermitize_factorization(&factor(&cfg.polynomial));
    run_with(cfg, &f, true)
}

/// Exceedance frequencies per size against per-factor references + ε and the
/// polynomial reference + ε. `exceed` on each sample marks the polynomial
/// exceedance.
pub fn run_probability_variant(cfg: &TransferConfig) -> Result<TransferReport> {
    cfg.validate()?;
    let eps = cfg
        .epsilon
        .ok_or_else(|| Error::InvalidArgument("probability variant needs epsilon".into()))?;
    let f = if cfg.self_adjoint {
        hermitize_factorization(&factor(&cfg.polynomial))
    } else {
        factor(&cfg.polynomial)
    };
    let mut report = run_with(cfg, &f, cfg.self_adjoint)?;

    let (refs, label) = match &cfg.factor_references {
        Some(r) if r.len() == f.m() => (r.clone(), "user"),
        Some(r) => {
            return Err(Error::InvalidArgument(format!(
                "expected {} factor references, got {}",
                f.m(),
                r.len()
            )))
        }
        None => {
            let largest = *cfg.sizes.last().expect("validated");
            let refs = (0..f.m())
                .map(|l| {
                    let v: Vec<f64> = report
                        .samples
                        .iter()
                        .filter(|s| s.n == largest)
                        .map(|s| s.factor_norms[l])
                        .collect();
                    median(&v)
                })
                .collect();
            (refs, "largest-N median")
        }
    };
    let poly_ref = cfg
        .poly_reference
        .unwrap_or_else(|| f.cost() * refs.iter().product::<f64>());

    let mut factor_flags = Vec::with_capacity(report.samples.len());
    for s in &mut report.samples {
        s.exceed = s.direct_norm > poly_ref + eps;
        factor_flags.push(s.factor_norms.iter().zip(&refs).any(|(v, r)| *v > r + eps));
    }
    for summary in &mut report.per_size {
        let idx: Vec<usize> = (0..report.samples.len()).filter(|&i| report.samples[i].n == summary.n).collect();
        let count = idx.len() as f64;
        summary.factor_exceed_fraction = Some(idx.iter().filter(|&&i| factor_flags[i]).count() as f64 / count);
        summary.poly_exceed_fraction = Some(idx.iter().filter(|&&i| report.samples[i].exceed).count() as f64 / count);
    }
    report.factor_references = Some(refs);
    report.poly_reference = Some(poly_ref);
    report.reference_label = Some(if cfg.poly_reference.is_some() { "user".into() } else { label.into() });
    Ok(report)
}

/// Seed of the random polynomial in [`shipped_polynomials`].
pub const SHIPPED_SEED: u64 = 1_100;

/// Polynomials run by the shipped transfer configurations: `x₁ + x₂`,
/// `Σ_j (x_j + x_j*)` over two generators, and a seeded random `2 × 2`
/// polynomial of degree at most 3.
pub fn shipped_polynomials() -> Vec<(&'static str, MatPoly)> {
    let x = |j| MatPoly::monomial(crate::matrix::identity(1), Word::from_letters(vec![Letter::x(j)]));
    let sum = x(1).add(&x(2)).expect("1x1");
    let sym = sum.add(&sum.adjoint()).expect("1x1");
    let shape = PolyShape {
        max_degree: 3,
        max_terms: 4,
        ..PolyShape::default()
    };
    let random = random_poly_with(2, 2, &shape, &mut stream_rng(SHIPPED_SEED, 0, 0));
    vec![("sum", sum), ("symmetric_sum", sym), ("random_2x2", random)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ScalarMatrix;
    use crate::ncpoly::{Letter, Word};
    use crate::Complex64;

    fn one(c: f64) -> ScalarMatrix {
        ScalarMatrix::from_element(1, 1, Complex64::new(c, 0.0))
    }

    fn sum_of_generators() -> MatPoly {
        MatPoly::monomial(one(1.0), Word::from_letters(vec![Letter::x(1)]))
            .add(&MatPoly::monomial(one(1.0), Word::from_letters(vec![Letter::x(2)])))
            .unwrap()
    }

    #[test]
    fn unitary_monomial_is_norm_exact() {
        let p = MatPoly::monomial(one(0.5), Word::from_letters(vec![Letter::x(1), Letter::x(2)]));
        for kind in [EnsembleKind::HaarUnitary, EnsembleKind::UniformPermutation] {
            let r = run_transfer(&TransferConfig::new(p.clone(), kind, vec![4, 9], 3, 1)).unwrap();
            for s in &r.samples {
                assert!((s.direct_norm - 0.5).abs() < 1e-9);
                assert!((s.bound - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn degree_one_single_factor() {
        let p = MatPoly::constant(one(0.3))
            .add(&MatPoly::monomial(one(0.7), Word::from_letters(vec![Letter::x(1)])))
            .unwrap();
        let r = run_transfer(&TransferConfig::new(p, EnsembleKind::HaarUnitary, vec![8], 4, 2)).unwrap();
        assert_eq!(r.m, 1);
        for s in &r.samples {
            assert!(s.direct_norm <= s.bound + BOUND_TOL);
        }
    }

    #[test]
    fn self_adjoint_mode_matches_direct_norms() {
        let p = sum_of_generators();
        let mut cfg = TransferConfig::new(p, EnsembleKind::HaarUnitary, vec![10, 20], 3, 7);
        let plain = run_transfer(&cfg).unwrap();
        cfg.self_adjoint = true;
        let sa = run_transfer(&cfg).unwrap();
        assert!(sa.self_adjoint);
        for (a, b) in plain.samples.iter().zip(&sa.samples) {
            assert!((a.direct_norm - b.direct_norm).abs() < 1e-9);
            assert!(b.bound <= a.bound * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn generator_factor_never_exceeds() {
        let p = MatPoly::monomial(one(1.0), Word::from_letters(vec![Letter::x(1)]));
        let mut cfg = TransferConfig::new(p, EnsembleKind::HaarUnitary, vec![5, 10], 4, 3);
        cfg.epsilon = Some(1.0);
        cfg.factor_references = Some(vec![1.0]);
        let r = run_probability_variant(&cfg).unwrap();
        for s in &r.per_size {
            assert_eq!(s.factor_exceed_fraction, Some(0.0));
            assert_eq!(s.poly_exceed_fraction, Some(0.0));
        }
        assert_eq!(r.reference_label.as_deref(), Some("user"));
    }

    #[test]
    fn bad_reference_count_is_rejected() {
        let mut cfg = TransferConfig::new(sum_of_generators(), EnsembleKind::HaarUnitary, vec![5], 2, 3);
        cfg.epsilon = Some(0.1);
        cfg.factor_references = Some(vec![1.0, 1.0]);
        assert!(matches!(run_probability_variant(&cfg), Err(Error::InvalidArgument(_))));
        cfg.factor_references = None;
        cfg.epsilon = None;
        assert!(run_probability_variant(&cfg).is_err());
    }

    #[test]
    fn config_validation() {
        let p = sum_of_generators();
        assert!(TransferConfig::new(p.clone(), EnsembleKind::HaarUnitary, vec![5, 5], 1, 0).validate().is_err());
        assert!(TransferConfig::new(p, EnsembleKind::HaarUnitary, vec![5], 0, 0).validate().is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = TransferConfig::new(sum_of_generators(), EnsembleKind::UniformPermutation, vec![6, 12], 2, 9);
        let a = run_transfer(&cfg).unwrap().to_csv();
        let b = run_transfer(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("N,sample,direct_norm,bound,max_factor_norm,exceed_flag\n"));
    }
}
