//! Heuristic reduction of the factorization cost `∏‖α_ℓ‖` subject to every
//! diagonal factor having proxy norm one.
//!
//! Proxy norms are taken against a fixed reference (one representation or a
//! seeded ensemble, maximised over samples). The two moves are
//! - [`rescale_blocks`]: divide each `D_ℓ` by its proxy norm, push the scalar
//!   into `α_ℓ`, then equalize the `‖α_ℓ‖` geometrically;
//! - [`similarity_descent`]: coordinate descent over block-constant positive
//!   diagonal scalings inserted around each `D_ℓ`.
//!
//! Neither move changes what the factorization expands to. Costs in
//! [`BalanceReport`] are always measured after normalization, i.e. as
//! `∏‖α_ℓ‖ · ∏ proxy‖D_ℓ‖`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factorizer::{absorb_scalars, equalize_length, factor, split_scalar_blocks, BlockDiagonal, DegreeOneFactor, Factorization};
use crate::matrix::{self, ScalarMatrix};
use crate::ncpoly::MatPoly;
use crate::repnorm::{
    eval, factor_norm, operator_norm, sample_representation, EnsembleSpec, Representation,
};
use crate::Complex64;

/// Tolerance for expansion checks after each descent round.
pub const EXPAND_TOL: f64 = 1e-9;

/// What proxy norms are measured against.
#[derive(Clone, Debug)]
pub enum NormReference {
    Ensemble(EnsembleSpec),
    Representation(Representation),
}

#[derive(Clone, Debug)]
pub struct BalanceConfig {
    pub reference: NormReference,
    pub max_rounds: usize,
    pub similarity_search: bool,
    pub tolerance: f64,
}

impl BalanceConfig {
    pub fn new(reference: NormReference) -> Self {
        Self {
            reference,
            max_rounds: 50,
            similarity_search: true,
            tolerance: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::InvalidArgument("max_rounds must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceReport {
    pub initial_cost: f64,
    pub final_cost: f64,
    /// Normalized cost after each completed round, starting with the input.
    pub trajectory: Vec<f64>,
    /// `final_cost / proxy‖x‖ − 1`; infinite for a zero target.
    pub achieved_epsilon: f64,
    pub m: usize,
    pub rounds: usize,
}

impl BalanceReport {
    /// CSV with columns `round,cost`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,cost\n");
        for (i, c) in self.trajectory.iter().enumerate() {
            out.push_str(&format!("{i},{c:.16e}\n"));
        }
        out
    }
}

/// Representation-relative norms, maximised over the reference samples.
#[derive(Clone, Debug)]
pub struct ProxyNorms {
    reps: Vec<Representation>,
}

impl ProxyNorms {
    pub fn new(reference: &NormReference) -> Result<Self> {
        let reps = match reference {
            NormReference::Representation(r) => vec![r.clone()],
            NormReference::Ensemble(spec) => {
                spec.validate()?;
                (0..spec.samples as u64)
                    .into_par_iter()
                    .map(|i| sample_representation(spec, i))
                    .collect()
            }
        };
        Ok(Self { reps })
    }

    /// Ensures every generator up to `max_gen` is assigned.
    fn check_gens(&self, max_gen: u32) -> Result<()> {
        for r in &self.reps {
            for j in 1..=max_gen {
                r.generator(j)?;
            }
        }
        Ok(())
    }

    pub fn representations(&self) -> &[Representation] {
        &self.reps
    }

    pub fn poly(&self, p: &MatPoly) -> Result<f64> {
        self.reps
            .par_iter()
            .map(|r| Ok(operator_norm(&eval(p, r)?)?.value))
            .collect::<Result<Vec<f64>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max))
    }

    pub fn block(&self, y: &DegreeOneFactor) -> Result<f64> {
        self.reps
            .iter()
            .map(|r| factor_norm(y, r))
            .try_fold(0.0_f64, |acc, v: Result<f64>| Ok(acc.max(v?)))
    }

    /// Norms of every block of every diagonal factor, `[ℓ][k]`.
    pub fn blocks_of(&self, f: &Factorization) -> Result<Vec<Vec<f64>>> {
        self.check_gens(f.max_gen())?;
        let flat: Vec<(usize, &DegreeOneFactor)> = f
            .diags()
            .iter()
            .enumerate()
            .flat_map(|(l, d)| d.blocks().iter().map(move |y| (l, y)))
            .collect();
        let norms = flat
            .par_iter()
            .map(|(_, y)| self.block(y))
            .collect::<Result<Vec<f64>>>()?;
        let mut out: Vec<Vec<f64>> = f.diags().iter().map(|_| Vec::new()).collect();
        for ((l, _), v) in flat.iter().zip(norms) {
            out[*l].push(v);
        }
        Ok(out)
    }

    pub fn diag(&self, d: &BlockDiagonal) -> Result<f64> {
        d.blocks()
            .iter()
            .map(|y| self.block(y))
            .try_fold(0.0_f64, |acc, v| Ok(acc.max(v?)))
    }
}

/// `∏‖α_ℓ‖ · ∏ proxy‖D_ℓ‖` given per-block proxy norms.
fn normalized_cost(f: &Factorization, block_norms: &[Vec<f64>]) -> f64 {
    let diag: f64 = block_norms
        .iter()
        .map(|v| v.iter().copied().fold(0.0, f64::max))
        .product();
    f.cost() * diag
}

fn rescale_with(f: &Factorization, block_norms: &[Vec<f64>]) -> Result<Factorization> {
    let (mut alphas, diags) = f.clone().into_parts();
    let mut new_diags = Vec::with_capacity(diags.len());
    for (l, (d, norms)) in diags.iter().zip(block_norms).enumerate() {
        let s = norms.iter().copied().fold(0.0, f64::max);
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::DegenerateFactor { index: l + 1 });
        }
        new_diags.push(d.map_blocks(|y| y.scaled(1.0 / s)));
        alphas[l + 1] *= Complex64::new(s, 0.0);
    }
    let norms: Vec<f64> = alphas.iter().map(matrix::spectral_norm).collect();
    if norms.iter().all(|&c| c > 0.0) {
        let log_mean = norms.iter().map(|c| c.ln()).sum::<f64>() / norms.len() as f64;
        for (a, c) in alphas.iter_mut().zip(&norms) {
            *a *= Complex64::new(log_mean.exp() / c, 0.0);
        }
    }
    Factorization::new(alphas, new_diags)
}

/// Normalizes every `D_ℓ` to proxy norm one and equalizes the `‖α_ℓ‖`.
pub fn rescale_blocks(f: &Factorization, cfg: &BalanceConfig) -> Result<Factorization> {
    cfg.validate()?;
    let proxy = ProxyNorms::new(&cfg.reference)?;
    let norms = proxy.blocks_of(f)?;
    rescale_with(f, &norms)
}

/// Log-scalings inserted around each diagonal factor: `p[ℓ][k]` on its left,
/// `q[ℓ][k]` on its right, constant on block `k`.
struct Scalings {
    p: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
}

#[derive(Clone, Copy)]
enum Direction {
    Left(usize, usize),
    Right(usize, usize),
    Through(usize, usize),
    /// Block `k` of every diagonal factor at once; requires equal partitions.
    Path(usize),
}

struct Descent<'a> {
    f: &'a Factorization,
    block_sizes: Vec<Vec<usize>>,
    block_norms: &'a [Vec<f64>],
}

impl<'a> Descent<'a> {
    fn expanded(&self, v: &[f64], l: usize) -> Vec<f64> {
        self.block_sizes[l]
            .iter()
            .zip(v)
            .flat_map(|(&s, &x)| std::iter::repeat_n(x, s))
            .collect()
    }

    fn alphas(&self, s: &Scalings) -> Vec<ScalarMatrix> {
        let m = self.f.m();
        self.f
            .alphas()
            .iter()
            .enumerate()
            .map(|(l, a)| {
                let mut a = a.clone();
                if l >= 1 {
                    for (i, x) in self.expanded(&s.q[l - 1], l - 1).into_iter().enumerate() {
                        a.row_mut(i).scale_mut((-x).exp());
                    }
                }
                if l < m {
                    for (j, x) in self.expanded(&s.p[l], l).into_iter().enumerate() {
                        a.column_mut(j).scale_mut(x.exp());
                    }
                }
                a
            })
            .collect()
    }

    fn objective(&self, s: &Scalings) -> f64 {
        let alpha_term: f64 = self
            .alphas(s)
            .iter()
            .map(|a| matrix::spectral_norm(a).ln())
            .sum();
        let diag_term: f64 = (0..self.f.m())
            .map(|l| {
                self.block_norms[l]
                    .iter()
                    .enumerate()
                    .map(|(k, &n)| n * (s.q[l][k] - s.p[l][k]).exp())
                    .fold(0.0, f64::max)
                    .ln()
            })
            .sum();
        alpha_term + diag_term
    }

    fn shift(&self, s: &mut Scalings, d: Direction, t: f64) {
        match d {
            Direction::Left(l, k) => s.p[l][k] += t,
            Direction::Right(l, k) => s.q[l][k] += t,
            Direction::Through(l, k) => {
                s.p[l][k] += t;
                s.q[l][k] += t;
            }
            Direction::Path(k) => {
                for l in 0..self.f.m() {
                    s.p[l][k] += t;
                    s.q[l][k] += t;
                }
            }
        }
    }

    fn materialize(&self, s: &Scalings) -> Factorization {
        let alphas = self.alphas(s);
        let diags = self
            .f
            .diags()
            .iter()
            .enumerate()
            .map(|(l, d)| {
                let mut k = 0;
                d.map_blocks(|y| {
                    let out = y.scaled((s.q[l][k] - s.p[l][k]).exp());
                    k += 1;
                    out
                })
            })
            .collect();
        Factorization::new(alphas, diags).expect("scalings keep dimensions")
    }

    /// Path moves first, then per-block moves.
    fn directions(&self) -> Vec<Direction> {
        let mut dirs = Vec::new();
        let first = &self.block_sizes[0];
        if self.f.m() > 1 && self.block_sizes.iter().all(|b| b == first) {
            dirs.extend((0..first.len()).map(Direction::Path));
        }
        for (l, sizes) in self.block_sizes.iter().enumerate() {
            for k in 0..sizes.len() {
                dirs.push(Direction::Through(l, k));
                dirs.push(Direction::Left(l, k));
                dirs.push(Direction::Right(l, k));
            }
        }
        dirs
    }
}

const LINE_SEARCH_RADIUS: f64 = 3.0;
const LINE_SEARCH_STEPS: usize = 40;

/// Golden-section search of `g` on `[-r, r]`; returns `(t, g(t))` only if
/// it beats `g(0)`.
fn line_search(mut g: impl FnMut(f64) -> f64, g0: f64) -> Option<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-LINE_SEARCH_RADIUS, LINE_SEARCH_RADIUS);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..LINE_SEARCH_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = g(x2);
        }
    }
    let (t, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    (v < g0 - 1e-15).then_some((t, v))
}

/// Coordinate descent over positive block-constant diagonal scalings around
/// each `D_ℓ`, minimising the normalized cost. Blocks with diagonal
/// coefficients are first split into `1 × 1` blocks, so the scalings act
/// per entry there. Returns the normalized,
/// geometrically balanced result.
pub fn similarity_descent(f: &Factorization, cfg: &BalanceConfig) -> Result<(Factorization, BalanceReport)> {
    cfg.validate()?;
    let proxy = ProxyNorms::new(&cfg.reference)?;
    let cfg = BalanceConfig {
        similarity_search: true,
        ..cfg.clone()
    };
    run_descent(f, &cfg, &proxy)
}

fn run_descent(f: &Factorization, cfg: &BalanceConfig, proxy: &ProxyNorms) -> Result<(Factorization, BalanceReport)> {
    let target = f.expand();
    let split = split_scalar_blocks(f);
    let f = &split;
    let block_norms = proxy.blocks_of(f)?;
    let initial_cost = normalized_cost(f, &block_norms);
    let mut trajectory = vec![initial_cost];
    let mut rounds = 0;

    let mut current = f.clone();
    if cfg.similarity_search && initial_cost > 0.0 {
        let descent = Descent {
            f,
            block_sizes: f
                .diags()
                .iter()
                .map(|d| d.blocks().iter().map(DegreeOneFactor::size).collect())
                .collect(),
            block_norms: &block_norms,
        };
        let mut s = Scalings {
            p: block_norms.iter().map(|v| vec![0.0; v.len()]).collect(),
            q: block_norms.iter().map(|v| vec![0.0; v.len()]).collect(),
        };
        let dirs = descent.directions();
        let mut value = descent.objective(&s);
        while rounds < cfg.max_rounds {
            rounds += 1;
            let start = value;
            for &d in &dirs {
                let g = |t: f64| {
                    let mut trial = Scalings {
                        p: s.p.clone(),
                        q: s.q.clone(),
                    };
                    descent.shift(&mut trial, d, t);
                    descent.objective(&trial)
                };
                if let Some((t, v)) = line_search(g, value) {
                    descent.shift(&mut s, d, t);
                    value = v;
                }
            }
            let candidate = descent.materialize(&s);
            let drift = candidate.expand().max_coeff_diff(&target)?;
            if drift > EXPAND_TOL {
                return Err(Error::Verification(format!(
                    "descent round {rounds} moved the expansion by {drift:e}"
                )));
            }
            current = candidate;
            trajectory.push(value.exp());
            if start - value < cfg.tolerance {
                break;
            }
        }
    }

    let scaled_norms = proxy.blocks_of(&current)?;
    let balanced = rescale_with(&current, &scaled_norms)?;
    let final_cost = balanced.cost();
    let target_norm = proxy.poly(&target)?;
    let achieved_epsilon = if target_norm > 0.0 {
        final_cost / target_norm - 1.0
    } else {
        f64::INFINITY
    };
    let report = BalanceReport {
        initial_cost,
        final_cost,
        trajectory,
        achieved_epsilon,
        m: balanced.m(),
        rounds,
    };
    Ok((balanced, report))
}

/// [`similarity_descent`] when `cfg.similarity_search` is set, otherwise just
/// [`rescale_blocks`] with a one-entry report.
pub fn balance(f: &Factorization, cfg: &BalanceConfig) -> Result<(Factorization, BalanceReport)> {
    cfg.validate()?;
    let proxy = ProxyNorms::new(&cfg.reference)?;
    run_descent(f, cfg, &proxy)
}

/// One row of the `probe-m` table.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub instance: usize,
    pub d: usize,
    pub n: usize,
    pub eps: f64,
    /// Smallest length tried at which every `P_ℓ` had proxy norm < 1.
    pub achieved_m: Option<usize>,
    /// Balanced `∏‖α_ℓ‖` at that length (or at the best length on failure).
    pub achieved_cost: f64,
    /// `∏ proxy‖P_ℓ‖` of the absorbed chain.
    pub chain_product: f64,
    /// `max_ℓ proxy‖P_ℓ‖` after equalizing the chain.
    pub max_factor_norm: f64,
}

/// Extra lengths beyond the degree tried by [`probe_instance`].
pub const PROBE_EXTRA_LENGTH: usize = 2;

/// Result of [`probe_instance`].
#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    pub achieved_m: Option<usize>,
    pub achieved_cost: f64,
    pub chain_product: f64,
    pub max_factor_norm: f64,
    /// The equalized `P₁ ⋯ P_m` at the reported length.
    pub chain: Vec<MatPoly>,
}

/// Factors, balances and absorbs `x`, then equalizes the proxy norms of the
/// resulting `P_ℓ` geometrically, trying lengths `m, …, m + PROBE_EXTRA_LENGTH`.
pub fn probe_instance(x: &MatPoly, cfg: &BalanceConfig) -> Result<ProbeOutcome> {
    let proxy = ProxyNorms::new(&cfg.reference)?;
    let base = factor(x);
    let mut best: Option<ProbeOutcome> = None;
    for m in base.m()..=base.m() + PROBE_EXTRA_LENGTH {
        let f = equalize_length(&base, m)?;
        let (balanced, report) = run_descent(&f, cfg, &proxy)?;
        let chain = absorb_scalars(&balanced);
        let norms = chain.iter().map(|p| proxy.poly(p)).collect::<Result<Vec<f64>>>()?;
        let product: f64 = norms.iter().product();
        let (chain, max_norm) = if norms.iter().all(|&v| v > 0.0) {
            let g = (norms.iter().map(|v| v.ln()).sum::<f64>() / norms.len() as f64).exp();
            let chain: Vec<MatPoly> = chain
                .iter()
                .zip(&norms)
                .map(|(p, &v)| p.scale_by(Complex64::new(g / v, 0.0)))
                .collect();
            (chain, g)
        } else {
            (chain, norms.iter().copied().fold(0.0, f64::max))
        };
        let outcome = ProbeOutcome {
            achieved_m: (max_norm < 1.0).then_some(m),
            achieved_cost: report.final_cost,
            chain_product: product,
            max_factor_norm: max_norm,
            chain,
        };
        if outcome.achieved_m.is_some() {
            return Ok(outcome);
        }
        if best.as_ref().is_none_or(|b| max_norm < b.max_factor_norm) {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one length tried"))
}

/// Seeded corpus of `count` degree-≤`d`, `n × n` polynomials scaled to proxy
/// norm `1 − eps`, each run through [`probe_instance`].
pub fn probe_m(
    d: usize,
    n: usize,
    eps: f64,
    corpus_seed: u64,
    count: usize,
    cfg: &BalanceConfig,
) -> Result<Vec<ProbeRow>> {
    if d == 0 || n == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument("probe needs d, n ≥ 1 and 0 < eps < 1".into()));
    }
    cfg.validate()?;
    let proxy = ProxyNorms::new(&cfg.reference)?;
    let shape = crate::corpus::PolyShape {
        max_rows: n,
        max_cols: n,
        gens: 2,
        max_degree: d,
        max_terms: 4,
        square: true,
    };
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::repnorm::stream_rng(corpus_seed, i as u64, 0);
            let raw = crate::corpus::random_poly_with(n, n, &shape, &mut rng);
            let norm = proxy.poly(&raw)?;
            if !(norm > 0.0) {
                return Err(Error::Verification(format!("corpus instance {i} has zero proxy norm")));
            }
            let x = raw.scale_by(Complex64::new((1.0 - eps) / norm, 0.0));
            let o = probe_instance(&x, cfg)?;
            Ok(ProbeRow {
                instance: i,
                d,
                n,
                eps,
                achieved_m: o.achieved_m,
                achieved_cost: o.achieved_cost,
                chain_product: o.chain_product,
                max_factor_norm: o.max_factor_norm,
            })
        })
        .collect()
}

/// CSV with columns `instance,d,n,eps,achieved_m,achieved_cost,chain_product,max_factor_norm`;
/// a failed instance has `achieved_m = fail`.
pub fn probe_csv(rows: &[ProbeRow]) -> String {
    let mut out = String::from("instance,d,n,eps,achieved_m,achieved_cost,chain_product,max_factor_norm\n");
    for r in rows {
        let m = r.achieved_m.map_or_else(|| "fail".to_string(), |m| m.to_string());
        out.push_str(&format!(
            "{},{},{},{:.16e},{},{:.16e},{:.16e},{:.16e}\n",
            r.instance, r.d, r.n, r.eps, m, r.achieved_cost, r.chain_product, r.max_factor_norm
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_poly, PolyShape};
    use crate::factorizer::factor;
    use crate::ncpoly::{Letter, Word};
    use crate::repnorm::{stream_rng, EnsembleKind};

    fn haar(samples: usize) -> BalanceConfig {
        BalanceConfig::new(NormReference::Ensemble(EnsembleSpec {
            kind: EnsembleKind::HaarUnitary,
            dim: 24,
            gen_count: 2,
            seed: 5,
            samples,
        }))
    }

    fn scalar(c: f64) -> ScalarMatrix {
        ScalarMatrix::from_element(1, 1, Complex64::new(c, 0.0))
    }

    #[test]
    fn geometric_mean_split() {
        let d = BlockDiagonal::single(DegreeOneFactor::letter(1, Letter::x(1)));
        let f = Factorization::new(vec![scalar(4.0), scalar(0.25)], vec![d]).unwrap();
        let g = rescale_blocks(&f, &haar(2)).unwrap();
        for n in g.alpha_norms() {
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert!((g.cost() - 1.0).abs() < 1e-12);
        assert!(g.expand().max_coeff_diff(&f.expand()).unwrap() < 1e-9);
    }

    #[test]
    fn rescale_is_idempotent_and_normalizes() {
        let cfg = haar(3);
        let proxy = ProxyNorms::new(&cfg.reference).unwrap();
        for i in 0..10 {
            let p = random_poly(&PolyShape::default(), &mut stream_rng(11, i, 0));
            let f = factor(&p);
            let g = rescale_blocks(&f, &cfg).unwrap();
            for d in g.diags() {
                assert!((proxy.diag(d).unwrap() - 1.0).abs() < 1e-6);
            }
            let norms = g.alpha_norms();
            for n in &norms {
                assert!((n / norms[0] - 1.0).abs() < 1e-6);
            }
            let h = rescale_blocks(&g, &cfg).unwrap();
            assert!((h.cost() - g.cost()).abs() <= 1e-9 * g.cost().max(1.0));
            assert!(h.expand().max_coeff_diff(&p).unwrap() < 1e-9);
        }
    }

    #[test]
    fn zero_diagonal_is_degenerate() {
        let d = BlockDiagonal::single(DegreeOneFactor::zero(1));
        let f = Factorization::new(vec![scalar(1.0), scalar(1.0)], vec![d]).unwrap();
        assert!(matches!(
            rescale_blocks(&f, &haar(1)),
            Err(Error::DegenerateFactor { index: 1 })
        ));
    }

    #[test]
    fn monomial_descent_stops_after_one_round() {
        let w = Word::from_letters(vec![Letter::x(1), Letter::x_star(2)]);
        let c = ScalarMatrix::from_fn(2, 2, |i, j| Complex64::new(0.2 * (i + 1) as f64, 0.1 * j as f64));
        let p = MatPoly::monomial(c, w);
        let (g, rep) = similarity_descent(&factor(&p), &haar(2)).unwrap();
        assert_eq!(rep.rounds, 1);
        assert!(rep.final_cost <= rep.initial_cost * (1.0 + 1e-12));
        assert!(g.expand().max_coeff_diff(&p).unwrap() < 1e-9);
    }

    #[test]
    fn descent_is_monotone_and_often_improves() {
        let cfg = haar(2);
        let proxy = ProxyNorms::new(&cfg.reference).unwrap();
        let shape = PolyShape {
            max_rows: 1,
            max_cols: 1,
            max_degree: 2,
            max_terms: 5,
            ..PolyShape::default()
        };
        let mut improved = 0;
        for i in 0..100 {
            let raw = random_poly(&shape, &mut stream_rng(21, i, 0));
            if raw.is_zero() {
                continue;
            }
            let p = raw.scale_by(Complex64::new(0.5 / proxy.poly(&raw).unwrap(), 0.0));
            let f = factor(&p);
            let (g, rep) = similarity_descent(&f, &cfg).unwrap();
            assert!(rep.final_cost <= rep.initial_cost + cfg.tolerance);
            assert!(g.expand().max_coeff_diff(&p).unwrap() < 1e-9);
            for w in rep.trajectory.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
            if rep.final_cost < rep.initial_cost * (1.0 - 1e-9) {
                improved += 1;
            }
        }
        assert!(improved >= 50, "improved only {improved} of 100");
    }

    #[test]
    fn identity_scaling_is_a_no_op() {
        let p = random_poly(&PolyShape::default(), &mut stream_rng(31, 0, 0));
        let f = split_scalar_blocks(&factor(&p));
        let norms = ProxyNorms::new(&haar(1).reference).unwrap().blocks_of(&f).unwrap();
        let d = Descent {
            f: &f,
            block_sizes: f.diags().iter().map(|d| d.blocks().iter().map(DegreeOneFactor::size).collect()).collect(),
            block_norms: &norms,
        };
        let s = Scalings {
            p: norms.iter().map(|v| vec![0.0; v.len()]).collect(),
            q: norms.iter().map(|v| vec![0.0; v.len()]).collect(),
        };
        assert_eq!(d.materialize(&s), f);
    }

    #[test]
    fn probe_degree_one_is_immediate() {
        let cfg = haar(2);
        let rows = probe_m(1, 2, 0.1, 3, 4, &cfg).unwrap();
        assert!(rows.iter().all(|r| r.achieved_m == Some(1)));
    }

    #[test]
    fn probe_splits_monomial_evenly() {
        let x = MatPoly::monomial(scalar(0.9), Word::from_letters(vec![Letter::x(1), Letter::x(2)]));
        let cfg = haar(2);
        let o = probe_instance(&x, &cfg).unwrap();
        assert_eq!(o.achieved_m, Some(2));
        assert!((o.max_factor_norm - 0.9f64.sqrt()).abs() < 1e-9);
        let proxy = ProxyNorms::new(&cfg.reference).unwrap();
        for p in &o.chain {
            assert!((proxy.poly(p).unwrap() - 0.9f64.sqrt()).abs() < 1e-9);
        }
    }
}
