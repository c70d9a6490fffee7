//! Desk-scale invariant suite over every module. Output is a fixed set of
//! lines that depend only on the built-in seeds, never on timing or thread
//! count.

use std::f64::consts::PI;

use crate::balancer::{similarity_descent, BalanceConfig, NormReference};
use crate::corpus::{random_degree_one, random_poly, PolyShape};
use crate::error::Result;
use crate::factorizer::{
    absorb_scalars, dehermitize_bracket, equalize_length, equalize_sizes, factor, hermitize, multiply_chain,
    single_blockify,
};
use crate::harness::{run_transfer, run_transfer_sa, TransferConfig};
use crate::matrix::{max_abs, max_abs_diff, spectral_norm, ScalarMatrix};
use crate::ncpoly::{Letter, MatPoly, Word};
use crate::repnorm::{
    eval, eval_factor, operator_norm, sample_representation, shift_representation, stream_rng, EnsembleKind,
    EnsembleSpec,
};
use crate::Complex64;

const SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    /// Largest observed error of the suite's main comparison.
    pub worst: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "ok" } else { "FAIL" };
        format!(
            "{:<10} {status:<4} checks={} failures={} worst={:.3e}",
            self.name, self.checks, self.failures, self.worst
        )
    }
}

struct Tally {
    name: &'static str,
    checks: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: 0, worst: 0.0 }
    }

    fn err(&mut self, err: f64, tol: f64) {
        self.checks += 1;
        self.worst = self.worst.max(err);
        if !(err <= tol) {
            self.failures += 1;
        }
    }

    fn check(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn done(self) -> SuiteResult {
        SuiteResult { name: self.name, checks: self.checks, failures: self.failures, worst: self.worst }
    }
}

fn corpus(n: u64, stream: u64) -> Vec<MatPoly> {
    (0..n).map(|i| random_poly(&PolyShape::default(), &mut stream_rng(SEED, i, stream))).collect()
}

fn algebra() -> Result<SuiteResult> {
    let mut t = Tally::new("algebra");
    let ps = corpus(30, 1);
    for w in ps.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        if a.cols() == b.rows() && b.cols() == c.rows() {
            let l = a.matmul(b)?.matmul(c)?;
            let r = a.matmul(&b.matmul(c)?)?;
            t.err(l.max_coeff_diff(&r)?, 1e-12);
        }
        t.err(a.adjoint().adjoint().max_coeff_diff(a)?, 0.0);
        if a.cols() == b.rows() {
            let l = a.matmul(b)?.adjoint();
            let r = b.adjoint().matmul(&a.adjoint())?;
            t.err(l.max_coeff_diff(&r)?, 1e-12);
        }
    }
    Ok(t.done())
}

fn factorize() -> Result<SuiteResult> {
    let mut t = Tally::new("factorize");
    for p in corpus(200, 2) {
        let f = factor(&p);
        t.err(f.expand().max_coeff_diff(&p)?, 1e-9);
        let chain = absorb_scalars(&f);
        t.check(chain.iter().all(|q| q.degree() <= 1));
        t.err(multiply_chain(&chain)?.max_coeff_diff(&p)?, 1e-9);
    }
    Ok(t.done())
}

fn rewrites() -> Result<SuiteResult> {
    let mut t = Tally::new("rewrites");
    for p in corpus(100, 3) {
        let f = factor(&p);
        let target = f.expand();
        let cost = f.cost();
        for g in [single_blockify(&f), equalize_sizes(&f), equalize_length(&f, f.m() + 2)?] {
            t.err(g.expand().max_coeff_diff(&target)?, 1e-12);
            t.check(g.cost() <= cost * (1.0 + 1e-12) + 1e-15);
        }
    }
    Ok(t.done())
}

fn evaluation() -> Result<SuiteResult> {
    let mut t = Tally::new("eval");
    let shape = PolyShape { square: true, max_degree: 3, ..PolyShape::default() };
    let spec = EnsembleSpec { kind: EnsembleKind::HaarUnitary, dim: 16, gen_count: 2, seed: SEED, samples: 30 };
    for i in 0..30u64 {
        let mut rng = stream_rng(SEED, i, 4);
        let p = random_poly(&shape, &mut rng);
        let q = crate::corpus::random_poly_with(p.cols(), p.cols(), &shape, &mut rng);
        let rep = sample_representation(&spec, i);
        let lhs = eval(&p.matmul(&q)?, &rep)?;
        let rhs = eval(&p, &rep)? * eval(&q, &rep)?;
        let scale = max_abs(&rhs).max(1.0);
        t.err(max_abs_diff(&lhs, &rhs) / scale, 1e-9);
    }
    Ok(t.done())
}

fn norms() -> Result<SuiteResult> {
    let mut t = Tally::new("norms");
    let sym = MatPoly::monomial(ScalarMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), Word::from_letters(vec![Letter::x(1)]));
    let sym = sym.add(&sym.adjoint())?;
    for n in [3, 8, 64, 257] {
        let v = operator_norm(&eval(&sym, &shift_representation(n, 1))?)?.value;
        t.err((v - 2.0).abs(), 1e-9);
    }
    let n = 64;
    let rep = shift_representation(n, 1);
    for i in 0..10u64 {
        let mut rng = stream_rng(SEED, i, 5);
        let a0 = crate::corpus::gaussian_matrix(2, 2, &mut rng);
        let a1 = crate::corpus::gaussian_matrix(2, 2, &mut rng);
        let p = MatPoly::constant(a0.clone()).add(&MatPoly::monomial(a1.clone(), Word::from_letters(vec![Letter::x(1)])))?;
        let v = operator_norm(&eval(&p, &rep)?)?.value;
        let symbol = (0..n)
            .map(|k| {
                let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
                spectral_norm(&(&a0 + &a1 * w))
            })
            .fold(0.0, f64::max);
        t.err((v - symbol).abs() / symbol.max(1.0), 1e-9);
    }
    Ok(t.done())
}

fn hermitization() -> Result<SuiteResult> {
    let mut t = Tally::new("hermitize");
    let spec = EnsembleSpec { kind: EnsembleKind::HaarUnitary, dim: 16, gen_count: 2, seed: SEED, samples: 20 };
    for i in 0..20u64 {
        let y = random_degree_one(2, 2, &mut stream_rng(SEED, i, 6));
        let h = hermitize(&y);
        let rep = sample_representation(&spec, i);
        let ny = operator_norm(&eval_factor(&y, &rep)?)?.value;
        let eh = eval_factor(&h, &rep)?;
        t.err(max_abs_diff(&eh, &eh.adjoint()), 1e-10);
        t.err((operator_norm(&eh)?.value - ny).abs() / ny.max(1e-300), 1e-8);
        let (row, col) = dehermitize_bracket(&h);
        let back = MatPoly::constant(row).matmul(&h.to_poly())?.matmul(&MatPoly::constant(col))?;
        t.err(back.max_coeff_diff_unpruned(&y.to_poly())?, 0.0);
    }
    Ok(t.done())
}

fn balancer() -> Result<SuiteResult> {
    let mut t = Tally::new("balancer");
    let cfg = BalanceConfig::new(NormReference::Ensemble(EnsembleSpec {
        kind: EnsembleKind::HaarUnitary,
        dim: 16,
        gen_count: 2,
        seed: SEED,
        samples: 2,
    }));
    let shape = PolyShape { max_degree: 3, max_terms: 4, ..PolyShape::default() };
    for i in 0..20u64 {
        let p = random_poly(&shape, &mut stream_rng(SEED, i, 7));
        if p.is_zero() {
            continue;
        }
        let (g, rep) = similarity_descent(&factor(&p), &cfg)?;
        t.check(rep.final_cost <= rep.initial_cost + cfg.tolerance);
        t.err(g.expand().max_coeff_diff(&p)?, 1e-9);
    }
    Ok(t.done())
}

fn transfer() -> Result<SuiteResult> {
    let mut t = Tally::new("transfer");
    let x = |j| MatPoly::monomial(ScalarMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), Word::from_letters(vec![Letter::x(j)]));
    let p = x(1).add(&x(2))?.matmul(&x(1).adjoint().add(&MatPoly::identity(1))?)?;
    for kind in [EnsembleKind::HaarUnitary, EnsembleKind::UniformPermutation] {
        let cfg = TransferConfig::new(p.clone(), kind, vec![10, 20, 40], 4, SEED);
        let plain = run_transfer(&cfg)?;
        let sa = run_transfer_sa(&cfg)?;
        for (a, b) in plain.samples.iter().zip(&sa.samples) {
            t.check(a.direct_norm <= a.bound + crate::harness::BOUND_TOL);
            t.check(b.direct_norm <= b.bound + crate::harness::BOUND_TOL);
            t.err((a.direct_norm - b.direct_norm).abs(), 1e-9);
        }
    }
    Ok(t.done())
}

/// Runs every suite in a fixed order. An internal error inside a suite is
/// reported as one failed check rather than aborting the run.
pub fn run_selftest() -> Vec<SuiteResult> {
    type Suite = fn() -> Result<SuiteResult>;
    let suites: [(&'static str, Suite); 8] = [
        ("algebra", algebra),
        ("factorize", factorize),
        ("rewrites", rewrites),
        ("eval", evaluation),
        ("norms", norms),
        ("hermitize", hermitization),
        ("balancer", balancer),
        ("transfer", transfer),
    ];
    suites
        .iter()
        .map(|(name, f)| {
            f().unwrap_or(SuiteResult { name, checks: 1, failures: 1, worst: f64::INFINITY })
        })
        .collect()
}
