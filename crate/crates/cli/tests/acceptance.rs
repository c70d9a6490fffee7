//! Acceptance criteria at their pinned tolerances. Prints one line per
//! criterion and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nclin_core::balancer::{similarity_descent, BalanceConfig, NormReference, ProxyNorms};
use nclin_core::corpus::{gaussian_matrix, random_degree_one, random_poly, random_poly_with, random_single_letter_chain, PolyShape};
use nclin_core::factorizer::{
    dehermitize_bracket, equalize_length, equalize_sizes, factor, hermitize, multiply_chain, single_blockify,
};
use nclin_core::format::{chain_from_json, poly_to_json};
use nclin_core::harness::{run_transfer, shipped_polynomials, TransferConfig, BOUND_TOL};
use nclin_core::matrix::{max_abs_diff, spectral_norm};
use nclin_core::repnorm::{
    eval, eval_factor, median, operator_norm, proxy_norm, sample_representation, shift_representation, stream_rng,
};
use nclin_core::{Complex64, EnsembleKind, EnsembleSpec, Letter, MatPoly, Word};

const SEED: u64 = 7_000;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn corpus(count: u64) -> Vec<MatPoly> {
    (0..count)
        .map(|i| random_poly(&PolyShape::default(), &mut stream_rng(SEED, i, 0)))
        .collect()
}

fn nclin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nclin"))
}

fn x(j: u32) -> MatPoly {
    MatPoly::monomial(nclin_core::matrix::identity(1), Word::from_letters(vec![Letter::x(j)]))
}

fn reconstruction() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for p in corpus(200) {
        worst = worst.max(factor(&p).expand().max_coeff_diff(&p).unwrap());
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("200 instances, max error {worst:.3e}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn absorbed_shape() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (mut worst, mut max_degree, mut failures) = (0.0_f64, 0usize, 0usize);
    for (i, p) in corpus(200).iter().enumerate() {
        let input = dir.path().join(format!("p{i}.json"));
        let output = dir.path().join(format!("c{i}.json"));
        std::fs::write(&input, poly_to_json(p)).unwrap();
        let status = nclin()
            .args(["factorize", "--absorb", "--in"])
            .arg(&input)
            .arg("--out")
            .arg(&output)
            .output()
            .unwrap();
        if !status.status.success() {
            failures += 1;
            continue;
        }
        let chain = chain_from_json(&std::fs::read_to_string(&output).unwrap(), 16).unwrap();
        max_degree = max_degree.max(chain.iter().map(MatPoly::degree).max().unwrap_or(0));
        worst = worst.max(multiply_chain(&chain).unwrap().max_coeff_diff(p).unwrap());
    }
    verdict(
        failures == 0 && max_degree <= 1 && worst <= 1e-9,
        format!("max factor degree {max_degree}, max product error {worst:.3e}, {failures} CLI failures"),
    )
}

fn rewrites() -> Verdict {
    let (mut worst, mut cost_up) = (0.0_f64, 0usize);
    for p in corpus(100) {
        let f = factor(&p);
        let target = f.expand();
        for g in [single_blockify(&f), equalize_sizes(&f), equalize_length(&f, f.m() + 2).unwrap()] {
            worst = worst.max(g.expand().max_coeff_diff(&target).unwrap());
            if g.cost() > f.cost() * (1.0 + 1e-12) {
                cost_up += 1;
            }
        }
    }
    verdict(
        worst <= 1e-12 && cost_up == 0,
        format!("300 rewrites, max expansion error {worst:.3e}, {cost_up} cost increases"),
    )
}

fn homomorphism() -> Verdict {
    let shape = PolyShape { square: true, max_degree: 3, ..PolyShape::default() };
    let spec = EnsembleSpec { kind: EnsembleKind::HaarUnitary, dim: 32, gen_count: 2, seed: SEED, samples: 100 };
    let mut worst = 0.0_f64;
    for i in 0..100u64 {
        let mut rng = stream_rng(SEED, i, 1);
        let p = random_poly(&shape, &mut rng);
        let q = random_poly_with(p.cols(), p.cols(), &shape, &mut rng);
        let rep = sample_representation(&spec, i);
        let (ep, eq) = (eval(&p, &rep).unwrap(), eval(&q, &rep).unwrap());
        let lhs = eval(&p.matmul(&q).unwrap(), &rep).unwrap();
        let scale = 1.0 + spectral_norm(&ep) * spectral_norm(&eq);
        worst = worst.max(max_abs_diff(&lhs, &(&ep * &eq)) / scale);
    }
    verdict(worst <= 1e-9, format!("100 triples at N=32, max relative error {worst:.3e}"))
}

fn analytic_norms() -> Verdict {
    let sym = x(1).add(&x(1).adjoint()).unwrap();
    let mut worst_shift = 0.0_f64;
    for n in [3, 8, 64, 257] {
        let v = operator_norm(&eval(&sym, &shift_representation(n, 1)).unwrap()).unwrap().value;
        worst_shift = worst_shift.max((v - 2.0).abs());
    }
    let n = 64;
    let rep = shift_representation(n, 1);
    let mut worst_symbol = 0.0_f64;
    for i in 0..20u64 {
        let mut rng = stream_rng(SEED, i, 2);
        let a0 = gaussian_matrix(2, 2, &mut rng);
        let a1 = gaussian_matrix(2, 2, &mut rng);
        let p = MatPoly::constant(a0.clone())
            .add(&MatPoly::monomial(a1.clone(), Word::from_letters(vec![Letter::x(1)])))
            .unwrap();
        let v = operator_norm(&eval(&p, &rep).unwrap()).unwrap().value;
        let symbol = (0..n)
            .map(|k| spectral_norm(&(&a0 + &a1 * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))))
            .fold(0.0, f64::max);
        worst_symbol = worst_symbol.max((v - symbol).abs());
    }
    verdict(
        worst_shift <= 1e-9 && worst_symbol <= 1e-9,
        format!("shift error {worst_shift:.3e}, symbol error {worst_symbol:.3e} over 20 pairs"),
    )
}

fn transfer_bound() -> Verdict {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut slack = f64::INFINITY;
    for kind in [EnsembleKind::HaarUnitary, EnsembleKind::UniformPermutation] {
        for (_, p) in shipped_polynomials() {
            let cfg = TransferConfig::new(p, kind, vec![25, 50, 100, 200], 20, SEED);
            match run_transfer(&cfg) {
                Ok(r) => {
                    for s in &r.samples {
                        checked += 1;
                        slack = slack.min(s.bound + BOUND_TOL - s.direct_norm);
                    }
                }
                Err(e) => return verdict(false, format!("{kind}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        slack >= 0.0 && elapsed < Duration::from_secs(180),
        format!("{checked} samples, min slack {slack:.3e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn strong_convergence() -> Verdict {
    let spec = EnsembleSpec { kind: EnsembleKind::HaarUnitary, dim: 200, gen_count: 2, seed: SEED, samples: 20 };
    let sum = x(1).add(&x(2)).unwrap();
    let sym = sum.add(&sum.adjoint()).unwrap();
    let a = proxy_norm(&sum, &spec).unwrap().median;
    let b = proxy_norm(&sym, &spec).unwrap().median;
    let target = 2.0 * 3f64.sqrt();
    let ra = (a - 2.0).abs() / 2.0;
    let rb = (b - target).abs() / target;
    verdict(
        ra <= 0.1 && rb <= 0.1,
        format!("median ‖x1+x2‖ = {a:.4} (rel {ra:.3e}), median symmetric sum = {b:.4} (rel {rb:.3e})"),
    )
}

fn hermitization() -> Verdict {
    let spec = EnsembleSpec { kind: EnsembleKind::HaarUnitary, dim: 32, gen_count: 2, seed: SEED, samples: 50 };
    let (mut worst, mut inexact) = (0.0_f64, 0usize);
    for i in 0..50u64 {
        let y = random_degree_one(2, 2, &mut stream_rng(SEED, i, 3));
        let h = hermitize(&y);
        let rep = sample_representation(&spec, i);
        let ny = operator_norm(&eval_factor(&y, &rep).unwrap()).unwrap().value;
        let nh = operator_norm(&eval_factor(&h, &rep).unwrap()).unwrap().value;
        worst = worst.max((nh - ny).abs() / ny);
        let (row, col) = dehermitize_bracket(&h);
        let back = MatPoly::constant(row)
            .matmul(&h.to_poly())
            .unwrap()
            .matmul(&MatPoly::constant(col))
            .unwrap();
        if back.max_coeff_diff_unpruned(&y.to_poly()).unwrap() != 0.0 {
            inexact += 1;
        }
    }
    verdict(
        worst <= 1e-8 && inexact == 0,
        format!("50 factors at N=32, max relative norm gap {worst:.3e}, {inexact} inexact brackets"),
    )
}

fn balancer() -> Verdict {
    let reference = NormReference::Ensemble(EnsembleSpec {
        kind: EnsembleKind::HaarUnitary,
        dim: 64,
        gen_count: 2,
        seed: SEED,
        samples: 4,
    });
    let cfg = BalanceConfig::new(reference.clone());
    let shape = PolyShape { max_degree: 3, max_terms: 5, ..PolyShape::default() };
    let mut violations = 0usize;
    let mut monotone = 0usize;
    for i in 0..100u64 {
        let p = random_poly(&shape, &mut stream_rng(SEED, i, 4));
        if p.is_zero() {
            monotone += 1;
            continue;
        }
        match similarity_descent(&factor(&p), &cfg) {
            Ok((_, r)) if r.final_cost <= r.initial_cost + cfg.tolerance => monotone += 1,
            _ => violations += 1,
        }
    }
    let proxy = ProxyNorms::new(&reference).unwrap();
    let mut within = 0usize;
    let mut ratios = Vec::new();
    for i in 0..50u64 {
        let mut rng = stream_rng(SEED, i, 5);
        let m = 2 + (i % 2) as usize;
        let chain = random_single_letter_chain(m, 2, &mut rng);
        let original: f64 = chain.iter().map(|p| proxy.poly(p).unwrap()).product();
        let x = multiply_chain(&chain).unwrap();
        let (_, r) = similarity_descent(&factor(&x), &cfg).unwrap();
        let ratio = r.final_cost / original;
        ratios.push(ratio);
        if ratio <= 1.01 {
            within += 1;
        }
    }
    verdict(
        violations == 0 && within >= 40,
        format!(
            "monotone on {monotone}/100, round trip within 1.01x on {within}/50 (median ratio {:.4})",
            median(&ratios)
        ),
    )
}

fn run_capture(args: &[&str], out: Option<&Path>) -> Vec<u8> {
    let o = nclin().args(args).output().unwrap();
    assert!(o.status.success(), "nclin {args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    match out {
        Some(p) => std::fs::read(p).unwrap(),
        None => o.stdout,
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("p.json");
    let (_, p) = shipped_polynomials().pop().unwrap();
    std::fs::write(&poly, poly_to_json(&p)).unwrap();
    let fact = dir.path().join("f.json");
    run_capture(&["factorize", "--in", poly.to_str().unwrap(), "--out", fact.to_str().unwrap()], None);

    let mut artifacts: BTreeMap<&str, Vec<Vec<u8>>> = BTreeMap::new();
    for (run, threads) in ["1", "4", "1", "4"].iter().enumerate() {
        let out = |name: &str| dir.path().join(format!("{name}_{run}.csv"));
        let mut push = |key, bytes| artifacts.entry(key).or_default().push(bytes);
        push("selftest", run_capture(&["--threads", threads, "selftest"], None));
        let t = out("transfer");
        run_capture(
            &["--threads", threads, "transfer", "--poly", poly.to_str().unwrap(), "--sizes", "8,16,32", "--samples", "5", "--seed", "3", "--eps", "0.05", "--out", t.to_str().unwrap()],
            None,
        );
        push("transfer", std::fs::read(&t).unwrap());
        let n = out("norm");
        push(
            "norm",
            run_capture(
                &["--threads", threads, "norm", "--poly", poly.to_str().unwrap(), "--dim", "24", "--samples", "6", "--seed", "5", "--out", n.to_str().unwrap()],
                Some(&n),
            ),
        );
        let pm = out("probe");
        push(
            "probe-m",
            run_capture(
                &["--threads", threads, "probe-m", "--d", "2", "--n", "1", "--eps", "0.1", "--seed", "2", "--count", "6", "--dim", "16", "--out", pm.to_str().unwrap()],
                Some(&pm),
            ),
        );
        let rep = out("balance");
        let fb = dir.path().join(format!("fb_{run}.json"));
        run_capture(
            &["--threads", threads, "balance", "--in", fact.to_str().unwrap(), "--dim", "16", "--samples", "3", "--seed", "1", "--out", fb.to_str().unwrap(), "--report", rep.to_str().unwrap()],
            None,
        );
        push("balance", std::fs::read(&rep).unwrap());
    }
    let differing: Vec<&str> = artifacts
        .iter()
        .filter(|(_, runs)| runs.windows(2).any(|w| w[0] != w[1]))
        .map(|(k, _)| *k)
        .collect();
    verdict(
        differing.is_empty(),
        format!("{} artifacts x 4 runs (threads 1/4), differing: {differing:?}", artifacts.len()),
    )
}

fn main() {
    type Criterion = fn() -> Verdict;
    let criteria: [(&str, Criterion); 10] = [
        ("reconstruction", reconstruction),
        ("absorbed shape", absorbed_shape),
        ("rewrite preservation", rewrites),
        ("evaluation homomorphism", homomorphism),
        ("analytic norm oracle", analytic_norms),
        ("transfer bound", transfer_bound),
        ("strong convergence", strong_convergence),
        ("hermitization", hermitization),
        ("balancer", balancer),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
