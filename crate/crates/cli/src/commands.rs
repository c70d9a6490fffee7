use std::fs;
use std::path::{Path, PathBuf};

use nclin_core::balancer::{balance, probe_csv, probe_m, BalanceConfig, NormReference};
use nclin_core::factorizer::{absorb_scalars, equalize_sizes, factor, multiply_chain, single_blockify};
use nclin_core::format::{
    chain_from_json, chain_to_json, factorization_from_json, factorization_to_json, matrix_to_doc, poly_from_json,
    poly_to_json, representation_from_doc, representation_to_doc, RepresentationDoc,
};
use nclin_core::harness::{run_probability_variant, run_transfer, TransferConfig};
use nclin_core::repnorm::{eval, proxy_norm, sample_representation};
use nclin_core::selftest::run_selftest;
use nclin_core::{EnsembleKind, EnsembleSpec, Error, MatPoly};

use super::{Command, EnsembleArgs};

/// Tolerance for the reconstruction check after `factorize`.
const RECONSTRUCTION_TOL: f64 = 1e-9;

pub enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit(path: Option<&PathBuf>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(p.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn kind(s: &str) -> Outcome<EnsembleKind> {
    Ok(s.parse::<EnsembleKind>()?)
}

fn ensemble(args: &EnsembleArgs, needed_gens: u32) -> Outcome<EnsembleSpec> {
    let spec = match &args.ensemble {
        Some(path) => serde_json::from_str(&read(path)?).map_err(Error::from)?,
        None => EnsembleSpec {
            kind: kind(&args.kind)?,
            dim: args.dim,
            gen_count: args.gens.unwrap_or(needed_gens.max(1)),
            seed: args.seed,
            samples: args.samples,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn load_poly(path: &Path, max_gen: u32) -> Outcome<MatPoly> {
    Ok(poly_from_json(&read(path)?, max_gen)?)
}

pub fn run(command: Command, max_gen: u32) -> Outcome<u8> {
    match command {
        Command::Factorize { input, out, single_block, equal_sizes, absorb } => {
            let p = load_poly(&input, max_gen)?;
            let mut f = factor(&p);
            if single_block {
                f = single_blockify(&f);
            }
            if equal_sizes {
                f = equalize_sizes(&f);
            }
            let cost = f.cost();
            let text = if absorb {
                let chain = absorb_scalars(&f);
                let back = multiply_chain(&chain)?;
                check_reconstruction(&back, &p)?;
                chain_to_json(&chain, cost)
            } else {
                check_reconstruction(&f.expand(), &p)?;
                factorization_to_json(&f)
            };
            emit(out.as_ref(), &text)?;
            if out.is_some() {
                println!("m = {}", f.m());
                println!("cost = {cost:.16e}");
            }
            Ok(0)
        }
        Command::Expand { input, out } => {
            let text = read(&input)?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
            let p = if value.get("factors").is_some() {
                multiply_chain(&chain_from_json(&text, max_gen)?)?
            } else {
                factorization_from_json(&text, max_gen)?.expand()
            };
            emit(out.as_ref(), &poly_to_json(&p))?;
            Ok(0)
        }
        Command::Eval { poly, rep, ensemble: e, index, out } => {
            let p = load_poly(&poly, max_gen)?;
            let r = match rep {
                Some(path) => {
                    let doc: RepresentationDoc = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                    representation_from_doc(&doc)?
                }
                None => {
                    let spec = ensemble(&e, p.max_gen())?;
                    if index >= spec.samples as u64 {
                        return Err(Error::InvalidArgument(format!("index {index} outside {} samples", spec.samples)).into());
                    }
                    sample_representation(&spec, index)
                }
            };
            let m = eval(&p, &r)?;
            let json = serde_json::to_string(&matrix_to_doc(&m)).map_err(Error::from)?;
            emit(out.as_ref(), &(json + "\n"))?;
            Ok(0)
        }
        Command::Norm { poly, ensemble: e, out } => {
            let p = load_poly(&poly, max_gen)?;
            let spec = ensemble(&e, p.max_gen())?;
            let summary = proxy_norm(&p, &spec)?;
            emit(out.as_ref(), &summary.to_csv())?;
            if out.is_some() {
                println!("max = {:.16e}", summary.max);
                println!("mean = {:.16e}", summary.mean);
                println!("median = {:.16e}", summary.median);
            }
            Ok(0)
        }
        Command::Balance { input, ensemble: e, rounds, tol, no_similarity, out, report } => {
            let f = factorization_from_json(&read(&input)?, max_gen)?;
            let spec = ensemble(&e, f.max_gen())?;
            let cfg = BalanceConfig {
                reference: NormReference::Ensemble(spec),
                max_rounds: rounds,
                similarity_search: !no_similarity,
                tolerance: tol,
            };
            let (g, rep) = balance(&f, &cfg)?;
            emit(out.as_ref(), &factorization_to_json(&g))?;
            if let Some(path) = report.as_ref() {
                emit(Some(path), &rep.to_csv())?;
            }
            if out.is_some() {
                println!("m = {}", rep.m);
                println!("rounds = {}", rep.rounds);
                println!("initial_cost = {:.16e}", rep.initial_cost);
                println!("final_cost = {:.16e}", rep.final_cost);
                println!("achieved_epsilon = {:.16e}", rep.achieved_epsilon);
            }
            Ok(0)
        }
        Command::ProbeM { d, n, eps, seed, count, kind: k, dim, samples, out } => {
            let spec = EnsembleSpec { kind: kind(&k)?, dim, gen_count: 2, seed, samples };
            let cfg = BalanceConfig::new(NormReference::Ensemble(spec));
            let rows = probe_m(d, n, eps, seed, count, &cfg)?;
            emit(out.as_ref(), &probe_csv(&rows))?;
            if out.is_some() {
                let ok = rows.iter().filter(|r| r.achieved_m.is_some()).count();
                println!("reached = {ok}/{}", rows.len());
            }
            Ok(0)
        }
        Command::Transfer { poly, kind: k, sizes, samples, seed, self_adjoint, eps, refs, poly_ref, out, summary } => {
            let p = load_poly(&poly, max_gen)?;
            let mut cfg = TransferConfig::new(p, kind(&k)?, sizes, samples, seed);
            cfg.self_adjoint = self_adjoint;
            cfg.epsilon = eps;
            cfg.factor_references = refs;
            cfg.poly_reference = poly_ref;
            let report = if eps.is_some() {
                run_probability_variant(&cfg)?
            } else {
                if cfg.factor_references.is_some() || cfg.poly_reference.is_some() {
                    return Err(Error::InvalidArgument("--refs and --poly-ref need --eps".into()).into());
                }
                run_transfer(&cfg)?
            };
            emit(out.as_ref(), &report.to_csv())?;
            if let Some(path) = summary.as_ref() {
                emit(Some(path), &report.summary_csv())?;
            }
            if out.is_some() {
                println!("m = {}", report.m);
                println!("cost = {:.16e}", report.cost);
                if let Some(label) = &report.reference_label {
                    println!("reference = {label}");
                }
            }
            Ok(0)
        }
        Command::Sample { ensemble: e, index, out } => {
            let spec = ensemble(&e, 1)?;
            if index >= spec.samples as u64 {
                return Err(Error::InvalidArgument(format!("index {index} outside {} samples", spec.samples)).into());
            }
            let r = sample_representation(&spec, index);
            let json = serde_json::to_string(&representation_to_doc(&r)).map_err(Error::from)?;
            emit(out.as_ref(), &(json + "\n"))?;
            Ok(0)
        }
        Command::Selftest => {
            let results = run_selftest();
            for r in &results {
                println!("{}", r.line());
            }
            let passed = results.iter().filter(|r| r.passed()).count();
            println!("selftest: {passed}/{} suites passed", results.len());
            Ok(if passed == results.len() { 0 } else { 3 })
        }
    }
}

fn check_reconstruction(back: &MatPoly, p: &MatPoly) -> Outcome<()> {
    let err = back.max_coeff_diff(p)?;
    if err > RECONSTRUCTION_TOL {
        return Err(Error::Verification(format!("reconstruction error {err:e} exceeds {RECONSTRUCTION_TOL:e}")).into());
    }
    Ok(())
}
