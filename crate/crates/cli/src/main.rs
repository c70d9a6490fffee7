//! `nclin`: batch front end for factoring, evaluating and balancing matrix
//! *-polynomials.
//!
//! Exit codes: 0 success, 2 input error, 3 verification failure,
//! 4 numeric non-convergence.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nclin_core::ncpoly::DEFAULT_MAX_GENERATORS;
use nclin_core::Error;

#[derive(Parser, Debug)]
#[command(name = "nclin", version, about = "Factor and evaluate matrix-valued *-polynomials in free unitaries")]
struct Cli {
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest generator index accepted in input files.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_GENERATORS)]
    max_gen: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct EnsembleArgs {
    /// JSON file with { "kind", "dim", "gen_count", "seed", "samples" }; overrides the flags below.
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// haar, permutation or shift.
    #[arg(long, default_value = "haar")]
    kind: String,
    /// Matrix size N.
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Number of generators to sample (default: what the input needs, at least 1).
    #[arg(long)]
    gens: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor a polynomial file into alphas and block-diagonal factors.
    Factorize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Make every diagonal factor carry at most one non-unit block.
        #[arg(long)]
        single_block: bool,
        /// Pad all diagonal factors to a common size.
        #[arg(long)]
        equal_sizes: bool,
        /// Write the product P₁⋯P_m of degree-≤1 factors instead.
        #[arg(long)]
        absorb: bool,
    },
    /// Multiply out a factorization or P-chain file.
    Expand {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Substitute a representation into a polynomial and write the matrix.
    Eval {
        #[arg(long)]
        poly: PathBuf,
        /// Representation JSON as written by `sample`; otherwise one is drawn.
        #[arg(long)]
        rep: Option<PathBuf>,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Sample index when drawing from the ensemble.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operator norms of a polynomial over ensemble samples (CSV).
    Norm {
        #[arg(long)]
        poly: PathBuf,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rescale and similarity-balance a factorization.
    Balance {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Only rescale; skip the similarity search.
        #[arg(long)]
        no_similarity: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-round cost trajectory (CSV).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Empirical factor-count table over a seeded corpus (CSV).
    #[command(name = "probe-m")]
    ProbeM {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Reference ensemble kind for proxy norms.
        #[arg(long, default_value = "haar")]
        kind: String,
        #[arg(long, default_value_t = 32)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare direct norms with the factor-product bound over growing N (CSV).
    Transfer {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value = "haar")]
        kind: String,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hermitize every factor before substitution.
        #[arg(long)]
        self_adjoint: bool,
        /// Run the exceedance-probability variant with this slack.
        #[arg(long)]
        eps: Option<f64>,
        /// Comma-separated per-factor references for --eps.
        #[arg(long, value_delimiter = ',')]
        refs: Option<Vec<f64>>,
        /// Reference for the polynomial norm for --eps.
        #[arg(long)]
        poly_ref: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-size summary (CSV).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Draw one representation from an ensemble and write it as JSON.
    Sample {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) | Error::DegenerateFactor { .. } => 3,
        Error::NonConvergence { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command, cli.max_gen) {
        Ok(code) => ExitCode::from(code),
        Err(commands::Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(commands::Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(2)
        }
    }
}
