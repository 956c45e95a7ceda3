//! Library half of the `ncfactor` binary, so the command set can be driven
//! in-process by tests.

mod commands;
pub mod golden;
mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ncfactor_core::oracle::DEFAULT_BUDGET;
use ncfactor_core::{Error, Field, WordMode};

pub use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "ncfactor", version, about = "Factorization tools for noncommutative polynomials and linear matrices")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Coefficient field for inline expressions: Q, F2, F3 or Fp:<p>.
    #[arg(long, global = true)]
    field: Option<Field>,
    /// Word family used by the embedding.
    #[arg(long, global = true, default_value = "compact")]
    mode: WordMode,
    /// Number of source variables.
    #[arg(long, global = true)]
    nvars: Option<usize>,
    /// Seed for randomized evaluation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget for the dense factorization oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Write the result to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Input file (ncpoly, ncc or ncabp).
    path: Option<PathBuf>,
    /// Inline polynomial instead of a file, e.g. "x1.x2 + x1".
    #[arg(short, long, conflicts_with = "path")]
    expr: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct QuatParams {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Read α and β off a quaternion linear matrix file.
    #[arg(long = "linmat")]
    linmat: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the embedding words, one per line.
    Words {
        #[arg(long = "n")]
        n: Option<usize>,
    },
    /// Apply the embedding to a polynomial, circuit or ABP.
    Embed(Source),
    /// Recover a source-variable object from a bivariate one.
    Recover(Source),
    /// Factor through the bivariate image and recover the factors.
    Reduce(Source),
    /// All complete factorizations over a small prime field.
    FactorDense(Source),
    /// Evaluate on seeded random matrices.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Factor a 3x3 linear matrix over Q.
    FactorLinmat3 { path: PathBuf },
    /// Write the quaternion linear matrix for H(α, β).
    QuaternionBuild {
        #[command(flatten)]
        params: QuatParams,
    },
    /// Turn a zero divisor into a factorization certificate.
    QuaternionZdiv2fact {
        #[command(flatten)]
        params: QuatParams,
        /// Coordinates a0,a1,a2,a3; searched for when omitted.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, default_value_t = 5)]
        bound: i64,
    },
    /// Turn a factorization certificate into a pair of zero divisors.
    QuaternionFact2zdiv {
        cert: PathBuf,
        #[command(flatten)]
        params: QuatParams,
    },
    /// Check a certificate against a linear matrix.
    VerifyCert { cert: PathBuf, linmat: PathBuf },
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                return 1;
            }
            let _ = stdout.write_all(text.as_bytes());
            return 0;
        }
    };
    match commands::dispatch(&cli.command, &cli.opts).and_then(|out| emit(&cli.opts, &out, stdout)) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}: {}", f.code(), f.detail());
            f.exit_code()
        }
    }
}

fn emit(opts: &GlobalOpts, out: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &opts.output {
        Some(path) => input::write_atomic(path, out),
        None => stdout
            .write_all(out.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}
