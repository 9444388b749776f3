//! `ratcheck` command-line frontend.
//!
//! [`run`] parses arguments, validates the knobs for the chosen subcommand,
//! dispatches into `ratcheck-core` and writes a JSON report (plus a CSV for
//! sequence outputs). Exit codes: 0 success, 1 analysis-level negative result
//! or analysis error (serialized into the report), 2 usage or input error.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use report::{Outcome, Report, RunConfig};

const AFTER_HELP: &str = "\
Exit codes: 0 success; 1 negative certificate or analysis error (see the report's \"error\"); 2 usage error.

With --output PATH the JSON report goes to PATH and, for sequence outputs, a CSV goes to PATH with
the extension replaced by .csv. Without --output the report is printed to stdout and no CSV is written.";

#[derive(Parser, Debug)]
#[command(name = "ratcheck", version, about = "Rationality tests for integer power series", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct Io {
    /// Input JSON: a file path, or the JSON text itself when it starts with '{' or '['.
    #[arg(long)]
    pub input: String,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hankel determinants A_n of a univariate series over a window of n.
    #[command(after_help = "Input: univariate series JSON, e.g. {\"kind\":\"rational\",\"numerator\":[1],\"denominator\":[1,-1]}.\n\nCSV columns: n,det")]
    Kronecker(KroneckerArgs),
    /// Padé reconstruction of P/Q from series coefficients.
    #[command(after_help = "Input: univariate series JSON.\n\nCSV columns: k,numerator,denominator (coefficient of z^k)")]
    Reconstruct(ReconstructArgs),
    /// Restriction-polynomial Hankel criterion for a two-variable series.
    #[command(after_help = "Input: bivariate series JSON (nested rational, table with rows, product, or two-variable dfinite).\n\nCSV columns: m,vanishes,degree,witness_degree,witness_coeff,sup_bound")]
    Criterion(CriterionArgs),
    /// Fekete-point estimates of the transfinite diameter of a point cloud.
    #[command(after_help = "Input: [[re,im],...] or a generator: {\"kind\":\"circle\",\"r\":1}, {\"kind\":\"segment\",\"a\":[-1,0],\"b\":[1,0]},\n{\"kind\":\"gamma\",\"phi\":..,\"psi\":..,\"s\":..,\"delta\":..,\"invert\":true}.\n\nCSV columns: n,d_n,tau_upper")]
    Capacity(CapacityArgs),
    /// Hankel bound sequence for a contour and the first size m0 where it drops below 1.
    #[command(after_help = "Input: {\"contour\":{\"phi\":..,\"psi\":..,\"s\":..,\"delta\":..},\"M\":2.0,\"rho\":0.8}; without \"rho\" it is\ncertified by the capacity check on the inverted contour.\n\nCSV columns: m,bound")]
    ContourBound(ContourBoundArgs),
    /// Certificate d_n(1/Γ) < 1 - margin for the inverted contour.
    #[command(after_help = "Input: {\"phi\":..,\"psi\":..,\"s\":..,\"delta\":..}.\n\nCSV columns: n,d_n,tau_upper")]
    IotaCheck(IotaArgs),
    /// D-finite pipeline: univariate coefficients, or the two-variable criterion with reconstruction and continuation.
    #[command(after_help = "Input: {\"kind\":\"dfinite\",\"variables\":[\"z\",\"w\"],\"equations\":[[p0,..,pr],[q0,..,qs]],\"initials\":[[a00,..],..]}\nor any bivariate series JSON (table mode, no continuation).\n\nCSV columns: k,a_k (univariate) or m,vanishes,degree,witness_degree,witness_coeff,sup_bound (bivariate)")]
    Dfinite(DfiniteArgs),
    /// Hankel determinant of contour coefficients versus the symmetrized multiple integral.
    #[command(after_help = "Input: {\"g\":{\"numerator\":[..],\"denominator\":[..]},\"contour\":{\"phi\":..,\"psi\":..,\"s\":..,\"delta\":..}};\ncoefficients are reals or [re,im] pairs.\n\nCSV columns: m,direct_re,direct_im,integral_re,integral_im,residual")]
    Symcheck(SymcheckArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct KroneckerArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// First Hankel size n.
    #[arg(long = "m-lo", default_value_t = 1)]
    pub m_lo: usize,
    /// Last Hankel size n (default 2·degree+4, or 12).
    #[arg(long = "m-hi")]
    pub m_hi: Option<usize>,
    /// Degree hint for the default window.
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct ReconstructArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Exact degree bound d; without it d = 0, 1, … up to 8 are tried.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Series order used to confirm the fit (default 24; tables use their length).
    #[arg(long = "N")]
    pub big_n: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct CriterionArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Diagonal exponent n in f(z, w·z^n).
    #[arg(long = "n", default_value_t = 1)]
    pub n: usize,
    /// Total-degree truncation N (default max(24, 2·m_hi); tables use their own).
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    #[arg(long = "m-lo", default_value_t = 1)]
    pub m_lo: usize,
    #[arg(long = "m-hi", default_value_t = 6)]
    pub m_hi: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct CapacityArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    #[arg(long = "n-max", default_value_t = 24)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points per unit length for generated clouds.
    #[arg(long, default_value_t = 64.0)]
    pub density: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct ContourBoundArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Largest m scanned for m0.
    #[arg(long = "m-hi", default_value_t = 20)]
    pub m_hi: usize,
    /// Capacity-check knobs, used only when the input has no "rho".
    #[arg(long = "n-max", default_value_t = 40)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 512.0)]
    pub density: f64,
    #[arg(long, default_value_t = 0.02)]
    pub margin: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct IotaArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    #[arg(long = "n-max", default_value_t = 40)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 512.0)]
    pub density: f64,
    #[arg(long, default_value_t = 0.02)]
    pub margin: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct DfiniteArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    #[arg(long = "n", default_value_t = 1)]
    pub n: usize,
    /// Total-degree truncation N (coefficient order for univariate input).
    #[arg(long = "N", default_value_t = 24)]
    pub big_n: usize,
    #[arg(long = "m-lo", default_value_t = 1)]
    pub m_lo: usize,
    #[arg(long = "m-hi", default_value_t = 6)]
    pub m_hi: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub(crate) struct SymcheckArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Smallest Hankel size (1 or 2).
    #[arg(long = "m-lo", default_value_t = 1)]
    pub m_lo: usize,
    /// Largest Hankel size (1 or 2).
    #[arg(long = "m-hi", default_value_t = 1)]
    pub m_hi: usize,
    /// Residual below which the check passes.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    commands::dispatch(cli.command)
}
