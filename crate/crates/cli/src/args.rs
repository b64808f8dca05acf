use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jetkernel::scalar::{parse_rational, Rational};
use num_complex::Complex64;

/// Largest truncation accepted on the command line.
pub const MAX_TRUNC: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "jetkernel", version, about = "Verify jet-construction kernel identities on the bidisc and tridisc")]
pub struct Cli {
    /// Spaces of JSON indentation; 0 prints compact JSON.
    #[arg(long, global = true, default_value_t = 2)]
    pub json_indent: usize,
    /// Suppress output on stdout; the exit code still reports the outcome.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Also write the JSON document to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jet kernel coefficients a_mp.
    JetCoeffs(JetCoeffsArgs),
    /// Commutant of the normalized coefficients.
    Irreducibility(IrreducibilityArgs),
    /// Curvature at the origin and sampled series values.
    Curvature(CurvatureArgs),
    /// Randomized cocycle identities.
    CocycleCheck(CocycleArgs),
    /// The binomial identity for all 0 <= k <= i <= j <= max.
    IdentityCheck(IdentityArgs),
    /// Orthonormal basis sum against the closed-form kernel.
    Wilkins(WilkinsArgs),
    /// Tridisc block diagonalization and reducibility.
    Tridisc(TridiscArgs),
    /// The full acceptance suite.
    VerifyAll(VerifyAllArgs),
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// `x,y` as `x + iy`.
pub fn point(s: &str) -> Result<Complex64, String> {
    let (x, y) = s.split_once(',').unwrap_or((s, "0"));
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    Ok(Complex64::new(parse(x)?, parse(y)?))
}

fn trunc(s: &str) -> Result<usize, String> {
    let m: usize = s.parse().map_err(|_| format!("not a truncation: {s:?}"))?;
    if m > MAX_TRUNC {
        return Err(format!("truncation {m} exceeds the limit {MAX_TRUNC}"));
    }
    Ok(m)
}

#[derive(Debug, Args)]
pub struct Params {
    #[arg(long, value_parser = rational)]
    pub alpha: Rational,
    #[arg(long, value_parser = rational)]
    pub beta: Rational,
    /// Jet order n.
    #[arg(long, default_value_t = 1)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct JetCoeffsArgs {
    #[command(flatten)]
    pub params: Params,
    /// Third parameter; switches to the tridisc first-order jet.
    #[arg(long, value_parser = rational)]
    pub gamma: Option<Rational>,
    #[arg(long, default_value = "6", value_parser = trunc)]
    pub trunc: usize,
    /// Emit the brute-force expansion instead of the closed form.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct IrreducibilityArgs {
    #[command(flatten)]
    pub params: Params,
    /// Floating-point commutant of the actual normalized coefficients.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub params: Params,
    /// Sample point `x,y`; repeatable.
    #[arg(long = "at", value_parser = point)]
    pub at: Vec<Complex64>,
    #[arg(long, default_value = "12", value_parser = trunc)]
    pub trunc: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact when the cocycle exponent is an integer, numeric otherwise.
    Auto,
    Exact,
    Numeric,
}

#[derive(Debug, Args)]
pub struct CocycleArgs {
    #[command(flatten)]
    pub params: Params,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = jetkernel::suite::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 10)]
    pub max_ij: usize,
}

#[derive(Debug, Args)]
pub struct WilkinsArgs {
    #[arg(long, value_parser = rational)]
    pub alpha: Rational,
    #[arg(long, value_parser = rational)]
    pub beta: Rational,
    #[arg(long, default_value_t = 60)]
    pub terms: usize,
    /// Point `z` as `x,y`.
    #[arg(long = "at", value_parser = point, default_value = "0.3,0")]
    pub at: Complex64,
    /// Second point `w`; defaults to `z`.
    #[arg(long, value_parser = point)]
    pub w: Option<Complex64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct TridiscArgs {
    #[arg(long, value_parser = rational)]
    pub alpha: Rational,
    #[arg(long, value_parser = rational)]
    pub beta: Rational,
    #[arg(long, value_parser = rational)]
    pub gamma: Rational,
}

#[derive(Debug, Args)]
pub struct VerifyAllArgs {
    #[arg(long, default_value_t = jetkernel::suite::DEFAULT_SEED)]
    pub seed: u64,
    /// Leave timings out so the document is reproducible byte for byte.
    #[arg(long)]
    pub no_timings: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn parsers() {
        assert_eq!(point("0.3,0.2").unwrap(), Complex64::new(0.3, 0.2));
        assert_eq!(point("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert!(point("a,b").is_err());
        assert_eq!(trunc("12").unwrap(), 12);
        assert!(trunc("13").is_err());
        assert!(rational("3/0").is_err());
    }

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
