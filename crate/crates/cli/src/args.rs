use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "biharmonic", version)]
#[command(about = "Spectra, critical exponents and entire radial solutions of Δ²φ = φ^p")]
pub struct Cli {
    /// TOML file with defaults for any flag; explicit flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues λ₁…λ₄, λ*, singular amplitude L and degeneracy at (n, p)
    Spectrum(Point),
    /// Critical exponent p_c, the ladder p_2 < … < p_N and its consistency checks
    Critical(Dimension),
    /// Shoot the entire radial solution and dump s, r, φ, W, Y, Z
    Solve(SolveArgs),
    /// Fit the asymptotic expansion of the entire solution
    Expand(ExpandArgs),
    /// Run the invariant suites and report pass/fail per check
    Verify(VerifyArgs),
    /// Tabulate n, p_c, rungs and N over a range of dimensions
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Point {
    /// Dimension
    #[arg(long)]
    pub n: Option<u32>,
    /// Exponent: a number, or relative to the critical exponent as `pc`, `pc+0.5`, `pc-1e-3`
    #[arg(long)]
    pub p: Option<String>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug, Clone)]
pub struct Dimension {
    #[arg(long)]
    pub n: Option<u32>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub point: Point,
    /// Initial height φ(0)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Outer radius of the computation (must exceed 10)
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Fit window in s = ln r, as `lo,hi`; chosen automatically if omitted
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// `algebraic` skips the shooting runs
    #[arg(long, value_enum)]
    pub scope: Option<ScopeArg>,
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Tolerance overrides. Unset values fall back to the config file, then to
/// the built-in defaults.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct TolArgs {
    /// Relative tolerance of the ODE integrator
    #[arg(long = "tol-integrator")]
    pub integrator: Option<f64>,
    /// Relative residual accepted for roots of the eigenvalue and rung polynomials
    #[arg(long = "tol-root")]
    pub root: Option<f64>,
    /// Relative error accepted between the fitted a₀ and L
    #[arg(long = "tol-fit")]
    pub fit: Option<f64>,
    /// Half-width of the band around a rung treated as the rung itself
    #[arg(long = "tol-rung")]
    pub rung: Option<f64>,
    /// Required |r^m φ(r_max)/L − 1| for a converged shot
    #[arg(long = "tol-target")]
    pub target: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScopeArg {
    Algebraic,
    Full,
}

pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("window start `{a}`: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("window end `{b}`: {e}"))?;
    if !(lo < hi) {
        return Err(format!("window start {lo} must be below its end {hi}"));
    }
    Ok((lo, hi))
}
