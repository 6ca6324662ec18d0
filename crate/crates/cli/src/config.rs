//! Flag/config-file/default merging. Flags win over the file, the file wins
//! over the built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use biharmonic::compute_pc;
use biharmonic::expansion::RUNG_TOL;
use biharmonic::shooting::ShootControls;
use serde::Deserialize;

use crate::args::{Format, ScopeArg, TolArgs};
use crate::InputError;

/// Contents of a `--config` TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<u32>,
    pub p: Option<PSpec>,
    pub alpha: Option<f64>,
    pub r_max: Option<f64>,
    pub window: Option<[f64; 2]>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub n_min: Option<u32>,
    pub n_max: Option<u32>,
    pub scope: Option<ScopeArg>,
    #[serde(default)]
    pub tol: TolArgs,
}

/// `p` in a config file may be written as a number or as a `pc±x` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Value(f64),
    Text(String),
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| InputError(format!("config {}: {e}", path.display())).into())
    }
}

/// Resolved tolerances, all strictly positive.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub integrator: f64,
    pub root: f64,
    pub fit: f64,
    pub rung: f64,
    pub target: f64,
}

/// Default bound on `|λ₂ − kλ₃|/|λ₃|` at the rungs when `--tol-root` is not
/// given to `critical`; the rungs are bisected in `p`, so this coincidence
/// only holds to root-conditioning accuracy.
pub const RUNG_COINCIDENCE_TOL: f64 = 1e-5;

/// Default bound on the relative polynomial residual of the eigenvalues.
pub const EIGEN_ROOT_TOL: f64 = 1e-9;

pub const FIT_TOL: f64 = 1e-3;

impl Tolerances {
    pub fn resolve(flags: &TolArgs, file: &TolArgs, root_default: f64) -> Result<Self, InputError> {
        let shoot = ShootControls::default();
        let pick = |name: &str, f: Option<f64>, c: Option<f64>, d: f64| -> Result<f64, InputError> {
            let v = f.or(c).unwrap_or(d);
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(InputError(format!("--tol-{name} must be a positive number, got {v}")))
            }
        };
        Ok(Self {
            integrator: pick("integrator", flags.integrator, file.integrator, shoot.rtol)?,
            root: pick("root", flags.root, file.root, root_default)?,
            fit: pick("fit", flags.fit, file.fit, FIT_TOL)?,
            rung: pick("rung", flags.rung, file.rung, RUNG_TOL)?,
            target: pick("target", flags.target, file.target, shoot.target_tol)?,
        })
    }

    pub fn controls(&self, r_max: f64) -> ShootControls {
        ShootControls { r_max, rtol: self.integrator, target_tol: self.target, ..ShootControls::default() }
    }
}

pub fn require<T>(name: &str, flag: Option<T>, file: Option<T>) -> Result<T, InputError> {
    flag.or(file).ok_or_else(|| InputError(format!("--{name} is required (on the command line or in the config file)")))
}

/// Dimension for commands that take one.
pub fn dimension(flag: Option<u32>, file: &FileConfig) -> Result<u32, InputError> {
    let n = require("n", flag, file.n)?;
    if n < 5 {
        return Err(InputError(format!("dimension n = {n} must be at least 5")));
    }
    Ok(n)
}

/// The exponent, resolving `pc`, `pc+x` and `pc-x` against `p_c(n)`.
pub fn exponent(n: u32, flag: Option<&str>, file: Option<&PSpec>) -> anyhow::Result<f64> {
    let text = match (flag, file) {
        (Some(s), _) => s.to_owned(),
        (None, Some(PSpec::Value(v))) => return Ok(*v),
        (None, Some(PSpec::Text(s))) => s.clone(),
        (None, None) => return Err(InputError("--p is required (a number or pc, pc+x, pc-x)".into()).into()),
    };
    parse_exponent(n, &text)
}

pub fn parse_exponent(n: u32, text: &str) -> anyhow::Result<f64> {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("pc") else {
        return t.parse::<f64>().map_err(|_| InputError(format!("--p `{text}` is neither a number nor pc±x")).into());
    };
    let offset = if rest.is_empty() {
        0.0
    } else if rest.starts_with(['+', '-']) {
        rest.parse::<f64>().map_err(|_| InputError(format!("--p `{text}`: cannot parse offset `{rest}`")))?
    } else {
        return Err(InputError(format!("--p `{text}`: expected pc, pc+x or pc-x")).into());
    };
    Ok(compute_pc(n)? + offset)
}

pub fn r_max(flag: Option<f64>, file: &FileConfig) -> Result<f64, InputError> {
    let r = flag.or(file.r_max).unwrap_or(ShootControls::default().r_max);
    if !(r > 10.0) || !r.is_finite() {
        return Err(InputError(format!("--r-max must exceed 10, got {r}")));
    }
    Ok(r)
}

pub fn alpha(flag: Option<f64>, file: &FileConfig) -> Result<f64, InputError> {
    let a = flag.or(file.alpha).unwrap_or(1.0);
    if !(a > 0.0) || !a.is_finite() {
        return Err(InputError(format!("--alpha must be positive, got {a}")));
    }
    Ok(a)
}

/// `[n_min, n_max]` inside `[lo, hi]`.
pub fn n_range(
    flags: (Option<u32>, Option<u32>),
    file: &FileConfig,
    default: (u32, u32),
    bounds: (u32, u32),
) -> Result<(u32, u32), InputError> {
    let a = flags.0.or(file.n_min).unwrap_or(default.0);
    let b = flags.1.or(file.n_max).unwrap_or(default.1);
    if a < bounds.0 || b > bounds.1 || a > b {
        return Err(InputError(format!(
            "dimension range {a}..={b} must satisfy {} <= n_min <= n_max <= {}",
            bounds.0, bounds.1
        )));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pc_offsets() {
        let pc = compute_pc(13).unwrap();
        assert_eq!(parse_exponent(13, "pc").unwrap(), pc);
        assert_eq!(parse_exponent(13, "pc+0.5").unwrap(), pc + 0.5);
        assert_eq!(parse_exponent(13, "pc-1e-3").unwrap(), pc - 1e-3);
        assert_eq!(parse_exponent(13, "31.5").unwrap(), 31.5);
        assert!(parse_exponent(13, "pcx").is_err());
        assert!(parse_exponent(13, "abc").is_err());
        assert!(parse_exponent(12, "pc").is_err());
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = TolArgs { integrator: Some(1e-10), fit: Some(5e-3), ..Default::default() };
        let flags = TolArgs { fit: Some(2e-3), ..Default::default() };
        let t = Tolerances::resolve(&flags, &file, EIGEN_ROOT_TOL).unwrap();
        assert_eq!(t.integrator, 1e-10);
        assert_eq!(t.fit, 2e-3);
        assert_eq!(t.root, EIGEN_ROOT_TOL);
        assert_eq!(t.rung, RUNG_TOL);
        let bad = TolArgs { rung: Some(-1.0), ..Default::default() };
        assert!(Tolerances::resolve(&bad, &file, 1.0).is_err());
    }

    #[test]
    fn config_file_parses() {
        let c: FileConfig = toml::from_str("n = 15\np = \"pc+1\"\nwindow = [2.0, 6.0]\n[tol]\nfit = 1e-2\n").unwrap();
        assert_eq!(c.n, Some(15));
        assert!(matches!(c.p, Some(PSpec::Text(ref s)) if s == "pc+1"));
        assert_eq!(c.tol.fit, Some(1e-2));
        let c: FileConfig = toml::from_str("p = 30.0").unwrap();
        assert!(matches!(c.p, Some(PSpec::Value(v)) if v == 30.0));
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
