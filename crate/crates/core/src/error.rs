use thiserror::Error;

/// Errors produced by the spectral, ladder, shooting and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "p = {p} is below the critical exponent for n = {n}: the linearisation has a complex \
         eigenvalue pair (P(lambda*) = {value:e})"
    )]
    SubcriticalInput { n: u32, p: f64, value: f64 },

    #[error("no finite critical exponent for n = {n} (p_c = +inf for n <= 12)")]
    NoPcValue { n: u32 },

    #[error("ladder mismatch for n = {n}: {detail}")]
    LadderMismatch { n: u32, detail: String },

    #[error("integrator failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("no blow-up/sign-loss bracket found: {0}")]
    BracketNotFound(String),

    #[error("shooting did not converge: {0}")]
    NoConvergence(String),

    #[error("grid too coarse: {0} interior points, at least 9 required")]
    GridTooCoarse(usize),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("ill-conditioned least-squares problem (condition number {0:e})")]
    IllConditioned(f64),

    #[error("fit window too short: {0}")]
    WindowTooShort(String),
}

pub type Result<T> = std::result::Result<T, Error>;
