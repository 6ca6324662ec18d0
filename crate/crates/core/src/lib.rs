pub mod error;
pub mod expansion;
pub mod ode;
pub mod ladder;
pub mod lsq;
pub mod params;
pub mod quartic;
pub mod roots;
pub mod shooting;
pub mod spectrum;
pub mod stencil;
pub mod verify;

pub use error::{Error, Result};
pub use ladder::{compute_ladder, compute_pc, CriticalLadder};
pub use params::ProblemParams;
pub use spectrum::{compute_spectrum, Spectrum};
