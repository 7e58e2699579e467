//! Numerics for the time-fractional nonlocal equation ∂_t^α u = 𝓛u + f.
//!
//! Slowly varying intensities and their scale functions, Lévy symbols, heat
//! kernels, Mittag-Leffler fundamental solutions, a representation-formula
//! solver and numerical checks of the associated kernel bounds.

pub mod error;
pub mod fractional_time;
pub mod fundamental_solution;
pub mod grid;
pub mod heat_kernel;
pub mod kernel_scales;
pub mod mittag_leffler;
pub mod quad;
pub mod report;
pub mod solver;
pub mod special;
pub mod subordination;
pub mod sv_calculus;

pub use error::{Error, Result};
pub use report::{BoundReport, Sample, Verdict};

/// Library version embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
