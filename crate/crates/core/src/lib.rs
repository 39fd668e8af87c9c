//! Pseudo-spectral simulation and numerical-analysis harness for the
//! regularized Zakharov–Kuznetsov / Benjamin–Ono equation
//!
//! ```text
//! u_t + a (uⁿ)_x + (b ℋ u_t + u_yy)_x = 0
//! ```
//!
//! on a large periodic box standing in for the plane.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod families;
pub mod grid;
pub mod multipliers;
pub mod norms;
pub mod oracles;
pub mod par;
pub mod propagator;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{Field2D, GridSpec, Spectrum2D};
pub use par::Exec;
