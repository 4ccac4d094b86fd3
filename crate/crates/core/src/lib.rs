//! Quadrature squeezing from a sub-threshold OPO pumped by a drifting laser.
//!
//! - [`physics`]: input-output coefficients, homodyne noise spectra, optimal phase and
//!   the dispersion-compensating delay.
//! - [`drift`]: averaging over the laser/cavity detuning distribution, delay scans and the
//!   optimal delay.
//! - [`ledger`]: group-delay budgets of the two interferometer arms.
//! - [`fit`]: electronic-noise subtraction and fits of squeezing-vs-delay data.

pub mod drift;
pub mod error;
pub mod fit;
pub mod ledger;
pub mod optimize;
pub mod physics;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
