//! Closed-form predictions for energy and charge transport in the
//! non-equilibrium steady state of a conformal junction.
//!
//! The crate is organised as:
//!
//! - [`thermo`]: reservoir parameters and counting fields.
//! - [`ldf`]: chiral and full cumulant generating functions, currents,
//!   shifted one-point functions and the fluctuation symmetry.
//! - [`series`]: truncated bivariate power series used to read off cumulants.
//! - [`characters`]: q-series for the Dedekind eta function and rational
//!   u(1) characters, with the finite-size route to thermal one-point functions.
//! - [`numdiff`]: central-difference stencils with Richardson extrapolation.
//!
//! All quantities are in natural units, `hbar = k_B = v = 1`.

// Range checks are written as `!(x > a)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characters;
pub mod error;
pub mod ldf;
pub mod numdiff;
pub mod series;
pub mod thermo;

pub use error::{Error, Result};
pub use thermo::{CountingPoint, Side, ThermoPoint};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
