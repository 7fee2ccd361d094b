//! Free-fermion chain realization of the partitioning protocol.
//!
//! Two halves of a tight-binding chain are prepared in Gibbs states at
//! different temperatures and chemical potentials, joined, and evolved
//! exactly through their correlation matrix. The crate provides local
//! observables and their profiles, light-cone front detection, chiral
//! decorrelation, determinant formulas for full counting statistics with a
//! many-body brute-force check, and Landauer band integrals for the long-time
//! limit.

// Range checks are written as `!(x > a)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod error;
pub mod fcs;
pub mod fock;
pub mod landauer;
pub mod front;
pub mod observables;
pub mod quad;
pub mod state;
pub mod steady;

pub use chain::{ChainSpec, Reservoirs};
pub use error::{LatticeError, Result};
