//! Spinless nearest-neighbour chain `H = -(hopping/2) sum_j (c_j^dag c_{j+1} + h.c.)`,
//! dispersion `-hopping cos k`, Fermi velocity `hopping` at half filling.
//!
//! Sites are `0..n`; the left half is `0..n/2`. Bond `b` joins sites `b` and
//! `b + 1`, and the junction is bond `n/2 - 1`.

use faer::Mat;

use crate::error::{LatticeError, Result};

/// Reservoir parameters in hopping units. `beta = f64::INFINITY` denotes the
/// ground state at chemical potential `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservoirs {
    pub beta_l: f64,
    pub mu_l: f64,
    pub beta_r: f64,
    pub mu_r: f64,
}

impl Reservoirs {
    pub fn from_temperatures(t_l: f64, t_r: f64, mu_l: f64, mu_r: f64) -> Self {
        Reservoirs {
            beta_l: 1.0 / t_l,
            mu_l,
            beta_r: 1.0 / t_r,
            mu_r,
        }
    }

    pub fn equilibrium(beta: f64, mu: f64) -> Self {
        Reservoirs {
            beta_l: beta,
            mu_l: mu,
            beta_r: beta,
            mu_r: mu,
        }
    }

    pub fn swapped(&self) -> Self {
        Reservoirs {
            beta_l: self.beta_r,
            mu_l: self.mu_r,
            beta_r: self.beta_l,
            mu_r: self.mu_l,
        }
    }

    pub fn validate(&self, bandwidth: f64) -> Result<()> {
        for (name, beta) in [("beta_l", self.beta_l), ("beta_r", self.beta_r)] {
            if !(beta > 0.0) || beta.is_nan() {
                return Err(LatticeError::InvalidSpec {
                    field: name,
                    reason: format!("must be positive (infinity allowed), got {beta}"),
                });
            }
        }
        for (name, mu) in [("mu_l", self.mu_l), ("mu_r", self.mu_r)] {
            if !(mu.abs() < bandwidth) {
                return Err(LatticeError::InvalidSpec {
                    field: name,
                    reason: format!("|mu| must lie inside the band (< {bandwidth}), got {mu}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub hopping: f64,
    pub reservoirs: Reservoirs,
}

pub const DEFAULT_SITES: usize = 1200;

impl ChainSpec {
    pub fn new(n_sites: usize, hopping: f64, reservoirs: Reservoirs) -> Result<Self> {
        let spec = ChainSpec {
            n_sites,
            hopping,
            reservoirs,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 8 || !self.n_sites.is_multiple_of(2) {
            return Err(LatticeError::InvalidSpec {
                field: "n_sites",
                reason: format!("must be even and at least 8, got {}", self.n_sites),
            });
        }
        if !(self.hopping.is_finite() && self.hopping > 0.0) {
            return Err(LatticeError::InvalidSpec {
                field: "hopping",
                reason: format!("must be finite and positive, got {}", self.hopping),
            });
        }
        self.reservoirs.validate(self.hopping)
    }

    /// Amplitude of each bond term in the single-particle matrix.
    pub fn bond_amplitude(&self) -> f64 {
        -0.5 * self.hopping
    }

    pub fn half(&self) -> usize {
        self.n_sites / 2
    }

    pub fn junction_bond(&self) -> usize {
        self.half() - 1
    }

    pub fn n_bonds(&self) -> usize {
        self.n_sites - 1
    }

    /// Maximal group velocity, which is also the Fermi velocity at half filling.
    pub fn fermi_velocity(&self) -> f64 {
        self.hopping
    }
}

/// Full chain and the two decoupled halves.
#[derive(Debug, Clone)]
pub struct Hamiltonians {
    pub full: Mat<f64>,
    pub left: Mat<f64>,
    pub right: Mat<f64>,
}

impl Hamiltonians {
    /// `left (+) right` embedded in the full site space.
    pub fn decoupled(&self) -> Mat<f64> {
        let half = self.left.nrows();
        let n = half + self.right.nrows();
        Mat::from_fn(n, n, |i, j| match (i < half, j < half) {
            (true, true) => self.left[(i, j)],
            (false, false) => self.right[(i - half, j - half)],
            _ => 0.0,
        })
    }
}

fn open_chain(n: usize, amplitude: f64) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { amplitude } else { 0.0 })
}

pub fn single_particle_hamiltonians(spec: &ChainSpec) -> Hamiltonians {
    let a = spec.bond_amplitude();
    Hamiltonians {
        full: open_chain(spec.n_sites, a),
        left: open_chain(spec.half(), a),
        right: open_chain(spec.n_sites - spec.half(), a),
    }
}
