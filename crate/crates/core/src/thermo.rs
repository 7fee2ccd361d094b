//! External parameters of the junction and the counting fields conjugate to
//! the transferred energy and charge.

use std::fmt;

use crate::error::{Error, Result};
use crate::C64;

/// Which reservoir a chiral term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    /// A single chiral term evaluated on its own.
    Chiral,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
            Side::Chiral => f.write_str("chiral"),
        }
    }
}

/// Inverse temperatures, chemical potentials and central charge of the two
/// reservoirs. Constructed only through [`ThermoPoint::new`], so every value
/// in circulation satisfies `beta > 0`, `c > 0` and finiteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    beta_l: f64,
    beta_r: f64,
    mu_l: f64,
    mu_r: f64,
    c: f64,
}

impl ThermoPoint {
    pub fn new(beta_l: f64, beta_r: f64, mu_l: f64, mu_r: f64, c: f64) -> Result<Self> {
        positive("beta_l", beta_l)?;
        positive("beta_r", beta_r)?;
        positive("c", c)?;
        finite("mu_l", mu_l)?;
        finite("mu_r", mu_r)?;
        Ok(Self {
            beta_l,
            beta_r,
            mu_l,
            mu_r,
            c,
        })
    }

    /// Same as [`ThermoPoint::new`] but taking temperatures.
    pub fn from_temperatures(t_l: f64, t_r: f64, mu_l: f64, mu_r: f64, c: f64) -> Result<Self> {
        positive("t_l", t_l)?;
        positive("t_r", t_r)?;
        Self::new(1.0 / t_l, 1.0 / t_r, mu_l, mu_r, c)
    }

    pub fn beta_l(&self) -> f64 {
        self.beta_l
    }

    pub fn beta_r(&self) -> f64 {
        self.beta_r
    }

    pub fn mu_l(&self) -> f64 {
        self.mu_l
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn t_l(&self) -> f64 {
        1.0 / self.beta_l
    }

    pub fn t_r(&self) -> f64 {
        1.0 / self.beta_r
    }

    /// The point with the two reservoirs exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            beta_l: self.beta_r,
            beta_r: self.beta_l,
            mu_l: self.mu_r,
            mu_r: self.mu_l,
            c: self.c,
        }
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.beta_l, self.beta_r, self.mu_l, self.mu_r, c)
    }

    /// `(beta, mu)` of one reservoir.
    pub fn reservoir(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Left | Side::Chiral => (self.beta_l, self.mu_l),
            Side::Right => (self.beta_r, self.mu_r),
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

/// Energy counting field `lambda` and charge counting field `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingPoint {
    pub lambda: C64,
    pub nu: C64,
}

impl CountingPoint {
    pub fn new(lambda: C64, nu: C64) -> Self {
        Self { lambda, nu }
    }

    pub fn real(lambda: f64, nu: f64) -> Self {
        Self::new(C64::new(lambda, 0.0), C64::new(nu, 0.0))
    }

    pub fn origin() -> Self {
        Self::real(0.0, 0.0)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.lambda, -self.nu)
    }
}

/// Conversion of natural-unit results for display. The core never uses it.
///
/// Energies are measured in multiples of `energy_unit` joules; with
/// `hbar = k_B = 1` a temperature `T` in these units is `T * energy_unit / k_B`
/// kelvin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub energy_unit: f64,
}

impl Units {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const K_B: f64 = 1.380_649e-23;

    /// Units in which temperatures are given in kelvin.
    pub fn kelvin() -> Self {
        Self {
            energy_unit: Self::K_B,
        }
    }

    pub fn beta_from_kelvin(&self, temperature: f64) -> f64 {
        self.energy_unit / (Self::K_B * temperature)
    }

    pub fn temperature_kelvin(&self, t: f64) -> f64 {
        t * self.energy_unit / Self::K_B
    }

    /// Energy current in watts.
    pub fn energy_current_watts(&self, j_e: f64) -> f64 {
        j_e * self.energy_unit * self.energy_unit / Self::HBAR
    }

    /// Charge-quantum current in quanta per second.
    pub fn charge_current_per_second(&self, j_q: f64) -> f64 {
        j_q * self.energy_unit / Self::HBAR
    }
}
