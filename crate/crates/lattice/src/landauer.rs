//! Long-time transport of the perfectly transmitting junction from band
//! integrals.
//!
//! Right movers (`v(k) > 0`, `k in (0, pi)`) come from the left reservoir and
//! left movers from the right one, so with `d epsilon = v dk` every quantity
//! below is an integral over the right-moving half of the band.

use std::f64::consts::PI;

use ness_core::C64;

use crate::chain::{ChainSpec, Reservoirs};
use crate::error::{LatticeError, Result};
use crate::quad;
use crate::state::fermi;

pub const REL_TOL: f64 = 1e-12;
pub const ABS_TOL: f64 = 1e-15;
/// Largest `|arg|` of the logarithm's argument accepted before the principal
/// sheet is considered at risk.
pub const BRANCH_GUARD: f64 = 0.9 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub hopping: f64,
}

impl BandSpec {
    pub fn new(hopping: f64) -> Self {
        BandSpec { hopping }
    }

    pub fn of_chain(spec: &ChainSpec) -> Self {
        BandSpec::new(spec.hopping)
    }

    pub fn energy(&self, k: f64) -> f64 {
        -self.hopping * k.cos()
    }

    pub fn velocity(&self, k: f64) -> f64 {
        self.hopping * k.sin()
    }

    /// Momentum in `[0, pi]` of the right mover at energy `e`, if inside the band.
    pub fn momentum(&self, e: f64) -> Option<f64> {
        let x = -e / self.hopping;
        (x.abs() <= 1.0).then(|| x.acos())
    }

    /// Band edges, Fermi points and a few thermal widths around them.
    fn breakpoints(&self, r: &Reservoirs) -> Vec<f64> {
        let mut pts = vec![0.0, PI];
        for (beta, mu) in [(r.beta_l, r.mu_l), (r.beta_r, r.mu_r)] {
            let width = if beta.is_finite() { 1.0 / beta } else { 0.0 };
            for m in [-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0] {
                if let Some(k) = self.momentum(mu + m * width) {
                    pts.push(k);
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Counting {
    Charge,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyCurrents {
    pub energy: f64,
    pub charge: f64,
}

fn occupations(band: &BandSpec, r: &Reservoirs, k: f64) -> (f64, f64, f64) {
    let e = band.energy(k);
    (e, fermi(e, r.beta_l, r.mu_l), fermi(e, r.beta_r, r.mu_r))
}

/// Hole occupation `1 - f`, evaluated without the subtraction so that it
/// keeps full relative precision deep below the chemical potential.
fn hole(e: f64, beta: f64, mu: f64) -> f64 {
    fermi(-e, beta, -mu)
}

/// `J = int_0^pi dk/2pi v(k) w(k) (f_l - f_r)` with `w = epsilon` for energy
/// and `w = 1` for charge.
pub fn steady_currents(band: &BandSpec, r: &Reservoirs) -> Result<SteadyCurrents> {
    r.validate(band.hopping)?;
    let pts = band.breakpoints(r);
    let run = |weight: fn(f64) -> f64| {
        quad::integrate(
            |k| {
                let (e, fl, fr) = occupations(band, r, k);
                Ok(C64::new(band.velocity(k) * weight(e) * (fl - fr) / (2.0 * PI), 0.0))
            },
            &pts,
            REL_TOL,
            ABS_TOL,
        )
        .map(|v| v.re)
    };
    Ok(SteadyCurrents {
        energy: run(|e| e)?,
        charge: run(|_| 1.0)?,
    })
}

/// Scaled generating function per unit time,
/// `int_0^pi dk/2pi v log[1 + f_l(1-f_r)(e^{i x} - 1) + f_r(1-f_l)(e^{-i x} - 1)]`
/// with `x = field` for charge and `x = field * epsilon(k)` for energy.
pub fn fcs_rate(band: &BandSpec, r: &Reservoirs, field: C64, which: Counting) -> Result<C64> {
    r.validate(band.hopping)?;
    if field == C64::new(0.0, 0.0) {
        return Ok(field);
    }
    let i = C64::new(0.0, 1.0);
    quad::integrate(
        |k| {
            let (e, fl, fr) = occupations(band, r, k);
            let x = match which {
                Counting::Charge => field,
                Counting::Energy => field * e,
            };
            let (hl, hr) = (hole(e, r.beta_l, r.mu_l), hole(e, r.beta_r, r.mu_r));
            let arg = 1.0 + fl * hr * ((i * x).exp() - 1.0) + fr * hl * ((-i * x).exp() - 1.0);
            if !(arg.arg().abs() <= BRANCH_GUARD) || arg.norm() == 0.0 {
                return Err(LatticeError::BranchCut {
                    k,
                    re: arg.re,
                    im: arg.im,
                });
            }
            Ok(band.velocity(k) * arg.ln() / (2.0 * PI))
        },
        &band.breakpoints(r),
        REL_TOL,
        ABS_TOL,
    )
}

/// `n`-th cumulant of a Bernoulli variable with success probability `f`.
pub fn bernoulli_cumulant(n: usize, f: f64) -> f64 {
    let g = f * (1.0 - f);
    match n {
        1 => f,
        2 => g,
        3 => g * (1.0 - 2.0 * f),
        4 => g * (1.0 - 6.0 * g),
        _ => panic!("Bernoulli cumulants are provided for orders 1..=4, got {n}"),
    }
}

/// Cumulant rates `kappa_n`, `n = 1..=n_max <= 4`. Per mode the transfer is
/// the sum of an emission from the left and an opposite one from the right,
/// so `kappa_n = int dk/2pi v w^n [c_n(f_l) + (-1)^n c_n(f_r)]`.
pub fn cumulant_rates(
    band: &BandSpec,
    r: &Reservoirs,
    which: Counting,
    n_max: usize,
) -> Result<Vec<f64>> {
    assert!((1..=4).contains(&n_max), "cumulant order must be 1..=4");
    r.validate(band.hopping)?;
    let pts = band.breakpoints(r);
    (1..=n_max)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            quad::integrate(
                |k| {
                    let (e, fl, fr) = occupations(band, r, k);
                    let w = match which {
                        Counting::Charge => 1.0,
                        Counting::Energy => e,
                    };
                    let c = bernoulli_cumulant(n, fl) + sign * bernoulli_cumulant(n, fr);
                    Ok(C64::new(band.velocity(k) * w.powi(n as i32) * c / (2.0 * PI), 0.0))
                },
                &pts,
                REL_TOL,
                ABS_TOL,
            )
            .map(|v| v.re)
        })
        .collect()
}

/// Conversion between lattice charge units and the unit-normalized chiral
/// current: `mu_cft = scale * mu_lattice`, `kappa_n^cft = kappa_n^lattice / scale^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeCalibration {
    pub scale: f64,
}

impl ChargeCalibration {
    /// Fixes the scale from the mean charge current at one reference point,
    /// `J_lattice / scale = pi * scale * (mu_l - mu_r)`.
    pub fn from_reference(band: &BandSpec, r: &Reservoirs) -> Result<Self> {
        let dmu = r.mu_l - r.mu_r;
        if dmu == 0.0 {
            return Err(LatticeError::InvalidSpec {
                field: "reservoirs",
                reason: "charge calibration needs mu_l != mu_r".into(),
            });
        }
        let j = steady_currents(band, r)?.charge;
        Ok(ChargeCalibration {
            scale: (j / (PI * dmu)).sqrt(),
        })
    }

    pub fn chemical_potential(&self, mu_lattice: f64) -> f64 {
        self.scale * mu_lattice
    }

    pub fn cumulant(&self, n: usize, kappa_lattice: f64) -> f64 {
        kappa_lattice / self.scale.powi(n as i32)
    }
}
