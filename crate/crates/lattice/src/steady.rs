//! Steady-window measurements: time averages at the junction and the chiral
//! decorrelation of right and left movers.

use ness_core::C64;

use crate::chain::ChainSpec;
use crate::error::{LatticeError, Result};
use crate::observables::{chiral_energy, SparseOp};
use crate::state::Evolution;

/// Margin, in sites at unit velocity, by which the front must have passed a
/// point before it counts as steady.
pub const STEADY_MARGIN: f64 = 20.0;

/// Default averaging window `[n/8, n/4]` in hopping units.
pub fn default_window(spec: &ChainSpec) -> (f64, f64) {
    let n = spec.n_sites as f64 / spec.hopping;
    (n / 8.0, n / 4.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeAverage {
    pub mean: f64,
    /// Largest deviation of a sample from the mean, relative to the mean.
    pub max_relative_deviation: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Samples `op` at `count` evenly spaced times in `[t0, t1]` and averages.
pub fn time_average(
    evolution: &Evolution,
    op: &SparseOp,
    window: (f64, f64),
    count: usize,
) -> Result<TimeAverage> {
    if count < 2 {
        return Err(LatticeError::TimeGrid {
            needed: 2,
            got: count,
        });
    }
    let sites = op.support();
    let samples: Vec<(f64, f64)> = (0..count)
        .map(|k| {
            let t = window.0 + (window.1 - window.0) * k as f64 / (count - 1) as f64;
            (t, op.expectation(&evolution.local(t, &sites)).re)
        })
        .collect();
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / count as f64;
    let max_relative_deviation = samples
        .iter()
        .map(|s| ((s.1 - mean) / mean).abs())
        .fold(0.0, f64::max);
    Ok(TimeAverage {
        mean,
        max_relative_deviation,
        samples,
    })
}

/// Checks that bond `b` is inside the steady region at time `t`: the front,
/// moving at the Fermi velocity, has passed it by [`STEADY_MARGIN`], and the
/// reflections from the open ends have not arrived (`t <= n/4`).
pub fn check_steady(spec: &ChainSpec, b: usize, t: f64) -> Result<()> {
    let distance = (b as f64 - spec.junction_bond() as f64).abs();
    let reach = spec.fermi_velocity() * t - STEADY_MARGIN;
    let window_end = default_window(spec).1;
    if distance > reach || t > window_end || b < 1 || b + 2 >= spec.n_sites {
        return Err(LatticeError::OutsideSteadyWindow {
            site: b,
            time: t,
            reach,
            window_end,
        });
    }
    Ok(())
}

/// `|<h_+(x_left) h_-(x_right)>_c|` normalized by the geometric mean of the
/// same-point fluctuations `<h_+ h_+>_c(x_left)` and `<h_- h_->_c(x_right)`.
pub fn chiral_decorrelation(
    evolution: &Evolution,
    spec: &ChainSpec,
    t: f64,
    x_left: usize,
    x_right: usize,
) -> Result<f64> {
    check_steady(spec, x_left, t)?;
    check_steady(spec, x_right, t)?;
    let plus = chiral_energy(spec, x_left, true);
    let minus = chiral_energy(spec, x_right, false);
    let mut sites = plus.support();
    sites.extend(minus.support());
    sites.sort_unstable();
    sites.dedup();
    let local = evolution.local(t, &sites);
    let cross: C64 = plus.connected(&minus, &local);
    let pp = plus.connected(&plus, &local).re;
    let mm = minus.connected(&minus, &local).re;
    Ok(cross.norm() / (pp * mm).sqrt())
}
