//! Light-cone front of the current after the junction is closed.
//!
//! For a probe at distance `d` from the junction, the plateau is the mean
//! current over `t in [1.5 d, 2.5 d]`, the arrival time is the first time the
//! current reaches half the plateau, and the pre-front residual is the largest
//! current magnitude before `0.8` times the arrival, relative to the plateau.

use crate::chain::ChainSpec;
use crate::error::{LatticeError, Result};
use crate::observables::{bond_energy_current, charge_current};
use crate::state::Evolution;

pub const PLATEAU_WINDOW: (f64, f64) = (1.5, 2.5);
pub const PRE_FRONT_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontReport {
    pub distance: f64,
    pub arrival: f64,
    pub pre_front_residual: f64,
    pub plateau: f64,
    /// Change of the fitted plateau line across its window, relative to the plateau.
    pub drift: f64,
}

impl FrontReport {
    /// `arrival * v / distance`; one for a front moving at velocity `v`.
    pub fn arrival_ratio(&self, velocity: f64) -> f64 {
        self.arrival * velocity / self.distance
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Analyses the time series `values[k]` at `times[k]` of a current probed at
/// `distance` from the junction.
pub fn front_detector(times: &[f64], values: &[f64], distance: f64) -> Result<FrontReport> {
    let fail = |reason: String| LatticeError::FrontNotFound { distance, reason };
    if times.len() != values.len() || times.len() < 4 {
        return Err(fail("time series too short or mismatched".into()));
    }
    let (lo, hi) = (PLATEAU_WINDOW.0 * distance, PLATEAU_WINDOW.1 * distance);
    if times[0] > 0.0 || *times.last().unwrap() < hi {
        return Err(fail(format!(
            "samples cover [{}, {}], need [0, {hi}]",
            times[0],
            times.last().unwrap()
        )));
    }
    let (wt, wv): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, v)| (*t, *v))
        .unzip();
    if wt.len() < 2 {
        return Err(fail("plateau window holds fewer than two samples".into()));
    }
    let plateau = wv.iter().sum::<f64>() / wv.len() as f64;
    if plateau == 0.0 || !plateau.is_finite() {
        return Err(fail("no current on the plateau".into()));
    }
    let (_, slope) = linear_fit(&wt, &wv);
    let drift = (slope * (hi - lo) / plateau).abs();
    let arrival = times
        .iter()
        .zip(values)
        .find(|(_, v)| **v / plateau >= 0.5)
        .map(|(t, _)| *t)
        .ok_or_else(|| fail("current never reaches half the plateau".into()))?;
    let pre_front_residual = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t <= PRE_FRONT_FRACTION * arrival)
        .map(|(_, v)| (v / plateau).abs())
        .fold(0.0, f64::max);
    Ok(FrontReport {
        distance,
        arrival,
        pre_front_residual,
        plateau,
        drift,
    })
}

/// Current whose front is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontQuantity {
    Energy,
    Charge,
}

/// Which side of the junction a probe sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeSide {
    Left,
    Right,
}

/// Current time series at bonds `distance` away from the junction,
/// sampled every `dt` from 0 through `PLATEAU_WINDOW.1 * distance`, and their
/// front reports.
pub fn front_scan(
    evolution: &Evolution,
    spec: &ChainSpec,
    quantity: FrontQuantity,
    probes: &[(usize, ProbeSide)],
    dt: f64,
) -> Result<Vec<FrontReport>> {
    let center = spec.junction_bond();
    let ops: Vec<_> = probes
        .iter()
        .map(|&(d, side)| {
            let b = match side {
                ProbeSide::Left => center.checked_sub(d),
                ProbeSide::Right => Some(center + d).filter(|b| b + 2 < spec.n_sites),
            }
            .filter(|&b| b >= 1)
            .ok_or_else(|| LatticeError::FrontNotFound {
                distance: d as f64,
                reason: "probe outside the chain".into(),
            })?;
            Ok(match quantity {
                FrontQuantity::Energy => bond_energy_current(spec, b),
                FrontQuantity::Charge => charge_current(spec, b),
            })
        })
        .collect::<Result<_>>()?;
    let mut sites: Vec<usize> = ops.iter().flat_map(|o| o.support()).collect();
    sites.sort_unstable();
    sites.dedup();
    let t_end = probes
        .iter()
        .map(|&(d, _)| PLATEAU_WINDOW.1 * d as f64)
        .fold(0.0, f64::max);
    let steps = (t_end / dt).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let mut series = vec![Vec::with_capacity(times.len()); ops.len()];
    for &t in &times {
        let local = evolution.local(t, &sites);
        for (s, op) in series.iter_mut().zip(&ops) {
            s.push(op.expectation(&local).re);
        }
    }
    probes
        .iter()
        .zip(&series)
        .map(|(&(d, _), s)| front_detector(&times, s, d as f64))
        .collect()
}
