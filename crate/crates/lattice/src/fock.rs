//! Brute-force many-body evaluation of the two-time measurement protocol on
//! the full Fock space of a short chain.
//!
//! Basis states are occupation bitmasks (bit `i` set when site `i` is
//! occupied), with Jordan-Wigner ordering by site index. The initial density
//! matrix, the evolution and the projectors on the eigenspaces of the counting
//! observable are all built explicitly, so nothing here relies on Gaussian
//! state identities.

use faer::{Mat, MatRef, Side};
use ness_core::C64;

use crate::chain::{single_particle_hamiltonians, ChainSpec};
use crate::error::{LatticeError, Result};
use crate::fcs::QuadraticObservable;

pub const MAX_SITES: usize = 8;

/// Outcomes with smaller probability magnitude are roundoff of forbidden
/// transitions and are dropped.
pub const NEGLIGIBLE: f64 = 1e-15;

/// Second quantization of the single-particle matrix `a`: `sum a_ij c_i^dag c_j`.
pub fn many_body(a: MatRef<'_, f64>) -> Mat<f64> {
    let n = a.nrows();
    let dim = 1usize << n;
    let mut out = Mat::<f64>::zeros(dim, dim);
    for s in 0..dim {
        for j in 0..n {
            if s & (1 << j) == 0 {
                continue;
            }
            let s1 = s & !(1 << j);
            let sign_j = parity_below(s, j);
            for i in 0..n {
                let aij = a[(i, j)];
                if aij == 0.0 || s1 & (1 << i) != 0 {
                    continue;
                }
                let s2 = s1 | (1 << i);
                let sign = sign_j * parity_below(s1, i);
                out[(s2, s)] += sign * aij;
            }
        }
    }
    out
}

/// `(-1)^(number of occupied sites below i)`.
fn parity_below(s: usize, i: usize) -> f64 {
    if (s & ((1 << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn eigh(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LatticeError::Eigen)?;
    let vals = (0..a.nrows()).map(|i| e.S()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Many-body density matrix `e^{-K}/Z` of the partitioned initial state, with
/// `K = beta_l (H_l - mu_l N_l) + beta_r (H_r - mu_r N_r)`.
pub fn initial_density(spec: &ChainSpec) -> Result<Mat<f64>> {
    let n = spec.n_sites;
    if n > MAX_SITES {
        return Err(LatticeError::FockTooLarge { n, max: MAX_SITES });
    }
    let r = spec.reservoirs;
    if !r.beta_l.is_finite() || !r.beta_r.is_finite() {
        return Err(LatticeError::InvalidSpec {
            field: "reservoirs",
            reason: "the Fock oracle needs finite inverse temperatures".into(),
        });
    }
    let dim = 1usize << n;
    let hs = single_particle_hamiltonians(spec);
    let half = spec.half();
    let k = Mat::from_fn(n, n, |i, j| match (i < half, j < half) {
        (true, true) => r.beta_l * (hs.left[(i, j)] - if i == j { r.mu_l } else { 0.0 }),
        (false, false) => {
            r.beta_r * (hs.right[(i - half, j - half)] - if i == j { r.mu_r } else { 0.0 })
        }
        _ => 0.0,
    });

    let (kv, ku) = eigh(&many_body(k.as_ref()))?;
    let kmin = kv.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = kv.iter().map(|x| (-(x - kmin)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let scaled = Mat::from_fn(dim, dim, |a, m| ku[(a, m)] * weights[m] / z);
    Ok(&scaled * ku.transpose())
}

/// Distribution of the transferred quantity `q_after - q_before`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferDistribution {
    /// `(transfer, probability)`, sorted by transfer.
    pub atoms: Vec<(f64, f64)>,
}

impl TransferDistribution {
    pub fn generating_function(&self, theta: f64) -> C64 {
        self.atoms
            .iter()
            .map(|&(x, p)| C64::from_polar(p, theta * x))
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// Runs the two-time protocol for `q` on the partitioned initial state of
/// `spec`, evolved for time `t` with the joined chain.
pub fn two_time_distribution(
    spec: &ChainSpec,
    q: &QuadraticObservable,
    t: f64,
) -> Result<TransferDistribution> {
    let n = spec.n_sites;
    if n > MAX_SITES {
        return Err(LatticeError::FockTooLarge { n, max: MAX_SITES });
    }
    let dim = 1usize << n;
    let hs = single_particle_hamiltonians(spec);
    let rho0 = initial_density(spec)?;

    // U = e^{-iHt}
    let (hv, hu) = eigh(&many_body(hs.full.as_ref()))?;
    let vc = Mat::from_fn(dim, dim, |a, m| C64::new(hu[(a, m)], 0.0));
    let vd = Mat::from_fn(dim, dim, |a, m| vc[(a, m)] * C64::from_polar(1.0, -hv[m] * t));
    let u = &vd * vc.transpose();

    // Eigenspaces of the counting observable.
    let (qv, qu) = eigh(&many_body(q.matrix()))?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| qv[a].total_cmp(&qv[b]));
    let mut groups: Vec<(f64, Vec<usize>)> = vec![];
    for m in order {
        match groups.last_mut() {
            Some((v, members)) if (qv[m] - *v).abs() < 1e-9 => members.push(m),
            _ => groups.push((qv[m], vec![m])),
        }
    }
    let projectors: Vec<Mat<C64>> = groups
        .iter()
        .map(|(_, members)| {
            let w = Mat::from_fn(dim, members.len(), |a, j| C64::new(qu[(a, members[j])], 0.0));
            &w * w.transpose()
        })
        .collect();
    let rho0c = Mat::from_fn(dim, dim, |a, b| C64::new(rho0[(a, b)], 0.0));

    let mut atoms: Vec<(f64, f64)> = vec![];
    for (pa, (qa, _)) in projectors.iter().zip(&groups) {
        let sigma = &u * (pa * &rho0c * pa) * u.adjoint();
        for (pb, (qb, _)) in projectors.iter().zip(&groups) {
            let prod = pb * &sigma;
            let p: f64 = (0..dim).map(|i| prod[(i, i)].re).sum();
            atoms.push((qb - qa, p));
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = vec![];
    for (x, p) in atoms {
        match merged.last_mut() {
            Some((y, acc)) if (x - *y).abs() < 1e-9 => *acc += p,
            _ => merged.push((x, p)),
        }
    }
    merged.retain(|a| a.1.abs() > NEGLIGIBLE);
    Ok(TransferDistribution { atoms: merged })
}
