//! Local quadratic observables `A = sum_ij a_ij c_i^dag c_j` as sparse
//! single-particle matrices, with expectation values and Wick-connected
//! correlators in Gaussian states.
//!
//! Energy is stored per bond (`a_b`, the hopping term of bond `b`). Currents
//! follow from the continuity equations: the charge current across bond `b` is
//! `i [n_b, a_b]`, and the energy current from bond `b` to bond `b + 1` is
//! `i [a_b, a_{b+1}]`.

use std::collections::BTreeMap;

use ness_core::C64;

use crate::chain::ChainSpec;
use crate::state::Correlations;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    entries: BTreeMap<(usize, usize), C64>,
}

impl SparseOp {
    pub fn zero() -> Self {
        SparseOp {
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut op = Self::zero();
        for (i, j, v) in entries {
            op.add_entry(i, j, v);
        }
        op
    }

    fn add_entry(&mut self, i: usize, j: usize, v: C64) {
        let e = self.entries.entry((i, j)).or_insert(C64::new(0.0, 0.0));
        *e += v;
        if *e == C64::new(0.0, 0.0) {
            self.entries.remove(&(i, j));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    /// Sites touched by the operator, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.entries.keys().flat_map(|&(i, j)| [i, j]).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::from_entries(self.entries().map(|(i, j, v)| (i, j, v * k)))
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        Self::from_entries(self.entries().chain(other.entries()))
    }

    pub fn matmul(&self, other: &SparseOp) -> Self {
        let mut out = Self::zero();
        for (i, k, a) in self.entries() {
            for (_, j, b) in other.entries.range((k, 0)..(k + 1, 0)).map(|(&(k2, j), &b)| (k2, j, b)) {
                out.add_entry(i, j, a * b);
            }
        }
        out
    }

    /// Single-particle image of the many-body commutator `[A, B]`.
    pub fn commutator(&self, other: &SparseOp) -> Self {
        self.matmul(other).add(&other.matmul(self).scale(C64::new(-1.0, 0.0)))
    }

    /// `<A> = sum_ij a_ij C_ji`.
    pub fn expectation(&self, c: &impl Correlations) -> C64 {
        self.entries().map(|(i, j, v)| v * c.get(j, i)).sum()
    }

    /// Wick-connected `<A B> - <A><B> = Tr(a (1 - C) b C)`.
    pub fn connected(&self, other: &SparseOp, c: &impl Correlations) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                let hole = if j == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) } - c.get(j, k);
                acc += a * hole * b * c.get(l, i);
            }
        }
        acc
    }
}

pub fn density(site: usize) -> SparseOp {
    SparseOp::from_entries([(site, site, C64::new(1.0, 0.0))])
}

/// Hopping energy of bond `b`.
pub fn bond_energy(spec: &ChainSpec, b: usize) -> SparseOp {
    let a = C64::new(spec.bond_amplitude(), 0.0);
    SparseOp::from_entries([(b, b + 1, a), (b + 1, b, a)])
}

/// Particle current across bond `b`, positive from site `b` to `b + 1`.
pub fn charge_current(spec: &ChainSpec, b: usize) -> SparseOp {
    density(b).commutator(&bond_energy(spec, b)).scale(I)
}

/// Energy current from bond `b` into bond `b + 1`, located on site `b + 1`.
pub fn energy_current(spec: &ChainSpec, b: usize) -> SparseOp {
    bond_energy(spec, b)
        .commutator(&bond_energy(spec, b + 1))
        .scale(I)
}

/// Energy current through bond `b`: the mean of the currents entering and
/// leaving it. Requires `1 <= b <= n - 3`.
pub fn bond_energy_current(spec: &ChainSpec, b: usize) -> SparseOp {
    energy_current(spec, b - 1)
        .add(&energy_current(spec, b))
        .scale(C64::new(0.5, 0.0))
}

/// Energy current through the junction bond.
pub fn junction_energy_current(spec: &ChainSpec) -> SparseOp {
    bond_energy_current(spec, spec.junction_bond())
}

/// Particle current through the junction bond.
pub fn junction_charge_current(spec: &ChainSpec) -> SparseOp {
    charge_current(spec, spec.junction_bond())
}

/// Chiral energy densities `h_+- = (h +- p) / 2` on bond `b`, with the
/// momentum density `p` identified with the local energy current.
pub fn chiral_energy(spec: &ChainSpec, b: usize, right_moving: bool) -> SparseOp {
    let sign = if right_moving { 1.0 } else { -1.0 };
    bond_energy(spec, b)
        .add(&bond_energy_current(spec, b).scale(C64::new(sign, 0.0)))
        .scale(C64::new(0.5, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    EnergyDensity,
    EnergyCurrent,
    ChargeDensity,
    ChargeCurrent,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 4] = [
        ProfileKind::EnergyDensity,
        ProfileKind::EnergyCurrent,
        ProfileKind::ChargeDensity,
        ProfileKind::ChargeCurrent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::EnergyDensity => "energy_density",
            ProfileKind::EnergyCurrent => "energy_current",
            ProfileKind::ChargeDensity => "charge_density",
            ProfileKind::ChargeCurrent => "charge_current",
        }
    }
}

/// Values of one observable family along the chain at a fixed time.
///
/// Indexing: energy density per bond `0..n-1`; energy current per link
/// `b -> b+1` for `b` in `0..n-2`; charge density per site; charge current per
/// bond.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableProfile {
    pub kind: ProfileKind,
    pub time: f64,
    pub values: Vec<f64>,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
}

fn profile(
    kind: ProfileKind,
    time: f64,
    ops: impl Iterator<Item = SparseOp>,
    c: &impl Correlations,
) -> ObservableProfile {
    let mut max_imag: f64 = 0.0;
    let values = ops
        .map(|op| {
            let v = op.expectation(c);
            max_imag = max_imag.max(v.im.abs());
            v.re
        })
        .collect();
    ObservableProfile {
        kind,
        time,
        values,
        max_imag,
    }
}

pub fn observable_profiles(
    c: &impl Correlations,
    spec: &ChainSpec,
    time: f64,
) -> Vec<ObservableProfile> {
    let n = spec.n_sites;
    vec![
        profile(
            ProfileKind::EnergyDensity,
            time,
            (0..n - 1).map(|b| bond_energy(spec, b)),
            c,
        ),
        profile(
            ProfileKind::EnergyCurrent,
            time,
            (0..n - 2).map(|b| energy_current(spec, b)),
            c,
        ),
        profile(
            ProfileKind::ChargeDensity,
            time,
            (0..n).map(density),
            c,
        ),
        profile(
            ProfileKind::ChargeCurrent,
            time,
            (0..n - 1).map(|b| charge_current(spec, b)),
            c,
        ),
    ]
}
