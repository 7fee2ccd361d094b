//! Gaussian states as correlation matrices `C_jk = <c_k^dag c_j>` and their
//! exact evolution `C(t) = u C0 u^dag` with `u = e^{-i h t}`.

use faer::{Mat, MatRef, Side};
use ness_core::C64;

use crate::chain::{single_particle_hamiltonians, ChainSpec};
use crate::error::{LatticeError, Result};

/// Fermi factor, with `beta = inf` treated as a step (half occupation exactly at `mu`).
pub fn fermi(energy: f64, beta: f64, mu: f64) -> f64 {
    if beta.is_infinite() {
        return if energy < mu {
            1.0
        } else if energy > mu {
            0.0
        } else {
            0.5
        };
    }
    let x = beta * (energy - mu);
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Eigendecomposition `h = V diag(eps) V^T` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eps: Vec<f64>,
    pub v: Mat<f64>,
}

impl Spectrum {
    pub fn new(h: MatRef<'_, f64>) -> Result<Self> {
        let e = h.self_adjoint_eigen(Side::Lower).map_err(|_| LatticeError::Eigen)?;
        let eps: Vec<f64> = (0..h.nrows()).map(|i| e.S()[i]).collect();
        Ok(Spectrum {
            eps,
            v: e.U().to_owned(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    /// `V diag(g(eps)) V^T`.
    pub fn apply_function(&self, g: impl Fn(f64) -> f64) -> Mat<f64> {
        let n = self.dim();
        let weights: Vec<f64> = self.eps.iter().map(|&e| g(e)).collect();
        let scaled = Mat::from_fn(n, n, |i, a| self.v[(i, a)] * weights[a]);
        &scaled * self.v.transpose()
    }
}

/// Gibbs correlation matrix `f(h)` of a single-particle hamiltonian.
pub fn gibbs_correlation(h: MatRef<'_, f64>, beta: f64, mu: f64) -> Result<Mat<f64>> {
    Ok(Spectrum::new(h)?.apply_function(|e| fermi(e, beta, mu)))
}

/// Initial state of the partitioning protocol: each half thermalized with its
/// own hamiltonian, no correlations across the cut.
pub fn initial_state(spec: &ChainSpec) -> Result<CorrelationMatrix> {
    let h = single_particle_hamiltonians(spec);
    let r = spec.reservoirs;
    let left = gibbs_correlation(h.left.as_ref(), r.beta_l, r.mu_l)?;
    let right = gibbs_correlation(h.right.as_ref(), r.beta_r, r.mu_r)?;
    let half = spec.half();
    let n = spec.n_sites;
    Ok(CorrelationMatrix::from_real(&Mat::from_fn(n, n, |i, j| {
        match (i < half, j < half) {
            (true, true) => left[(i, j)],
            (false, false) => right[(i - half, j - half)],
            _ => 0.0,
        }
    })))
}

/// Read access to correlation-matrix entries.
pub trait Correlations {
    fn get(&self, i: usize, j: usize) -> C64;
}

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    c: Mat<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
}

impl InvariantReport {
    pub fn holds(&self, hermiticity_tol: f64, spectrum_tol: f64) -> bool {
        self.hermiticity <= hermiticity_tol
            && self.min_eigenvalue >= -spectrum_tol
            && self.max_eigenvalue <= 1.0 + spectrum_tol
    }
}

impl CorrelationMatrix {
    pub fn new(c: Mat<C64>) -> Self {
        CorrelationMatrix { c }
    }

    pub fn from_real(c: &Mat<f64>) -> Self {
        CorrelationMatrix {
            c: Mat::from_fn(c.nrows(), c.ncols(), |i, j| C64::new(c[(i, j)], 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.c
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.c[(i, i)].re).sum()
    }

    pub fn invariants(&self) -> Result<InvariantReport> {
        let n = self.dim();
        let mut herm: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                herm = herm.max((self.c[(i, j)] - self.c[(j, i)].conj()).norm());
            }
        }
        let eig = self
            .c
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| LatticeError::Eigen)?;
        Ok(InvariantReport {
            hermiticity: herm,
            min_eigenvalue: eig.first().copied().unwrap_or(0.0),
            max_eigenvalue: eig.last().copied().unwrap_or(0.0),
            trace: self.trace(),
        })
    }

    pub fn max_abs_diff(&self, other: &CorrelationMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m = m.max((self.c[(i, j)] - other.c[(i, j)]).norm());
            }
        }
        m
    }
}

impl Correlations for CorrelationMatrix {
    fn get(&self, i: usize, j: usize) -> C64 {
        self.c[(i, j)]
    }
}

/// Correlation entries restricted to a set of sites.
#[derive(Debug, Clone)]
pub struct LocalState {
    sites: Vec<usize>,
    c: Mat<C64>,
}

impl LocalState {
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    fn position(&self, site: usize) -> usize {
        self.sites
            .iter()
            .position(|&s| s == site)
            .unwrap_or_else(|| panic!("site {site} not in local block {:?}", self.sites))
    }
}

impl Correlations for LocalState {
    fn get(&self, i: usize, j: usize) -> C64 {
        self.c[(self.position(i), self.position(j))]
    }
}

/// Partitioning-protocol state evolving under a fixed hamiltonian.
///
/// Stores the initial correlations in the eigenbasis of `h`,
/// `C0~ = V^T C0 V`, so that `C(t) = V D C0~ D^* V^T` with `D = e^{-i eps t}`.
#[derive(Debug, Clone)]
pub struct Evolution {
    spectrum: Spectrum,
    v_complex: Mat<C64>,
    c0_modes: Mat<C64>,
}

impl Evolution {
    pub fn new(h: MatRef<'_, f64>, c0: &CorrelationMatrix) -> Result<Self> {
        if c0.dim() != h.nrows() {
            return Err(LatticeError::Dimension {
                expected: h.nrows(),
                got: c0.dim(),
            });
        }
        let spectrum = Spectrum::new(h)?;
        let n = spectrum.dim();
        let v_complex = Mat::from_fn(n, n, |i, j| C64::new(spectrum.v[(i, j)], 0.0));
        let c0_modes = v_complex.transpose() * c0.matrix() * &v_complex;
        Ok(Evolution {
            spectrum,
            v_complex,
            c0_modes,
        })
    }

    /// Evolution of the partitioned initial state of `spec` under the full chain.
    pub fn partitioned(spec: &ChainSpec) -> Result<Self> {
        let h = single_particle_hamiltonians(spec);
        Self::new(h.full.as_ref(), &initial_state(spec)?)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.spectrum
            .eps
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect()
    }

    /// Single-particle propagator `u = e^{-i h t}`.
    pub fn propagator(&self, t: f64) -> Mat<C64> {
        let n = self.dim();
        let d = self.phases(t);
        let scaled = Mat::from_fn(n, n, |i, a| self.v_complex[(i, a)] * d[a]);
        &scaled * self.v_complex.transpose()
    }

    /// Full correlation matrix at time `t`.
    pub fn at(&self, t: f64) -> CorrelationMatrix {
        let n = self.dim();
        let d = self.phases(t);
        let k = Mat::from_fn(n, n, |a, b| d[a] * self.c0_modes[(a, b)] * d[b].conj());
        CorrelationMatrix::new(&self.v_complex * &k * self.v_complex.transpose())
    }

    /// Correlations among `sites` only, at cost linear in their number.
    pub fn local(&self, t: f64, sites: &[usize]) -> LocalState {
        let n = self.dim();
        let m = sites.len();
        let d = self.phases(t);
        let x = Mat::from_fn(m, n, |s, a| self.v_complex[(sites[s], a)] * d[a]);
        let y = &x * &self.c0_modes;
        let c = Mat::from_fn(m, m, |s, r| {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                acc += y[(s, b)] * d[b].conj() * self.spectrum.v[(sites[r], b)];
            }
            acc
        });
        LocalState {
            sites: sites.to_vec(),
            c,
        }
    }
}
