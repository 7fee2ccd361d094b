//! Full counting statistics of the two-time measurement protocol with the
//! first measurement at the contact time.
//!
//! For a quadratic counting observable with single-particle matrix `q`,
//! `Z_t(theta) = det(1 - C0 + C0 e^{i theta q(t)} e^{-i theta q})`,
//! `q(t) = u^dag q u`, `u = e^{-i h t}`.
//!
//! With `q = W diag(w) W^T`, `h = V diag(eps) V^T`, `P = V^T W` and
//! `G = P^T e^{-i eps t} P`, the matrix is similar to
//! `1 - Cw + Cw G^dag Phi G Phi^*` with `Cw = W^T C0 W` and
//! `Phi = e^{i theta w}`. Multiplying by `Phi` on the right gives
//! `Z = e^{-i theta sum w} det(Phi - Cw Phi + B Phi G)` with `B = Cw G^dag`,
//! which costs one matrix product and one LU factorization per `theta`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use faer::{Mat, MatRef};
use ness_core::{numdiff, C64};

use crate::chain::{single_particle_hamiltonians, ChainSpec};
use crate::error::{LatticeError, Result};
use crate::state::{CorrelationMatrix, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountingKind {
    /// `Q = (N_right - N_left) / 2`.
    ChargeHalfDifference,
    /// `E = (H_right - H_left) / 2`, each half's hopping energy without the junction bond.
    EnergyHalfDifference,
}

impl CountingKind {
    pub fn name(&self) -> &'static str {
        match self {
            CountingKind::ChargeHalfDifference => "charge",
            CountingKind::EnergyHalfDifference => "energy",
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticObservable {
    matrix: Mat<f64>,
    kind: CountingKind,
}

impl QuadraticObservable {
    pub fn charge_half_difference(spec: &ChainSpec) -> Self {
        let (n, half) = (spec.n_sites, spec.half());
        QuadraticObservable {
            matrix: Mat::from_fn(n, n, |i, j| match (i == j, i < half) {
                (true, true) => -0.5,
                (true, false) => 0.5,
                _ => 0.0,
            }),
            kind: CountingKind::ChargeHalfDifference,
        }
    }

    pub fn energy_half_difference(spec: &ChainSpec) -> Self {
        let h = single_particle_hamiltonians(spec);
        let half = spec.half();
        let n = spec.n_sites;
        QuadraticObservable {
            matrix: Mat::from_fn(n, n, |i, j| match (i < half, j < half) {
                (true, true) => -0.5 * h.left[(i, j)],
                (false, false) => 0.5 * h.right[(i - half, j - half)],
                _ => 0.0,
            }),
            kind: CountingKind::EnergyHalfDifference,
        }
    }

    pub fn new(spec: &ChainSpec, kind: CountingKind) -> Self {
        match kind {
            CountingKind::ChargeHalfDifference => Self::charge_half_difference(spec),
            CountingKind::EnergyHalfDifference => Self::energy_half_difference(spec),
        }
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    pub fn kind(&self) -> CountingKind {
        self.kind
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                m = m.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        m
    }
}

/// `log det` of a square complex matrix from its LU factors, with the
/// imaginary part wrapped into `(-pi, pi]`.
pub fn log_det(a: MatRef<'_, C64>) -> Option<C64> {
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == C64::new(0.0, 0.0) || !d.is_finite() {
            return None;
        }
        acc += d.ln();
    }
    let (fwd, _) = lu.P().arrays();
    if permutation_is_odd(fwd) {
        acc += C64::new(0.0, PI);
    }
    Some(C64::new(acc.re, wrap_phase(acc.im)))
}

fn permutation_is_odd(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = p[k];
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 1
}

fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x.rem_euclid(two_pi);
    if y > PI {
        y -= two_pi;
    }
    y
}

/// Finite-difference steps for the counting-field derivatives. Orders 1 and 2
/// use `low * scale` halved twice; orders 3 and 4 use the coarser
/// `high * scale`, since roundoff in `log Z` is amplified by `h^-4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilPlan {
    pub low: f64,
    pub high: f64,
    /// Natural scale of the counting field (1 for charge, an inverse
    /// temperature for energy).
    pub scale: f64,
}

impl StencilPlan {
    pub const LOW_STEP: f64 = 1e-2;
    pub const HIGH_STEP: f64 = 1e-1;

    pub fn with_scale(scale: f64) -> Self {
        StencilPlan {
            low: Self::LOW_STEP,
            high: Self::HIGH_STEP,
            scale,
        }
    }

    pub fn for_kind(kind: CountingKind, spec: &ChainSpec) -> Self {
        let scale = match kind {
            CountingKind::ChargeHalfDifference => 1.0,
            CountingKind::EnergyHalfDifference => {
                let r = spec.reservoirs;
                let beta = r.beta_l.min(r.beta_r);
                if beta.is_finite() {
                    beta
                } else {
                    1.0
                }
            }
        };
        Self::with_scale(scale)
    }

    pub fn step(&self, order: usize) -> f64 {
        if order <= 2 {
            self.low * self.scale
        } else {
            self.high * self.scale
        }
    }
}

/// Cumulants of the transferred quantity at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantEstimate {
    pub time: f64,
    /// `kappa_n` for `n = 1..=n_max`.
    pub values: Vec<f64>,
    /// Spread of the two finest Richardson levels, a noise indicator.
    pub spreads: Vec<f64>,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
}

pub struct FcsEngine {
    n: usize,
    eps: Vec<f64>,
    w: Vec<f64>,
    p: Mat<C64>,
    c_w: Mat<C64>,
    kind: CountingKind,
}

/// Per-time data shared by every counting field at that time.
pub struct FcsSnapshot<'a> {
    engine: &'a FcsEngine,
    time: f64,
    g: Mat<C64>,
    b: Mat<C64>,
    cache: RefCell<HashMap<u64, C64>>,
}

/// Largest `|theta| * max|w|` accepted; beyond it the counting phase wraps.
pub const MAX_PHASE: f64 = 2.0 * PI;

impl FcsEngine {
    pub fn new(
        c0: &CorrelationMatrix,
        h_full: MatRef<'_, f64>,
        q: &QuadraticObservable,
    ) -> Result<Self> {
        let n = h_full.nrows();
        if c0.dim() != n || q.matrix.nrows() != n {
            return Err(LatticeError::Dimension {
                expected: n,
                got: c0.dim().min(q.matrix.nrows()),
            });
        }
        let hs = Spectrum::new(h_full)?;
        let qs = Spectrum::new(q.matrix())?;
        let p_real = hs.v.transpose() * &qs.v;
        let p = Mat::from_fn(n, n, |i, j| C64::new(p_real[(i, j)], 0.0));
        let w_c = Mat::from_fn(n, n, |i, j| C64::new(qs.v[(i, j)], 0.0));
        let c_w = w_c.transpose() * c0.matrix() * &w_c;
        Ok(FcsEngine {
            n,
            eps: hs.eps,
            w: qs.eps,
            p,
            c_w,
            kind: q.kind,
        })
    }

    pub fn kind(&self) -> CountingKind {
        self.kind
    }

    fn max_weight(&self) -> f64 {
        self.w.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn at(&self, time: f64) -> FcsSnapshot<'_> {
        let n = self.n;
        let d: Vec<C64> = self.eps.iter().map(|&e| C64::from_polar(1.0, -e * time)).collect();
        let dp = Mat::from_fn(n, n, |a, j| d[a] * self.p[(a, j)]);
        let g = self.p.transpose() * &dp;
        let b = &self.c_w * g.adjoint();
        FcsSnapshot {
            engine: self,
            time,
            g,
            b,
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// Mean transferred quantity `Tr(C0 (q(t) - q))`, computed in the
    /// eigenbasis of `q`.
    pub fn mean(&self, time: f64) -> f64 {
        self.trace_expansion(time).0
    }

    /// First two cumulants from the trace expansion of `log Z`:
    /// `kappa_1 = Tr(C K1)`, `kappa_2 = 2 Tr(C K2) - Tr(C K1 C K1)` with
    /// `K1 = q_t - q`, `K2 = q_t^2/2 + q^2/2 - q_t q`.
    pub fn trace_expansion(&self, time: f64) -> (f64, f64) {
        let snap = self.at(time);
        let n = self.n;
        let wd = Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(self.w[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let qt = snap.g.adjoint() * &wd * &snap.g;
        let k1 = &qt - &wd;
        let qq = &qt * &qt + &wd * &wd;
        let k2 = Mat::from_fn(n, n, |i, j| 0.5 * qq[(i, j)]) - &qt * &wd;
        let ck1 = &self.c_w * &k1;
        let ck2 = &self.c_w * &k2;
        let mut tr1 = C64::new(0.0, 0.0);
        let mut tr2 = C64::new(0.0, 0.0);
        let mut tr11 = C64::new(0.0, 0.0);
        for i in 0..n {
            tr1 += ck1[(i, i)];
            tr2 += ck2[(i, i)];
            for j in 0..n {
                tr11 += ck1[(i, j)] * ck1[(j, i)];
            }
        }
        (tr1.re, (2.0 * tr2 - tr11).re)
    }
}

impl FcsSnapshot<'_> {
    pub fn time(&self) -> f64 {
        self.time
    }

    /// `log Z_t(theta)` on the principal sheet.
    pub fn log_z(&self, theta: f64) -> Result<C64> {
        let e = self.engine;
        let limit = MAX_PHASE / e.max_weight().max(f64::MIN_POSITIVE);
        if !(theta.abs() <= limit) {
            return Err(LatticeError::CountingField { theta, limit });
        }
        if theta == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if let Some(v) = self.cache.borrow().get(&theta.to_bits()) {
            return Ok(*v);
        }
        let n = e.n;
        let phi: Vec<C64> = e.w.iter().map(|&w| C64::from_polar(1.0, theta * w)).collect();
        let b_phi = Mat::from_fn(n, n, |i, k| self.b[(i, k)] * phi[k]);
        let mut a = &b_phi * &self.g;
        for j in 0..n {
            for i in 0..n {
                let delta = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                a[(i, j)] += (delta - e.c_w[(i, j)]) * phi[j];
            }
        }
        let ld = log_det(a.as_ref()).ok_or(LatticeError::SingularDeterminant {
            theta,
            time: self.time,
        })?;
        let shift: f64 = e.w.iter().sum::<f64>() * theta;
        let v = C64::new(ld.re, wrap_phase(ld.im - shift));
        self.cache.borrow_mut().insert(theta.to_bits(), v);
        Ok(v)
    }

    pub fn generating_function(&self, theta: f64) -> Result<C64> {
        Ok(self.log_z(theta)?.exp())
    }

    /// `kappa_n = (-i d/dtheta)^n log Z` at 0 for `n = 1..=n_max` (at most 4).
    pub fn cumulants(&self, n_max: usize, plan: StencilPlan) -> Result<CumulantEstimate> {
        assert!((1..=4).contains(&n_max), "cumulant order must be 1..=4");
        let failure = RefCell::new(None);
        let f = |x: C64| match self.log_z(x.re) {
            Ok(v) => v,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                C64::new(f64::NAN, f64::NAN)
            }
        };
        let mut values = Vec::with_capacity(n_max);
        let mut spreads = Vec::with_capacity(n_max);
        let mut max_imag: f64 = 0.0;
        for order in 1..=n_max {
            let h = plan.step(order);
            let estimates: Vec<C64> = [h, h / 2.0, h / 4.0]
                .iter()
                .map(|&s| numdiff::central(&f, C64::new(0.0, 0.0), order, s))
                .collect();
            if let Some(err) = failure.borrow_mut().take() {
                return Err(err);
            }
            let (d, spread) = numdiff::richardson_cascade(&estimates);
            let kappa = C64::new(0.0, -1.0).powu(order as u32) * d;
            max_imag = max_imag.max(kappa.im.abs());
            values.push(kappa.re);
            spreads.push(spread);
        }
        Ok(CumulantEstimate {
            time: self.time,
            values,
            spreads,
            max_imag,
        })
    }
}

/// Relative linear-fit residual above which a cumulant is flagged as not
/// growing linearly in time.
pub const FIT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct CumulantRates {
    /// Fitted slopes `d kappa_n / dt`, `n = 1..=n_max`.
    pub rates: Vec<f64>,
    pub intercepts: Vec<f64>,
    /// Root-mean-square fit residual divided by the growth `|rate| (t_max - t_min)`.
    pub residuals: Vec<f64>,
    pub flagged: Vec<bool>,
    pub per_time: Vec<CumulantEstimate>,
}

/// Cumulants on `t_grid`, then a least-squares line through each.
pub fn cumulant_rates(
    engine: &FcsEngine,
    t_grid: &[f64],
    n_max: usize,
    plan: StencilPlan,
) -> Result<CumulantRates> {
    if t_grid.len() < 2 {
        return Err(LatticeError::TimeGrid {
            needed: 2,
            got: t_grid.len(),
        });
    }
    let per_time: Vec<CumulantEstimate> = t_grid
        .iter()
        .map(|&t| engine.at(t).cumulants(n_max, plan))
        .collect::<Result<_>>()?;
    let span = t_grid.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - t_grid.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let mut rates = vec![];
    let mut intercepts = vec![];
    let mut residuals = vec![];
    let mut flagged = vec![];
    for k in 0..n_max {
        let y: Vec<f64> = per_time.iter().map(|e| e.values[k]).collect();
        let (a, b, rms) = fit_line(t_grid, &y);
        let growth = (b * span).abs();
        let rel = if growth > 0.0 { rms / growth } else { f64::INFINITY };
        rates.push(b);
        intercepts.push(a);
        residuals.push(rel);
        flagged.push(!(rel <= FIT_TOLERANCE));
    }
    Ok(CumulantRates {
        rates,
        intercepts,
        residuals,
        flagged,
        per_time,
    })
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (intercept, slope, rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Reservoirs;
    use crate::observables::junction_charge_current;
    use crate::state::{gibbs_correlation, initial_state, Evolution};

    fn setup(n: usize, r: Reservoirs, kind: CountingKind) -> (ChainSpec, FcsEngine) {
        let spec = ChainSpec::new(n, 1.0, r).unwrap();
        let h = single_particle_hamiltonians(&spec);
        let c0 = initial_state(&spec).unwrap();
        let q = QuadraticObservable::new(&spec, kind);
        let e = FcsEngine::new(&c0, h.full.as_ref(), &q).unwrap();
        (spec, e)
    }

    #[test]
    fn observables_are_hermitian_and_supported_inside_halves() {
        let spec = ChainSpec::new(10, 1.0, Reservoirs::equilibrium(1.0, 0.0)).unwrap();
        let q = QuadraticObservable::charge_half_difference(&spec);
        assert_eq!(q.hermiticity_error(), 0.0);
        assert_eq!(q.matrix()[(0, 0)], -0.5);
        assert_eq!(q.matrix()[(9, 9)], 0.5);
        let e = QuadraticObservable::energy_half_difference(&spec);
        assert_eq!(e.hermiticity_error(), 0.0);
        assert_eq!(e.matrix()[(4, 5)], 0.0);
        assert_eq!(e.matrix()[(3, 4)], 0.25);
        assert_eq!(e.matrix()[(5, 6)], -0.25);
    }

    #[test]
    fn log_det_matches_product_of_eigen_factors() {
        let a = Mat::from_fn(3, 3, |i, j| {
            C64::new([[0.0, 2.0, 1.0], [1.0, 0.0, 0.5], [3.0, 1.0, 0.0]][i][j], 0.1 * (i + j) as f64)
        });
        // cofactor expansion
        let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
            - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
            + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
        let ld = log_det(a.as_ref()).unwrap();
        assert!((ld.exp() - det).norm() < 1e-12);
    }

    #[test]
    fn normalization_and_trivial_times() {
        let (_, e) = setup(12, Reservoirs::from_temperatures(0.5, 0.2, 0.1, -0.1), CountingKind::ChargeHalfDifference);
        let s = e.at(3.0);
        assert_eq!(s.generating_function(0.0).unwrap(), C64::new(1.0, 0.0));
        let s0 = e.at(0.0);
        for th in [0.3, -1.0, 2.5] {
            assert!((s0.generating_function(th).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn bounded_and_conjugation_symmetric() {
        let (_, e) = setup(16, Reservoirs::from_temperatures(0.5, 0.2, 0.3, -0.1), CountingKind::ChargeHalfDifference);
        let s = e.at(5.0);
        for k in -12..=12 {
            let th = 0.5 * k as f64;
            let z = s.generating_function(th).unwrap();
            assert!(z.norm() <= 1.0 + 1e-9);
            let zm = s.generating_function(-th).unwrap();
            assert!((z.conj() - zm).norm() < 1e-10);
        }
        assert!(s.log_z(20.0).is_err());
    }

    #[test]
    fn mean_is_time_integrated_junction_current() {
        let (spec, e) = setup(30, Reservoirs::from_temperatures(0.5, 0.2, 0.3, -0.2), CountingKind::ChargeHalfDifference);
        let t = 6.0;
        let ev = Evolution::partitioned(&spec).unwrap();
        let op = junction_charge_current(&spec);
        let sites = op.support();
        // composite Simpson over [0, t]
        let m = 200;
        let h = t / m as f64;
        let mut acc = 0.0;
        for k in 0..=m {
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * op.expectation(&ev.local(k as f64 * h, &sites)).re;
        }
        let integrated = acc * h / 3.0;
        assert!((e.mean(t) - integrated).abs() < 1e-6, "{} vs {integrated}", e.mean(t));
        let fd = e.at(t).cumulants(2, StencilPlan::with_scale(1.0)).unwrap();
        assert!((fd.values[0] - integrated).abs() < 1e-6);
    }

    #[test]
    fn determinant_matches_trace_expansion() {
        for kind in [CountingKind::ChargeHalfDifference, CountingKind::EnergyHalfDifference] {
            let (spec, e) = setup(24, Reservoirs::from_temperatures(0.4, 0.1, 0.2, -0.2), kind);
            let t = 4.0;
            let (k1, k2) = e.trace_expansion(t);
            let est = e.at(t).cumulants(2, StencilPlan::for_kind(kind, &spec)).unwrap();
            assert!((est.values[0] - k1).abs() < 1e-6 * k1.abs().max(1.0), "{kind:?}");
            assert!((est.values[1] - k2).abs() < 1e-6 * k2.abs().max(1.0), "{kind:?}");
        }
    }

    #[test]
    fn equilibrium_mean_rate_vanishes_and_noise_does_not() {
        let spec = ChainSpec::new(40, 1.0, Reservoirs::equilibrium(4.0, 0.1)).unwrap();
        let h = single_particle_hamiltonians(&spec);
        // Gibbs state of the full chain is stationary: no mean transfer, thermal noise remains.
        let c0 = CorrelationMatrix::from_real(&gibbs_correlation(h.full.as_ref(), 4.0, 0.1).unwrap());
        let q = QuadraticObservable::charge_half_difference(&spec);
        let e = FcsEngine::new(&c0, h.full.as_ref(), &q).unwrap();
        let rates = cumulant_rates(&e, &[4.0, 6.0, 8.0], 2, StencilPlan::for_kind(q.kind(), &spec)).unwrap();
        assert!(rates.rates[0].abs() < 1e-8, "{}", rates.rates[0]);
        assert!(rates.rates[1] > 1e-3, "{}", rates.rates[1]);
    }
}
