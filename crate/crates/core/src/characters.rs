//! Truncated q-series for the Dedekind eta function and the characters of the
//! rational compact boson (affine u(1) at level `k`), with fugacity.
//!
//! A [`QSeries`] is `q^{prefactor} sum c(p, N) q^p y^N` with `q = e^{2 pi i tau}`
//! and `y = e^{2 pi i z}`. Nome powers are exact rationals and charges exact
//! integers, so derivatives in `tau` and `z` act term by term.
//!
//! The sector-`m` character is
//! `chi_m(tau, z) = eta(tau)^{-1} sum_{N = m mod 2k} q^{N^2 / 4k} y^N`,
//! which transforms under `tau -> -1/tau` as
//! `chi_m(-1/tau, z/tau) = e^{2 pi i k z^2 / tau} sum_m' S_{m m'} chi_m'(tau, z)`
//! with `S_{m m'} = e^{-i pi m m' / k} / sqrt(2k)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_ORDER: i64 = 400;
pub const DEFAULT_LEVEL: i64 = 1;

/// The last retained shell must weigh less than this fraction of the sum.
pub const TAIL_GUARD: f64 = 1e-14;

/// Relative error below which successive one-point estimates are considered
/// converged, so that round-off does not count against monotonicity.
pub const NOISE_FLOOR: f64 = 1e-10;

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    truncation_order: i64,
    prefactor_exponent: Rational64,
    terms: BTreeMap<(Rational64, i64), f64>,
}

/// Logarithm of a q-series at a point, together with the weighted means of
/// the full nome exponent and of the charge, which are its `tau` and `z`
/// log-derivatives divided by `2 pi i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub log_value: C64,
    /// Mean of `prefactor + p` under the term weights.
    pub mean_power: C64,
    pub mean_charge: C64,
    /// `|terms at the largest retained power| / |sum|`.
    pub tail_ratio: f64,
}

impl Evaluation {
    pub fn value(&self) -> C64 {
        self.log_value.exp()
    }
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl QSeries {
    pub fn new(truncation_order: i64, prefactor_exponent: Rational64) -> Self {
        QSeries {
            truncation_order,
            prefactor_exponent,
            terms: BTreeMap::new(),
        }
    }

    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    pub fn prefactor_exponent(&self) -> Rational64 {
        self.prefactor_exponent
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `((nome power, charge), coefficient)`, ordered by power then charge.
    pub fn terms(&self) -> impl Iterator<Item = (&(Rational64, i64), &f64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, power: Rational64, charge: i64) -> f64 {
        self.terms.get(&(power, charge)).copied().unwrap_or(0.0)
    }

    /// Accumulates `coeff q^power y^charge`; powers beyond the truncation
    /// order are dropped and cancelled terms removed.
    pub fn add_term(&mut self, power: Rational64, charge: i64, coeff: f64) {
        if power > Rational64::from_integer(self.truncation_order) || coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry((power, charge)).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&(power, charge));
        }
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = self.truncation_order.min(other.truncation_order);
        let mut out = QSeries::new(order, self.prefactor_exponent + other.prefactor_exponent);
        let limit = Rational64::from_integer(order);
        for (&(pa, na), &ca) in &self.terms {
            if pa > limit {
                break;
            }
            for (&(pb, nb), &cb) in &other.terms {
                let p = pa + pb;
                if p > limit {
                    break;
                }
                out.add_term(p, na + nb, ca * cb);
            }
        }
        out
    }

    /// Sums the series at `(tau, z)` in log-sum-exp form.
    ///
    /// Requires `Im tau > 0`. Returns an error for an empty series, whose
    /// logarithm is undefined.
    pub fn evaluate(&self, tau: C64, z: C64) -> Result<Evaluation> {
        if !(tau.im > 0.0) || !tau.is_finite() || !z.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau.im,
                reason: "imaginary part must be positive and arguments finite",
            });
        }
        if self.terms.is_empty() {
            return Err(Error::UnsupportedSeries {
                op: "evaluate",
                reason: "series has no terms",
            });
        }
        let pref = to_f64(self.prefactor_exponent);
        let exponents: Vec<(f64, f64, C64)> = self
            .terms
            .iter()
            .map(|(&(p, n), &c)| {
                let x = to_f64(p) + pref;
                let e = TWO_PI_I * (tau * x + z * n as f64) + C64::new(c.abs().ln(), 0.0);
                let e = if c < 0.0 { e + C64::new(0.0, PI) } else { e };
                (x, n as f64, e)
            })
            .collect();
        let shift = exponents
            .iter()
            .map(|t| t.2.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let top_power = self.terms.keys().next_back().map(|k| k.0).unwrap();
        let mut sum = C64::new(0.0, 0.0);
        let mut sum_x = C64::new(0.0, 0.0);
        let mut sum_n = C64::new(0.0, 0.0);
        let mut tail = 0.0;
        for ((&(p, _), _), &(x, n, e)) in self.terms.iter().zip(&exponents) {
            let w = (e - shift).exp();
            sum += w;
            sum_x += w * x;
            sum_n += w * n;
            if p == top_power {
                tail += w.norm();
            }
        }
        Ok(Evaluation {
            log_value: sum.ln() + shift,
            mean_power: sum_x / sum,
            mean_charge: sum_n / sum,
            tail_ratio: tail / sum.norm(),
        })
    }

    pub fn eval(&self, tau: C64, z: C64) -> Result<C64> {
        Ok(self.evaluate(tau, z)?.value())
    }

    fn check_tail(&self, ev: &Evaluation) -> Result<()> {
        if ev.tail_ratio > TAIL_GUARD || !ev.tail_ratio.is_finite() {
            return Err(Error::TruncationInsufficient {
                order: self.truncation_order,
                ratio: ev.tail_ratio,
            });
        }
        Ok(())
    }

    /// [`QSeries::evaluate`] followed by the last-shell guard.
    pub fn evaluate_guarded(&self, tau: C64, z: C64) -> Result<Evaluation> {
        let ev = self.evaluate(tau, z)?;
        self.check_tail(&ev)?;
        Ok(ev)
    }
}

fn check_order(order: i64) -> Result<()> {
    if order < 0 {
        return Err(Error::InvalidParameter {
            name: "order",
            value: order as f64,
            reason: "must be nonnegative",
        });
    }
    Ok(())
}

/// `q^{1/24} prod_{n=1}^{order} (1 - q^n)` expanded to nome power `order`.
///
/// The product is accumulated in exact integer arithmetic; intermediate
/// coefficients grow before the pentagonal cancellations set in.
pub fn eta_series(order: i64) -> Result<QSeries> {
    check_order(order)?;
    let len = order as usize + 1;
    let mut coeffs = vec![0i128; len];
    coeffs[0] = 1;
    for n in 1..len {
        for p in (n..len).rev() {
            coeffs[p] = coeffs[p]
                .checked_sub(coeffs[p - n])
                .ok_or(Error::Overflow { order })?;
        }
    }
    let mut out = QSeries::new(order, Rational64::new(1, 24));
    for (p, &c) in coeffs.iter().enumerate() {
        out.add_term(Rational64::from_integer(p as i64), 0, c as f64);
    }
    Ok(out)
}

/// `q^{-1/24} prod_{n>=1} (1 - q^n)^{-1}`, the partition generating function,
/// to nome power `order`. Every factor has positive coefficients, so the
/// floating-point accumulation involves no cancellation.
pub fn eta_reciprocal(order: i64) -> Result<QSeries> {
    check_order(order)?;
    let len = order as usize + 1;
    let mut coeffs = vec![0f64; len];
    coeffs[0] = 1.0;
    for n in 1..len {
        for p in n..len {
            coeffs[p] += coeffs[p - n];
        }
    }
    let mut out = QSeries::new(order, Rational64::new(-1, 24));
    for (p, &c) in coeffs.iter().enumerate() {
        out.add_term(Rational64::from_integer(p as i64), 0, c);
    }
    Ok(out)
}

fn check_sector(level_k: i64, sector_m: i64) -> Result<()> {
    if level_k < 1 {
        return Err(Error::InvalidParameter {
            name: "level_k",
            value: level_k as f64,
            reason: "must be a positive integer",
        });
    }
    if !(0..2 * level_k).contains(&sector_m) {
        return Err(Error::InvalidSector {
            sector: sector_m,
            modulus: 2 * level_k,
        });
    }
    Ok(())
}

/// Level-`k` theta series `sum_{N = m mod 2k} q^{N^2/4k} y^N`.
pub fn theta_series(level_k: i64, sector_m: i64, order: i64) -> Result<QSeries> {
    check_sector(level_k, sector_m)?;
    check_order(order)?;
    let mut out = QSeries::new(order, Rational64::from_integer(0));
    let modulus = 2 * level_k;
    let n_max = ((4 * level_k * order) as f64).sqrt().ceil() as i64 + 1;
    let start = -n_max - (-n_max).rem_euclid(modulus) + sector_m;
    let mut n = start;
    while n <= n_max {
        out.add_term(Rational64::new(n * n, 4 * level_k), n, 1.0);
        n += modulus;
    }
    Ok(out)
}

/// Sector-`m` character of the level-`k` compact boson, as a single q-series.
pub fn u1_character(level_k: i64, sector_m: i64, order: i64) -> Result<QSeries> {
    Ok(theta_series(level_k, sector_m, order)?.mul(&eta_reciprocal(order)?))
}

/// Modular S-matrix `S_{m m'} = e^{-i pi m m' / k} / sqrt(2k)`.
pub fn s_matrix(level_k: i64) -> Result<Vec<Vec<C64>>> {
    check_sector(level_k, 0)?;
    let dim = 2 * level_k;
    let norm = 1.0 / ((2 * level_k) as f64).sqrt();
    Ok((0..dim)
        .map(|m| {
            (0..dim)
                .map(|mp| C64::from_polar(norm, -PI * (m * mp) as f64 / level_k as f64))
                .collect()
        })
        .collect())
}

/// Character value, evaluating theta and eta factors separately.
pub fn character_value(level_k: i64, sector_m: i64, tau: C64, z: C64, order: i64) -> Result<C64> {
    let theta = theta_series(level_k, sector_m, order)?.evaluate_guarded(tau, z)?;
    let eta = eta_series(order)?.evaluate_guarded(tau, C64::new(0.0, 0.0))?;
    Ok((theta.log_value - eta.log_value).exp())
}

/// Largest relative mismatch, over sectors, of the modular law
/// `chi_m(-1/tau, z/tau) = e^{2 pi i k z^2/tau} sum_m' S_{m m'} chi_m'(tau, z)`.
pub fn modular_covariance_residual(level_k: i64, tau: C64, z: C64, order: i64) -> Result<f64> {
    let s = s_matrix(level_k)?;
    let dim = 2 * level_k;
    let direct: Vec<C64> = (0..dim)
        .map(|m| character_value(level_k, m, tau, z, order))
        .collect::<Result<_>>()?;
    let phase = (TWO_PI_I * level_k as f64 * z * z / tau).exp();
    let mut worst: f64 = 0.0;
    for m in 0..dim {
        let lhs = character_value(level_k, m, -1.0 / tau, z / tau, order)?;
        let rhs: C64 = phase
            * s[m as usize]
                .iter()
                .zip(&direct)
                .map(|(a, b)| a * b)
                .sum::<C64>();
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnePoint {
    Charge,
    Energy,
}

/// Nome order that comfortably resolves the characters at `tau = i beta / R`.
pub fn suggested_order(r_over_beta: f64) -> i64 {
    (25.0 * r_over_beta).ceil() as i64 + 60
}

/// Finite-size estimate of a Gibbs one-point function from the vacuum-sector
/// character on a circle of circumference `r`.
///
/// With `tau = i beta / R` and `z = -i beta mu / (2 sqrt k)` the fugacity is
/// `e^{pi beta mu N / sqrt k}`, so that
/// `sigma[j] = pi <N> / (sqrt(k) R)` and
/// `sigma[h] = -(1/R) d_beta log chi + mu sigma[j] = (2 pi / R^2) <L_0 - 1/24>`.
/// Both derivatives are taken term by term.
pub fn finite_r_one_point(
    beta: f64,
    mu: f64,
    r: f64,
    which: OnePoint,
    level_k: i64,
    order: i64,
) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be finite and strictly positive",
        });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "must be finite and strictly positive",
        });
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must be finite",
        });
    }
    let sqrt_k = (level_k as f64).sqrt();
    let tau = C64::new(0.0, beta / r);
    let z = C64::new(0.0, -beta * mu / (2.0 * sqrt_k));
    let theta = theta_series(level_k, 0, order)?.evaluate_guarded(tau, z)?;
    match which {
        OnePoint::Charge => Ok(PI * theta.mean_charge.re / (sqrt_k * r)),
        OnePoint::Energy => {
            let oscillators = eta_reciprocal(order)?.evaluate_guarded(tau, C64::new(0.0, 0.0))?;
            let l0 = theta.mean_power.re + oscillators.mean_power.re;
            Ok(2.0 * PI / (r * r) * l0)
        }
    }
}

/// Finite-size estimates at several `R / beta` compared with the thermodynamic limit.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePointSequence {
    pub r_over_beta: Vec<f64>,
    pub estimates: Vec<f64>,
    pub limit: f64,
    pub errors: Vec<f64>,
    /// Each error is no larger than the previous one, or already within
    /// [`NOISE_FLOOR`] of the limit.
    pub monotone: bool,
}

/// Runs [`finite_r_one_point`] over `r_over_beta` (orders from
/// [`suggested_order`]) against the closed form at `c = 1`.
pub fn one_point_sequence(
    beta: f64,
    mu: f64,
    which: OnePoint,
    level_k: i64,
    r_over_beta: &[f64],
) -> Result<OnePointSequence> {
    let limit = match which {
        OnePoint::Charge => PI * mu,
        OnePoint::Energy => PI / (12.0 * beta * beta) + PI * mu * mu / 2.0,
    };
    let estimates: Vec<f64> = r_over_beta
        .iter()
        .map(|&ratio| {
            finite_r_one_point(beta, mu, ratio * beta, which, level_k, suggested_order(ratio))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = estimates.iter().map(|e| (e - limit).abs()).collect();
    let floor = NOISE_FLOOR * limit.abs().max(1.0);
    let monotone = errors
        .windows(2)
        .all(|w| w[1] <= w[0] || w[1] <= floor);
    Ok(OnePointSequence {
        r_over_beta: r_over_beta.to_vec(),
        estimates,
        limit,
        errors,
        monotone,
    })
}
