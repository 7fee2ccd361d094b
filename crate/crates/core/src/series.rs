//! Truncated bivariate power series in `(lambda, nu)` with complex
//! coefficients, stored densely over the simplex of total degree `<= order`.
//!
//! Coefficients of total degree `d` are contiguous: `a[i][j]` (power `i` of
//! lambda, `j` of nu) lives at `d (d + 1) / 2 + j`. This makes homogeneous
//! parts slices, which is what the exp/log recurrences work on.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::thermo::ThermoPoint;
use crate::C64;

pub const DEFAULT_ORDER: usize = 8;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Constant terms smaller than this are treated as zero by [`cumulants_from_log`].
pub const LOG_CONSTANT_TOLERANCE: f64 = 1e-14;

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries2 {
    order: usize,
    coeffs: Vec<C64>,
}

fn simplex_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

fn degree_start(d: usize) -> usize {
    d * (d + 1) / 2
}

impl TruncatedSeries2 {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries2 {
            order,
            coeffs: vec![ZERO; simplex_len(order)],
        }
    }

    pub fn constant(order: usize, value: C64) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, ONE)
    }

    /// The series `lambda`.
    pub fn lambda(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.set(1, 0, ONE);
        }
        s
    }

    /// The series `nu`.
    pub fn nu(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.set(0, 1, ONE);
        }
        s
    }

    /// Builds a series from `f(i, j)` for every `i + j <= order`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut s = Self::zero(order);
        for d in 0..=order {
            for j in 0..=d {
                s.coeffs[degree_start(d) + j] = f(d - j, j);
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `lambda^i nu^j`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        if i + j > self.order {
            ZERO
        } else {
            self.coeffs[degree_start(i + j) + j]
        }
    }

    /// # Panics
    /// If `i + j` exceeds the order.
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        assert!(
            i + j <= self.order,
            "coefficient ({i}, {j}) beyond order {}",
            self.order
        );
        self.coeffs[degree_start(i + j) + j] = value;
    }

    /// Homogeneous part of total degree `d`, indexed by the power of nu.
    pub fn homogeneous(&self, d: usize) -> &[C64] {
        &self.coeffs[degree_start(d)..degree_start(d + 1)]
    }

    fn homogeneous_mut(&mut self, d: usize) -> &mut [C64] {
        &mut self.coeffs[degree_start(d)..degree_start(d + 1)]
    }

    /// Drops every term above `order` (or pads with zeros when raising it).
    pub fn truncate(&self, order: usize) -> Self {
        Self::from_fn(order, |i, j| self.coeff(i, j))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let order = self.order.max(other.order);
        let mut m: f64 = 0.0;
        for d in 0..=order {
            for j in 0..=d {
                m = m.max((self.coeff(d - j, j) - other.coeff(d - j, j)).norm());
            }
        }
        m
    }

    pub fn scale(&self, k: C64) -> Self {
        TruncatedSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `s(-lambda, -nu)`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for d in (1..=self.order).step_by(2) {
            for c in out.homogeneous_mut(d) {
                *c = -*c;
            }
        }
        out
    }

    fn check_same_order(&self, other: &Self) {
        assert_eq!(
            self.order, other.order,
            "series of different truncation orders combined"
        );
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other);
        let b0 = other.coeffs[0];
        if b0 == ZERO {
            return Err(Error::ZeroConstantTerm { op: "divide" });
        }
        // c_d = (a_d - sum_{k>=1} b_k c_{d-k}) / b0 on homogeneous parts
        let mut out = Self::zero(self.order);
        for d in 0..=self.order {
            let mut acc: Vec<C64> = self.homogeneous(d).to_vec();
            for k in 1..=d {
                let prod = mul_homogeneous(other.homogeneous(k), out.homogeneous(d - k));
                for (a, p) in acc.iter_mut().zip(prod) {
                    *a -= p;
                }
            }
            for (o, a) in out.homogeneous_mut(d).iter_mut().zip(acc) {
                *o = a / b0;
            }
        }
        Ok(out)
    }

    pub fn exp(&self) -> Self {
        let a0 = self.coeffs[0];
        // d b_d = sum_{k=1}^{d} k a_k b_{d-k}, with b_0 = e^{a0}
        let mut out = Self::constant(self.order, a0.exp());
        for d in 1..=self.order {
            let mut acc = vec![ZERO; d + 1];
            for k in 1..=d {
                let prod = mul_homogeneous(self.homogeneous(k), out.homogeneous(d - k));
                for (a, p) in acc.iter_mut().zip(prod) {
                    *a += p * k as f64;
                }
            }
            for (o, a) in out.homogeneous_mut(d).iter_mut().zip(acc) {
                *o = a / d as f64;
            }
        }
        out
    }

    /// Principal-branch logarithm.
    pub fn log(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::ZeroConstantTerm { op: "log" });
        }
        // b_d = (d a_d - sum_{k=1}^{d-1} k b_k a_{d-k}) / (d a0)
        let mut out = Self::constant(self.order, a0.ln());
        for d in 1..=self.order {
            let mut acc: Vec<C64> = self.homogeneous(d).iter().map(|a| a * d as f64).collect();
            for k in 1..d {
                let prod = mul_homogeneous(out.homogeneous(k), self.homogeneous(d - k));
                for (a, p) in acc.iter_mut().zip(prod) {
                    *a -= p * k as f64;
                }
            }
            for (o, a) in out.homogeneous_mut(d).iter_mut().zip(acc) {
                *o = a / (d as f64 * a0);
            }
        }
        Ok(out)
    }

    /// Substitutes `lambda -> m[0][0] lambda + m[0][1] nu`,
    /// `nu -> m[1][0] lambda + m[1][1] nu`.
    ///
    /// Only homogeneous linear maps are supported: a constant shift would mix
    /// every order into the constant term, which a truncated series cannot
    /// represent.
    pub fn compose_linear(&self, m: [[C64; 2]; 2]) -> Self {
        let order = self.order;
        let lam = Self::lambda(order).scale(m[0][0]) + Self::nu(order).scale(m[0][1]);
        let nu = Self::lambda(order).scale(m[1][0]) + Self::nu(order).scale(m[1][1]);
        let lam_pows = powers(&lam, order);
        let nu_pows = powers(&nu, order);
        let mut out = Self::zero(order);
        for d in 0..=order {
            for j in 0..=d {
                let c = self.coeff(d - j, j);
                if c != ZERO {
                    out = out + (&lam_pows[d - j] * &nu_pows[j]).scale(c);
                }
            }
        }
        out
    }

    /// Evaluates the truncated polynomial at a point.
    pub fn eval(&self, lambda: C64, nu: C64) -> C64 {
        let mut total = ZERO;
        for d in (0..=self.order).rev() {
            let mut part = ZERO;
            for (j, c) in self.homogeneous(d).iter().enumerate() {
                part += c * lambda.powu((d - j) as u32) * nu.powu(j as u32);
            }
            total += part;
        }
        total
    }
}

fn powers(s: &TruncatedSeries2, n: usize) -> Vec<TruncatedSeries2> {
    let mut out = vec![TruncatedSeries2::one(s.order)];
    for k in 1..=n {
        let next = &out[k - 1] * s;
        out.push(next);
    }
    out
}

/// Product of two homogeneous polynomials given by their nu-power coefficients.
fn mul_homogeneous(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (s, a) in p.iter().enumerate() {
        if *a == ZERO {
            continue;
        }
        for (t, b) in q.iter().enumerate() {
            out[s + t] += a * b;
        }
    }
    out
}

impl fmt::Debug for TruncatedSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries2(order={}; ", self.order)?;
        let mut first = true;
        for d in 0..=self.order {
            for j in 0..=d {
                let c = self.coeff(d - j, j);
                if c != ZERO {
                    if !first {
                        write!(f, ", ")?;
                    }
                    write!(f, "[{},{}]={}", d - j, j, c)?;
                    first = false;
                }
            }
        }
        write!(f, ")")
    }
}

impl Add for TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Add for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn add(self, rhs: Self) -> TruncatedSeries2 {
        self.check_same_order(rhs);
        TruncatedSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Sub for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn sub(self, rhs: Self) -> TruncatedSeries2 {
        self.check_same_order(rhs);
        TruncatedSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Mul for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn mul(self, rhs: Self) -> TruncatedSeries2 {
        self.check_same_order(rhs);
        let order = self.order;
        let mut out = TruncatedSeries2::zero(order);
        for d in 0..=order {
            for k in 0..=d {
                let prod = mul_homogeneous(self.homogeneous(k), rhs.homogeneous(d - k));
                for (o, p) in out.homogeneous_mut(d).iter_mut().zip(prod) {
                    *o += p;
                }
            }
        }
        out
    }
}

/// Series of `1 / (beta - i lambda) = (1/beta) sum_n (i lambda / beta)^n`.
fn inverse_shifted_beta(beta: f64, order: usize) -> TruncatedSeries2 {
    TruncatedSeries2::from_fn(order, |i, j| {
        if j == 0 {
            I.powu(i as u32) / beta.powi(i as i32 + 1)
        } else {
            ZERO
        }
    })
}

/// Taylor series at the origin of the chiral rate `f(lambda, nu; beta, mu)`.
///
/// Built from the exact rewriting
/// `f = c pi/12 (i lambda/beta) G + pi/2 (2 i beta mu nu - nu^2 + i beta mu^2 lambda) G`
/// with `G = 1/(beta - i lambda)`, so the constant term is exactly zero.
pub fn taylor_of_chiral_f(beta: f64, mu: f64, c: f64, order: usize) -> TruncatedSeries2 {
    use std::f64::consts::PI;
    let g = inverse_shifted_beta(beta, order);
    let mut num = TruncatedSeries2::zero(order);
    if order >= 1 {
        num.set(1, 0, I * (c * PI / (12.0 * beta) + PI / 2.0 * beta * mu * mu));
        num.set(0, 1, I * PI * beta * mu);
    }
    if order >= 2 {
        num.set(0, 2, C64::new(-PI / 2.0, 0.0));
    }
    &num * &g
}

/// Taylor series at the origin of the full rate `F(lambda, nu)`.
pub fn taylor_of_f(tp: &ThermoPoint, order: usize) -> Result<TruncatedSeries2> {
    if order < 1 {
        return Err(Error::InvalidParameter {
            name: "order",
            value: order as f64,
            reason: "must be at least 1",
        });
    }
    let left = taylor_of_chiral_f(tp.beta_l(), tp.mu_l(), tp.c(), order);
    let right = taylor_of_chiral_f(tp.beta_r(), tp.mu_r(), tp.c(), order).reflect();
    Ok(left + right)
}

/// Joint cumulant rates `kappa[j][k] = <dE^j dQ^k>_c / t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTable {
    table: TruncatedSeries2,
}

impl CumulantTable {
    pub fn n_max(&self) -> usize {
        self.table.order()
    }

    /// Joint cumulant of order `j` in energy and `k` in charge.
    pub fn get(&self, j: usize, k: usize) -> C64 {
        self.table.coeff(j, k)
    }

    pub fn energy(&self, n: usize) -> C64 {
        self.get(n, 0)
    }

    pub fn charge(&self, n: usize) -> C64 {
        self.get(0, n)
    }

    /// Largest imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.table
            .coeffs()
            .iter()
            .fold(0.0, |m: f64, c| m.max(c.im.abs()))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Reads cumulant rates off a log-generating series: the coefficient of
/// `lambda^j nu^k` times `j! k! / i^(j+k)`.
pub fn cumulants_from_log(series: &TruncatedSeries2, n_max: usize) -> Result<CumulantTable> {
    let constant = series.coeff(0, 0);
    if constant.norm() > LOG_CONSTANT_TOLERANCE {
        return Err(Error::NotLogGenerating { constant });
    }
    if n_max > series.order() {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: n_max as f64,
            reason: "exceeds the truncation order of the series",
        });
    }
    let table = TruncatedSeries2::from_fn(n_max, |j, k| {
        if j + k == 0 {
            return ZERO;
        }
        series.coeff(j, k) * factorial(j) * factorial(k) / I.powu((j + k) as u32)
    });
    Ok(CumulantTable { table })
}

/// Cumulant table of the junction up to total order `n_max`.
pub fn cumulants(tp: &ThermoPoint, n_max: usize) -> Result<CumulantTable> {
    cumulants_from_log(&taylor_of_f(tp, n_max.max(1))?, n_max)
}

/// Closed-form pure-energy cumulant at zero chemical potentials,
/// `(c pi n! / 12) (T_l^{n+1} + (-1)^n T_r^{n+1})`.
pub fn energy_cumulant_closed_form(n: usize, c: f64, t_l: f64, t_r: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    c * std::f64::consts::PI * factorial(n) / 12.0
        * (t_l.powi(n as i32 + 1) + sign * t_r.powi(n as i32 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldf;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn simplex_layout() {
        let s = TruncatedSeries2::from_fn(3, |i, j| c((10 * i + j) as f64, 0.0));
        assert_eq!(s.coeffs().len(), 10);
        assert_eq!(s.homogeneous(2), &[c(20.0, 0.0), c(11.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(s.coeff(2, 2), c(0.0, 0.0));
    }

    #[test]
    #[should_panic]
    fn set_beyond_order_panics() {
        TruncatedSeries2::zero(2).set(2, 1, ONE);
    }

    #[test]
    fn exp_of_zero_is_one() {
        assert_eq!(TruncatedSeries2::zero(6).exp(), TruncatedSeries2::one(6));
    }

    #[test]
    fn exp_of_lambda_matches_factorials() {
        let e = TruncatedSeries2::lambda(8).exp();
        for n in 0..=8 {
            assert!((e.coeff(n, 0).re - 1.0 / factorial(n)).abs() < 1e-15);
        }
        assert_eq!(e.coeff(1, 1), ZERO);
    }

    #[test]
    fn exp_of_sum_factorizes() {
        let order = 6;
        let l = TruncatedSeries2::lambda(order).scale(c(0.5, 0.2));
        let n = TruncatedSeries2::nu(order).scale(c(-0.3, 1.0));
        let lhs = (&l + &n).exp();
        let rhs = &l.exp() * &n.exp();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn log_and_divide_reject_zero_constant() {
        let s = TruncatedSeries2::lambda(4);
        assert_eq!(s.log().unwrap_err(), Error::ZeroConstantTerm { op: "log" });
        assert_eq!(
            TruncatedSeries2::one(4).checked_div(&s).unwrap_err(),
            Error::ZeroConstantTerm { op: "divide" }
        );
    }

    #[test]
    fn division_inverts_geometric_series() {
        let order = 7;
        let one_minus = TruncatedSeries2::one(order) - TruncatedSeries2::lambda(order);
        let g = TruncatedSeries2::one(order).checked_div(&one_minus).unwrap();
        for n in 0..=order {
            assert_eq!(g.coeff(n, 0), ONE);
        }
    }

    #[test]
    fn log_of_exp_returns_input() {
        let s = TruncatedSeries2::from_fn(8, |i, j| {
            if i + j == 0 {
                ZERO
            } else {
                c(0.3 / (1 + i) as f64, -0.2 * j as f64)
            }
        });
        let back = s.exp().log().unwrap();
        assert!(back.max_abs_diff(&s) < 1e-13);
    }

    #[test]
    fn linear_composition_swaps_and_scales() {
        let s = TruncatedSeries2::from_fn(4, |i, j| c(i as f64 + 1.0, j as f64));
        let swapped = s.compose_linear([[ZERO, ONE], [ONE, ZERO]]);
        for d in 0..=4 {
            for j in 0..=d {
                assert_eq!(swapped.coeff(d - j, j), s.coeff(j, d - j));
            }
        }
        let reflected = s.compose_linear([[-ONE, ZERO], [ZERO, -ONE]]);
        assert!(reflected.max_abs_diff(&s.reflect()) < 1e-15);
    }

    #[test]
    fn taylor_constant_term_is_exact_zero_and_charge_sector_gaussian() {
        let tp = ThermoPoint::new(1.3, 0.4, 0.2, -0.7, 2.0).unwrap();
        let s = taylor_of_f(&tp, 8).unwrap();
        assert_eq!(s.coeff(0, 0), ZERO);
        for k in 3..=8 {
            assert_eq!(s.coeff(0, k), ZERO, "nu^{k}");
        }
    }

    #[test]
    fn first_coefficients_give_mean_currents() {
        let tp = ThermoPoint::new(1.3, 0.4, 0.2, -0.7, 2.0).unwrap();
        let s = taylor_of_f(&tp, 4).unwrap();
        let j = ldf::mean_currents(&tp);
        // F ~ i lambda J_E + i nu J_Q
        assert!(((-I * s.coeff(1, 0)).re - j.energy).abs() < 1e-13);
        assert!(((-I * s.coeff(0, 1)).re - j.charge).abs() < 1e-13);
    }

    #[test]
    fn cumulants_of_zero_series_vanish() {
        let t = cumulants_from_log(&TruncatedSeries2::zero(5), 5).unwrap();
        for d in 0..=5 {
            for j in 0..=d {
                assert_eq!(t.get(d - j, j), ZERO);
            }
        }
    }

    #[test]
    fn cumulants_reject_non_log_series() {
        let err = cumulants_from_log(&TruncatedSeries2::one(3), 3).unwrap_err();
        assert!(matches!(err, Error::NotLogGenerating { .. }));
        assert!(cumulants_from_log(&TruncatedSeries2::zero(3), 4).is_err());
    }

    #[test]
    fn equilibrium_cumulant_table() {
        let tp = ThermoPoint::new(2.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let t = cumulants(&tp, 6).unwrap();
        for n in (1..=6).step_by(2) {
            assert!(t.energy(n).norm() < 1e-15);
            assert!(t.charge(n).norm() < 1e-15);
        }
        assert!((t.energy(2).re - PI / 6.0 * 2.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn mean_energy_current_example() {
        let tp = ThermoPoint::from_temperatures(0.05, 0.02, 0.0, 0.0, 1.0).unwrap();
        let t = cumulants(&tp, 2).unwrap();
        assert!((t.energy(1).re - 5.4978e-4).abs() < 1e-7);
    }

    #[test]
    fn energy_cumulants_match_closed_form() {
        let tp = ThermoPoint::from_temperatures(0.7, 0.3, 0.0, 0.0, 1.5).unwrap();
        let t = cumulants(&tp, 8).unwrap();
        for n in 1..=8 {
            let expected = energy_cumulant_closed_form(n, 1.5, 0.7, 0.3);
            assert!((t.energy(n).re - expected).abs() < 1e-12 * expected.abs().max(1.0));
            assert!(t.energy(n).im.abs() < 1e-12);
        }
    }

    fn unit_disk() -> impl Strategy<Value = C64> {
        (0.0f64..1.0, 0.0f64..std::f64::consts::TAU)
            .prop_map(|(r, phi)| C64::from_polar(r, phi))
    }

    fn series_strategy(order: usize) -> impl Strategy<Value = TruncatedSeries2> {
        proptest::collection::vec(unit_disk(), simplex_len(order)).prop_map(move |v| {
            let mut s = TruncatedSeries2::zero(order);
            s.coeffs.copy_from_slice(&v);
            s
        })
    }

    proptest! {
        #[test]
        fn exp_log_round_trip(s in series_strategy(8)) {
            let mut a = s;
            a.coeffs[0] = ONE;
            let back = a.log().unwrap().exp();
            prop_assert!(back.max_abs_diff(&a) < 1e-12, "{}", back.max_abs_diff(&a));
        }

        #[test]
        fn ring_axioms(a in series_strategy(6), b in series_strategy(6), d in series_strategy(6)) {
            prop_assert!((&a * &b).max_abs_diff(&(&b * &a)) < 1e-13);
            prop_assert!((&(&a * &b) * &d).max_abs_diff(&(&a * &(&b * &d))) < 1e-12);
            prop_assert!((&a * &(&b + &d)).max_abs_diff(&(&(&a * &b) + &(&a * &d))) < 1e-12);
        }

        #[test]
        fn division_inverts_multiplication(a in series_strategy(6), b in series_strategy(6)) {
            let mut b = b;
            b.coeffs[0] = c(1.0, 0.5);
            let q = (&a * &b).checked_div(&b).unwrap();
            prop_assert!(q.max_abs_diff(&a) < 1e-11);
        }

        #[test]
        fn truncation_consistency(bl in 0.2f64..5.0, br in 0.2f64..5.0,
                                  ml in -1.0f64..1.0, mr in -1.0f64..1.0) {
            let tp = ThermoPoint::new(bl, br, ml, mr, 1.0).unwrap();
            let high = taylor_of_f(&tp, 8).unwrap().truncate(4);
            let low = taylor_of_f(&tp, 4).unwrap();
            prop_assert_eq!(high, low);
        }

        #[test]
        fn series_evaluation_tracks_closed_form(bl in 0.5f64..3.0, br in 0.5f64..3.0,
                                                ml in -1.0f64..1.0, mr in -1.0f64..1.0,
                                                l in -0.005f64..0.005, n in -0.005f64..0.005) {
            let tp = ThermoPoint::new(bl, br, ml, mr, 1.0).unwrap();
            let s = taylor_of_f(&tp, 8).unwrap();
            let direct = ldf::full_f(crate::thermo::CountingPoint::real(l, n), &tp).unwrap();
            prop_assert!((s.eval(c(l, 0.0), c(n, 0.0)) - direct).norm() < 1e-13);
        }
    }
}
