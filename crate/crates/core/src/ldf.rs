//! Closed-form steady-state quantities of a conformal junction with
//! topological defect: mean currents, chiral and full cumulant generating
//! functions, their shifted one-point representation, the fluctuation
//! symmetry and the alternative two-time protocol.
//!
//! Conventions: `F(lambda, nu) = lim t^-1 log < e^{i lambda dE} e^{i nu dQ} >`,
//! with left reservoir feeding right movers. The generating function splits
//! into one chiral term per reservoir,
//!
//! ```text
//! F(lambda, nu) = f(lambda, nu; beta_l, mu_l) + f(-lambda, -nu; beta_r, mu_r)
//! f(lambda, nu; beta, mu) = c pi/12 (1/(beta - i lambda) - 1/beta)
//!                         + pi (beta mu + i nu)^2 / (2 (beta - i lambda))
//!                         - pi beta mu^2 / 2
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::thermo::{CountingPoint, Side, ThermoPoint};
use crate::C64;

/// Distance from the pole `beta - i lambda = 0` below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-9;

const I: C64 = C64::new(0.0, 1.0);

fn check_pole(lambda: C64, beta: f64, side: Side) -> Result<C64> {
    let z = beta - I * lambda;
    if !(z.re > POLE_GUARD) || !z.is_finite() {
        return Err(Error::PoleDomain {
            side,
            lambda,
            pole: C64::new(0.0, -beta),
        });
    }
    Ok(z)
}

fn check_chiral_params(beta: f64, mu: f64, c: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
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
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "must be finite and strictly positive",
        });
    }
    Ok(())
}

fn chiral_f_on(side: Side, lambda: C64, nu: C64, beta: f64, mu: f64, c: f64) -> Result<C64> {
    check_chiral_params(beta, mu, c)?;
    let z = check_pole(lambda, beta, side)?;
    // Same expression over the common denominator, so that f(0, 0) is exactly zero.
    let numerator = c * PI / 12.0 * I * lambda / beta
        + PI / 2.0 * (2.0 * I * beta * mu * nu - nu * nu + I * beta * mu * mu * lambda);
    Ok(numerator / z)
}

/// Chiral cumulant generating rate `f(lambda, nu; beta, mu)`.
///
/// Defined for `Re(beta - i lambda) > 0`; inputs within [`POLE_GUARD`] of the
/// pole at `lambda = -i beta` are refused.
pub fn chiral_f(lambda: C64, nu: C64, beta: f64, mu: f64, c: f64) -> Result<C64> {
    chiral_f_on(Side::Chiral, lambda, nu, beta, mu, c)
}

/// Full cumulant generating rate `F(lambda, nu)` of the junction.
pub fn full_f(cp: CountingPoint, tp: &ThermoPoint) -> Result<C64> {
    let left = chiral_f_on(
        Side::Left,
        cp.lambda,
        cp.nu,
        tp.beta_l(),
        tp.mu_l(),
        tp.c(),
    )?;
    let right = chiral_f_on(
        Side::Right,
        -cp.lambda,
        -cp.nu,
        tp.beta_r(),
        tp.mu_r(),
        tp.c(),
    )?;
    Ok(left + right)
}

/// Energy-only generating rate at zero chemical potentials, written in the
/// factored form
/// `c pi/12 (i lambda / (beta_l (beta_l - i lambda)) - i lambda / (beta_r (beta_r + i lambda)))`.
pub fn energy_only_f(lambda: C64, c: f64, beta_l: f64, beta_r: f64) -> Result<C64> {
    check_chiral_params(beta_l, 0.0, c)?;
    check_chiral_params(beta_r, 0.0, c)?;
    let zl = check_pole(lambda, beta_l, Side::Left)?;
    let zr = check_pole(-lambda, beta_r, Side::Right)?;
    let il = I * lambda;
    Ok(c * PI / 12.0 * (il / (beta_l * zl) - il / (beta_r * zr)))
}

/// Mean steady currents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurrents {
    pub energy: f64,
    pub charge: f64,
}

/// `J_E = c pi/12 (T_l^2 - T_r^2) + pi/2 (mu_l^2 - mu_r^2)`, `J_Q = pi (mu_l - mu_r)`.
pub fn mean_currents(tp: &ThermoPoint) -> MeanCurrents {
    let (tl, tr) = (tp.t_l(), tp.t_r());
    let (ml, mr) = (tp.mu_l(), tp.mu_r());
    MeanCurrents {
        energy: tp.c() * PI / 12.0 * (tl * tl - tr * tr) + PI / 2.0 * (ml * ml - mr * mr),
        charge: PI * (ml - mr),
    }
}

fn check_one_point_beta(beta: C64) -> Result<()> {
    if beta.re > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::OnePointDomain { beta })
    }
}

/// Chiral Gibbs energy density `c pi / (12 beta^2) + pi mu^2 / 2`, analytically
/// continued to complex `beta` and `mu`.
pub fn one_point_h(beta: C64, mu: C64, c: f64) -> Result<C64> {
    check_one_point_beta(beta)?;
    Ok(c * PI / (12.0 * beta * beta) + PI * mu * mu / 2.0)
}

/// Chiral Gibbs current density `pi mu`.
pub fn one_point_j(beta: C64, mu: C64) -> Result<C64> {
    check_one_point_beta(beta)?;
    Ok(PI * mu)
}

/// Shifted Gibbs parameters at which the derivatives of `f` are one-point
/// functions: `(beta - i lambda, (beta mu + i nu) / (beta - i lambda))`.
pub fn shifted_parameters(lambda: C64, nu: C64, beta: f64, mu: f64) -> Result<(C64, C64)> {
    let z = check_pole(lambda, beta, Side::Chiral)?;
    Ok((z, (beta * mu + I * nu) / z))
}

/// Counting point related to `cp` by the fluctuation symmetry,
/// `(i (beta_r - beta_l) - lambda, i (beta_l mu_l - beta_r mu_r) - nu)`.
pub fn fluctuation_conjugate(cp: CountingPoint, tp: &ThermoPoint) -> CountingPoint {
    let shift_lambda = C64::new(0.0, tp.beta_r() - tp.beta_l());
    let shift_nu = C64::new(0.0, tp.beta_l() * tp.mu_l() - tp.beta_r() * tp.mu_r());
    CountingPoint::new(shift_lambda - cp.lambda, shift_nu - cp.nu)
}

/// Outcome of [`c_star_reduction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CStarReduction {
    /// Common value of `beta mu` on both sides.
    pub chi: f64,
    pub c_star: f64,
    /// `max |F(lambda, 0) - F_energy_only(lambda; c*)|` over [`c_star_grid`].
    pub residual: f64,
}

/// Real lambda grid on which the c* identity is checked.
pub fn c_star_grid() -> Vec<f64> {
    (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect()
}

/// On the surface `beta_l mu_l = beta_r mu_r = chi` the energy statistics are
/// those of an uncharged theory with central charge `c* = c + 6 chi^2`.
///
/// `tolerance` bounds the accepted mismatch `|beta_l mu_l - beta_r mu_r|`.
pub fn c_star_reduction(tp: &ThermoPoint, tolerance: f64) -> Result<CStarReduction> {
    let chi_l = tp.beta_l() * tp.mu_l();
    let chi_r = tp.beta_r() * tp.mu_r();
    let mismatch = (chi_l - chi_r).abs();
    if !(mismatch <= tolerance) {
        return Err(Error::OffConstraintSurface {
            mismatch,
            tolerance,
        });
    }
    let chi = 0.5 * (chi_l + chi_r);
    let c_star = tp.c() + 6.0 * chi * chi;
    let mut residual: f64 = 0.0;
    for lambda in c_star_grid() {
        let lambda = C64::new(lambda, 0.0);
        let full = full_f(CountingPoint::new(lambda, C64::new(0.0, 0.0)), tp)?;
        let reduced = energy_only_f(lambda, c_star, tp.beta_l(), tp.beta_r())?;
        residual = residual.max((full - reduced).norm());
    }
    Ok(CStarReduction {
        chi,
        c_star,
        residual,
    })
}

/// Reservoir whose exponential dominates the two-time steady-state protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominant {
    Left,
    Right,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltTwoTime {
    pub value: f64,
    pub dominant: Dominant,
    /// Rate built from the left reservoir alone, `f(lambda; beta_l) + f(-lambda; beta_l)`.
    pub left_rate: f64,
    pub right_rate: f64,
}

/// Rate `f(lambda; beta) + f(-lambda; beta)` of a single reservoir for real
/// lambda: `-(c pi / 6) lambda^2 / (beta (beta^2 + lambda^2))`.
fn two_sided_rate(lambda: f64, beta: f64, c: f64) -> Result<f64> {
    let l = C64::new(lambda, 0.0);
    let zero = C64::new(0.0, 0.0);
    let v = chiral_f(l, zero, beta, 0.0, c)? + chiral_f(-l, zero, beta, 0.0, c)?;
    Ok(v.re)
}

/// Energy generating rate when the first measurement is made in the already
/// established steady state: the larger of the two single-reservoir rates.
///
/// Only real `lambda` is accepted; for complex arguments the ordering of the
/// exponents is not defined.
pub fn alt_two_time_f(lambda: f64, tp: &ThermoPoint) -> Result<AltTwoTime> {
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be finite and real",
        });
    }
    let left_rate = two_sided_rate(lambda, tp.beta_l(), tp.c())?;
    let right_rate = two_sided_rate(lambda, tp.beta_r(), tp.c())?;
    let dominant = if left_rate > right_rate {
        Dominant::Left
    } else if right_rate > left_rate {
        Dominant::Right
    } else {
        Dominant::Tie
    };
    Ok(AltTwoTime {
        value: left_rate.max(right_rate),
        dominant,
        left_rate,
        right_rate,
    })
}

/// Closed-form cumulant rates of the joint statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormRates {
    pub energy_mean: f64,
    pub energy_variance: f64,
    pub charge_mean: f64,
    pub charge_variance: f64,
    pub energy_charge_covariance: f64,
}

/// Low-order cumulant rates obtained by differentiating `F` by hand.
pub fn closed_form_rates(tp: &ThermoPoint) -> ClosedFormRates {
    let (tl, tr) = (tp.t_l(), tp.t_r());
    let (ml, mr) = (tp.mu_l(), tp.mu_r());
    let currents = mean_currents(tp);
    ClosedFormRates {
        energy_mean: currents.energy,
        energy_variance: tp.c() * PI / 6.0 * (tl.powi(3) + tr.powi(3))
            + PI * (ml * ml * tl + mr * mr * tr),
        charge_mean: currents.charge,
        charge_variance: PI * (tl + tr),
        energy_charge_covariance: PI * (ml * tl + mr * tr),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tp(bl: f64, br: f64, ml: f64, mr: f64, cc: f64) -> ThermoPoint {
        ThermoPoint::new(bl, br, ml, mr, cc).unwrap()
    }

    #[test]
    fn chiral_normalization_is_exact() {
        assert_eq!(chiral_f(c(0.0, 0.0), c(0.0, 0.0), 1.0, 0.3, 1.0).unwrap(), c(0.0, 0.0));
        assert_eq!(chiral_f(c(0.0, 0.0), c(0.0, 0.0), 7.5, -2.0, 0.5).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pole_is_refused_and_named() {
        // beta - i lambda = 0 at lambda = -i beta
        let err = chiral_f(c(0.0, -2.0), c(0.0, 0.0), 2.0, 0.0, 1.0).unwrap_err();
        match err {
            Error::PoleDomain { pole, side, .. } => {
                assert_eq!(pole, c(0.0, -2.0));
                assert_eq!(side, Side::Chiral);
            }
            other => panic!("unexpected {other:?}"),
        }
        // beyond the pole
        assert!(chiral_f(c(0.0, -3.0), c(0.0, 0.0), 2.0, 0.0, 1.0).is_err());
        // within the guard distance
        assert!(chiral_f(c(0.0, -2.0 + 1e-10), c(0.0, 0.0), 2.0, 0.0, 1.0).is_err());
        assert!(chiral_f(c(0.0, -2.0 + 1e-6), c(0.0, 0.0), 2.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn full_f_labels_failing_side() {
        let p = tp(1.0, 2.0, 0.0, 0.0, 1.0);
        let left = full_f(CountingPoint::new(c(0.0, -1.5), c(0.0, 0.0)), &p).unwrap_err();
        assert!(matches!(left, Error::PoleDomain { side: Side::Left, .. }));
        let right = full_f(CountingPoint::new(c(0.0, 2.5), c(0.0, 0.0)), &p).unwrap_err();
        assert!(matches!(right, Error::PoleDomain { side: Side::Right, .. }));
    }

    #[test]
    fn charge_sector_is_quadratic_in_nu() {
        // third nu-derivative at lambda = 0 vanishes; the function is an exact quadratic
        let f = |nu: C64| chiral_f(c(0.0, 0.0), nu, 1.3, 0.4, 1.0).unwrap();
        let d3 = numdiff::central(&f, c(0.2, 0.0), 3, 1e-2);
        assert!(d3.norm() < 1e-8, "{d3}");
    }

    /// Gauss-Legendre 16-point nodes and weights on [-1, 1].
    fn gauss_legendre_16() -> ([f64; 8], [f64; 8]) {
        (
            [
                0.095_012_509_837_637_44,
                0.281_603_550_779_258_9,
                0.458_016_777_657_227_4,
                0.617_876_244_402_643_8,
                0.755_404_408_355_003,
                0.865_631_202_387_831_7,
                0.944_575_023_073_232_6,
                0.989_400_934_991_649_9,
            ],
            [
                0.189_450_610_455_068_5,
                0.182_603_415_044_923_6,
                0.169_156_519_395_002_5,
                0.149_595_988_816_576_7,
                0.124_628_971_255_533_9,
                0.095_158_511_682_492_8,
                0.062_253_523_938_647_9,
                0.027_152_459_411_754_1,
            ],
        )
    }

    #[test]
    fn chiral_f_matches_quadrature_of_shifted_energy_density() {
        // f(lambda) = int_0^lambda i * c pi / (12 (beta - i s)^2) ds along the straight path
        let (beta, cc) = (1.0, 1.0);
        let lambda = c(0.0, -0.1);
        let (x, w) = gauss_legendre_16();
        let integrand = |s: C64| I * cc * PI / (12.0 * (beta - I * s) * (beta - I * s));
        let mut acc = c(0.0, 0.0);
        for k in 0..8 {
            for sign in [-1.0, 1.0] {
                let u = 0.5 * (1.0 + sign * x[k]);
                acc += w[k] * 0.5 * integrand(lambda * u);
            }
        }
        let quad = acc * lambda;
        // frozen from the quadrature: pi/12 (1/0.9 - 1)
        assert!((quad - c(0.029_088_820_866_572_16, 0.0)).norm() < 1e-14);
        let direct = chiral_f(lambda, c(0.0, 0.0), beta, 0.0, cc).unwrap();
        assert!((direct - quad).norm() < 1e-14, "{direct} vs {quad}");
    }

    #[test]
    fn equilibrium_statistics_are_symmetric() {
        let p = tp(2.0, 2.0, 0.1, 0.1, 1.0);
        for (l, n) in [(0.3, 0.1), (-1.0, 2.0), (5.0, -0.7)] {
            let a = full_f(CountingPoint::real(l, n), &p).unwrap();
            let b = full_f(CountingPoint::real(-l, -n), &p).unwrap();
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
            assert!(a.im.abs() < 1e-14 && a.re < 0.0);
        }
    }

    #[test]
    fn energy_current_from_lambda_derivative() {
        let p = ThermoPoint::from_temperatures(0.05, 0.02, 0.0, 0.0, 1.0).unwrap();
        let f = |l: C64| full_f(CountingPoint::new(l, c(0.0, 0.0)), &p).unwrap();
        let d = -I * numdiff::derivative(&f, c(0.0, 0.0), 1, numdiff::default_step(p.beta_l()));
        let expected = PI / 12.0 * 0.0021;
        assert!((d.re - expected).abs() < 1e-12, "{d}");
        assert!((expected - 5.4978e-4).abs() < 1e-7);
        assert!(d.im.abs() < 1e-12);
    }

    #[test]
    fn mean_current_examples() {
        let eq = mean_currents(&tp(3.0, 3.0, 0.2, 0.2, 1.0));
        assert_eq!(eq.energy, 0.0);
        assert_eq!(eq.charge, 0.0);

        let charge_only = mean_currents(&tp(2.0, 2.0, 0.2, 0.1, 4.0));
        assert!((charge_only.charge - 0.1 * PI).abs() < 1e-15);
        assert!((charge_only.charge - 0.31416).abs() < 1e-5);

        let energy = mean_currents(&tp(2.0, 2.0, 0.2, 0.1, 1.0));
        assert!((energy.energy - 0.015 * PI).abs() < 1e-15);
        assert!((energy.energy - 0.047124).abs() < 1e-6);
    }

    #[test]
    fn energy_current_is_odd_under_exchange() {
        let p = tp(1.0, 2.5, 0.3, -0.2, 1.7);
        let a = mean_currents(&p);
        let b = mean_currents(&p.swapped());
        assert!((a.energy + b.energy).abs() < 1e-15);
        assert!((a.charge + b.charge).abs() < 1e-15);
    }

    #[test]
    fn one_point_examples() {
        let h = one_point_h(c(1.0, 0.0), c(0.0, 0.0), 1.0).unwrap();
        assert!((h.re - PI / 12.0).abs() < 1e-15);
        assert!((h.re - 0.26180).abs() < 1e-5);
        let j = one_point_j(c(3.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((j.re - 0.5 * PI).abs() < 1e-15);
        assert!(one_point_h(c(0.0, 1.0), c(0.0, 0.0), 1.0).is_err());
        assert!(one_point_j(c(-1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn one_point_combines_to_energy_current() {
        let (bl, br) = (1.5, 3.0);
        let zero = c(0.0, 0.0);
        let hl = one_point_h(c(bl, 0.0), zero, 1.0).unwrap();
        let hr = one_point_h(c(br, 0.0), zero, 1.0).unwrap();
        let p = tp(bl, br, 0.0, 0.0, 1.0);
        assert!(((hl - hr).re - mean_currents(&p).energy).abs() < 1e-15);
    }

    #[test]
    fn shifted_one_point_example() {
        let (lambda, nu, beta, mu) = (c(0.3, 0.0), c(0.1, 0.0), 2.0, 0.4);
        let (b, m) = shifted_parameters(lambda, nu, beta, mu).unwrap();
        assert!((b - c(2.0, -0.3)).norm() < 1e-15);
        assert!((m - c(0.8, 0.1) / c(2.0, -0.3)).norm() < 1e-15);
        let f = |l: C64| chiral_f(l, nu, beta, mu, 1.0).unwrap();
        let d = -I * numdiff::richardson(&f, lambda, 1, numdiff::default_step(beta));
        let h = one_point_h(b, m, 1.0).unwrap();
        assert!((d - h).norm() / h.norm() < 1e-6, "{d} vs {h}");
    }

    #[test]
    fn fluctuation_conjugate_examples() {
        let eq = tp(1.0, 1.0, 0.2, 0.2, 1.0);
        let fixed = fluctuation_conjugate(CountingPoint::origin(), &eq);
        assert_eq!(fixed.lambda, c(0.0, 0.0));
        assert_eq!(fixed.nu, c(0.0, 0.0));

        let p = tp(1.0, 2.0, 0.3, 0.1, 1.0);
        let cp = CountingPoint::real(0.2, 0.1);
        let conj = fluctuation_conjugate(cp, &p);
        let back = fluctuation_conjugate(conj, &p);
        assert!((back.lambda - cp.lambda).norm() < 1e-15);
        assert!((back.nu - cp.nu).norm() < 1e-15);
        let delta = full_f(conj, &p).unwrap() - full_f(cp, &p).unwrap();
        assert!(delta.norm() < 1e-12, "{delta}");
    }

    #[test]
    fn c_star_examples() {
        let plain = c_star_reduction(&tp(1.0, 2.0, 0.0, 0.0, 1.0), 1e-12).unwrap();
        assert_eq!(plain.c_star, 1.0);
        assert!(plain.residual < 1e-15);

        let a = c_star_reduction(&tp(1.0, 2.0, 0.5, 0.25, 1.0), 1e-12).unwrap();
        assert_eq!(a.chi, 0.5);
        assert!((a.c_star - 2.5).abs() < 1e-15);
        assert!(a.residual < 1e-12, "{}", a.residual);

        let b = c_star_reduction(&tp(2.0, 4.0, 0.1, 0.05, 1.0), 1e-12).unwrap();
        assert!((b.c_star - 1.24).abs() < 1e-14);
        assert!(b.residual < 1e-12);
    }

    #[test]
    fn c_star_with_24_chi_squared_does_not_reproduce_f() {
        // Direct evaluation of both sides pins the coefficient of chi^2 to 6.
        let p = tp(1.0, 2.0, 0.5, 0.25, 1.0);
        let lambda = c(0.7, 0.0);
        let full = full_f(CountingPoint::new(lambda, c(0.0, 0.0)), &p).unwrap();
        let wrong = energy_only_f(lambda, 1.0 + 24.0 * 0.25, 1.0, 2.0).unwrap();
        let right = energy_only_f(lambda, 1.0 + 6.0 * 0.25, 1.0, 2.0).unwrap();
        assert!((full - right).norm() < 1e-14);
        assert!((full - wrong).norm() > 1e-2);
    }

    #[test]
    fn c_star_refuses_off_surface() {
        let err = c_star_reduction(&tp(1.0, 2.0, 0.5, 0.3, 1.0), 1e-9).unwrap_err();
        assert!(matches!(err, Error::OffConstraintSurface { .. }));
    }

    #[test]
    fn alt_two_time_examples() {
        let p = tp(1.0, 2.0, 0.0, 0.0, 1.0);
        let zero = alt_two_time_f(0.0, &p).unwrap();
        assert_eq!(zero.value, 0.0);

        let same = tp(1.5, 1.5, 0.0, 0.0, 1.0);
        let alt = alt_two_time_f(0.4, &same).unwrap();
        assert_eq!(alt.dominant, Dominant::Tie);
        let f = full_f(CountingPoint::real(0.4, 0.0), &same).unwrap();
        assert!((alt.value - f.re).abs() < 1e-12 && f.im.abs() < 1e-12);

        let alt = alt_two_time_f(0.3, &p).unwrap();
        let f = full_f(CountingPoint::real(0.3, 0.0), &p).unwrap();
        assert_eq!(alt.dominant, Dominant::Right);
        assert!((C64::new(alt.value, 0.0) - f).norm() > 1e-6);
        // -(pi/6) 0.09 / (2 * 4.09)
        assert!((alt.value + PI / 6.0 * 0.09 / 8.18).abs() < 1e-15);
        assert!(alt.value >= alt.left_rate.max(alt.right_rate));
        assert!(alt_two_time_f(f64::NAN, &p).is_err());
    }

    #[test]
    fn closed_form_variance_matches_second_difference() {
        let p = tp(1.3, 0.7, 0.2, -0.4, 2.0);
        let rates = closed_form_rates(&p);
        let f = |l: C64| full_f(CountingPoint::new(l, c(0.0, 0.0)), &p).unwrap();
        let g = |n: C64| full_f(CountingPoint::new(c(0.0, 0.0), n), &p).unwrap();
        let ve = -numdiff::derivative(&f, c(0.0, 0.0), 2, 1e-2);
        let vq = -numdiff::derivative(&g, c(0.0, 0.0), 2, 1e-2);
        assert!((ve.re - rates.energy_variance).abs() < 1e-9);
        assert!((vq.re - rates.charge_variance).abs() < 1e-9);
        assert!(rates.energy_variance > 0.0);
    }

    fn thermo_strategy() -> impl Strategy<Value = ThermoPoint> {
        (0.2f64..5.0, 0.2f64..5.0, -1.0f64..1.0, -1.0f64..1.0, 0.1f64..4.0)
            .prop_map(|(bl, br, ml, mr, cc)| tp(bl, br, ml, mr, cc))
    }

    proptest! {
        #[test]
        fn normalization(p in thermo_strategy()) {
            prop_assert_eq!(full_f(CountingPoint::origin(), &p).unwrap(), c(0.0, 0.0));
        }

        #[test]
        fn conjugation_reality(p in thermo_strategy(), l in -3.0f64..3.0, n in -3.0f64..3.0) {
            let a = full_f(CountingPoint::real(l, n), &p).unwrap();
            let b = full_f(CountingPoint::real(-l, -n), &p).unwrap();
            prop_assert!((a.conj() - b).norm() < 1e-12);
        }

        #[test]
        fn fluctuation_relation(p in thermo_strategy(), lr in -1.0f64..1.0, li in -0.1f64..0.1,
                                nr in -1.0f64..1.0, ni in -1.0f64..1.0) {
            let cp = CountingPoint::new(c(lr, li), c(nr, ni));
            let conj = fluctuation_conjugate(cp, &p);
            if let (Ok(a), Ok(b)) = (full_f(cp, &p), full_f(conj, &p)) {
                prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn derivative_identities(beta in 0.3f64..4.0, mu in -1.0f64..1.0,
                                 lr in -1.0f64..1.0, li in -0.2f64..0.2,
                                 nr in -1.0f64..1.0, ni in -0.5f64..0.5) {
            let (lambda, nu) = (c(lr, li * beta), c(nr, ni));
            let (b, m) = shifted_parameters(lambda, nu, beta, mu).unwrap();
            let h = numdiff::default_step(beta);
            let fl = |l: C64| chiral_f(l, nu, beta, mu, 1.0).unwrap();
            let fn_ = |n: C64| chiral_f(lambda, n, beta, mu, 1.0).unwrap();
            let dl = -I * numdiff::richardson(&fl, lambda, 1, h);
            let dn = -I * numdiff::richardson(&fn_, nu, 1, h);
            let oh = one_point_h(b, m, 1.0).unwrap();
            let oj = one_point_j(b, m).unwrap();
            prop_assert!((dl - oh).norm() <= 1e-6 * oh.norm().max(1e-3));
            prop_assert!((dn - oj).norm() <= 1e-6 * oj.norm().max(1e-3));
        }

        #[test]
        fn mixed_derivatives_commute(beta in 0.5f64..3.0, mu in -1.0f64..1.0,
                                     lr in -0.5f64..0.5, nr in -0.5f64..0.5) {
            // d_nu (-i d_lambda f) = d_lambda (-i d_nu f), each inner derivative via one-point functions
            let h = 1e-4;
            let dh = |n: C64| {
                let (b, m) = shifted_parameters(c(lr, 0.0), n, beta, mu).unwrap();
                one_point_h(b, m, 1.0).unwrap()
            };
            let dj = |l: C64| {
                let (b, m) = shifted_parameters(l, c(nr, 0.0), beta, mu).unwrap();
                one_point_j(b, m).unwrap()
            };
            let a = numdiff::richardson(&dh, c(nr, 0.0), 1, h);
            let b = numdiff::richardson(&dj, c(lr, 0.0), 1, h);
            prop_assert!((a - b).norm() < 1e-6 * (1.0 + a.norm()));
        }
    }
}
