//! Cross-checks of the core crate against independent computations:
//! finite differences of the closed form, explicit state enumeration for the
//! characters, and line integrals of the one-point functions.

use std::f64::consts::PI;

use ness_core::characters::{self, OnePoint};
use ness_core::ldf::{self, MeanCurrents};
use ness_core::numdiff;
use ness_core::series::{self, TruncatedSeries2};
use ness_core::{CountingPoint, ThermoPoint, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const I: C64 = C64::new(0.0, 1.0);

fn sample_points() -> Vec<ThermoPoint> {
    vec![
        ThermoPoint::from_temperatures(0.05, 0.02, 0.0, 0.0, 1.0).unwrap(),
        ThermoPoint::new(1.0, 2.0, 0.3, 0.1, 1.0).unwrap(),
        ThermoPoint::new(0.7, 3.1, -0.4, 0.25, 2.5).unwrap(),
        ThermoPoint::new(4.0, 0.5, 0.9, -0.6, 0.5).unwrap(),
    ]
}

#[test]
fn series_first_and_second_cumulants_match_finite_differences() {
    for tp in sample_points() {
        let table = series::cumulants(&tp, 4).unwrap();
        let fl = |l: C64| ldf::full_f(CountingPoint::new(l, c(0.0, 0.0)), &tp).unwrap();
        let fn_ = |n: C64| ldf::full_f(CountingPoint::new(c(0.0, 0.0), n), &tp).unwrap();
        let h = 1e-2 * tp.beta_l().min(tp.beta_r());
        // kappa_n = (-i d)^n F
        let e1 = -I * numdiff::derivative(&fl, c(0.0, 0.0), 1, h);
        let e2 = -numdiff::derivative(&fl, c(0.0, 0.0), 2, h);
        let q1 = -I * numdiff::derivative(&fn_, c(0.0, 0.0), 1, h);
        let q2 = -numdiff::derivative(&fn_, c(0.0, 0.0), 2, h);
        for (series_value, fd) in [
            (table.energy(1), e1),
            (table.energy(2), e2),
            (table.charge(1), q1),
            (table.charge(2), q2),
        ] {
            let scale = series_value.norm().max(1e-6);
            assert!(
                (series_value - fd).norm() < 1e-8 * scale.max(1.0),
                "{series_value} vs {fd}"
            );
        }
    }
}

#[test]
fn gradient_at_origin_equals_mean_currents() {
    for tp in sample_points() {
        let table = series::cumulants(&tp, 2).unwrap();
        let MeanCurrents { energy, charge } = ldf::mean_currents(&tp);
        assert!((table.energy(1).re - energy).abs() < 1e-10);
        assert!((table.charge(1).re - charge).abs() < 1e-10);
        assert!(table.max_imag() < 1e-10);
    }
}

#[test]
fn cross_cumulant_matches_two_dimensional_differences() {
    let tp = ThermoPoint::new(0.7, 3.1, -0.4, 0.25, 2.5).unwrap();
    let f = |l: f64, n: f64| ldf::full_f(CountingPoint::real(l, n), &tp).unwrap();
    let h = 1e-3;
    let mixed = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    // kappa_11 = -d_lambda d_nu F
    let fd = -mixed;
    let table = series::cumulants(&tp, 2).unwrap();
    let closed = PI * (tp.mu_l() * tp.t_l() + tp.mu_r() * tp.t_r());
    assert!((table.get(1, 1).re - closed).abs() < 1e-12);
    assert!((fd.re - closed).abs() < 1e-5, "{fd} vs {closed}");
}

#[test]
fn second_energy_cumulant_is_positive_closed_form() {
    let tp = ThermoPoint::from_temperatures(0.05, 0.02, 0.0, 0.0, 1.0).unwrap();
    let table = series::cumulants(&tp, 4).unwrap();
    let expected = PI / 6.0 * (0.05f64.powi(3) + 0.02f64.powi(3));
    assert!(expected > 0.0);
    assert!((table.energy(2).re - expected).abs() < 1e-15);
}

#[test]
fn charge_cumulants_beyond_two_are_exact_zeros() {
    for tp in sample_points() {
        let s = series::taylor_of_f(&tp, 8).unwrap();
        for k in 3..=8 {
            assert_eq!(s.coeff(0, k), c(0.0, 0.0));
        }
    }
}

#[test]
fn fluctuation_relation_on_random_grid() {
    // fixed-seed LCG so the grid is reproducible without extra dependencies
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut uniform = move || {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut checked = 0;
    while checked < 100 {
        let tp = ThermoPoint::new(
            0.2 + 3.0 * uniform(),
            0.2 + 3.0 * uniform(),
            2.0 * uniform() - 1.0,
            2.0 * uniform() - 1.0,
            0.5 + 2.0 * uniform(),
        )
        .unwrap();
        let cp = CountingPoint::new(
            c(4.0 * uniform() - 2.0, 0.1 * (uniform() - 0.5)),
            c(4.0 * uniform() - 2.0, uniform() - 0.5),
        );
        let conj = ldf::fluctuation_conjugate(cp, &tp);
        let (Ok(a), Ok(b)) = (ldf::full_f(cp, &tp), ldf::full_f(conj, &tp)) else {
            continue;
        };
        assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "{a} vs {b}");
        checked += 1;
    }
}

#[test]
fn chiral_f_is_the_line_integral_of_its_one_point_functions() {
    // f(lambda, nu) = int_0^1 [i lambda h(s) + i nu j(s)] ds along (s lambda, s nu),
    // composite Simpson on 2000 panels.
    let (beta, mu, cc) = (1.7, 0.35, 1.3);
    let (lambda, nu) = (c(0.8, -0.3), c(-0.4, 0.2));
    let integrand = |s: f64| {
        let (b, m) = ldf::shifted_parameters(lambda * s, nu * s, beta, mu).unwrap();
        I * lambda * ldf::one_point_h(b, m, cc).unwrap() + I * nu * ldf::one_point_j(b, m).unwrap()
    };
    let panels = 2000;
    let h = 1.0 / panels as f64;
    let mut acc = integrand(0.0) + integrand(1.0);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(k as f64 * h);
    }
    let quad = acc * h / 3.0;
    let direct = ldf::chiral_f(lambda, nu, beta, mu, cc).unwrap();
    assert!((quad - direct).norm() < 1e-12, "{quad} vs {direct}");
}

#[test]
fn energy_only_form_agrees_with_full_form_at_zero_potential() {
    let tp = ThermoPoint::new(1.0, 2.0, 0.0, 0.0, 3.0).unwrap();
    for l in [-1.5, -0.2, 0.0, 0.4, 2.0] {
        let a = ldf::full_f(CountingPoint::real(l, 0.0), &tp).unwrap();
        let b = ldf::energy_only_f(c(l, 0.0), 3.0, 1.0, 2.0).unwrap();
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn c_star_spec_points() {
    for (bl, ml, br, mr, c_star) in [(1.0, 0.5, 2.0, 0.25, 2.5), (2.0, 0.1, 4.0, 0.05, 1.24)] {
        let tp = ThermoPoint::new(bl, br, ml, mr, 1.0).unwrap();
        let red = ldf::c_star_reduction(&tp, 1e-12).unwrap();
        assert!((red.c_star - c_star).abs() < 1e-14);
        assert!(red.residual < 1e-12);
    }
}

#[test]
fn series_exp_log_identity_on_generating_function() {
    // exp(F) truncated is a moment generating function; its log returns F.
    let tp = ThermoPoint::new(1.0, 2.0, 0.3, 0.1, 1.0).unwrap();
    let f = series::taylor_of_f(&tp, 8).unwrap();
    let back = f.exp().log().unwrap();
    assert!(back.max_abs_diff(&f) < 1e-12);
    let swapped = f.compose_linear([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
    assert_eq!(swapped.coeff(0, 2), f.coeff(2, 0));
    assert!(TruncatedSeries2::zero(3).log().is_err());
}

/// Number of partitions of `n` by explicit enumeration of non-increasing
/// part sequences.
fn count_partitions(n: usize, max_part: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=max_part.min(n))
        .map(|p| count_partitions(n - p, p))
        .sum()
}

#[test]
fn level_one_characters_match_state_enumeration() {
    // States: oscillator level L (partitions of L) on top of zero mode N,
    // with L_0 = N^2/4 + L; sectors N even and N odd. Both truncated at 30.
    let level = 30usize;
    let tau = c(0.0, 2.0);
    let q = (-2.0 * PI * 2.0f64).exp();
    let mut brute = 0.0;
    let mut counts = std::collections::BTreeMap::new();
    for n in -12i64..=12 {
        let zero_mode = (n * n) as f64 / 4.0;
        for l in 0..=level {
            let total = zero_mode + l as f64;
            if total > level as f64 {
                continue;
            }
            let d = count_partitions(l, l) as f64;
            brute += d * q.powf(total - 1.0 / 24.0);
            *counts.entry(((n * n) as usize + 4 * l, n)).or_insert(0.0) += d;
        }
    }
    let mut series_sum = c(0.0, 0.0);
    for m in 0..2 {
        let chi = characters::u1_character(1, m, level as i64).unwrap();
        for (&(p, n), &coeff) in chi.terms() {
            let key = ((*p.numer() * 4 / *p.denom()) as usize, n);
            assert_eq!(counts.get(&key).copied(), Some(coeff), "state ({p}, {n})");
        }
        series_sum += chi.eval(tau, c(0.0, 0.0)).unwrap();
    }
    let total_states: usize = counts.len();
    let series_states: usize = (0..2)
        .map(|m| characters::u1_character(1, m, level as i64).unwrap().len())
        .sum();
    assert_eq!(total_states, series_states);
    assert!((series_sum.re - brute).abs() < 1e-12 * brute, "{series_sum} vs {brute}");
}

#[test]
fn modular_covariance_on_imaginary_axis_grid() {
    for k in [1, 2, 3] {
        for t in [0.8, 0.9, 1.0, 1.1, 1.2] {
            let res = characters::modular_covariance_residual(
                k,
                c(0.0, t),
                c(0.11, -0.05),
                characters::DEFAULT_ORDER,
            )
            .unwrap();
            assert!(res < 1e-8, "k={k} t={t}: {res}");
        }
    }
}

#[test]
fn one_point_sequences_converge_with_shrinking_error() {
    let ratios = [10.0, 20.0, 40.0, 80.0];
    for (beta, mu, which) in [
        (1.0, 0.3, OnePoint::Charge),
        (1.0, 0.0, OnePoint::Energy),
        (0.5, 0.2, OnePoint::Energy),
    ] {
        let seq = characters::one_point_sequence(beta, mu, which, 1, &ratios).unwrap();
        assert!(seq.monotone, "{seq:?}");
        assert!(seq.errors[0] < 0.02 * seq.limit.abs());
    }
}
