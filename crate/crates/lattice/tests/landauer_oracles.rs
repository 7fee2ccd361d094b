use ness_core::series::energy_cumulant_closed_form;
use ness_core::C64;
use ness_lattice::landauer::{cumulant_rates, fcs_rate, steady_currents, BandSpec, Counting};
use ness_lattice::Reservoirs;
use std::f64::consts::PI;

const BAND: BandSpec = BandSpec { hopping: 1.0 };

#[test]
fn energy_rate_satisfies_fluctuation_relation() {
    let r = Reservoirs::from_temperatures(0.2, 0.1, 0.0, 0.0);
    let shift = C64::new(0.0, r.beta_r - r.beta_l);
    for lambda in [0.7, -1.3, 2.2, 4.0] {
        for im in [0.0, 0.5, -1.0] {
            let l = C64::new(lambda, im);
            let a = fcs_rate(&BAND, &r, l, Counting::Energy).unwrap();
            let b = fcs_rate(&BAND, &r, shift - l, Counting::Energy).unwrap();
            assert!((a - b).norm() < 1e-8 * a.norm().max(1e-3), "{l}: {a} vs {b}");
        }
    }
}

#[test]
fn energy_fluctuation_relation_holds_deep_in_the_degenerate_regime() {
    // the shifted field grows like e^{(beta_r - beta_l)|epsilon|}, so hole
    // occupations of order e^{-beta_r} must keep their relative precision
    let r = Reservoirs::from_temperatures(0.02, 0.01, 0.0, 0.0);
    let shift = C64::new(0.0, r.beta_r - r.beta_l);
    for lambda in [15.0, -35.0, 55.0] {
        let l = C64::new(lambda, 0.0);
        let a = fcs_rate(&BAND, &r, l, Counting::Energy).unwrap();
        let b = fcs_rate(&BAND, &r, shift - l, Counting::Energy).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm(), "{l}: {a} vs {b}");
    }
}

#[test]
fn charge_rate_satisfies_fluctuation_relation_at_equal_temperatures() {
    let r = Reservoirs::from_temperatures(0.2, 0.2, 0.1, -0.05);
    let shift = C64::new(0.0, r.beta_l * r.mu_l - r.beta_r * r.mu_r);
    for nu in [0.3, -0.9, 1.7] {
        let n = C64::new(nu, 0.0);
        let a = fcs_rate(&BAND, &r, n, Counting::Charge).unwrap();
        let b = fcs_rate(&BAND, &r, shift - n, Counting::Charge).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm(), "{a} vs {b}");
    }
}

#[test]
fn stencil_derivatives_of_the_rate_are_the_cumulants() {
    let r = Reservoirs::from_temperatures(0.3, 0.15, 0.1, -0.1);
    for (which, h) in [(Counting::Charge, 0.05), (Counting::Energy, 0.1)] {
        let f = |x: f64| fcs_rate(&BAND, &r, C64::new(x, 0.0), which).unwrap();
        let d2 = (-(f(2.0 * h) + f(-2.0 * h)) + 16.0 * (f(h) + f(-h)) - 30.0 * f(0.0)) / (12.0 * h * h);
        let k = cumulant_rates(&BAND, &r, which, 2).unwrap();
        assert!((-d2.re - k[1]).abs() < 1e-6 * k[1], "{which:?}: {} vs {}", -d2.re, k[1]);
    }
}

#[test]
fn low_temperature_energy_cumulants_match_chiral_formula() {
    let (tl, tr) = (0.02, 0.01);
    let r = Reservoirs::from_temperatures(tl, tr, 0.0, 0.0);
    let k = cumulant_rates(&BAND, &r, Counting::Energy, 4).unwrap();
    for n in 1..=4 {
        let cft = energy_cumulant_closed_form(n, 1.0, tl, tr);
        let rel = (k[n - 1] - cft).abs() / cft.abs();
        assert!(rel < 0.02, "order {n}: {} vs {cft}", k[n - 1]);
    }
}

// With unit transmission the energy integrals run over the band in energy
// (dk v = d epsilon), so the band shape enters only through the band edges
// and the deviation from the chiral formula is of order e^{-1/T}, far below
// any power of T.
#[test]
fn low_temperature_energy_deviation_is_exponentially_small() {
    for (tl, tr) in [(0.05, 0.025), (0.025, 0.0125)] {
        let r = Reservoirs::from_temperatures(tl, tr, 0.0, 0.0);
        let k = cumulant_rates(&BAND, &r, Counting::Energy, 4).unwrap();
        for n in 1..=4 {
            let cft = energy_cumulant_closed_form(n, 1.0, tl, tr);
            let rel = (k[n - 1] - cft).abs() / cft.abs();
            let bound = ((-1.0 / tl).exp() / tl.powi(n as i32 + 1)).max(1e-10);
            assert!(rel < bound, "T=({tl},{tr}) order {n}: rel {rel:e}");
        }
    }
}

#[test]
fn charge_statistics_become_gaussian() {
    let mut previous = f64::INFINITY;
    for scale in [0.4, 0.2, 0.1, 0.05] {
        let r = Reservoirs::from_temperatures(scale, scale, scale, -scale);
        let k = cumulant_rates(&BAND, &r, Counting::Charge, 4).unwrap();
        let ratio = (k[2] / k[0]).abs().max((k[3] / k[1]).abs());
        assert!(ratio < previous, "scale {scale}: {ratio}");
        previous = ratio;
    }
    assert!(previous < 1e-6, "{previous}");
}

#[test]
fn zero_temperature_charge_current_is_window_over_two_pi() {
    let r = Reservoirs::from_temperatures(0.0, 0.0, 0.05, -0.03);
    let j = steady_currents(&BAND, &r).unwrap();
    assert!((j.charge - 0.08 / (2.0 * PI)).abs() < 1e-13);
}
