//! Grid expansion and the per-point computations of each experiment kind.
//!
//! Every point yields a list of long-format records. A point that fails part
//! way keeps the rows it already produced and gains an error row; panics are
//! caught the same way, so one bad point never takes its siblings down.

use std::panic::{catch_unwind, AssertUnwindSafe};

use ness_core::characters::{self, OnePoint};
use ness_core::{ldf, numdiff, series};
use ness_core::{CountingPoint, ThermoPoint, C64};
use ness_lattice::chain::single_particle_hamiltonians;
use ness_lattice::fcs::{self, CountingKind, FcsEngine, QuadraticObservable, StencilPlan};
use ness_lattice::landauer::{self, BandSpec, ChargeCalibration, Counting};
use ness_lattice::observables::{junction_charge_current, junction_energy_current};
use ness_lattice::state::{initial_state, Evolution};
use ness_lattice::steady::{default_window, time_average, TimeAverage};
use ness_lattice::{ChainSpec, Reservoirs};

use crate::config::{ExperimentKind, Quantity, ResolvedGrid};
use crate::report::{Metric, PointContext, Record, Status};
use crate::tolerances::Tolerances;

type PointResult = std::result::Result<(), Box<dyn std::error::Error + Send + Sync>>;

/// Twist used for the modular covariance rows.
pub const MODULAR_TWIST: f64 = 0.05;

/// One grid point. Fields a kind does not sweep keep their defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t_l: f64,
    pub t_r: f64,
    pub mu_l: f64,
    pub mu_r: f64,
    pub c: f64,
    pub n_sites: usize,
    pub hopping: f64,
    pub quantity: Option<Quantity>,
    pub beta: f64,
    pub mu: f64,
    pub level_k: i64,
}

impl Default for Point {
    fn default() -> Self {
        Point {
            t_l: f64::NAN,
            t_r: f64::NAN,
            mu_l: 0.0,
            mu_r: 0.0,
            c: 1.0,
            n_sites: 0,
            hopping: 1.0,
            quantity: None,
            beta: f64::NAN,
            mu: f64::NAN,
            level_k: 1,
        }
    }
}

fn sweep<T: Copy>(points: Vec<Point>, values: &[T], set: impl Fn(&mut Point, T)) -> Vec<Point> {
    let mut out = Vec::with_capacity(points.len() * values.len());
    for p in points {
        for &v in values {
            let mut q = p;
            set(&mut q, v);
            out.push(q);
        }
    }
    out
}

/// Cartesian product of the grid lists used by `kind`, in config order
/// (earlier fields vary slowest). `compare` pairs `t_l` with `t_r`.
pub fn expand(kind: ExperimentKind, g: &ResolvedGrid) -> Vec<Point> {
    use ExperimentKind::*;
    let mut pts = vec![Point::default()];
    if kind == Characters {
        pts = sweep(pts, &g.beta, |p, v| p.beta = v);
        pts = sweep(pts, &g.mu, |p, v| p.mu = v);
        return sweep(pts, &g.level_k, |p, v| p.level_k = v);
    }
    if kind == Compare {
        let pairs: Vec<(f64, f64)> = g.t_l.iter().copied().zip(g.t_r.iter().copied()).collect();
        pts = sweep(pts, &pairs, |p, (l, r)| {
            p.t_l = l;
            p.t_r = r;
        });
    } else {
        pts = sweep(pts, &g.t_l, |p, v| p.t_l = v);
        pts = sweep(pts, &g.t_r, |p, v| p.t_r = v);
    }
    pts = sweep(pts, &g.mu_l, |p, v| p.mu_l = v);
    pts = sweep(pts, &g.mu_r, |p, v| p.mu_r = v);
    match kind {
        Predict => sweep(pts, &g.c, |p, v| p.c = v),
        Simulate | Compare => {
            let pts = sweep(pts, &g.n_sites, |p, v| p.n_sites = v);
            sweep(pts, &g.hopping, |p, v| p.hopping = v)
        }
        Fcs => {
            let pts = sweep(pts, &g.n_sites, |p, v| p.n_sites = v);
            let pts = sweep(pts, &g.hopping, |p, v| p.hopping = v);
            sweep(pts, &g.quantities, |p, v| p.quantity = Some(v))
        }
        Landauer => {
            let pts = sweep(pts, &g.hopping, |p, v| p.hopping = v);
            sweep(pts, &g.quantities, |p, v| p.quantity = Some(v))
        }
        Characters => unreachable!(),
    }
}

/// `name=value` pairs of the fields `kind` sweeps, separated by `;`.
pub fn describe(kind: ExperimentKind, p: &Point) -> String {
    use ExperimentKind::*;
    let mut parts: Vec<String> = vec![];
    let mut num = |name: &str, v: f64| parts.push(format!("{name}={v}"));
    if kind == Characters {
        num("beta", p.beta);
        num("mu", p.mu);
        num("level_k", p.level_k as f64);
        return parts.join(";");
    }
    num("t_l", p.t_l);
    num("t_r", p.t_r);
    num("mu_l", p.mu_l);
    num("mu_r", p.mu_r);
    match kind {
        Predict => num("c", p.c),
        Simulate | Compare | Fcs => {
            num("n_sites", p.n_sites as f64);
            num("hopping", p.hopping);
        }
        Landauer => num("hopping", p.hopping),
        Characters => {}
    }
    if let Some(q) = p.quantity {
        parts.push(format!("quantity={}", q.name()));
    }
    parts.join(";")
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic payload".into()
    }
}

/// Runs one grid point and returns its records.
pub fn run_point(
    kind: ExperimentKind,
    index: usize,
    p: &Point,
    g: &ResolvedGrid,
    tol: &Tolerances,
) -> Vec<Record> {
    let ctx = PointContext {
        experiment: kind,
        point: index,
        parameters: describe(kind, p),
    };
    let mut rows = vec![];
    let outcome = catch_unwind(AssertUnwindSafe(|| match kind {
        ExperimentKind::Predict => predict(&ctx, p, g, tol, &mut rows),
        ExperimentKind::Simulate => simulate(&ctx, p, g, tol, &mut rows),
        ExperimentKind::Fcs => fcs_point(&ctx, p, g, tol, &mut rows),
        ExperimentKind::Landauer => landauer_point(&ctx, p, g, tol, &mut rows),
        ExperimentKind::Characters => characters_point(&ctx, p, g, tol, &mut rows),
        ExperimentKind::Compare => compare(&ctx, p, g, tol, &mut rows),
    }));
    match outcome {
        Ok(Ok(())) => {}
        Ok(Err(e)) => rows.push(ctx.error("point", e.to_string())),
        Err(payload) => rows.push(ctx.error("point", format!("panic: {}", panic_message(&*payload)))),
    }
    rows
}

fn rel_or_abs(reference: f64) -> Metric {
    if reference == 0.0 {
        Metric::Abs
    } else {
        Metric::Rel
    }
}

fn with_note(mut r: Record, note: &str) -> Record {
    if r.note.is_empty() {
        r.note = note.to_string();
    } else {
        r.note = format!("{}; {note}", r.note);
    }
    r
}

fn counting(q: Quantity) -> (Counting, CountingKind) {
    match q {
        Quantity::Charge => (Counting::Charge, CountingKind::ChargeHalfDifference),
        Quantity::Energy => (Counting::Energy, CountingKind::EnergyHalfDifference),
    }
}

fn predict(ctx: &PointContext, p: &Point, g: &ResolvedGrid, tol: &Tolerances, rows: &mut Vec<Record>) -> PointResult {
    let tp = ThermoPoint::from_temperatures(p.t_l, p.t_r, p.mu_l, p.mu_r, p.c)?;
    let mean = ldf::mean_currents(&tp);
    rows.push(ctx.info("energy_current", "cft", mean.energy));
    rows.push(ctx.info("charge_current", "cft", mean.charge));

    let n_max = g.cumulant_order.max(2);
    let table = series::cumulants(&tp, n_max)?;
    let cf = ldf::closed_form_rates(&tp);
    let coefficient = |name: &str, v: C64, reference: f64| {
        ctx.compare(name, ("series", v.re), ("closed_form", reference), rel_or_abs(reference), 0.0, tol.cumulant_coefficient)
    };
    rows.push(coefficient("energy_cumulant_1", table.energy(1), cf.energy_mean));
    rows.push(coefficient("energy_cumulant_2", table.energy(2), cf.energy_variance));
    rows.push(coefficient("charge_cumulant_1", table.charge(1), cf.charge_mean));
    rows.push(coefficient("charge_cumulant_2", table.charge(2), cf.charge_variance));
    rows.push(coefficient("energy_charge_covariance", table.get(1, 1), cf.energy_charge_covariance));
    rows.push(ctx.compare(
        "series_imaginary_part",
        ("series", table.max_imag()),
        ("zero", 0.0),
        Metric::Abs,
        0.0,
        tol.cumulant_coefficient,
    ));
    for n in 3..=n_max {
        rows.push(with_note(
            ctx.compare(&format!("charge_cumulant_{n}"), ("series", table.charge(n).re), ("zero", 0.0), Metric::Abs, 0.0, 0.0),
            "must vanish exactly",
        ));
        let name = format!("energy_cumulant_{n}");
        if p.mu_l == 0.0 && p.mu_r == 0.0 {
            let reference = series::energy_cumulant_closed_form(n, p.c, p.t_l, p.t_r);
            rows.push(coefficient(&name, table.energy(n), reference));
        } else {
            rows.push(ctx.info(&name, "series", table.energy(n).re));
        }
    }

    for &x in &g.counting_fields {
        let cp = CountingPoint::real(x, 0.5 * x);
        let residual = ldf::full_f(cp, &tp).and_then(|f| {
            let conj = ldf::full_f(ldf::fluctuation_conjugate(cp, &tp), &tp)?;
            Ok((conj - f).norm())
        });
        rows.push(match residual {
            Ok(r) => with_note(
                ctx.compare("fluctuation_relation", ("ldf", r), ("zero", 0.0), Metric::Abs, 0.0, tol.fluctuation_relation),
                &format!("lambda={x}, nu={}", 0.5 * x),
            ),
            Err(e) => ctx.error("fluctuation_relation", e.to_string()),
        });
    }

    let (chi_l, chi_r) = (tp.beta_l() * tp.mu_l(), tp.beta_r() * tp.mu_r());
    let surface = 1e-12 * chi_l.abs().max(1.0);
    if (chi_l - chi_r).abs() <= surface {
        let red = ldf::c_star_reduction(&tp, surface)?;
        rows.push(with_note(
            ctx.compare("c_star_reduction", ("ldf", red.residual), ("zero", 0.0), Metric::Abs, 0.0, tol.c_star),
            &format!("c*={}", red.c_star),
        ));
    }
    Ok(())
}

fn chain(p: &Point) -> Result<(ChainSpec, Reservoirs), ness_lattice::LatticeError> {
    let r = Reservoirs::from_temperatures(p.t_l, p.t_r, p.mu_l, p.mu_r);
    Ok((ChainSpec::new(p.n_sites, p.hopping, r)?, r))
}

/// Latest time before reflections from the open ends can matter.
fn check_times(spec: &ChainSpec, last: f64, what: &str) -> PointResult {
    let limit = default_window(spec).1;
    if last > limit {
        return Err(format!("{what} ends at t={last}, beyond the reflection-free limit {limit}").into());
    }
    Ok(())
}

/// Lattice-to-chiral conversion fixed at a low-temperature reference point.
pub fn calibration(hopping: f64) -> Result<ChargeCalibration, ness_lattice::LatticeError> {
    let r = Reservoirs::from_temperatures(0.05 * hopping, 0.05 * hopping, 0.01 * hopping, -0.01 * hopping);
    ChargeCalibration::from_reference(&BandSpec::new(hopping), &r)
}

/// Closed-form currents in lattice units, with chemical potentials mapped
/// through the charge calibration.
fn cft_currents(p: &Point) -> Result<(f64, f64), Box<dyn std::error::Error + Send + Sync>> {
    let cal = calibration(p.hopping)?;
    let tp = ThermoPoint::from_temperatures(
        p.t_l,
        p.t_r,
        cal.chemical_potential(p.mu_l),
        cal.chemical_potential(p.mu_r),
        1.0,
    )?;
    let m = ldf::mean_currents(&tp);
    Ok((m.energy, cal.scale * m.charge))
}

struct SteadyMeasurement {
    energy: TimeAverage,
    charge: TimeAverage,
    landauer: landauer::SteadyCurrents,
}

fn measure_steady(spec: &ChainSpec, r: &Reservoirs, g: &ResolvedGrid, with_charge: bool) -> Result<SteadyMeasurement, Box<dyn std::error::Error + Send + Sync>> {
    let window = g.window.unwrap_or_else(|| default_window(spec));
    check_times(spec, window.1, "averaging window")?;
    let ev = Evolution::partitioned(spec)?;
    let energy = time_average(&ev, &junction_energy_current(spec), window, g.samples)?;
    let charge = if with_charge {
        time_average(&ev, &junction_charge_current(spec), window, g.samples)?
    } else {
        TimeAverage {
            mean: f64::NAN,
            max_relative_deviation: f64::NAN,
            samples: vec![],
        }
    };
    let landauer = landauer::steady_currents(&BandSpec::of_chain(spec), r)?;
    Ok(SteadyMeasurement { energy, charge, landauer })
}

fn stationarity(ctx: &PointContext, name: &str, avg: &TimeAverage, steady: f64, tol: f64) -> Record {
    if steady == 0.0 {
        return ctx.info(name, "lattice", avg.max_relative_deviation);
    }
    ctx.compare(name, ("lattice", avg.max_relative_deviation), ("steady", 0.0), Metric::Abs, 0.0, tol)
}

fn simulate(ctx: &PointContext, p: &Point, g: &ResolvedGrid, tol: &Tolerances, rows: &mut Vec<Record>) -> PointResult {
    let (spec, r) = chain(p)?;
    let m = measure_steady(&spec, &r, g, true)?;
    let (e, q, land) = (&m.energy, &m.charge, m.landauer);
    rows.push(ctx.compare("energy_current", ("lattice", e.mean), ("landauer", land.energy), rel_or_abs(land.energy), 0.0, tol.lattice_vs_landauer));
    rows.push(ctx.compare("charge_current", ("lattice", q.mean), ("landauer", land.charge), rel_or_abs(land.charge), 0.0, tol.lattice_vs_landauer));
    match cft_currents(p) {
        Ok((ce, cq)) => {
            rows.push(ctx.compare("energy_current_cft", ("lattice", e.mean), ("cft", ce), rel_or_abs(ce), 0.0, tol.lattice_vs_cft));
            rows.push(ctx.compare("charge_current_cft", ("lattice", q.mean), ("cft", cq), rel_or_abs(cq), 0.0, tol.lattice_vs_cft));
        }
        Err(err) => rows.push(ctx.error("current_cft", err.to_string())),
    }
    rows.push(stationarity(ctx, "energy_current_stationarity", e, land.energy, tol.steady_stationarity));
    rows.push(stationarity(ctx, "charge_current_stationarity", q, land.charge, tol.steady_stationarity));
    Ok(())
}

fn compare(ctx: &PointContext, p: &Point, g: &ResolvedGrid, tol: &Tolerances, rows: &mut Vec<Record>) -> PointResult {
    let (spec, r) = chain(p)?;
    let m = measure_steady(&spec, &r, g, false)?;
    let (e, land) = (&m.energy, m.landauer);
    rows.push(ctx.compare("energy_current", ("lattice", e.mean), ("landauer", land.energy), rel_or_abs(land.energy), 0.0, tol.lattice_vs_landauer));
    let (ce, _) = cft_currents(p)?;
    rows.push(ctx.compare("energy_current_cft", ("lattice", e.mean), ("cft", ce), rel_or_abs(ce), 0.0, tol.lattice_vs_cft));
    rows.push(ctx.info(CFT_DEVIATION, "lattice", (e.mean - ce) / ce));
    rows.push(stationarity(ctx, "energy_current_stationarity", e, land.energy, tol.steady_stationarity));
    Ok(())
}

/// Quantity name of the signed relative deviation `(lattice - cft) / cft`.
pub const CFT_DEVIATION: &str = "cft_relative_deviation";
/// Quantity name of the deviation ratio between a point and its half-temperature partner.
pub const SHRINK_FACTOR: &str = "t_squared_shrink_factor";

/// Five times evenly spread over `[2n/15, n/5]` (in inverse hopping), inside
/// the reflection-free window.
pub fn default_fcs_times(spec: &ChainSpec) -> Vec<f64> {
    let n = spec.n_sites as f64 / spec.hopping;
    let (a, b) = (2.0 * n / 15.0, n / 5.0);
    (0..5).map(|k| a + (b - a) * k as f64 / 4.0).collect()
}

fn fcs_point(ctx: &PointContext, p: &Point, g: &ResolvedGrid, tol: &Tolerances, rows: &mut Vec<Record>) -> PointResult {
    let (spec, r) = chain(p)?;
    let quantity = p.quantity.ok_or("fcs point without a quantity")?;
    let (which, kind) = counting(quantity);
    let times = g.times.clone().unwrap_or_else(|| default_fcs_times(&spec));
    check_times(&spec, times.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)), "time grid")?;
    let n_max = g.cumulant_order;

    let h = single_particle_hamiltonians(&spec);
    let c0 = initial_state(&spec)?;
    let obs = QuadraticObservable::new(&spec, kind);
    let engine = FcsEngine::new(&c0, h.full.as_ref(), &obs)?;
    let rates = fcs::cumulant_rates(&engine, &times, n_max, StencilPlan::for_kind(kind, &spec))?;
    let band = landauer::cumulant_rates(&BandSpec::of_chain(&spec), &r, which, n_max)?;

    for n in 1..=n_max {
        let k = n - 1;
        // higher charge cumulants nearly vanish; they are judged on the scale of the variance
        let (metric, scale) = if quantity == Quantity::Charge && n >= 3 {
            (Metric::Scaled, band[1].abs())
        } else {
            (rel_or_abs(band[k]), 0.0)
        };
        let mut note = format!("fit residual {:.3e}", rates.residuals[k]);
        if rates.flagged[k] {
            note.push_str(", no linear growth");
        }
        rows.push(with_note(
            ctx.compare(
                &format!("{}_cumulant_rate_{n}", quantity.name()),
                ("determinant", rates.rates[k]),
                ("landauer", band[k]),
                metric,
                scale,
                tol.fcs_rate,
            ),
            &note,
        ));
    }
    Ok(())
}

fn landauer_point(ctx: &PointContext, p: &Point, g: &ResolvedGrid, tol: &Tolerances, rows: &mut Vec<Record>) -> PointResult {
    let quantity = p.quantity.ok_or("landauer point without a quantity")?;
    let (which, _) = counting(quantity);
    let band = BandSpec::new(p.hopping);
    let r = Reservoirs::from_temperatures(p.t_l, p.t_r, p.mu_l, p.mu_r);
    let n_max = g.cumulant_order;
    let k = landauer::cumulant_rates(&band, &r, which, n_max.max(2))?;
    let finite = r.beta_l.is_finite() && r.beta_r.is_finite();

    for n in 1..=n_max {
        let name = format!("{}_cumulant_rate_{n}", quantity.name());
        let value = k[n - 1];
        match quantity {
            Quantity::Energy if finite && p.mu_l == 0.0 && p.mu_r == 0.0 => {
                let cft = series::energy_cumulant_closed_form(n, 1.0, p.t_l, p.t_r);
                rows.push(ctx.compare(&name, ("landauer", value), ("cft", cft), rel_or_abs(cft), 0.0, tol.landauer_vs_cft));
            }
            Quantity::Charge if finite => {
                let cal = calibration(p.hopping)?;
                let tp = ThermoPoint::from_temperatures(
                    p.t_l,
                    p.t_r,
                    cal.chemical_potential(p.mu_l),
                    cal.chemical_potential(p.mu_r),
                    1.0,
                )?;
                let cf = ldf::closed_form_rates(&tp);
                let value = cal.cumulant(n, value);
                let row = match n {
                    1 => ctx.compare(&name, ("landauer", value), ("cft", cf.charge_mean), rel_or_abs(cf.charge_mean), 0.0, tol.landauer_vs_cft),
                    2 => ctx.compare(&name, ("landauer", value), ("cft", cf.charge_variance), Metric::Rel, 0.0, tol.landauer_vs_cft),
                    _ => ctx.compare(&name, ("landauer", value), ("cft", 0.0), Metric::Scaled, cal.cumulant(2, k[1]), tol.landauer_vs_cft),
                };
                rows.push(with_note(row, "calibrated units"));
            }
            _ => rows.push(ctx.info(&name, "landauer", value)),
        }
    }

    // counting fields are measured against the inverse temperature for energy
    let field_scale = match quantity {
        Quantity::Charge => 1.0,
        Quantity::Energy if finite => r.beta_l.min(r.beta_r),
        Quantity::Energy => 1.0 / p.hopping,
    };
    let rate = |x: C64| landauer::fcs_rate(&band, &r, x, which).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let i = C64::new(0.0, 1.0);
    for n in 1..=2 {
        let d = numdiff::derivative(&rate, C64::new(0.0, 0.0), n, 0.05 * field_scale);
        let from_rate = (d / i.powu(n as u32)).re;
        let reference = k[n - 1];
        // a vanishing mean is judged on the scale of the variance
        let scale = reference.abs().max(k[1].abs() * field_scale.powi(n as i32 - 2));
        rows.push(ctx.compare(
            &format!("{}_rate_derivative_{n}", quantity.name()),
            ("fcs_rate", from_rate),
            ("cumulant_integral", reference),
            Metric::Scaled,
            scale,
            tol.landauer_derivative,
        ));
    }

    let shift = match quantity {
        Quantity::Energy if finite && p.mu_l == 0.0 && p.mu_r == 0.0 => Some(r.beta_r - r.beta_l),
        Quantity::Charge if finite && r.beta_l == r.beta_r => Some(r.beta_l * r.mu_l - r.beta_r * r.mu_r),
        _ => None,
    };
    if let Some(shift) = shift {
        for &x in &g.counting_fields {
            let x = x * field_scale;
            let pair = landauer::fcs_rate(&band, &r, C64::new(x, 0.0), which).and_then(|a| {
                Ok((a, landauer::fcs_rate(&band, &r, C64::new(-x, shift), which)?))
            });
            rows.push(match pair {
                Ok((a, b)) => with_note(
                    ctx.compare(
                        &format!("{}_fluctuation_relation", quantity.name()),
                        ("fcs_rate", (a - b).norm() / a.norm().max(f64::MIN_POSITIVE)),
                        ("zero", 0.0),
                        Metric::Abs,
                        0.0,
                        tol.landauer_fluctuation_relation,
                    ),
                    &format!("field={x}, relative to |rate|"),
                ),
                Err(e) => ctx.error(&format!("{}_fluctuation_relation", quantity.name()), e.to_string()),
            });
        }
    }
    Ok(())
}

fn characters_point(ctx: &PointContext, p: &Point, g: &ResolvedGrid, tol: &Tolerances, rows: &mut Vec<Record>) -> PointResult {
    for &t in &g.tau_imag {
        let tau = C64::new(0.0, t);
        rows.push(
            match characters::modular_covariance_residual(p.level_k, tau, C64::new(MODULAR_TWIST, 0.0), characters::DEFAULT_ORDER) {
                Ok(res) => with_note(
                    ctx.compare("modular_residual", ("characters", res), ("zero", 0.0), Metric::Abs, 0.0, tol.modular_residual),
                    &format!("tau={t}i, z={MODULAR_TWIST}"),
                ),
                Err(e) => ctx.error("modular_residual", e.to_string()),
            },
        );
    }
    for (which, name) in [(OnePoint::Charge, "charge"), (OnePoint::Energy, "energy")] {
        let seq = characters::one_point_sequence(p.beta, p.mu, which, p.level_k, &g.r_over_beta)?;
        for (ratio, est) in seq.r_over_beta.iter().zip(&seq.estimates) {
            rows.push(with_note(ctx.info(&format!("{name}_one_point_estimate"), "characters", *est), &format!("R/beta={ratio}")));
        }
        let last = *seq.estimates.last().expect("r_over_beta is nonempty");
        let ratio = *seq.r_over_beta.last().expect("r_over_beta is nonempty");
        rows.push(with_note(
            ctx.compare(&format!("{name}_one_point"), ("characters", last), ("closed_form", seq.limit), rel_or_abs(seq.limit), 0.0, tol.one_point),
            &format!("R/beta={ratio}"),
        ));
        rows.push(with_note(
            ctx.compare(
                &format!("{name}_one_point_convergence"),
                ("characters", if seq.monotone { 1.0 } else { 0.0 }),
                ("monotone", 1.0),
                Metric::Abs,
                0.0,
                0.0,
            ),
            "1 when the error shrinks with R/beta",
        ));
    }
    Ok(())
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// For every `compare` point whose temperatures are both half those of
/// another point (same chemical potentials and chain), the ratio of their
/// CFT deviations. Ideal quadratic scaling gives 4.
pub fn shrink_factor_rows(points: &[Point], records: &[Record], tol: &Tolerances) -> Vec<Record> {
    let deviation = |k: usize| {
        records
            .iter()
            .find(|r| r.point == k && r.quantity == CFT_DEVIATION)
            .map(|r| r.value)
    };
    let mut out = vec![];
    for (j, cold) in points.iter().enumerate() {
        for (i, hot) in points.iter().enumerate() {
            let paired = same(hot.t_l, 2.0 * cold.t_l)
                && same(hot.t_r, 2.0 * cold.t_r)
                && hot.mu_l == cold.mu_l
                && hot.mu_r == cold.mu_r
                && hot.n_sites == cold.n_sites
                && hot.hopping == cold.hopping;
            if !paired {
                continue;
            }
            let ctx = PointContext {
                experiment: ExperimentKind::Compare,
                point: j,
                parameters: describe(ExperimentKind::Compare, cold),
            };
            let (Some(d_hot), Some(d_cold)) = (deviation(i), deviation(j)) else {
                out.push(ctx.error(SHRINK_FACTOR, format!("deviation missing for point {i} or {j}")));
                continue;
            };
            out.push(shrink_record(&ctx, d_hot / d_cold, i, tol));
        }
    }
    out
}

fn shrink_record(ctx: &PointContext, factor: f64, partner: usize, tol: &Tolerances) -> Record {
    let (lo, hi) = (tol.t_squared_factor_min, tol.t_squared_factor_max);
    let ideal = 4.0;
    // the accepted band is asymmetric around the ideal; the tolerance is the side the value falls on
    let tolerance = if factor < ideal { ideal - lo } else { hi - ideal };
    let mut r = ctx.compare(SHRINK_FACTOR, ("lattice", factor), ("t_squared", ideal), Metric::Abs, 0.0, tolerance);
    if !(factor >= lo && factor <= hi) {
        r.status = Status::Fail;
    }
    r.note = format!("deviation at point {partner} over deviation here; accepted range [{lo}, {hi}]");
    r
}
