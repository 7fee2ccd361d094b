//! The acceptance suite. Each criterion either drives an experiment kind
//! through the same code path as the CLI (with the embedded config shown by
//! `ness --list-criteria`) or calls the library directly.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ness_core::ldf::{self, Dominant};
use ness_core::{numdiff, CountingPoint, ThermoPoint, C64};
use ness_lattice::chain::single_particle_hamiltonians;
use ness_lattice::fcs::{FcsEngine, QuadraticObservable};
use ness_lattice::fock::two_time_distribution;
use ness_lattice::front::{front_scan, FrontQuantity, ProbeSide};
use ness_lattice::landauer::{self, BandSpec};
use ness_lattice::state::{initial_state, Evolution};
use ness_lattice::steady::chiral_decorrelation;
use ness_lattice::{ChainSpec, Reservoirs};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments;
use crate::report::{Metric, Record, Status};
use crate::run;
use crate::tolerances::{self as tol, Tolerances};

const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(label: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            label: label.to_string(),
            passed,
            detail: detail.into(),
        }
    }

    fn failed(label: &str, err: impl std::fmt::Display) -> Self {
        Check::new(label, false, format!("error: {err}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{} [{}] {}", c.label, if c.passed { "ok" } else { "FAIL" }, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// `ness` subcommand exercised, or `library` for direct calls.
    pub route: &'static str,
    /// Config used when the route is a subcommand.
    pub config: Option<&'static str>,
    pub budget: &'static str,
    pub run: fn() -> Outcome,
}

pub fn all() -> [Criterion; 11] {
    [
        Criterion { id: 1, name: "fluctuation relation", route: "library", config: None, budget: "< 1 s", run: fluctuation_relation },
        Criterion { id: 2, name: "derivative identities", route: "library", config: None, budget: "< 1 s", run: derivative_identities },
        Criterion { id: 3, name: "cumulant table", route: "predict", config: Some(CUMULANT_TABLE), budget: "< 1 s", run: cumulant_table },
        Criterion { id: 4, name: "c* reduction", route: "library", config: None, budget: "< 1 s", run: c_star },
        Criterion { id: 5, name: "lattice steady energy current", route: "compare", config: Some(STEADY_CURRENT), budget: "minutes", run: steady_current },
        Criterion { id: 6, name: "determinant vs Fock space", route: "library", config: None, budget: "< 1 min", run: determinant_vs_fock },
        Criterion { id: 7, name: "FCS pipeline agreement", route: "fcs + landauer", config: Some(FCS_CHARGE), budget: "minutes", run: fcs_pipeline },
        Criterion { id: 8, name: "steady-state factorization", route: "library", config: None, budget: "minutes", run: factorization },
        Criterion { id: 9, name: "light-cone abruptness", route: "library", config: None, budget: "minutes", run: light_cone },
        Criterion { id: 10, name: "characters leg", route: "characters", config: Some(CHARACTERS), budget: "< 1 min", run: characters_leg },
        Criterion { id: 11, name: "two-time protocol gap", route: "library", config: None, budget: "< 1 s", run: two_time_gap },
    ]
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn run_embedded(kind: ExperimentKind, text: &str) -> Result<Vec<Record>, String> {
    let cfg = ExperimentConfig::from_toml(text, Path::new("<embedded>")).map_err(|e| e.to_string())?;
    let grid = cfg.resolve(kind).map_err(|e| e.to_string())?;
    let points = experiments::expand(kind, &grid);
    run::evaluate(kind, &grid, &points, &Tolerances::acceptance(), workers()).map_err(|e| e.to_string())
}

fn measured(r: &Record) -> f64 {
    match r.metric {
        Metric::Abs => r.abs_error,
        _ => r.rel_error,
    }
}

/// All rows whose quantity satisfies `select` must pass; at least one must exist.
fn rows_check(label: &str, records: &[Record], select: impl Fn(&str) -> bool) -> Check {
    let rows: Vec<&Record> = records.iter().filter(|r| select(&r.quantity)).collect();
    if rows.is_empty() {
        return Check::new(label, false, "no rows");
    }
    let bad: Vec<&&Record> = rows.iter().filter(|r| r.status != Status::Pass).collect();
    let worst = rows
        .iter()
        .filter(|r| r.status != Status::Error)
        .map(|r| (measured(r), r.tolerance, r.metric))
        .fold((0.0f64, f64::NAN, Metric::None), |a, b| if b.0 > a.0 || a.2 == Metric::None { b } else { a });
    let mut detail = format!("{} rows, worst {} error {:.2e} (tol {:.0e})", rows.len(), worst.2.name(), worst.0, worst.1);
    if let Some(r) = bad.first() {
        detail.push_str(&format!(
            ", first failure {} at {}: {} vs {} {}",
            r.quantity, r.parameters, r.value, r.reference_value, r.note
        ));
    }
    Check::new(label, bad.is_empty(), detail)
}

fn errors_check(records: &[Record]) -> Check {
    let errors: Vec<&Record> = records.iter().filter(|r| r.status == Status::Error).collect();
    let detail = match errors.first() {
        Some(r) => format!("{} error rows, first at {}: {}", errors.len(), r.parameters, r.note),
        None => "none".into(),
    };
    Check::new("point errors", errors.is_empty(), detail)
}

fn fluctuation_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut failure = None;
    for _ in 0..10 {
        let tp = ThermoPoint::new(
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.1..4.0),
        )
        .expect("sampled parameters are valid");
        // |Im lambda| below the smaller beta keeps both chiral terms and their conjugates off the poles
        let reach = 0.5 * tp.beta_l().min(tp.beta_r());
        for _ in 0..100 {
            let cp = CountingPoint::new(
                C64::new(rng.random_range(-2.0..2.0), rng.random_range(-reach..reach)),
                C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            );
            match ldf::full_f(cp, &tp).and_then(|f| Ok((ldf::full_f(ldf::fluctuation_conjugate(cp, &tp), &tp)? - f).norm())) {
                Ok(r) => {
                    worst = worst.max(r);
                    count += 1;
                }
                Err(e) => failure = Some(e.to_string()),
            }
        }
    }
    let detail = format!("{count} points, max |F(conj) - F| = {worst:.2e}");
    Outcome {
        checks: vec![match failure {
            Some(e) => Check::failed("residual", e),
            None => Check::new("residual", worst < tol::FLUCTUATION_RELATION, detail),
        }],
    }
}

fn derivative_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let i = C64::new(0.0, 1.0);
    let (mut worst_h, mut worst_j): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let beta: f64 = rng.random_range(0.3..4.0);
        let mu: f64 = rng.random_range(-1.0..1.0);
        let lambda = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.2..0.2) * beta);
        let nu = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
        let h = numdiff::default_step(beta);
        let result = (|| -> ness_core::Result<(f64, f64)> {
            let (b, m) = ldf::shifted_parameters(lambda, nu, beta, mu)?;
            let fl = |l: C64| ldf::chiral_f(l, nu, beta, mu, 1.0).unwrap_or(C64::new(f64::NAN, 0.0));
            let fnu = |n: C64| ldf::chiral_f(lambda, n, beta, mu, 1.0).unwrap_or(C64::new(f64::NAN, 0.0));
            let dl = -i * numdiff::richardson(&fl, lambda, 1, h);
            let dn = -i * numdiff::richardson(&fnu, nu, 1, h);
            let oh = ldf::one_point_h(b, m, 1.0)?;
            let oj = ldf::one_point_j(b, m)?;
            Ok(((dl - oh).norm() / oh.norm(), (dn - oj).norm() / oj.norm()))
        })();
        match result {
            Ok((a, b)) => {
                worst_h = worst_h.max(a);
                worst_j = worst_j.max(b);
            }
            Err(e) => return Outcome { checks: vec![Check::failed("identities", e)] },
        }
    }
    let t = tol::DERIVATIVE_IDENTITY;
    Outcome {
        checks: vec![
            Check::new("lambda vs h", worst_h < t, format!("20 points, max rel {worst_h:.2e}")),
            Check::new("nu vs j", worst_j < t, format!("20 points, max rel {worst_j:.2e}")),
        ],
    }
}

pub const CUMULANT_TABLE: &str = r#"schema_version = 1
kind = "predict"
[grid]
t_l = [0.3, 1.0, 2.5]
t_r = [0.2, 0.7]
mu_l = [0.0, 0.4]
mu_r = [0.0, -0.3]
c = [1.0, 2.5]
cumulant_order = 4
"#;

fn cumulant_table() -> Outcome {
    let records = match run_embedded(ExperimentKind::Predict, CUMULANT_TABLE) {
        Ok(r) => r,
        Err(e) => return Outcome { checks: vec![Check::failed("predict", e)] },
    };
    let low = |q: &str| {
        ["energy_cumulant_1", "energy_cumulant_2", "charge_cumulant_1", "charge_cumulant_2", "series_imaginary_part"].contains(&q)
    };
    let zero = |q: &str| q == "charge_cumulant_3" || q == "charge_cumulant_4";
    Outcome {
        checks: vec![
            rows_check("orders 1-2 vs closed forms", &records, low),
            rows_check("charge orders 3-4 exactly zero", &records, zero),
            errors_check(&records),
        ],
    }
}

fn c_star() -> Outcome {
    let points = [(1.0, 2.0, 0.4), (0.5, 3.0, -0.8), (2.0, 0.7, 1.3)];
    let mut checks = vec![];
    for (beta_l, beta_r, chi) in points {
        let label = format!("beta=({beta_l}, {beta_r}), chi={chi}");
        let result = ThermoPoint::new(beta_l, beta_r, chi / beta_l, chi / beta_r, 1.0)
            .and_then(|tp| ldf::c_star_reduction(&tp, 1e-12));
        checks.push(match result {
            Ok(r) => Check::new(&label, r.residual < tol::C_STAR, format!("c*={:.3}, residual {:.2e}", r.c_star, r.residual)),
            Err(e) => Check::failed(&label, e),
        });
    }
    Outcome { checks }
}

pub const STEADY_CURRENT: &str = r#"schema_version = 1
kind = "compare"
[grid]
t_l = [0.05, 0.025]
t_r = [0.025, 0.0125]
mu_l = [0.0]
mu_r = [0.0]
n_sites = [1200]
window = [150.0, 300.0]
samples = 151
"#;

fn steady_current() -> Outcome {
    let records = match run_embedded(ExperimentKind::Compare, STEADY_CURRENT) {
        Ok(r) => r,
        Err(e) => return Outcome { checks: vec![Check::failed("compare", e)] },
    };
    let first = |q: &str| records.iter().find(|r| r.point == 0 && r.quantity == q);
    let mut checks = vec![];
    for (label, q) in [("vs landauer", "energy_current"), ("vs cft", "energy_current_cft")] {
        checks.push(match first(q) {
            Some(r) => Check::new(
                label,
                r.status == Status::Pass,
                format!("{:.6e} vs {:.6e}, rel {:.2e} (tol {})", r.value, r.reference_value, r.rel_error, r.tolerance),
            ),
            None => Check::new(label, false, "missing row"),
        });
    }
    let deviations: Vec<String> = records
        .iter()
        .filter(|r| r.quantity == experiments::CFT_DEVIATION)
        .map(|r| format!("{:.2e}", r.value))
        .collect();
    let mut shrink = rows_check("T^2 scaling", &records, |q| q == experiments::SHRINK_FACTOR);
    if let Some(r) = records.iter().find(|r| r.quantity == experiments::SHRINK_FACTOR) {
        shrink.detail = format!(
            "deviations {} give factor {:.3} (accepted [{}, {}])",
            deviations.join(" -> "),
            r.value,
            tol::T_SQUARED_FACTOR.0,
            tol::T_SQUARED_FACTOR.1
        );
    }
    checks.push(shrink);
    Outcome { checks }
}

fn determinant_vs_fock() -> Outcome {
    let sets = [
        Reservoirs::from_temperatures(0.7, 0.3, 0.2, -0.1),
        Reservoirs::from_temperatures(2.0, 0.5, 0.0, 0.0),
        Reservoirs::from_temperatures(1.0, 1.0, 0.4, -0.4),
    ];
    let times = [0.0, 0.7, 2.0, 5.5];
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for r in sets {
        let result = (|| -> ness_lattice::Result<()> {
            let spec = ChainSpec::new(8, 1.0, r)?;
            let h = single_particle_hamiltonians(&spec);
            let c0 = initial_state(&spec)?;
            let q = QuadraticObservable::charge_half_difference(&spec);
            let engine = FcsEngine::new(&c0, h.full.as_ref(), &q)?;
            for &t in &times {
                let dist = two_time_distribution(&spec, &q, t)?;
                let snap = engine.at(t);
                for k in -16..=16 {
                    let theta = k as f64 * PI / 8.0;
                    let det = snap.generating_function(theta)?;
                    worst = worst.max((det - dist.generating_function(theta)).norm());
                    compared += 1;
                }
            }
            Ok(())
        })();
        if let Err(e) = result {
            return Outcome { checks: vec![Check::failed("Z_t", e)] };
        }
    }
    Outcome {
        checks: vec![Check::new(
            "Z_t",
            worst < tol::FOCK_VS_DETERMINANT,
            format!("n=8, {compared} (reservoirs, t, theta) points, max |dZ| = {worst:.2e}"),
        )],
    }
}

pub const FCS_CHARGE: &str = r#"schema_version = 1
kind = "fcs"
[grid]
t_l = [0.05]
t_r = [0.025]
mu_l = [0.05]
mu_r = [-0.05]
n_sites = [1200]
quantities = ["charge"]
cumulant_order = 4
times = [160.0, 180.0, 200.0, 220.0, 240.0]
"#;

pub const LANDAUER_ENERGY: &str = r#"schema_version = 1
kind = "landauer"
[grid]
t_l = [0.02]
t_r = [0.01]
quantities = ["energy"]
cumulant_order = 4
"#;

fn fcs_pipeline() -> Outcome {
    let mut checks = vec![];
    match run_embedded(ExperimentKind::Fcs, FCS_CHARGE) {
        Ok(records) => checks.push(rows_check("determinant vs landauer (charge)", &records, |q| q.starts_with("charge_cumulant_rate_"))),
        Err(e) => checks.push(Check::failed("determinant vs landauer (charge)", e)),
    }
    match run_embedded(ExperimentKind::Landauer, LANDAUER_ENERGY) {
        Ok(records) => checks.push(rows_check("landauer vs cft (energy)", &records, |q| q.starts_with("energy_cumulant_rate_"))),
        Err(e) => checks.push(Check::failed("landauer vs cft (energy)", e)),
    }
    Outcome { checks }
}

fn factorization() -> Outcome {
    let result = (|| -> ness_lattice::Result<Vec<(f64, [f64; 3])>> {
        let spec = ChainSpec::new(1200, 1.0, Reservoirs::from_temperatures(0.05, 0.025, 0.0, 0.0))?;
        let ev = Evolution::partitioned(&spec)?;
        let c = spec.junction_bond();
        [200.0, 250.0, 300.0]
            .iter()
            .map(|&t| {
                let mut r = [0.0; 3];
                for (k, half) in [10, 20, 40].into_iter().enumerate() {
                    r[k] = chiral_decorrelation(&ev, &spec, t, c - half, c + half)?;
                }
                Ok((t, r))
            })
            .collect()
    })();
    let rows = match result {
        Ok(rows) => rows,
        Err(e) => return Outcome { checks: vec![Check::failed("decorrelation", e)] },
    };
    let describe = |rows: &[(f64, [f64; 3])]| {
        rows.iter()
            .map(|(t, r)| format!("t={t}: {:.1e}/{:.1e}/{:.1e}", r[0], r[1], r[2]))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let small = rows.iter().all(|(_, r)| r[1] < tol::DECORRELATION);
    let decreasing = rows.iter().all(|(_, r)| r[0] > r[1] && r[1] > r[2]);
    Outcome {
        checks: vec![
            Check::new("ratio at separation 40", small, describe(&rows)),
            Check::new("decreasing over separations 20/40/80", decreasing, ""),
        ],
    }
}

fn light_cone() -> Outcome {
    let r = Reservoirs::from_temperatures(0.05, 0.025, 0.05, -0.05);
    let result = (|| -> ness_lattice::Result<(Vec<ness_lattice::front::FrontReport>, f64, f64)> {
        let spec = ChainSpec::new(1200, 1.0, r)?;
        let ev = Evolution::partitioned(&spec)?;
        let mut probes = vec![];
        for d in [50, 100, 150, 200] {
            probes.push((d, ProbeSide::Left));
            probes.push((d, ProbeSide::Right));
        }
        let reports = front_scan(&ev, &spec, FrontQuantity::Charge, &probes, 0.5)?;
        let steady = landauer::steady_currents(&BandSpec::of_chain(&spec), &r)?.charge;
        Ok((reports, steady, spec.fermi_velocity()))
    })();
    let (reports, steady, v) = match result {
        Ok(x) => x,
        Err(e) => return Outcome { checks: vec![Check::failed("fronts", e)] },
    };
    let worst_arrival = reports.iter().map(|f| (f.arrival_ratio(v) - 1.0).abs()).fold(0.0, f64::max);
    let worst_pre = reports.iter().map(|f| f.pre_front_residual).fold(0.0, f64::max);
    let worst_drift = reports.iter().map(|f| f.drift).fold(0.0, f64::max);
    let worst_plateau = reports.iter().map(|f| ((f.plateau - steady) / steady).abs()).fold(0.0, f64::max);
    Outcome {
        checks: vec![
            Check::new("arrival", worst_arrival < tol::FRONT_ARRIVAL, format!("8 probes at 50-200 sites, max |t v/d - 1| = {worst_arrival:.3}")),
            Check::new("pre-front", worst_pre < tol::PRE_FRONT, format!("max {worst_pre:.2e} of steady")),
            Check::new("plateau drift", worst_drift < tol::PLATEAU_DRIFT, format!("max {worst_drift:.2e}, plateau within {worst_plateau:.1e} of landauer")),
        ],
    }
}

pub const CHARACTERS: &str = r#"schema_version = 1
kind = "characters"
[grid]
beta = [1.0]
mu = [0.0, 0.3]
level_k = [1, 2, 3]
r_over_beta = [10.0, 20.0, 40.0, 80.0]
tau_imag = [0.8, 0.9, 1.0, 1.1, 1.2]
"#;

fn characters_leg() -> Outcome {
    let records = match run_embedded(ExperimentKind::Characters, CHARACTERS) {
        Ok(r) => r,
        Err(e) => return Outcome { checks: vec![Check::failed("characters", e)] },
    };
    let at = |mu: f64| format!("beta=1;mu={mu};level_k=1");
    let one = |label: &str, quantity: &str, params: String| {
        match records.iter().find(|r| r.quantity == quantity && r.parameters == params) {
            Some(r) => Check::new(
                label,
                r.status == Status::Pass,
                format!("{:.8} vs {:.8} at {}, rel {:.1e}", r.value, r.reference_value, r.note, r.rel_error),
            ),
            None => Check::new(label, false, "missing row"),
        }
    };
    Outcome {
        checks: vec![
            rows_check("modular covariance", &records, |q| q == "modular_residual"),
            one("charge pi mu", "charge_one_point", at(0.3)),
            one("energy pi/12", "energy_one_point", at(0.0)),
        ],
    }
}

fn two_time_gap() -> Outcome {
    let lambda = 0.3;
    let gap = |beta_l: f64, beta_r: f64| -> ness_core::Result<(f64, Dominant)> {
        let tp = ThermoPoint::new(beta_l, beta_r, 0.0, 0.0, 1.0)?;
        let alt = ldf::alt_two_time_f(lambda, &tp)?;
        let full = ldf::full_f(CountingPoint::real(lambda, 0.0), &tp)?;
        Ok(((C64::new(alt.value, 0.0) - full).norm(), alt.dominant))
    };
    let mut checks = vec![];
    checks.push(match gap(1.0, 2.0) {
        Ok((g, d)) => Check::new("beta=(1, 2) differs", g > tol::ALT_TWO_TIME_GAP, format!("|alt - F| = {g:.4e}, dominant {d:?}")),
        Err(e) => Check::failed("beta=(1, 2) differs", e),
    });
    checks.push(match gap(1.5, 1.5) {
        Ok((g, _)) => Check::new("equal betas coincide", g < tol::ALT_TWO_TIME_TIE, format!("|alt - F| = {g:.1e}")),
        Err(e) => Check::failed("equal betas coincide", e),
    });
    Outcome { checks }
}

/// Text printed by `ness --list-criteria`.
pub fn listing() -> String {
    let mut out = String::new();
    for c in all() {
        out.push_str(&format!("{:>2}  {:<32} {:<16} {}\n", c.id, c.name, c.route, c.budget));
    }
    out.push_str("\nEmbedded configs (run with `ness <kind> --config <file> --out <dir>`):\n");
    for c in all() {
        if let Some(cfg) = c.config {
            out.push_str(&format!("\n# criterion {}\n{cfg}", c.id));
            if c.id == 7 {
                out.push_str(&format!("\n# criterion 7, second leg\n{LANDAUER_ENERGY}"));
            }
        }
    }
    out
}
