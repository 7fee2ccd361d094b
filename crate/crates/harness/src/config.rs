//! Experiment configuration files (TOML).
//!
//! ```toml
//! schema_version = 1
//! kind = "simulate"          # optional; must match the subcommand when given
//! seed = 0                   # reserved, every computation is deterministic
//!
//! [grid]
//! t_l = [0.05, 0.025]
//! t_r = [0.025, 0.0125]
//! mu_l = [0.0]
//! mu_r = [0.0]
//! n_sites = [1200]
//!
//! [tolerances]               # optional overrides, used with --tolerance-profile default
//! lattice_vs_cft = 0.05
//! ```
//!
//! Grid fields left out take the defaults listed on [`Grid`]; a field that is
//! present must be nonempty.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::tolerances::Overrides;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Predict,
    Simulate,
    Fcs,
    Landauer,
    Characters,
    Compare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Predict,
        ExperimentKind::Simulate,
        ExperimentKind::Fcs,
        ExperimentKind::Landauer,
        ExperimentKind::Characters,
        ExperimentKind::Compare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Predict => "predict",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Fcs => "fcs",
            ExperimentKind::Landauer => "landauer",
            ExperimentKind::Characters => "characters",
            ExperimentKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Charge,
    Energy,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Charge => "charge",
            Quantity::Energy => "energy",
        }
    }
}

/// Parameter grid. Thermodynamic fields combine as a Cartesian product, except
/// for `compare`, where `t_l` and `t_r` are paired entry by entry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// Reservoir temperatures; required by every kind except `characters`.
    pub t_l: Option<Vec<f64>>,
    pub t_r: Option<Vec<f64>>,
    /// Default `[0.0]`.
    pub mu_l: Option<Vec<f64>>,
    pub mu_r: Option<Vec<f64>>,
    /// Central charge for the closed forms, default `[1.0]`.
    pub c: Option<Vec<f64>>,
    /// Chain sizes for the lattice kinds, default `[1200]`.
    pub n_sites: Option<Vec<usize>>,
    /// Default `[1.0]`.
    pub hopping: Option<Vec<f64>>,
    /// Averaging window for `simulate`/`compare`, default `[n/8, n/4]`.
    pub window: Option<[f64; 2]>,
    /// Samples in the averaging window, default 151.
    pub samples: Option<usize>,
    /// Time grid for `fcs`, default five points evenly spaced in `[2n/15, n/5]`.
    pub times: Option<Vec<f64>>,
    /// Counted quantities for `fcs` and `landauer`, default both.
    pub quantities: Option<Vec<Quantity>>,
    /// Highest cumulant order, 1 through 4, default 4.
    pub cumulant_order: Option<usize>,
    /// Real counting fields for fluctuation-relation checks, default `[0.3, -0.7, 1.1]`.
    pub counting_fields: Option<Vec<f64>>,
    /// `characters`: inverse temperatures, default `[1.0]`.
    pub beta: Option<Vec<f64>>,
    /// `characters`: chemical potentials, default `[0.0, 0.3]`.
    pub mu: Option<Vec<f64>>,
    /// `characters`: level of the compact boson, default `[1]`.
    pub level_k: Option<Vec<i64>>,
    /// `characters`: ratios `R / beta`, default `[10, 20, 40, 80]`.
    pub r_over_beta: Option<Vec<f64>>,
    /// `characters`: imaginary parts of the modular parameter, default `[0.8, 0.9, 1.0, 1.1, 1.2]`.
    pub tau_imag: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: Option<ExperimentKind>,
    #[serde(default)]
    pub seed: u64,
    pub grid: Grid,
    #[serde(default)]
    pub tolerances: Overrides,
}

fn nonempty<T: Clone>(field: &'static str, v: &Option<Vec<T>>, default: &[T]) -> Result<Vec<T>> {
    match v {
        Some(v) if v.is_empty() => Err(HarnessError::EmptyGrid { field }),
        Some(v) => Ok(v.clone()),
        None => Ok(default.to_vec()),
    }
}

fn required<T: Clone>(field: &'static str, v: &Option<Vec<T>>) -> Result<Vec<T>> {
    match v {
        Some(v) if v.is_empty() => Err(HarnessError::EmptyGrid { field }),
        Some(v) => Ok(v.clone()),
        None => Err(HarnessError::InvalidGrid {
            field,
            reason: "required for this experiment kind".into(),
        }),
    }
}

/// Grid with defaults filled in and every list checked nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedGrid {
    pub t_l: Vec<f64>,
    pub t_r: Vec<f64>,
    pub mu_l: Vec<f64>,
    pub mu_r: Vec<f64>,
    pub c: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub hopping: Vec<f64>,
    pub window: Option<(f64, f64)>,
    pub samples: usize,
    pub times: Option<Vec<f64>>,
    pub quantities: Vec<Quantity>,
    pub cumulant_order: usize,
    pub counting_fields: Vec<f64>,
    pub beta: Vec<f64>,
    pub mu: Vec<f64>,
    pub level_k: Vec<i64>,
    pub r_over_beta: Vec<f64>,
    pub tau_imag: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::ParseConfig {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|source| HarnessError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| HarnessError::ParseConfig {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok((Self::from_toml(&text, path)?, bytes))
    }

    /// Checks the schema, the kind and the grid, and fills in defaults.
    pub fn resolve(&self, kind: ExperimentKind) -> Result<ResolvedGrid> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::SchemaVersion {
                found: self.schema_version,
                supported: SCHEMA_VERSION,
            });
        }
        if let Some(declared) = self.kind {
            if declared != kind {
                return Err(HarnessError::KindMismatch {
                    declared: declared.name().into(),
                    requested: kind.name().into(),
                });
            }
        }
        self.tolerances.validate()?;
        let g = &self.grid;
        let (t_l, t_r) = if kind == ExperimentKind::Characters {
            (nonempty("t_l", &g.t_l, &[])?, nonempty("t_r", &g.t_r, &[])?)
        } else {
            (required("t_l", &g.t_l)?, required("t_r", &g.t_r)?)
        };
        if kind == ExperimentKind::Compare && t_l.len() != t_r.len() {
            return Err(HarnessError::InvalidGrid {
                field: "t_r",
                reason: format!("compare pairs t_l and t_r; lengths {} and {}", t_l.len(), t_r.len()),
            });
        }
        for (field, list) in [("t_l", &t_l), ("t_r", &t_r)] {
            if list.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return Err(HarnessError::InvalidGrid {
                    field,
                    reason: "temperatures must be finite and nonnegative".into(),
                });
            }
        }
        let n_sites = nonempty("n_sites", &g.n_sites, &[1200])?;
        let window = g.window.map(|w| (w[0], w[1]));
        if let Some((a, b)) = window {
            if !(a < b && a >= 0.0) {
                return Err(HarnessError::InvalidGrid {
                    field: "window",
                    reason: format!("need 0 <= start < end, got [{a}, {b}]"),
                });
            }
        }
        let samples = g.samples.unwrap_or(151);
        if samples < 2 {
            return Err(HarnessError::InvalidGrid {
                field: "samples",
                reason: "at least two samples are needed".into(),
            });
        }
        let times = match &g.times {
            Some(t) if t.len() < 2 => {
                return Err(if t.is_empty() {
                    HarnessError::EmptyGrid { field: "times" }
                } else {
                    HarnessError::InvalidGrid {
                        field: "times",
                        reason: "a rate fit needs at least two times".into(),
                    }
                })
            }
            other => other.clone(),
        };
        let cumulant_order = g.cumulant_order.unwrap_or(4);
        if !(1..=4).contains(&cumulant_order) {
            return Err(HarnessError::InvalidGrid {
                field: "cumulant_order",
                reason: format!("must be 1..=4, got {cumulant_order}"),
            });
        }
        Ok(ResolvedGrid {
            t_l,
            t_r,
            mu_l: nonempty("mu_l", &g.mu_l, &[0.0])?,
            mu_r: nonempty("mu_r", &g.mu_r, &[0.0])?,
            c: nonempty("c", &g.c, &[1.0])?,
            n_sites,
            hopping: nonempty("hopping", &g.hopping, &[1.0])?,
            window,
            samples,
            times,
            quantities: nonempty("quantities", &g.quantities, &[Quantity::Charge, Quantity::Energy])?,
            cumulant_order,
            counting_fields: nonempty("counting_fields", &g.counting_fields, &[0.3, -0.7, 1.1])?,
            beta: nonempty("beta", &g.beta, &[1.0])?,
            mu: nonempty("mu", &g.mu, &[0.0, 0.3])?,
            level_k: nonempty("level_k", &g.level_k, &[1])?,
            r_over_beta: nonempty("r_over_beta", &g.r_over_beta, &[10.0, 20.0, 40.0, 80.0])?,
            tau_imag: nonempty("tau_imag", &g.tau_imag, &[0.8, 0.9, 1.0, 1.1, 1.2])?,
        })
    }
}
