//! Acceptance tolerances and their per-run overrides.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const FLUCTUATION_RELATION: f64 = 1e-12;
pub const DERIVATIVE_IDENTITY: f64 = 1e-6;
pub const CUMULANT_COEFFICIENT: f64 = 1e-10;
pub const C_STAR: f64 = 1e-12;
pub const LATTICE_VS_LANDAUER: f64 = 0.01;
pub const LATTICE_VS_CFT: f64 = 0.05;
pub const T_SQUARED_FACTOR: (f64, f64) = (2.5, 6.0);
pub const STEADY_STATIONARITY: f64 = 0.01;
pub const FOCK_VS_DETERMINANT: f64 = 1e-9;
pub const FCS_RATE: f64 = 0.02;
pub const LANDAUER_VS_CFT: f64 = 0.02;
pub const LANDAUER_DERIVATIVE: f64 = 1e-8;
pub const LANDAUER_FLUCTUATION_RELATION: f64 = 1e-8;
pub const DECORRELATION: f64 = 0.05;
pub const FRONT_ARRIVAL: f64 = 0.10;
pub const PRE_FRONT: f64 = 0.05;
pub const PLATEAU_DRIFT: f64 = 0.02;
pub const MODULAR_RESIDUAL: f64 = 1e-8;
pub const ONE_POINT: f64 = 0.02;
pub const ALT_TWO_TIME_GAP: f64 = 1e-6;
pub const ALT_TWO_TIME_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Acceptance values; config overrides are ignored.
    Strict,
    /// Acceptance values with config overrides applied.
    Default,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Strict => "strict",
            Profile::Default => "default",
        }
    }
}

/// Optional overrides as written in a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub fluctuation_relation: Option<f64>,
    pub cumulant_coefficient: Option<f64>,
    pub c_star: Option<f64>,
    pub lattice_vs_landauer: Option<f64>,
    pub lattice_vs_cft: Option<f64>,
    pub t_squared_factor_min: Option<f64>,
    pub t_squared_factor_max: Option<f64>,
    pub steady_stationarity: Option<f64>,
    pub fcs_rate: Option<f64>,
    pub landauer_vs_cft: Option<f64>,
    pub landauer_derivative: Option<f64>,
    pub landauer_fluctuation_relation: Option<f64>,
    pub modular_residual: Option<f64>,
    pub one_point: Option<f64>,
}

/// Tolerances in force for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub fluctuation_relation: f64,
    pub cumulant_coefficient: f64,
    pub c_star: f64,
    pub lattice_vs_landauer: f64,
    pub lattice_vs_cft: f64,
    pub t_squared_factor_min: f64,
    pub t_squared_factor_max: f64,
    pub steady_stationarity: f64,
    pub fcs_rate: f64,
    pub landauer_vs_cft: f64,
    pub landauer_derivative: f64,
    pub landauer_fluctuation_relation: f64,
    pub modular_residual: f64,
    pub one_point: f64,
}

impl Tolerances {
    pub fn acceptance() -> Self {
        Tolerances {
            fluctuation_relation: FLUCTUATION_RELATION,
            cumulant_coefficient: CUMULANT_COEFFICIENT,
            c_star: C_STAR,
            lattice_vs_landauer: LATTICE_VS_LANDAUER,
            lattice_vs_cft: LATTICE_VS_CFT,
            t_squared_factor_min: T_SQUARED_FACTOR.0,
            t_squared_factor_max: T_SQUARED_FACTOR.1,
            steady_stationarity: STEADY_STATIONARITY,
            fcs_rate: FCS_RATE,
            landauer_vs_cft: LANDAUER_VS_CFT,
            landauer_derivative: LANDAUER_DERIVATIVE,
            landauer_fluctuation_relation: LANDAUER_FLUCTUATION_RELATION,
            modular_residual: MODULAR_RESIDUAL,
            one_point: ONE_POINT,
        }
    }

    pub fn resolve(overrides: &Overrides, profile: Profile) -> Self {
        let mut t = Self::acceptance();
        if profile == Profile::Strict {
            return t;
        }
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = overrides.$field { t.$field = v; })*
            };
        }
        apply!(
            fluctuation_relation,
            cumulant_coefficient,
            c_star,
            lattice_vs_landauer,
            lattice_vs_cft,
            t_squared_factor_min,
            t_squared_factor_max,
            steady_stationarity,
            fcs_rate,
            landauer_vs_cft,
            landauer_derivative,
            landauer_fluctuation_relation,
            modular_residual,
            one_point
        );
        t
    }
}

impl Overrides {
    pub fn validate(&self) -> Result<()> {
        let entries = [
            ("fluctuation_relation", self.fluctuation_relation),
            ("cumulant_coefficient", self.cumulant_coefficient),
            ("c_star", self.c_star),
            ("lattice_vs_landauer", self.lattice_vs_landauer),
            ("lattice_vs_cft", self.lattice_vs_cft),
            ("t_squared_factor_min", self.t_squared_factor_min),
            ("t_squared_factor_max", self.t_squared_factor_max),
            ("steady_stationarity", self.steady_stationarity),
            ("fcs_rate", self.fcs_rate),
            ("landauer_vs_cft", self.landauer_vs_cft),
            ("landauer_derivative", self.landauer_derivative),
            ("landauer_fluctuation_relation", self.landauer_fluctuation_relation),
            ("modular_residual", self.modular_residual),
            ("one_point", self.one_point),
        ];
        for (name, value) in entries {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(HarnessError::InvalidTolerance {
                        name: name.to_string(),
                        value: v,
                    });
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.t_squared_factor_min, self.t_squared_factor_max) {
            if lo > hi {
                return Err(HarnessError::InvalidTolerance {
                    name: "t_squared_factor_min".into(),
                    value: lo,
                });
            }
        }
        Ok(())
    }
}
