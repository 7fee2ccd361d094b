//! Long-format records, verdicts and run provenance.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentKind;

/// How a record's error is judged against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// `|value - reference|`.
    Abs,
    /// `|value - reference| / |reference|`.
    Rel,
    /// `|value - reference| / scale` with a scale named in the note.
    Scaled,
    /// No comparison.
    None,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Abs => "abs",
            Metric::Rel => "rel",
            Metric::Scaled => "scaled",
            Metric::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The point could not be computed.
    Error,
    /// Informational value without a reference.
    Info,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
            Status::Info => "info",
        }
    }
}

/// Non-finite floats are written as the strings `NaN`, `inf`, `-inf`, so that
/// every value survives a JSON round trip bit for bit.
mod float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(super::format_nonfinite(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

fn format_nonfinite(v: f64) -> &'static str {
    if v.is_nan() {
        "NaN"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// Number formatting used in the CSV: 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format_nonfinite(v).to_string()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub point: usize,
    pub parameters: String,
    pub quantity: String,
    pub source: String,
    #[serde(with = "float")]
    pub value: f64,
    pub reference_source: String,
    #[serde(with = "float")]
    pub reference_value: f64,
    #[serde(with = "float")]
    pub abs_error: f64,
    #[serde(with = "float")]
    pub rel_error: f64,
    pub metric: Metric,
    #[serde(with = "float")]
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "experiment",
    "point",
    "parameters",
    "quantity",
    "source",
    "value",
    "reference_source",
    "reference_value",
    "abs_error",
    "rel_error",
    "metric",
    "tolerance",
    "status",
    "note",
];

impl Record {
    pub fn csv_fields(&self) -> [String; 14] {
        [
            self.experiment.clone(),
            self.point.to_string(),
            self.parameters.clone(),
            self.quantity.clone(),
            self.source.clone(),
            format_number(self.value),
            self.reference_source.clone(),
            format_number(self.reference_value),
            format_number(self.abs_error),
            format_number(self.rel_error),
            self.metric.name().to_string(),
            format_number(self.tolerance),
            self.status.name().to_string(),
            self.note.clone(),
        ]
    }

    /// Equality that compares floats by bit pattern.
    pub fn bit_eq(&self, other: &Record) -> bool {
        let floats = |r: &Record| {
            [r.value, r.reference_value, r.abs_error, r.rel_error, r.tolerance].map(f64::to_bits)
        };
        self.experiment == other.experiment
            && self.point == other.point
            && self.parameters == other.parameters
            && self.quantity == other.quantity
            && self.source == other.source
            && self.reference_source == other.reference_source
            && self.metric == other.metric
            && self.status == other.status
            && self.note == other.note
            && floats(self) == floats(other)
    }
}

/// Per-point context shared by the records of one grid point.
#[derive(Debug, Clone)]
pub struct PointContext {
    pub experiment: ExperimentKind,
    pub point: usize,
    pub parameters: String,
}

impl PointContext {
    fn base(&self, quantity: &str, source: &str) -> Record {
        Record {
            experiment: self.experiment.name().to_string(),
            point: self.point,
            parameters: self.parameters.clone(),
            quantity: quantity.to_string(),
            source: source.to_string(),
            value: f64::NAN,
            reference_source: String::new(),
            reference_value: f64::NAN,
            abs_error: f64::NAN,
            rel_error: f64::NAN,
            metric: Metric::None,
            tolerance: f64::NAN,
            status: Status::Info,
            note: String::new(),
        }
    }

    pub fn info(&self, quantity: &str, source: &str, value: f64) -> Record {
        Record {
            value,
            ..self.base(quantity, source)
        }
    }

    pub fn error(&self, quantity: &str, message: impl Into<String>) -> Record {
        Record {
            status: Status::Error,
            note: message.into(),
            ..self.base(quantity, "")
        }
    }

    /// Compares `value` to `reference`. With [`Metric::Scaled`] the error is
    /// divided by `scale`; otherwise `scale` is ignored.
    #[allow(clippy::too_many_arguments)]
    pub fn compare(
        &self,
        quantity: &str,
        (source, value): (&str, f64),
        (reference_source, reference): (&str, f64),
        metric: Metric,
        scale: f64,
        tolerance: f64,
    ) -> Record {
        let abs_error = (value - reference).abs();
        let rel_error = match metric {
            Metric::Scaled => abs_error / scale.abs(),
            _ if abs_error == 0.0 => 0.0,
            _ => abs_error / reference.abs(),
        };
        let measured = match metric {
            Metric::Abs => abs_error,
            Metric::Rel | Metric::Scaled => rel_error,
            Metric::None => f64::NAN,
        };
        let status = if metric == Metric::None {
            Status::Info
        } else if measured <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        let note = if metric == Metric::Scaled {
            format!("scale {}", format_number(scale))
        } else {
            String::new()
        };
        Record {
            value,
            reference_source: reference_source.to_string(),
            reference_value: reference,
            abs_error,
            rel_error,
            metric,
            tolerance,
            status,
            note,
            ..self.base(quantity, source)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub version: String,
    pub tolerance_profile: String,
    pub workers: usize,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: ExperimentKind,
    pub records: Vec<Record>,
    pub verdicts: Vec<Verdict>,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// One verdict per compared quantity (all its rows must pass), plus one that
/// fails when any grid point errored.
pub fn standard_verdicts(records: &[Record]) -> Vec<Verdict> {
    let mut names: Vec<&str> = vec![];
    for r in records {
        if matches!(r.status, Status::Pass | Status::Fail) && !names.contains(&r.quantity.as_str()) {
            names.push(&r.quantity);
        }
    }
    let mut out: Vec<Verdict> = names
        .iter()
        .map(|name| {
            let rows: Vec<&Record> = records
                .iter()
                .filter(|r| r.quantity == *name && matches!(r.status, Status::Pass | Status::Fail))
                .collect();
            let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
            Verdict {
                name: name.to_string(),
                passed: failed == 0,
                detail: format!("{} of {} comparisons pass", rows.len() - failed, rows.len()),
            }
        })
        .collect();
    let errors = records.iter().filter(|r| r.status == Status::Error).count();
    out.push(Verdict {
        name: "point_errors".into(),
        passed: errors == 0,
        detail: format!("{errors} grid points failed to compute"),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PointContext {
        PointContext {
            experiment: ExperimentKind::Predict,
            point: 0,
            parameters: "t_l=1".into(),
        }
    }

    #[test]
    fn comparisons_judge_by_metric() {
        let r = ctx().compare("x", ("a", 1.01), ("b", 1.0), Metric::Rel, 0.0, 0.02);
        assert_eq!(r.status, Status::Pass);
        let r = ctx().compare("x", ("a", 1.03), ("b", 1.0), Metric::Rel, 0.0, 0.02);
        assert_eq!(r.status, Status::Fail);
        let r = ctx().compare("x", ("a", 1e-3), ("b", 0.0), Metric::Scaled, 1.0, 0.02);
        assert_eq!(r.status, Status::Pass);
        let r = ctx().compare("x", ("a", f64::NAN), ("b", 0.0), Metric::Abs, 0.0, 1.0);
        assert_eq!(r.status, Status::Fail);
        let r = ctx().compare("x", ("a", 0.0), ("b", 0.0), Metric::Rel, 0.0, 1e-3);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn numbers_have_seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(f64::NAN), "NaN");
        let back: f64 = format_number(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back.to_bits(), std::f64::consts::PI.to_bits());
    }

    #[test]
    fn verdicts_cover_quantities_and_errors() {
        let c = ctx();
        let records = vec![
            c.compare("a", ("s", 1.0), ("r", 1.0), Metric::Abs, 0.0, 1e-9),
            c.compare("b", ("s", 2.0), ("r", 1.0), Metric::Abs, 0.0, 1e-9),
            c.info("c", "s", 3.0),
            c.error("d", "boom"),
        ];
        let v = standard_verdicts(&records);
        assert_eq!(v.len(), 3);
        assert!(v[0].passed);
        assert!(!v[1].passed);
        assert!(!v[2].passed);
    }
}
