//! Writers for the long-format CSV, the json-lines records and the run
//! summary, and a reader for the json-lines files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::report::{Record, RunReport, Verdict, Provenance, CSV_COLUMNS};

pub const CSV_FILE: &str = "records.csv";
pub const JSONL_FILE: &str = "records.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";

fn write_error(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    HarnessError::Write {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}

pub fn write_csv(records: &[Record], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(write_error(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(CSV_COLUMNS).map_err(|e| csv_error(path, e))?;
    for r in records {
        w.write_record(r.csv_fields()).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(write_error(path))
}

pub fn write_jsonl(records: &[Record], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(write_error(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| write_error(path)(e.into()))?;
        writeln!(w, "{line}").map_err(write_error(path))?;
    }
    w.flush().map_err(write_error(path))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Record>> {
    let file = File::open(path).map_err(|source| HarnessError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = vec![];
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| HarnessError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| HarnessError::Record {
            path: path.to_path_buf(),
            line: k + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Summary<'a> {
    kind: &'a str,
    passed: bool,
    verdicts: &'a [Verdict],
    provenance: &'a Provenance,
}

pub fn write_summary(report: &RunReport, path: &Path) -> Result<()> {
    let summary = Summary {
        kind: report.kind.name(),
        passed: report.passed(),
        verdicts: &report.verdicts,
        provenance: &report.provenance,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| write_error(path)(e.into()))?;
    std::fs::write(path, text + "\n").map_err(write_error(path))
}

/// Creates `dir` if needed and proves it writable with a probe file.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    let fail = |source| HarnessError::OutputNotWritable {
        path: dir.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(".ness-write-probe");
    std::fs::write(&probe, b"").map_err(fail)?;
    std::fs::remove_file(&probe).map_err(fail)
}

/// Writes the CSV, the json-lines records and the summary into `dir`.
pub fn emit_all(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let paths = [dir.join(CSV_FILE), dir.join(JSONL_FILE), dir.join(SUMMARY_FILE)];
    write_csv(&report.records, &paths[0])?;
    write_jsonl(&report.records, &paths[1])?;
    write_summary(report, &paths[2])?;
    Ok(paths.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;
    use crate::report::{Metric, PointContext};

    fn sample() -> Vec<Record> {
        let c = PointContext {
            experiment: ExperimentKind::Landauer,
            point: 3,
            parameters: "t_l=0.05;t_r=0.025, \"quoted\"".into(),
        };
        vec![
            c.compare("energy_cumulant_1", ("landauer", 0.1 + 0.2), ("cft", 0.3), Metric::Rel, 0.0, 0.02),
            c.info("stationarity", "lattice", f64::NAN),
            c.error("charge_cumulant_3", "branch cut at k=1.2"),
            c.info("tiny", "lattice", 5e-324),
            c.info("huge", "lattice", -f64::INFINITY),
        ]
    }

    #[test]
    fn jsonl_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let records = sample();
        write_jsonl(&records, &path).unwrap();
        let back = read_jsonl(&path).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert!(a.bit_eq(b), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn empty_sweep_gives_header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv(&[], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, CSV_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn csv_is_long_format_and_parses_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let records = sample();
        write_csv(&records, &path).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(headers, CSV_COLUMNS);
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), records.len());
        for (row, rec) in rows.iter().zip(&records) {
            assert_eq!(row.len(), CSV_COLUMNS.len());
            assert_eq!(&row[2], rec.parameters);
            let v: f64 = row[5].parse().unwrap();
            assert!(v.to_bits() == rec.value.to_bits() || (v.is_nan() && rec.value.is_nan()));
        }
        assert_eq!(&rows[0][5], "3.0000000000000004e-1");
    }

    #[test]
    fn unwritable_output_is_reported_with_its_path() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        std::fs::write(&file, b"x").unwrap();
        let err = ensure_writable(&file.join("sub")).unwrap_err();
        assert!(err.to_string().contains("plain-file"), "{err}");
    }
}
