//! Orchestration of one run. The config is validated and the output
//! directory proven writable before any computation; grid points are then
//! evaluated on a pool of `workers` threads and collected in grid order.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ExperimentKind, ResolvedGrid};
use crate::emit;
use crate::error::{HarnessError, Result};
use crate::experiments::{self, Point};
use crate::report::{standard_verdicts, Provenance, Record, RunReport};
use crate::tolerances::{Profile, Tolerances};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub kind: ExperimentKind,
    pub config: PathBuf,
    pub out: PathBuf,
    pub workers: usize,
    pub profile: Profile,
}

/// A validated config ready to run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub kind: ExperimentKind,
    pub grid: ResolvedGrid,
    pub points: Vec<Point>,
    pub tolerances: Tolerances,
    pub config_sha256: String,
}

pub fn prepare(kind: ExperimentKind, config: &Path, profile: Profile) -> Result<Prepared> {
    let (cfg, bytes) = ExperimentConfig::load(config)?;
    let grid = cfg.resolve(kind)?;
    Ok(Prepared {
        kind,
        points: experiments::expand(kind, &grid),
        tolerances: Tolerances::resolve(&cfg.tolerances, profile),
        grid,
        config_sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Evaluates `points` in parallel; the records come back in grid order
/// whatever the scheduling.
pub fn evaluate(
    kind: ExperimentKind,
    grid: &ResolvedGrid,
    points: &[Point],
    tolerances: &Tolerances,
    workers: usize,
) -> Result<Vec<Record>> {
    // dense kernels run single-threaded so that reductions have a fixed order
    faer::set_global_parallelism(faer::Par::Seq);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let per_point: Vec<Vec<Record>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(k, p)| experiments::run_point(kind, k, p, grid, tolerances))
            .collect()
    });
    let mut records: Vec<Record> = per_point.into_iter().flatten().collect();
    if kind == ExperimentKind::Compare {
        let extra = experiments::shrink_factor_rows(points, &records, tolerances);
        records.extend(extra);
    }
    Ok(records)
}

/// Assembles the report for already prepared points.
pub fn report(prepared: &Prepared, workers: usize, profile: Profile) -> Result<RunReport> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let records = evaluate(
        prepared.kind,
        &prepared.grid,
        &prepared.points,
        &prepared.tolerances,
        workers,
    )?;
    let verdicts = standard_verdicts(&records);
    Ok(RunReport {
        kind: prepared.kind,
        records,
        verdicts,
        provenance: Provenance {
            config_sha256: prepared.config_sha256.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            tolerance_profile: profile.name().to_string(),
            workers,
            started_unix_seconds: started,
            wall_clock_seconds: clock.elapsed().as_secs_f64(),
        },
    })
}

/// Validates, computes and writes `records.csv`, `records.jsonl` and
/// `summary.json` into the output directory.
pub fn execute(opts: &RunOptions) -> Result<RunReport> {
    let prepared = prepare(opts.kind, &opts.config, opts.profile)?;
    emit::ensure_writable(&opts.out)?;
    let report = report(&prepared, opts.workers, opts.profile)?;
    emit::emit_all(&report, &opts.out)?;
    Ok(report)
}
