//! Command-line front end of `ness`.
//!
//! Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 for
//! usage and config errors, 3 for I/O failures.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::ExperimentKind;
use crate::criteria;
use crate::emit;
use crate::run::{self, RunOptions};
use crate::tolerances::Profile;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ness", version, about = "Sweeps over the conformal, lattice and band-integral transport legs")]
struct Cli {
    /// Print the acceptance criteria and the experiments they run, then exit.
    #[arg(long)]
    list_criteria: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form currents, cumulants, fluctuation relation and c* rows.
    Predict(RunArgs),
    /// Lattice steady currents against the band integrals and the closed forms.
    Simulate(RunArgs),
    /// Determinant cumulant rates against the band integrals.
    Fcs(RunArgs),
    /// Band-integral cumulants against the closed forms.
    Landauer(RunArgs),
    /// Modular covariance and finite-size one-point functions.
    Characters(RunArgs),
    /// Lattice energy current against the closed form, with T^2 scaling.
    Compare(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Strict,
    Default,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "1")]
    workers: NonZeroUsize,
    #[arg(long, value_enum, default_value = "default")]
    tolerance_profile: ProfileArg,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Predict(a) => (ExperimentKind::Predict, a),
            Command::Simulate(a) => (ExperimentKind::Simulate, a),
            Command::Fcs(a) => (ExperimentKind::Fcs, a),
            Command::Landauer(a) => (ExperimentKind::Landauer, a),
            Command::Characters(a) => (ExperimentKind::Characters, a),
            Command::Compare(a) => (ExperimentKind::Compare, a),
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    if parsed.list_criteria {
        let _ = write!(out, "{}", criteria::listing());
        return EXIT_PASS;
    }
    let Some(command) = parsed.command else {
        let _ = writeln!(err, "error: a subcommand or --list-criteria is required (see --help)");
        return EXIT_CONFIG;
    };
    let (kind, a) = command.split();
    let opts = RunOptions {
        kind,
        config: a.config,
        out: a.out,
        workers: a.workers.get(),
        profile: match a.tolerance_profile {
            ProfileArg::Strict => Profile::Strict,
            ProfileArg::Default => Profile::Default,
        },
    };
    match run::execute(&opts) {
        Ok(report) => {
            for v in &report.verdicts {
                let _ = writeln!(out, "{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
            }
            let _ = writeln!(
                out,
                "{} records from {} in {:.2} s -> {}",
                report.records.len(),
                kind.name(),
                report.provenance.wall_clock_seconds,
                opts.out.join(emit::CSV_FILE).display()
            );
            if report.passed() {
                EXIT_PASS
            } else {
                EXIT_VERDICT
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_IO
            }
        }
    }
}
