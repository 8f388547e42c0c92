//! Command-line front end for rotating-frame experiments.
//!
//! `rotframe <mode> --config <file> [--out <dir>] [--units si|natural]`
//! reads a TOML experiment, runs it and writes `summary.json` plus any data
//! files into the output directory. Exit codes: 0 ok, 2 config error,
//! 3 precondition error, 4 numerical-stability abort.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::path::Path;

pub use config::{ExperimentConfig, Mode, Units};
pub use error::{CliError, CliResult};
pub use output::{emit_plot_data, write_summary, SCHEMA_VERSION};
pub use run::{run, Report};

/// Load, run and write the summary. Returns the exit code and the summary
/// that was written.
pub fn execute(mode: Mode, config: &Path, out: &Path, units: Option<Units>) -> (u8, serde_json::Value) {
    let cfg = config::load(config, mode, units);
    let outcome = match &cfg {
        Ok(c) => run::run(c, out),
        Err(e) => Err(e.clone()),
    };
    let code = match &outcome {
        Ok(r) => r.failure.as_ref().map_or(0, CliError::exit_code),
        Err(e) => e.exit_code(),
    };
    let summary = run::summary(mode, cfg.as_ref().ok(), &outcome);
    match write_summary(out, &summary) {
        Ok(_) => (code, summary),
        Err(e) => {
            eprintln!("{e}");
            (if code == 0 { e.exit_code() } else { code }, summary)
        }
    }
}
