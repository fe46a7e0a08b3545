//! Subcommand implementations.

pub mod centrality;
pub mod optimize;
pub mod report;
pub mod robustness;
pub mod sectorcorr;
pub mod synth_cmd;
pub mod trajectory;

use std::path::Path;

use infla_core::panel::log_returns;
use infla_core::{Frequency, ReturnsPanel};

use crate::errors::CliResult;
use crate::io::{load_csv, LoadReport, MissingPolicy};

/// Extra progress chatter on stderr when `INFLA_VERBOSE` is set (output
/// verbosity is the only thing the environment may change).
pub fn verbose() -> bool {
    std::env::var_os("INFLA_VERBOSE").is_some_and(|v| !v.is_empty() && v != "0")
}

/// Loads a level panel and turns it into log returns, reporting dropped
/// rows on stderr.
pub fn load_returns(
    path: &Path,
    frequency: Frequency,
    missing: MissingPolicy,
) -> CliResult<(ReturnsPanel, LoadReport)> {
    let (panel, report) = load_csv(path, frequency, missing)?;
    if report.dropped_rows > 0 {
        eprintln!(
            "warning: {}: {} row(s) dropped for missing values",
            path.display(),
            report.dropped_rows
        );
    }
    if verbose() {
        eprintln!(
            "loaded {}: {} rows x {} entities",
            path.display(),
            panel.rows(),
            panel.n_entities()
        );
    }
    let returns = log_returns(&panel)?;
    Ok((returns, report))
}
