//! `infla centrality`: rolling trend slopes, lead-lag offsets and
//! centrality scores.

use std::path::{Path, PathBuf};

use infla_core::centrality::{centrality_report, partitioned_centrality, rolling_slope, CentralityReport};
use infla_core::{Date, Frequency, ReturnsPanel};
use serde_json::json;

use crate::commands::{load_returns, trajectory::parse_with};
use crate::config::ConfigFile;
use crate::errors::{CliError, CliResult};
use crate::io::{centrality_json, write_distance_matrix_csv, write_json, write_slopes_csv, MissingPolicy};
use crate::manifest::{digest_input, write_manifest};

pub struct Params {
    pub cpi: PathBuf,
    pub out: PathBuf,
    pub frequency: Frequency,
    pub missing: MissingPolicy,
    pub window: usize,
    pub phi_max: usize,
    pub split_date: Option<Date>,
}

impl Params {
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        config: &ConfigFile,
        cpi: Option<PathBuf>,
        out: Option<PathBuf>,
        frequency: Option<String>,
        missing: Option<String>,
        window: Option<usize>,
        phi_max: Option<usize>,
        split_date: Option<String>,
    ) -> CliResult<Params> {
        let window = config.resolve(window, "window", 60usize)?;
        if window < 3 {
            return Err(CliError::Config("window must be at least 3".into()));
        }
        let phi_max = config.resolve(phi_max, "phi_max", 24usize)?;
        if phi_max == 0 {
            return Err(CliError::Config("phi-max must be at least 1".into()));
        }
        let split_date = match split_date.as_deref().or_else(|| config.get("split_date")) {
            Some(raw) => Some(
                Date::parse(raw).map_err(|e| CliError::Config(format!("split-date: {e}")))?,
            ),
            None => None,
        };
        Ok(Params {
            cpi: config.resolve_input(cpi, "cpi")?,
            out: crate::config::prepare_out_dir(out, config)?,
            frequency: parse_with(config, frequency, "frequency", Frequency::Monthly)?,
            missing: parse_with(config, missing, "missing", MissingPolicy::Reject)?,
            window,
            phi_max,
            split_date,
        })
    }
}

pub fn run(params: &Params) -> CliResult<()> {
    let mut outputs = vec!["slopes.csv", "offsets.csv", "centrality.json"];
    if params.split_date.is_some() {
        outputs.extend([
            "offsets_pre.csv",
            "centrality_pre.json",
            "offsets_post.csv",
            "centrality_post.json",
        ]);
    }
    let inputs = [digest_input("cpi", &params.cpi)?];
    write_manifest(
        &params.out,
        "centrality",
        json!({
            "frequency": params.frequency.as_str(),
            "window": params.window,
            "phi_max": params.phi_max,
            "split_date": params.split_date.map(|d| d.to_string()),
        }),
        &inputs,
        &outputs,
    )?;

    let (returns, _) = load_returns(&params.cpi, params.frequency, params.missing)?;
    write_full_run(params, &returns)?;

    if let Some(split) = params.split_date {
        let (pre, post) = partitioned_centrality(&returns, split, params.window, params.phi_max)?;
        write_report(params, &pre, &params.out.join("offsets_pre.csv"), &params.out.join("centrality_pre.json"))?;
        write_report(params, &post, &params.out.join("offsets_post.csv"), &params.out.join("centrality_post.json"))?;
        println!("centrality: partitioned at {split}");
    }
    Ok(())
}

fn write_full_run(params: &Params, returns: &ReturnsPanel) -> CliResult<()> {
    let trajectories: Vec<_> = returns
        .entities()
        .iter()
        .map(|e| rolling_slope(returns, e, params.window))
        .collect::<infla_core::Result<_>>()?;
    let columns: Vec<(String, Vec<f64>)> = trajectories
        .iter()
        .map(|t| (t.entity.clone(), t.values.clone()))
        .collect();
    write_slopes_csv(
        &trajectories[0].dates,
        &columns,
        params.frequency,
        &params.out.join("slopes.csv"),
    )?;

    let report = centrality_report(&trajectories, params.phi_max)?;
    write_report(params, &report, &params.out.join("offsets.csv"), &params.out.join("centrality.json"))?;

    let mut ranked: Vec<(&String, f64)> = report
        .offsets
        .entities()
        .iter()
        .zip(report.scores.iter().copied())
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    if let (Some(first), Some(last)) = (ranked.first(), ranked.last()) {
        println!(
            "centrality: most central {} ({}), least central {} ({})",
            first.0, first.1, last.0, last.1
        );
    }
    Ok(())
}

fn write_report(
    params: &Params,
    report: &CentralityReport,
    offsets_path: &Path,
    json_path: &Path,
) -> CliResult<()> {
    write_distance_matrix_csv(&report.offsets, offsets_path)?;
    write_json(&centrality_json(report, params.window, params.phi_max), json_path)
}
