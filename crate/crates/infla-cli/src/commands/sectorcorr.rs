//! `infla sectorcorr`: rolling intra-sector correlation and its window
//! average per sector.

use std::path::PathBuf;

use infla_core::sectorcorr::{average_sector_correlation, rolling_correlation};
use infla_core::{Date, Frequency};
use serde_json::json;

use crate::commands::{load_returns, trajectory::parse_with};
use crate::config::ConfigFile;
use crate::errors::{CliError, CliResult};
use crate::io::{load_sector_map, write_rolling_correlation_csv, write_sector_summary_csv, MissingPolicy};
use crate::manifest::{digest_input, write_manifest};

pub struct Params {
    pub returns: PathBuf,
    pub sector_map: PathBuf,
    pub out: PathBuf,
    pub frequency: Frequency,
    pub missing: MissingPolicy,
    pub window: usize,
    pub from: Option<Date>,
    pub to: Option<Date>,
}

impl Params {
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        config: &ConfigFile,
        returns: Option<PathBuf>,
        sector_map: Option<PathBuf>,
        out: Option<PathBuf>,
        frequency: Option<String>,
        missing: Option<String>,
        window: Option<usize>,
        from: Option<String>,
        to: Option<String>,
    ) -> CliResult<Params> {
        let window = config.resolve(window, "window", 120usize)?;
        if window < 2 {
            return Err(CliError::Config("window must be at least 2".into()));
        }
        Ok(Params {
            returns: config.resolve_input(returns, "returns")?,
            sector_map: config.resolve_input(sector_map, "sector_map")?,
            out: crate::config::prepare_out_dir(out, config)?,
            frequency: parse_with(config, frequency, "frequency", Frequency::Daily)?,
            missing: parse_with(config, missing, "missing", MissingPolicy::Reject)?,
            window,
            from: parse_date_opt(config, from, "from")?,
            to: parse_date_opt(config, to, "to")?,
        })
    }
}

fn parse_date_opt(
    config: &ConfigFile,
    cli: Option<String>,
    key: &str,
) -> CliResult<Option<Date>> {
    match cli.as_deref().or_else(|| config.get(key)) {
        Some(raw) => Date::parse(raw)
            .map(Some)
            .map_err(|e| CliError::Config(format!("{key}: {e}"))),
        None => Ok(None),
    }
}

pub fn run(params: &Params) -> CliResult<()> {
    let inputs = [
        digest_input("returns", &params.returns)?,
        digest_input("sector_map", &params.sector_map)?,
    ];
    let sector_map = load_sector_map(&params.sector_map)?;
    let sectors = sector_map.sectors();
    let processable: Vec<&String> = sectors
        .iter()
        .filter(|s| sector_map.members(s).len() >= 2)
        .collect();

    let mut outputs: Vec<String> = vec!["summary.csv".into()];
    outputs.extend(processable.iter().map(|s| format!("rolling_{s}.csv")));
    let output_refs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    write_manifest(
        &params.out,
        "sectorcorr",
        json!({
            "frequency": params.frequency.as_str(),
            "window": params.window,
            "from": params.from.map(|d| d.to_string()),
            "to": params.to.map(|d| d.to_string()),
        }),
        &inputs,
        &output_refs,
    )?;

    let (returns, _) = load_returns(&params.returns, params.frequency, params.missing)?;

    let mut summary = Vec::new();
    for sector in &sectors {
        let members = sector_map.members(sector);
        if members.len() < 2 {
            eprintln!(
                "warning: sector '{sector}' has {} member(s); skipped",
                members.len()
            );
            continue;
        }
        let rc = rolling_correlation(&returns, &sector_map, sector, params.window)?;
        if rc.dropped_pairs > 0 || rc.dropped_windows > 0 {
            eprintln!(
                "warning: sector '{sector}': {} zero-variance pair value(s) and {} window(s) dropped",
                rc.dropped_pairs, rc.dropped_windows
            );
        }
        write_rolling_correlation_csv(&rc, &params.out.join(format!("rolling_{sector}.csv")))?;
        let from = params.from.unwrap_or(rc.dates[0]);
        let to = params.to.unwrap_or(*rc.dates.last().expect("nonempty"));
        let avg = average_sector_correlation(&rc, from, to)?;
        summary.push((avg, rc.members));
    }
    if summary.is_empty() {
        return Err(CliError::Data("no sector has at least 2 members".into()));
    }
    write_sector_summary_csv(&summary, &params.out.join("summary.csv"))?;

    let (max, min) = (
        summary
            .iter()
            .max_by(|a, b| a.0.mean_correlation.total_cmp(&b.0.mean_correlation))
            .expect("nonempty"),
        summary
            .iter()
            .min_by(|a, b| a.0.mean_correlation.total_cmp(&b.0.mean_correlation))
            .expect("nonempty"),
    );
    println!(
        "sectorcorr: {} sector(s); highest '{}' ({:.4}), lowest '{}' ({:.4})",
        summary.len(),
        max.0.sector,
        max.0.mean_correlation,
        min.0.sector,
        min.0.mean_correlation
    );
    Ok(())
}
