//! `infla robustness`: decile-conditioned return distributions and their
//! Wasserstein distance per entity.

use std::path::PathBuf;

use infla_core::robustness::{equity_robustness, mean_return_discrepancy, split_by_inflation_deciles};
use infla_core::Frequency;
use serde_json::json;

use crate::commands::{load_returns, trajectory::parse_with};
use crate::config::ConfigFile;
use crate::errors::{CliError, CliResult};
use crate::io::{write_robustness_csv, write_samples_csv, MissingPolicy, RobustnessRow};
use crate::manifest::{digest_input, write_manifest};

pub struct Params {
    pub inflation: PathBuf,
    pub equity: PathBuf,
    pub out: PathBuf,
    pub frequency: Frequency,
    pub missing: MissingPolicy,
}

impl Params {
    pub fn resolve(
        config: &ConfigFile,
        inflation: Option<PathBuf>,
        equity: Option<PathBuf>,
        out: Option<PathBuf>,
        frequency: Option<String>,
        missing: Option<String>,
    ) -> CliResult<Params> {
        Ok(Params {
            inflation: config.resolve_input(inflation, "inflation")?,
            equity: config.resolve_input(equity, "equity")?,
            out: crate::config::prepare_out_dir(out, config)?,
            frequency: parse_with(config, frequency, "frequency", Frequency::Monthly)?,
            missing: parse_with(config, missing, "missing", MissingPolicy::Reject)?,
        })
    }
}

pub fn run(params: &Params) -> CliResult<()> {
    let inputs = [
        digest_input("inflation", &params.inflation)?,
        digest_input("equity", &params.equity)?,
    ];

    let (driver_panel, _) = load_returns(&params.inflation, params.frequency, params.missing)?;
    let (target_panel, _) = load_returns(&params.equity, params.frequency, params.missing)?;

    if driver_panel.dates() != target_panel.dates() {
        return Err(CliError::Data(
            "misaligned date ranges between the inflation and equity panels".into(),
        ));
    }

    // entities present in both panels, in inflation-panel order
    let shared: Vec<&String> = driver_panel
        .entities()
        .iter()
        .filter(|e| target_panel.entities().contains(e))
        .collect();
    for entity in driver_panel.entities() {
        if !target_panel.entities().contains(entity) {
            eprintln!("warning: entity '{entity}' missing from the equity panel; skipped");
        }
    }
    for entity in target_panel.entities() {
        if !driver_panel.entities().contains(entity) {
            eprintln!("warning: entity '{entity}' missing from the inflation panel; skipped");
        }
    }
    if shared.is_empty() {
        return Err(CliError::Data("no entity appears in both panels".into()));
    }

    let mut outputs: Vec<String> = vec!["robustness.csv".into()];
    outputs.extend(shared.iter().map(|e| format!("samples_{e}.csv")));
    let output_refs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    write_manifest(
        &params.out,
        "robustness",
        json!({ "frequency": params.frequency.as_str() }),
        &inputs,
        &output_refs,
    )?;

    let mut rows = Vec::with_capacity(shared.len());
    for entity in &shared {
        let driver = driver_panel.column(entity)?;
        let target = target_panel.column(entity)?;
        let score = equity_robustness(&driver, &target)?;
        let discrepancy = mean_return_discrepancy(&driver, &target)?;
        let (extreme, stable) = split_by_inflation_deciles(&driver, &target)?;
        write_samples_csv(&extreme, &stable, &params.out.join(format!("samples_{entity}.csv")))?;
        rows.push(RobustnessRow {
            entity: (*entity).clone(),
            distance: score.distance,
            n_extreme: score.n_extreme,
            n_stable: score.n_stable,
            mean_discrepancy: discrepancy,
        });
    }
    write_robustness_csv(&rows, &params.out.join("robustness.csv"))?;

    let most = rows
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .expect("nonempty");
    println!(
        "robustness: {} entities, most robust '{}' (er {:.6})",
        rows.len(),
        most.entity,
        most.distance
    );
    Ok(())
}
