//! `infla optimize`: rolling constrained ratio maximization, weight
//! statistics and the core-weight sensitivity sweep.

use std::path::PathBuf;

use infla_core::optimizer::{
    rolling_optimize, rolling_optimize_cold, sensitivity_sweep, weight_stats, Objective,
    PortfolioSpec, DEFAULT_BOUNDS, DEFAULT_CORE_WEIGHT, DEFAULT_RISK_FREE, DEFAULT_WINDOW,
};
use infla_core::Frequency;
use serde_json::json;

use crate::commands::{load_returns, trajectory::parse_with, verbose};
use crate::config::ConfigFile;
use crate::errors::{CliError, CliResult};
use crate::fmtnum::round_sig12;
use crate::io::{write_sweep_csv, write_weight_stats_csv, write_weights_csv, MissingPolicy};
use crate::manifest::{digest_input, write_manifest};

pub struct Params {
    pub assets: PathBuf,
    pub out: PathBuf,
    pub frequency: Frequency,
    pub missing: MissingPolicy,
    pub core_weight: f64,
    pub lo: f64,
    pub hi: f64,
    pub risk_free: f64,
    pub window: usize,
    pub objective: Objective,
    pub sweep: Option<Vec<f64>>,
    pub cold_start: bool,
}

impl Params {
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        config: &ConfigFile,
        assets: Option<PathBuf>,
        out: Option<PathBuf>,
        frequency: Option<String>,
        missing: Option<String>,
        core_weight: Option<f64>,
        lo: Option<f64>,
        hi: Option<f64>,
        risk_free: Option<f64>,
        window: Option<usize>,
        objective: Option<String>,
        sweep: Option<String>,
        cold_start: bool,
    ) -> CliResult<Params> {
        let sweep = match sweep.as_deref().or_else(|| config.get("sweep")) {
            Some(raw) => Some(parse_sweep(raw)?),
            None => None,
        };
        Ok(Params {
            assets: config.resolve_input(assets, "assets")?,
            out: crate::config::prepare_out_dir(out, config)?,
            frequency: parse_with(config, frequency, "frequency", Frequency::Daily)?,
            missing: parse_with(config, missing, "missing", MissingPolicy::Reject)?,
            core_weight: config.resolve(core_weight, "core_weight", DEFAULT_CORE_WEIGHT)?,
            lo: config.resolve(lo, "lo", DEFAULT_BOUNDS.0)?,
            hi: config.resolve(hi, "hi", DEFAULT_BOUNDS.1)?,
            risk_free: config.resolve(risk_free, "risk_free", DEFAULT_RISK_FREE)?,
            window: config.resolve(window, "window", DEFAULT_WINDOW)?,
            objective: parse_with(config, objective, "objective", Objective::Variance)?,
            sweep,
            cold_start,
        })
    }
}

fn parse_sweep(raw: &str) -> CliResult<Vec<f64>> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("sweep: cannot parse '{part}'")))
        })
        .collect()
}

pub fn run(params: &Params) -> CliResult<()> {
    let inputs = [digest_input("assets", &params.assets)?];

    // panel column order defines the assets; the first column is the core
    let (returns, _) = load_returns(&params.assets, params.frequency, params.missing)?;
    let assets = returns.entities().to_vec();
    let spec = PortfolioSpec::new(
        assets,
        params.core_weight,
        vec![(params.lo, params.hi); returns.n_entities().saturating_sub(1)],
        params.risk_free,
        params.window,
        params.objective,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    let mut outputs = vec!["weights.csv", "weight_stats.csv"];
    if params.sweep.is_some() {
        outputs.push("sweep.csv");
    }
    write_manifest(
        &params.out,
        "optimize",
        json!({
            "frequency": params.frequency.as_str(),
            "core_weight": round_sig12(params.core_weight),
            "lo": round_sig12(params.lo),
            "hi": round_sig12(params.hi),
            "risk_free": round_sig12(params.risk_free),
            "window": params.window,
            "objective": params.objective.as_str(),
            "sweep": params.sweep.as_ref().map(|s| s.iter().map(|v| round_sig12(*v)).collect::<Vec<_>>()),
            "cold_start": params.cold_start,
        }),
        &inputs,
        &outputs,
    )?;

    let trajectory = if params.cold_start {
        rolling_optimize_cold(&returns, &spec)?
    } else {
        rolling_optimize(&returns, &spec)?
    };
    if verbose() {
        eprintln!("optimized {} window(s)", trajectory.weights.len());
    }
    write_weights_csv(&trajectory, params.frequency, &params.out.join("weights.csv"))?;

    let stats = weight_stats(&trajectory)?;
    write_weight_stats_csv(&stats, &params.out.join("weight_stats.csv"))?;

    if let Some(core_weights) = &params.sweep {
        let rows = sensitivity_sweep(&returns, &spec, core_weights)?;
        for row in &rows {
            if row.stats.is_none() {
                eprintln!(
                    "warning: core weight {} is infeasible with bounds [{}, {}]; row marked",
                    row.core_weight, params.lo, params.hi
                );
            }
        }
        write_sweep_csv(&rows, &params.out.join("sweep.csv"))?;
    }

    let top = stats
        .iter()
        .skip(1)
        .max_by(|a, b| a.mean.total_cmp(&b.mean));
    if let Some(best) = top {
        println!(
            "optimize: {} window(s); largest mean free weight '{}' ({:.4})",
            trajectory.weights.len(),
            best.asset,
            best.mean
        );
    }
    Ok(())
}
