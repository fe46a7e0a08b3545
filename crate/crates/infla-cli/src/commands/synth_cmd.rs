//! `infla synth`: writes the synthetic fixture panels.

use std::path::PathBuf;

use serde_json::json;

use crate::config::ConfigFile;
use crate::errors::CliResult;
use crate::manifest::write_manifest;
use crate::synth::{write_fixtures, FIXTURES, SECTOR_MAP_FIXTURE};

pub struct Params {
    pub out: PathBuf,
    pub seed: u64,
}

impl Params {
    pub fn resolve(
        config: &ConfigFile,
        out: Option<PathBuf>,
        seed: Option<u64>,
    ) -> CliResult<Params> {
        Ok(Params {
            out: crate::config::prepare_out_dir(out, config)?,
            seed: config.resolve(seed, "seed", 42u64)?,
        })
    }
}

pub fn run(params: &Params) -> CliResult<()> {
    let mut outputs: Vec<&str> = FIXTURES.to_vec();
    outputs.push(SECTOR_MAP_FIXTURE);
    write_manifest(
        &params.out,
        "synth",
        json!({ "seed": params.seed }),
        &[],
        &outputs,
    )?;
    write_fixtures(&params.out, params.seed)?;
    println!("synth: wrote {} fixture file(s) with seed {}", outputs.len(), params.seed);
    Ok(())
}
