//! `infla trajectory`: distance matrix, clustering and eigenspectrum of
//! normalized return trajectories.

use std::path::PathBuf;

use infla_core::distance::{cut_clusters, hierarchical_cluster, trajectory_distance_matrix, Linkage};
use infla_core::panel::l1_normalize_all;
use infla_core::spectrum::{eigen_decompose, operator_norm, similarity_count};
use infla_core::Frequency;
use serde_json::json;

use crate::commands::load_returns;
use crate::config::ConfigFile;
use crate::errors::{CliError, CliResult};
use crate::fmtnum::round_sig12;
use crate::io::{
    dendrogram_json, similarity_json, write_distance_matrix_csv, write_eigenvectors_csv,
    write_json, write_spectrum_csv, MissingPolicy,
};
use crate::manifest::{digest_input, write_manifest};

pub struct Params {
    pub cpi: PathBuf,
    pub out: PathBuf,
    pub frequency: Frequency,
    pub missing: MissingPolicy,
    pub linkage: Linkage,
    pub delta: f64,
    pub clusters: Option<usize>,
    pub eigenvectors: bool,
}

impl Params {
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        config: &ConfigFile,
        cpi: Option<PathBuf>,
        out: Option<PathBuf>,
        frequency: Option<String>,
        missing: Option<String>,
        linkage: Option<String>,
        delta: Option<f64>,
        clusters: Option<usize>,
        eigenvectors: bool,
    ) -> CliResult<Params> {
        let delta = config.resolve(delta, "delta", 2.5)?;
        if delta.is_nan() || delta <= 0.0 {
            return Err(CliError::Config("threshold must be positive".into()));
        }
        let clusters = config.resolve_opt(clusters, "clusters")?;
        if clusters == Some(0) {
            return Err(CliError::Config("cluster count must be at least 1".into()));
        }
        Ok(Params {
            cpi: config.resolve_input(cpi, "cpi")?,
            out: crate::config::prepare_out_dir(out, config)?,
            frequency: parse_with(config, frequency, "frequency", Frequency::Monthly)?,
            missing: parse_with(config, missing, "missing", MissingPolicy::Reject)?,
            linkage: parse_with(config, linkage, "linkage", Linkage::Average)?,
            delta,
            clusters,
            eigenvectors,
        })
    }
}

pub(crate) fn parse_with<T>(
    config: &ConfigFile,
    cli: Option<String>,
    key: &str,
    default: T,
) -> CliResult<T>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    let raw = match cli {
        Some(v) => v,
        None => match config.get(key) {
            Some(v) => v.to_string(),
            None => return Ok(default),
        },
    };
    raw.parse()
        .map_err(|e| CliError::Config(format!("{key}: {e}")))
}

pub fn run(params: &Params) -> CliResult<()> {
    let mut outputs = vec![
        "distance_matrix.csv",
        "dendrogram.json",
        "eigenspectrum.csv",
        "similarity.json",
    ];
    if params.eigenvectors {
        outputs.push("eigenvectors.csv");
    }
    if params.clusters.is_some() {
        outputs.push("clusters.json");
    }
    let inputs = [digest_input("cpi", &params.cpi)?];
    write_manifest(
        &params.out,
        "trajectory",
        json!({
            "frequency": params.frequency.as_str(),
            "linkage": params.linkage.as_str(),
            "delta": round_sig12(params.delta),
            "clusters": params.clusters,
        }),
        &inputs,
        &outputs,
    )?;

    let (returns, _) = load_returns(&params.cpi, params.frequency, params.missing)?;
    let trajectories = l1_normalize_all(&returns)?;
    let dist = trajectory_distance_matrix(&trajectories)?;
    write_distance_matrix_csv(&dist, &params.out.join("distance_matrix.csv"))?;

    let dendro = hierarchical_cluster(&dist, params.linkage)?;
    write_json(&dendrogram_json(&dendro), &params.out.join("dendrogram.json"))?;

    let spectrum = eigen_decompose(dist.matrix())?;
    write_spectrum_csv(&spectrum, &params.out.join("eigenspectrum.csv"))?;
    if params.eigenvectors {
        write_eigenvectors_csv(&spectrum, dist.entities(), &params.out.join("eigenvectors.csv"))?;
    }

    let count = similarity_count(&spectrum, params.delta)?;
    write_json(&similarity_json(&count), &params.out.join("similarity.json"))?;

    if let Some(k) = params.clusters {
        let clusters = cut_clusters(&dendro, k)?;
        write_json(
            &json!({ "k": k, "clusters": clusters }),
            &params.out.join("clusters.json"),
        )?;
    }

    println!(
        "trajectory: {} entities, operator norm {:.6}, {} eigenvalue(s) below delta {}",
        dist.n(),
        operator_norm(dist.matrix()),
        count.k,
        params.delta
    );
    match count.similar_entities {
        Some(n) => println!("similarity: {n} of {} entities behave collectively", dist.n()),
        None => println!("similarity: no similarity group at delta {}", params.delta),
    }
    Ok(())
}
