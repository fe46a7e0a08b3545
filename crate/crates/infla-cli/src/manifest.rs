//! Run manifests for reproducibility.
//!
//! Every command writes `manifest.json` into its output directory before
//! any analysis output, listing the parameters, the digests of all inputs
//! and the names of the files it is about to produce. A directory whose
//! manifest names files that are absent is a partial run.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::errors::{CliError, CliResult};
use crate::io::write_json;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct ManifestInput {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

pub fn digest_input(role: &'static str, path: &Path) -> CliResult<ManifestInput> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(ManifestInput {
        role,
        path: path.display().to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    })
}

/// Writes `manifest.json`. `outputs` are file names relative to the run
/// directory; `parameters` should already be JSON.
pub fn write_manifest(
    out_dir: &Path,
    command: &str,
    parameters: Value,
    inputs: &[ManifestInput],
    outputs: &[&str],
) -> CliResult<()> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "tool": "infla",
        "version": TOOL_VERSION,
        "command": command,
        "generated_at_unix": now,
        "parameters": parameters,
        "inputs": inputs
            .iter()
            .map(|i| json!({ "role": i.role, "path": i.path, "sha256": i.sha256 }))
            .collect::<Vec<_>>(),
        "outputs": outputs,
    });
    write_json(&manifest, &out_dir.join("manifest.json"))
}
