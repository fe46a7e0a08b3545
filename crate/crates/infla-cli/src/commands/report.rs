//! `infla report`: consolidates the manifests and headline numbers of
//! previous runs under a directory into one text report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::config::ConfigFile;
use crate::errors::{CliError, CliResult};

pub struct Params {
    pub dir: PathBuf,
    pub out: PathBuf,
}

impl Params {
    pub fn resolve(
        config: &ConfigFile,
        dir: Option<PathBuf>,
        out: Option<PathBuf>,
    ) -> CliResult<Params> {
        let dir = match dir {
            Some(d) => d,
            None => config
                .get("dir")
                .map(PathBuf::from)
                .ok_or_else(|| CliError::Config("missing required directory 'dir'".into()))?,
        };
        if !dir.is_dir() {
            return Err(CliError::Config(format!(
                "'dir' is not a directory: {}",
                dir.display()
            )));
        }
        let out = match out {
            Some(o) => o,
            None => config
                .get("out")
                .map(PathBuf::from)
                .unwrap_or_else(|| dir.join("report.txt")),
        };
        Ok(Params { dir, out })
    }
}

pub fn run(params: &Params) -> CliResult<()> {
    let mut manifests = Vec::new();
    collect_manifests(&params.dir, 0, &mut manifests)?;
    manifests.sort();
    if manifests.is_empty() {
        return Err(CliError::Data(format!(
            "no manifest.json found under {}",
            params.dir.display()
        )));
    }

    let mut text = String::new();
    writeln!(text, "run report for {}", params.dir.display()).ok();
    writeln!(text, "{} run(s) found", manifests.len()).ok();
    for path in &manifests {
        let run_dir = path.parent().expect("manifest has a parent");
        let manifest: Value = serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let command = manifest["command"].as_str().unwrap_or("?");
        writeln!(text, "\n== {} ({})", command, run_dir.display()).ok();
        writeln!(text, "tool: {} {}", manifest["tool"].as_str().unwrap_or("?"),
            manifest["version"].as_str().unwrap_or("?")).ok();
        if let Some(parameters) = manifest["parameters"].as_object() {
            for (key, value) in parameters {
                writeln!(text, "param {key} = {value}").ok();
            }
        }
        if let Some(inputs) = manifest["inputs"].as_array() {
            for input in inputs {
                writeln!(
                    text,
                    "input {} = {} (sha256 {})",
                    input["role"].as_str().unwrap_or("?"),
                    input["path"].as_str().unwrap_or("?"),
                    &input["sha256"].as_str().unwrap_or("?")[..16.min(
                        input["sha256"].as_str().unwrap_or("?").len()
                    )],
                )
                .ok();
            }
        }
        let mut missing = Vec::new();
        if let Some(outputs) = manifest["outputs"].as_array() {
            for output in outputs {
                let name = output.as_str().unwrap_or("?");
                if !run_dir.join(name).is_file() {
                    missing.push(name.to_string());
                }
            }
        }
        if missing.is_empty() {
            writeln!(text, "outputs: complete").ok();
        } else {
            writeln!(text, "outputs: PARTIAL RUN, missing {}", missing.join(", ")).ok();
        }
        summarize_run(command, run_dir, &mut text);
    }

    fs::write(&params.out, &text)?;
    println!("report: {} run(s) -> {}", manifests.len(), params.out.display());
    Ok(())
}

fn collect_manifests(dir: &Path, depth: usize, found: &mut Vec<PathBuf>) -> CliResult<()> {
    if depth > 4 {
        return Ok(());
    }
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for entry in entries {
        if entry.is_dir() {
            collect_manifests(&entry, depth + 1, found)?;
        } else if entry.file_name().is_some_and(|n| n == "manifest.json") {
            found.push(entry);
        }
    }
    Ok(())
}

fn summarize_run(command: &str, run_dir: &Path, text: &mut String) {
    match command {
        "trajectory" => {
            if let Ok(raw) = fs::read_to_string(run_dir.join("similarity.json")) {
                if let Ok(value) = serde_json::from_str::<Value>(&raw) {
                    writeln!(text, "similarity: {}", value["summary"].as_str().unwrap_or("?"))
                        .ok();
                }
            }
        }
        "centrality" => {
            if let Ok(raw) = fs::read_to_string(run_dir.join("centrality.json")) {
                if let Ok(value) = serde_json::from_str::<Value>(&raw) {
                    if let Some(scores) = value["scores"].as_object() {
                        let mut pairs: Vec<(&String, f64)> = scores
                            .iter()
                            .filter_map(|(k, v)| v.as_f64().map(|f| (k, f)))
                            .collect();
                        pairs.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
                        for (entity, score) in pairs {
                            writeln!(text, "score {entity} = {score}").ok();
                        }
                    }
                }
            }
        }
        "robustness" => copy_csv_lines(run_dir.join("robustness.csv"), text),
        "sectorcorr" => copy_csv_lines(run_dir.join("summary.csv"), text),
        "optimize" => copy_csv_lines(run_dir.join("weight_stats.csv"), text),
        _ => {}
    }
}

fn copy_csv_lines(path: PathBuf, text: &mut String) {
    if let Ok(raw) = fs::read_to_string(&path) {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("?");
        for line in raw.lines() {
            writeln!(text, "{name}: {line}").ok();
        }
    }
}
