//! CSV ingestion and the file formats emitted by the commands.
//!
//! Input panels are UTF-8 comma-separated files with a `date` header
//! column followed by one column per entity; dates are `YYYY-MM-DD` or
//! `YYYY-MM`. Level values must be plain decimal numerals. Panel CSVs are
//! written back with full-precision floats so a load/write/load cycle
//! reproduces the panel exactly; analysis outputs use fixed
//! 12-significant-digit formatting instead.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use infla_core::centrality::CentralityReport;
use infla_core::distance::{Dendrogram, DistanceMatrix};
use infla_core::optimizer::{SweepRow, WeightStats, WeightTrajectory};
use infla_core::robustness::EmpiricalDistribution;
use infla_core::sectorcorr::{RollingCorrelation, SectorAverage, SectorMap};
use infla_core::spectrum::{EigenSpectrum, SimilarityCount};
use infla_core::{Date, Frequency, TimeSeriesPanel};
use serde_json::{json, Map, Value};

use crate::errors::{CliError, CliResult};
use crate::fmtnum::{fmt_sig12, round_sig12};

/// How rows with missing cells are handled during ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Reject,
    DropRow,
}

impl std::str::FromStr for MissingPolicy {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "reject" => Ok(MissingPolicy::Reject),
            "drop-row" | "drop_row" => Ok(MissingPolicy::DropRow),
            other => Err(CliError::Config(format!(
                "unknown missing policy '{other}' (expected 'reject' or 'drop-row')"
            ))),
        }
    }
}

/// Ingestion side facts worth reporting.
#[derive(Debug, Default)]
pub struct LoadReport {
    pub dropped_rows: usize,
}

/// Loads a level panel from CSV, enforcing the panel invariants.
pub fn load_csv(
    path: &Path,
    frequency: Frequency,
    missing: MissingPolicy,
) -> CliResult<(TimeSeriesPanel, LoadReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;

    let headers = reader.headers()?.clone();
    if headers.is_empty() || !headers[0].eq_ignore_ascii_case("date") {
        return Err(CliError::Data(format!(
            "{}: first header column must be 'date'",
            path.display()
        )));
    }
    let entities: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if entities.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no entity columns after 'date'",
            path.display()
        )));
    }
    let unique: BTreeSet<&String> = entities.iter().collect();
    if unique.len() != entities.len() {
        return Err(CliError::Data(format!(
            "{}: duplicate entity column names",
            path.display()
        )));
    }

    let mut dates: Vec<Date> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut values: Vec<f64> = Vec::new();
    let mut report = LoadReport::default();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1; // 1-based data row
        let record = record?;
        if record.len() != entities.len() + 1 {
            return Err(CliError::Data(format!(
                "row {row}: {} fields, expected {}",
                record.len(),
                entities.len() + 1
            )));
        }
        let date = Date::parse(&record[0])
            .map_err(|e| CliError::Data(format!("row {row}, column 'date': {e}")))?;
        if !seen.insert(date) {
            return Err(CliError::Data(format!("row {row}: duplicate date {date}")));
        }

        let mut row_values = Vec::with_capacity(entities.len());
        let mut missing_at: Option<usize> = None;
        for (col, cell) in record.iter().skip(1).enumerate() {
            if cell.is_empty() {
                missing_at = missing_at.or(Some(col));
                row_values.push(f64::NAN);
                continue;
            }
            let parsed: f64 = cell.parse().map_err(|_| {
                CliError::Data(format!(
                    "row {row}, column '{}': cannot parse '{cell}' as a number",
                    entities[col]
                ))
            })?;
            if !parsed.is_finite() {
                missing_at = missing_at.or(Some(col));
            }
            row_values.push(parsed);
        }
        if let Some(col) = missing_at {
            match missing {
                MissingPolicy::Reject => {
                    return Err(CliError::Data(format!(
                        "row {row}, column '{}': missing value (policy 'reject')",
                        entities[col]
                    )));
                }
                MissingPolicy::DropRow => {
                    report.dropped_rows += 1;
                    continue;
                }
            }
        }
        dates.push(date);
        values.extend(row_values);
    }

    let panel = TimeSeriesPanel::new(dates, entities, values, frequency)?;
    Ok((panel, report))
}

/// Writes a panel back in the input schema with full float precision.
pub fn write_panel_csv(panel: &TimeSeriesPanel, path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(panel.entities().iter().cloned());
    writer.write_record(&header)?;
    for (t, date) in panel.dates().iter().enumerate() {
        let mut record = vec![date.format_for(panel.frequency())];
        record.extend(panel.row(t).iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads an `entity,sector` CSV.
pub fn load_sector_map(path: &Path) -> CliResult<SectorMap> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 2 || record[0].is_empty() || record[1].is_empty() {
            return Err(CliError::Data(format!(
                "{}: row {} needs 'entity,sector'",
                path.display(),
                row_idx + 1
            )));
        }
        pairs.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(SectorMap::from_pairs(pairs)?)
}

pub fn write_distance_matrix_csv(dist: &DistanceMatrix, path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["entity".to_string()];
    header.extend(dist.entities().iter().cloned());
    writer.write_record(&header)?;
    for (i, entity) in dist.entities().iter().enumerate() {
        let mut record = vec![entity.clone()];
        record.extend((0..dist.n()).map(|j| fmt_sig12(dist.get(i, j))));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_spectrum_csv(spectrum: &EigenSpectrum, path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["index", "eigenvalue", "abs_eigenvalue"])?;
    for (i, v) in spectrum.eigenvalues.iter().enumerate() {
        writer.write_record([i.to_string(), fmt_sig12(*v), fmt_sig12(v.abs())])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_eigenvectors_csv(
    spectrum: &EigenSpectrum,
    entities: &[String],
    path: &Path,
) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["entity".to_string()];
    header.extend((0..spectrum.n()).map(|k| format!("ev{k}")));
    writer.write_record(&header)?;
    for (row, entity) in entities.iter().enumerate() {
        let mut record = vec![entity.clone()];
        record.extend((0..spectrum.n()).map(|col| fmt_sig12(spectrum.eigenvectors.get(row, col))));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn dendrogram_json(dendro: &Dendrogram) -> Value {
    json!({
        "entities": dendro.entities,
        "leaf_order": dendro.leaf_order,
        "merges": dendro
            .merges
            .iter()
            .map(|m| {
                json!({
                    "left": m.left,
                    "right": m.right,
                    "height": round_sig12(m.height),
                    "size": m.size,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn similarity_json(count: &SimilarityCount) -> Value {
    let summary = match count.similar_entities {
        Some(n) => format!("{n} entities behave collectively similarly"),
        None => "no similarity group".to_string(),
    };
    json!({
        "delta": round_sig12(count.threshold),
        "k": count.k,
        "similar_entities": count.similar_entities,
        "summary": summary,
    })
}

pub fn centrality_json(report: &CentralityReport, window: usize, phi_max: usize) -> Value {
    let entities = report.offsets.entities();
    let matrix: Vec<Vec<f64>> = (0..report.offsets.n())
        .map(|i| (0..report.offsets.n()).map(|j| report.offsets.get(i, j)).collect())
        .collect();
    let mut scores = Map::new();
    for (entity, score) in entities.iter().zip(&report.scores) {
        scores.insert(entity.clone(), json!(round_sig12(*score)));
    }
    json!({
        "model": model_label(window),
        "window": window,
        "phi_max": phi_max,
        "entities": entities,
        "offset_matrix": matrix,
        "scores": scores,
    })
}

/// Conventional label for the standard rolling windows.
pub fn model_label(window: usize) -> Option<&'static str> {
    match window {
        60 => Some("M1"),
        120 => Some("M2"),
        30 => Some("M3"),
        _ => None,
    }
}

pub fn write_json(value: &Value, path: &Path) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Wide CSV of slope trajectories sharing a date grid.
pub fn write_slopes_csv(
    dates: &[Date],
    columns: &[(String, Vec<f64>)],
    frequency: Frequency,
    path: &Path,
) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    writer.write_record(&header)?;
    for (t, date) in dates.iter().enumerate() {
        let mut record = vec![date.format_for(frequency)];
        record.extend(columns.iter().map(|(_, values)| fmt_sig12(values[t])));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub struct RobustnessRow {
    pub entity: String,
    pub distance: f64,
    pub n_extreme: usize,
    pub n_stable: usize,
    pub mean_discrepancy: f64,
}

pub fn write_robustness_csv(rows: &[RobustnessRow], path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["entity", "er", "n_extreme", "n_stable", "mean_discrepancy"])?;
    for row in rows {
        writer.write_record([
            row.entity.clone(),
            fmt_sig12(row.distance),
            row.n_extreme.to_string(),
            row.n_stable.to_string(),
            fmt_sig12(row.mean_discrepancy),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Conditional samples of one entity for external density plotting.
pub fn write_samples_csv(
    extreme: &EmpiricalDistribution,
    stable: &EmpiricalDistribution,
    path: &Path,
) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["regime", "log_return"])?;
    for distribution in [extreme, stable] {
        for v in distribution.samples() {
            writer.write_record([distribution.label.as_str(), &fmt_sig12(*v)])?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_rolling_correlation_csv(rc: &RollingCorrelation, path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["date", "mean_offdiag"])?;
    for (date, v) in rc.dates.iter().zip(&rc.mean_offdiag) {
        writer.write_record([date.format_for(Frequency::Daily), fmt_sig12(*v)])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_sector_summary_csv(
    rows: &[(SectorAverage, usize)],
    path: &Path,
) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["sector", "mu_tilde", "s_n", "n_windows"])?;
    for (avg, members) in rows {
        writer.write_record([
            avg.sector.clone(),
            fmt_sig12(avg.mean_correlation),
            members.to_string(),
            avg.n_windows.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_weights_csv(traj: &WeightTrajectory, frequency: Frequency, path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(traj.assets.iter().map(|a| format!("w_{a}")));
    header.push("objective".to_string());
    writer.write_record(&header)?;
    for ((date, weights), objective) in
        traj.dates.iter().zip(&traj.weights).zip(&traj.objectives)
    {
        let mut record = vec![date.format_for(frequency)];
        record.extend(weights.iter().map(|w| fmt_sig12(*w)));
        record.push(fmt_sig12(*objective));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_weight_stats_csv(stats: &WeightStats, path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["asset", "mean_weight", "weight_variance"])?;
    for s in stats {
        writer.write_record([s.asset.clone(), fmt_sig12(s.mean), fmt_sig12(s.variance)])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["core_weight", "asset", "mean_weight"])?;
    for row in rows {
        match &row.stats {
            Some(stats) => {
                for s in stats {
                    writer.write_record([
                        fmt_sig12(row.core_weight),
                        s.asset.clone(),
                        fmt_sig12(s.mean),
                    ])?;
                }
            }
            None => {
                writer.write_record([
                    fmt_sig12(row.core_weight),
                    "*".to_string(),
                    "infeasible".to_string(),
                ])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_well_formed_panel() {
        let f = write_temp("date,us,uk\n2000-01,100,200\n2000-02,101,201\n2000-03,102,202\n");
        let (panel, report) = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap();
        assert_eq!(panel.rows(), 3);
        assert_eq!(panel.n_entities(), 2);
        assert_eq!(report.dropped_rows, 0);
        assert_eq!(panel.value(1, 1), 201.0);
    }

    #[test]
    fn blank_cell_drops_row_under_drop_policy() {
        let f = write_temp("date,us,uk\n2000-01,100,200\n2000-02,,201\n2000-03,102,202\n");
        let (panel, report) =
            load_csv(f.path(), Frequency::Monthly, MissingPolicy::DropRow).unwrap();
        assert_eq!(panel.rows(), 2);
        assert_eq!(report.dropped_rows, 1);
    }

    #[test]
    fn blank_cell_is_an_error_under_reject_policy() {
        let f = write_temp("date,us,uk\n2000-01,100,200\n2000-02,,201\n2000-03,102,202\n");
        let err = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2"), "{msg}");
        assert!(msg.contains("'us'"), "{msg}");
    }

    #[test]
    fn out_of_order_dates_are_an_error() {
        let f = write_temp("date,us\n2000-02,100\n2000-01,101\n");
        let err = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
    }

    #[test]
    fn duplicate_dates_are_an_error() {
        let f = write_temp("date,us\n2000-01,100\n2000-01,101\n");
        let err = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap_err();
        assert!(err.to_string().contains("duplicate date"), "{err}");
    }

    #[test]
    fn unparseable_number_names_row_and_column() {
        let f = write_temp("date,us,uk\n2000-01,100,200\n2000-02,1x1,201\n");
        let err = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("'us'") && msg.contains("1x1"), "{msg}");
    }

    #[test]
    fn panel_round_trips_through_csv() {
        let f = write_temp(
            "date,us,uk\n2000-01,100.125,200.0625\n2000-02,101.5,201.25\n2000-03,0.1,202.875\n",
        );
        let (panel, _) = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_panel_csv(&panel, out.path()).unwrap();
        let (reloaded, _) =
            load_csv(out.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap();
        assert_eq!(panel, reloaded);
    }

    #[test]
    fn non_decimal_values_round_trip_bitwise() {
        // values with no short decimal representation
        let f = write_temp("date,x\n2000-01,0.1\n2000-02,0.30000000000000004\n2000-03,3.141592653589793\n");
        let (panel, _) = load_csv(f.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_panel_csv(&panel, out.path()).unwrap();
        let (reloaded, _) = load_csv(out.path(), Frequency::Monthly, MissingPolicy::Reject).unwrap();
        for t in 0..3 {
            assert_eq!(panel.value(t, 0).to_bits(), reloaded.value(t, 0).to_bits());
        }
    }
}
