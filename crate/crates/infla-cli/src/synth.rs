//! Deterministic synthetic fixtures for self-contained runs and tests.
//!
//! Five data sets cover the analysis commands: a monthly level panel with
//! two early-spike outliers, a panel whose last entity lags the others by
//! six months, an aligned driver/target panel pair, a sectored daily panel
//! with its sector map, and a daily multi-asset panel with one
//! dominant-mean asset. All series derive from a seeded ChaCha stream, so
//! equal seeds give byte-identical fixtures.

use std::path::Path;

use infla_core::{Date, Frequency, TimeSeriesPanel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::errors::CliResult;
use crate::io::write_panel_csv;

pub const FIXTURES: [&str; 6] = [
    "cpi_synth.csv",
    "slopes_synth.csv",
    "robust_infl_synth.csv",
    "robust_equity_synth.csv",
    "sectors_synth.csv",
    "assets_synth.csv",
];
pub const SECTOR_MAP_FIXTURE: &str = "sector_map_synth.csv";

fn monthly_dates(start: &str, count: usize) -> Vec<Date> {
    let mut d = Date::parse(start).unwrap();
    (0..count)
        .map(|_| {
            let cur = d;
            d = d.next_month();
            cur
        })
        .collect()
}

fn daily_dates(start: &str, count: usize) -> Vec<Date> {
    let mut d = Date::parse(start).unwrap();
    (0..count)
        .map(|_| {
            let cur = d;
            d = d.next_day();
            cur
        })
        .collect()
}

fn levels_from_returns(returns: &[Vec<f64>], base: f64) -> Vec<Vec<f64>> {
    returns
        .iter()
        .map(|series| {
            let mut level = base;
            let mut out = Vec::with_capacity(series.len() + 1);
            out.push(level);
            for r in series {
                level *= r.exp();
                out.push(level);
            }
            out
        })
        .collect()
}

fn panel_from_columns(
    dates: Vec<Date>,
    names: &[&str],
    columns: Vec<Vec<f64>>,
    frequency: Frequency,
) -> TimeSeriesPanel {
    let rows = dates.len();
    let mut values = Vec::with_capacity(rows * columns.len());
    for t in 0..rows {
        for col in &columns {
            values.push(col[t]);
        }
    }
    TimeSeriesPanel::new(
        dates,
        names.iter().map(|s| s.to_string()).collect(),
        values,
        frequency,
    )
    .unwrap()
}

fn bump(t: f64, center: f64, width: f64) -> f64 {
    (-((t - center) / width).powi(2)).exp()
}

/// Monthly panel of 8 level series: six share a late spike profile, two
/// outliers spike years earlier and at distinct times, so neither
/// resembles the pack nor the other outlier.
pub fn outlier_panel(seed: u64) -> TimeSeriesPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1);
    let months = 360usize;
    let names = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "xray", "yankee"];
    let returns: Vec<Vec<f64>> = (0..names.len())
        .map(|e| {
            let spike_center = match e {
                6 => 60.0,
                7 => 100.0,
                _ => 150.0,
            };
            (0..months - 1)
                .map(|t| {
                    let t = t as f64;
                    0.002 + 0.025 * bump(t, spike_center, 12.0) - 0.005 * bump(t, 260.0, 18.0)
                        + rng.gen_range(-0.0012..0.0012)
                })
                .collect()
        })
        .collect();
    let columns = levels_from_returns(&returns, 100.0);
    panel_from_columns(monthly_dates("1990-01", months), &names, columns, Frequency::Monthly)
}

/// Monthly panel of 4 level series whose returns are a periodic sawtooth;
/// the last series lags the first three by exactly six months.
pub fn lagged_panel() -> TimeSeriesPanel {
    let months = 241usize;
    let period = 40i64;
    let saw = |t: i64| 0.02 * ((t.rem_euclid(period)) as f64 / period as f64 - 0.5);
    let names = ["n1", "n2", "n3", "lag6"];
    let returns: Vec<Vec<f64>> = (0..4)
        .map(|e| {
            (0..months as i64 - 1)
                .map(|t| if e < 3 { saw(t) } else { saw(t - 6) })
                .collect()
        })
        .collect();
    let columns = levels_from_returns(&returns, 100.0);
    panel_from_columns(monthly_dates("1995-01", months), &names, columns, Frequency::Monthly)
}

/// Aligned monthly driver and target panels over the same four entities.
pub fn robustness_panels(seed: u64) -> (TimeSeriesPanel, TimeSeriesPanel) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2);
    let months = 240usize;
    let names = ["r1", "r2", "r3", "r4"];
    let dates = monthly_dates("2000-01", months);
    let driver_returns: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..months - 1).map(|_| rng.gen_range(-0.01..0.012)).collect())
        .collect();
    // the target loads on the driver, with entity-specific sensitivity
    let target_returns: Vec<Vec<f64>> = driver_returns
        .iter()
        .enumerate()
        .map(|(e, driver)| {
            driver
                .iter()
                .map(|d| 0.004 + (e as f64) * 0.6 * d + rng.gen_range(-0.02..0.02))
                .collect()
        })
        .collect();
    (
        panel_from_columns(
            dates.clone(),
            &names,
            levels_from_returns(&driver_returns, 100.0),
            Frequency::Monthly,
        ),
        panel_from_columns(
            dates,
            &names,
            levels_from_returns(&target_returns, 1000.0),
            Frequency::Monthly,
        ),
    )
}

/// Daily sectored panel: three sectors of sizes 4, 3 and 2 driven by
/// sector factors with distinct loadings.
pub fn sector_panel(seed: u64) -> (TimeSeriesPanel, Vec<(String, String)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let days = 421usize;
    let spec: [(&str, usize, f64); 3] =
        [("tech", 4, 0.9), ("energy", 3, 0.7), ("utility", 2, 0.5)];
    let mut names: Vec<String> = Vec::new();
    let mut mapping: Vec<(String, String)> = Vec::new();
    let mut returns: Vec<Vec<f64>> = Vec::new();
    for (sector, members, loading) in spec {
        let factor: Vec<f64> = (0..days - 1).map(|_| rng.gen_range(-0.012..0.012)).collect();
        for m in 0..members {
            let name = format!("{sector}{}", m + 1);
            mapping.push((name.clone(), sector.to_string()));
            names.push(name);
            returns.push(
                factor
                    .iter()
                    .map(|f| loading * f + rng.gen_range(-0.006..0.006))
                    .collect(),
            );
        }
    }
    let columns = levels_from_returns(&returns, 50.0);
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    (
        panel_from_columns(daily_dates("2005-01-03", days), &name_refs, columns, Frequency::Daily),
        mapping,
    )
}

/// Daily multi-asset panel: a core series plus five candidates, one of
/// which ("crypto") carries a clearly dominant mean return.
pub fn asset_panel(seed: u64) -> TimeSeriesPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4);
    let days = 601usize;
    let names = ["core", "metals", "ngas", "commodity", "reit", "crypto"];
    let drift = [0.0030, 0.0015, 0.0012, 0.0014, 0.0018, 0.0200];
    let spread = [0.010, 0.012, 0.015, 0.011, 0.013, 0.025];
    let returns: Vec<Vec<f64>> = (0..names.len())
        .map(|e| {
            (0..days - 1)
                .map(|_| drift[e] + rng.gen_range(-spread[e]..spread[e]))
                .collect()
        })
        .collect();
    let columns = levels_from_returns(&returns, 100.0);
    panel_from_columns(daily_dates("2016-01-04", days), &names, columns, Frequency::Daily)
}

/// Writes every fixture into `dir`.
pub fn write_fixtures(dir: &Path, seed: u64) -> CliResult<()> {
    write_panel_csv(&outlier_panel(seed), &dir.join("cpi_synth.csv"))?;
    write_panel_csv(&lagged_panel(), &dir.join("slopes_synth.csv"))?;
    let (driver, target) = robustness_panels(seed);
    write_panel_csv(&driver, &dir.join("robust_infl_synth.csv"))?;
    write_panel_csv(&target, &dir.join("robust_equity_synth.csv"))?;
    let (sectors, mapping) = sector_panel(seed);
    write_panel_csv(&sectors, &dir.join("sectors_synth.csv"))?;
    let mut writer = csv::Writer::from_path(dir.join(SECTOR_MAP_FIXTURE))?;
    writer.write_record(["entity", "sector"])?;
    for (entity, sector) in &mapping {
        writer.write_record([entity, sector])?;
    }
    writer.flush()?;
    write_panel_csv(&asset_panel(seed), &dir.join("assets_synth.csv"))?;
    Ok(())
}
