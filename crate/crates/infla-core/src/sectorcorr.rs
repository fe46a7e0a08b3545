//! Rolling mean pairwise correlation within entity groups.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::date::Date;
use crate::error::{Error, Result};
use crate::fp;
use crate::panel::ReturnsPanel;

/// Assignment of entities to named groups (sectors).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMap {
    map: BTreeMap<String, String>,
}

impl SectorMap {
    /// Builds a map from `(entity, sector)` pairs; duplicate entities are
    /// rejected.
    pub fn from_pairs<I>(pairs: I) -> Result<SectorMap>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut map = BTreeMap::new();
        for (entity, sector) in pairs {
            if map.insert(entity.clone(), sector).is_some() {
                return Err(Error::Data(format!("entity '{entity}' mapped twice")));
            }
        }
        if map.is_empty() {
            return Err(Error::Data("sector map is empty".into()));
        }
        Ok(SectorMap { map })
    }

    pub fn sector_of(&self, entity: &str) -> Option<&str> {
        self.map.get(entity).map(String::as_str)
    }

    /// Sector names in lexicographic order.
    pub fn sectors(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.map.values().collect();
        set.into_iter().cloned().collect()
    }

    /// Entities of one sector in lexicographic order.
    pub fn members(&self, sector: &str) -> Vec<String> {
        self.map
            .iter()
            .filter(|(_, s)| s.as_str() == sector)
            .map(|(e, _)| e.clone())
            .collect()
    }
}

/// Mean upper-triangle correlation of one sector per rolling window end.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingCorrelation {
    pub sector: String,
    /// Number of member entities contributing pairs.
    pub members: usize,
    /// Window-end dates, aligned with `mean_offdiag`.
    pub dates: Vec<Date>,
    pub mean_offdiag: Vec<f64>,
    /// Pairs dropped because a member had zero variance in some window.
    pub dropped_pairs: usize,
    /// Window ends dropped because no pair was defined.
    pub dropped_windows: usize,
}

/// Time average of a sector's rolling mean correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorAverage {
    pub sector: String,
    pub mean_correlation: f64,
    pub n_windows: usize,
}

/// Rolling mean pairwise Pearson correlation of a sector's members.
///
/// A value is emitted at every row with a full trailing window. Pairs
/// involving a zero-variance member in a window are excluded from that
/// window's mean rather than propagating NaN; a window where every pair
/// is undefined is dropped.
pub fn rolling_correlation(
    returns: &ReturnsPanel,
    sector_map: &SectorMap,
    sector: &str,
    window: usize,
) -> Result<RollingCorrelation> {
    let members = sector_map.members(sector);
    if members.len() < 2 {
        return Err(Error::Invalid(format!(
            "sector '{sector}' has {} member(s), need at least 2 for correlation",
            members.len()
        )));
    }
    if window < 2 {
        return Err(Error::Invalid("window must be at least 2".into()));
    }
    let rows = returns.rows();
    if window > rows {
        return Err(Error::Invalid(format!(
            "window {window} exceeds the {rows} available return rows"
        )));
    }
    let cols: Vec<usize> = members
        .iter()
        .map(|e| returns.entity_index(e))
        .collect::<Result<_>>()?;

    let mut dates = Vec::new();
    let mut mean_offdiag = Vec::new();
    let mut dropped_pairs = 0usize;
    let mut dropped_windows = 0usize;
    let mut series: Vec<Vec<f64>> = alloc::vec![Vec::with_capacity(window); cols.len()];
    for end in window..=rows {
        for (slot, &col) in series.iter_mut().zip(&cols) {
            slot.clear();
            slot.extend((end - window..end).map(|t| returns.value(t, col)));
        }
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..series.len() {
            for j in (i + 1)..series.len() {
                match pearson(&series[i], &series[j]) {
                    Some(r) => {
                        sum += r;
                        pairs += 1;
                    }
                    None => dropped_pairs += 1,
                }
            }
        }
        if pairs == 0 {
            dropped_windows += 1;
            continue;
        }
        dates.push(returns.dates()[end - 1]);
        mean_offdiag.push(sum / pairs as f64);
    }
    if mean_offdiag.is_empty() {
        return Err(Error::Domain(format!(
            "sector '{sector}' has no window with a defined correlation"
        )));
    }
    Ok(RollingCorrelation {
        sector: String::from(sector),
        members: members.len(),
        dates,
        mean_offdiag,
        dropped_pairs,
        dropped_windows,
    })
}

/// Two-pass Pearson correlation; `None` when either series has zero
/// variance.
fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (fp::sqrt(sxx) * fp::sqrt(syy)))
}

/// Averages `mean_offdiag` over window ends within `[from, to]`.
pub fn average_sector_correlation(
    rc: &RollingCorrelation,
    from: Date,
    to: Date,
) -> Result<SectorAverage> {
    if from > to {
        return Err(Error::Invalid(format!("empty date range {from}..{to}")));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (d, v) in rc.dates.iter().zip(&rc.mean_offdiag) {
        if *d >= from && *d <= to {
            sum += v;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Invalid(format!(
            "no window ends of sector '{}' fall in {from}..{to}",
            rc.sector
        )));
    }
    Ok(SectorAverage {
        sector: rc.sector.clone(),
        mean_correlation: sum / count as f64,
        n_windows: count,
    })
}
