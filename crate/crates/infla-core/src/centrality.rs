//! Lead-lag centrality of return trends.
//!
//! Each entity's return series is summarized by the slope of an ordinary
//! least-squares fit against the time index over a rolling window, giving
//! a trend trajectory. For every pair of trajectories an integer offset is
//! found that maximizes the normalized inner product of the overlapping
//! segments, so a positive offset means the first series leads the second.
//! Summing offset magnitudes per entity scores how well aligned each
//! entity is with the whole collection: the lower the sum, the more
//! central the entity.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::date::Date;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::fp;
use crate::matrix::SquareMatrix;
use crate::panel::ReturnsPanel;

/// Ordinary least-squares fit of a series against its time index.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    /// Level at the window's first observation.
    pub intercept: f64,
    /// Trend per time step.
    pub slope: f64,
    pub residuals: Vec<f64>,
    /// Inclusive `(start, end)` row span the fit covers.
    pub window: (usize, usize),
}

/// Per-entity series of rolling-regression slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeTrajectory {
    pub entity: String,
    pub window: usize,
    /// Window-end dates, aligned with `values`.
    pub dates: Vec<Date>,
    pub values: Vec<f64>,
}

/// Offset maximizing the normalized inner product of two trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetResult {
    /// Positive when the first series leads the second.
    pub offset: i64,
    /// Normalized inner product at that offset, in `[-1, 1]`.
    pub score: f64,
}

/// Pairwise offset magnitudes and their per-entity sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    /// `offsets[i][j]` holds `|offset*|` for the pair `(i, j)`.
    pub offsets: DistanceMatrix,
    /// Column sums of `offsets`; lower means more central.
    pub scores: Vec<f64>,
}

/// Fits `values ~ intercept + slope * index` by least squares.
///
/// `start_index` only labels the returned window span.
pub fn trend_fit(values: &[f64], start_index: usize) -> Result<RegressionFit> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Invalid("trend fit needs at least 2 observations".into()));
    }
    let slope = trend_slope(values);
    let mean_t = (n - 1) as f64 / 2.0;
    let mean_y = values.iter().sum::<f64>() / n as f64;
    let intercept = mean_y - slope * mean_t;
    let residuals = values
        .iter()
        .enumerate()
        .map(|(s, &y)| y - intercept - slope * s as f64)
        .collect();
    Ok(RegressionFit {
        intercept,
        slope,
        residuals,
        window: (start_index, start_index + n - 1),
    })
}

/// Closed-form OLS slope of `values` against `0..len`.
fn trend_slope(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean_t = (n - 1.0) / 2.0;
    let mean_y = values.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (s, &y) in values.iter().enumerate() {
        let dt = s as f64 - mean_t;
        sxy += dt * (y - mean_y);
        sxx += dt * dt;
    }
    sxy / sxx
}

/// Rolling OLS trend slope of one entity's returns.
///
/// A slope is emitted at every row with a full trailing window, so the
/// trajectory has `rows - window + 1` values stamped with window-end
/// dates.
pub fn rolling_slope(
    returns: &ReturnsPanel,
    entity: &str,
    window: usize,
) -> Result<SlopeTrajectory> {
    let rows = returns.rows();
    if window < 3 {
        return Err(Error::Invalid(format!("window {window} too small, need >= 3")));
    }
    if window > rows {
        return Err(Error::Invalid(format!(
            "window {window} exceeds the {rows} available return rows"
        )));
    }
    let i = returns.entity_index(entity)?;
    let series: Vec<f64> = (0..rows).map(|t| returns.value(t, i)).collect();
    let mut values = Vec::with_capacity(rows - window + 1);
    let mut dates = Vec::with_capacity(rows - window + 1);
    for end in window..=rows {
        values.push(trend_slope(&series[end - window..end]));
        dates.push(returns.dates()[end - 1]);
    }
    Ok(SlopeTrajectory { entity: String::from(entity), window, dates, values })
}

/// Exhaustive search for the offset in `[-max_offset, +max_offset]`
/// maximizing the normalized inner product of the overlapping segments.
///
/// For offset `p >= 0` the head of `a` is paired with the tail of `b`
/// (`a` leads); for `p < 0` the roles swap. Offsets whose overlap has a
/// zero-norm segment are skipped. Ties go to the smallest `|offset|`,
/// then to the negative sign.
pub fn optimal_offset(
    a: &SlopeTrajectory,
    b: &SlopeTrajectory,
    max_offset: usize,
) -> Result<OffsetResult> {
    if a.values.len() != b.values.len() {
        return Err(Error::Invalid(format!(
            "trajectory lengths differ: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let len = a.values.len();
    if 2 * max_offset >= len {
        return Err(Error::Invalid(format!(
            "max offset {max_offset} too large for trajectories of length {len}"
        )));
    }
    let mut best: Option<OffsetResult> = None;
    for offset in -(max_offset as i64)..=(max_offset as i64) {
        let score = match shifted_cosine(&a.values, &b.values, offset) {
            Some(s) => s,
            None => continue,
        };
        let replace = match &best {
            None => true,
            Some(cur) => {
                score > cur.score
                    || (score == cur.score
                        && (offset.abs() < cur.offset.abs()
                            || (offset.abs() == cur.offset.abs() && offset < cur.offset)))
            }
        };
        if replace {
            best = Some(OffsetResult { offset, score });
        }
    }
    best.ok_or_else(|| {
        Error::Domain("degenerate trajectories: every offset has a zero-norm overlap".into())
    })
}

/// Normalized inner product of the overlap of `a` and `b` at `offset`.
/// `None` when either overlapping segment has zero norm.
fn shifted_cosine(a: &[f64], b: &[f64], offset: i64) -> Option<f64> {
    let len = a.len();
    let shift = offset.unsigned_abs() as usize;
    let (lead, lag) = if offset >= 0 { (a, b) } else { (b, a) };
    // lead(0..len-shift) pairs with lag(shift..len)
    let head = &lead[..len - shift];
    let tail = &lag[shift..];
    let mut dot = 0.0;
    let mut nh = 0.0;
    let mut nt = 0.0;
    for (x, y) in head.iter().zip(tail) {
        dot += x * y;
        nh += x * x;
        nt += y * y;
    }
    if nh == 0.0 || nt == 0.0 {
        return None;
    }
    Some(dot / (fp::sqrt(nh) * fp::sqrt(nt)))
}

/// Builds the pairwise `|offset*|` matrix and its per-entity sums.
pub fn centrality_report(
    trajectories: &[SlopeTrajectory],
    max_offset: usize,
) -> Result<CentralityReport> {
    let n = trajectories.len();
    if n < 2 {
        return Err(Error::Invalid("need at least 2 trajectories".into()));
    }
    let window = trajectories[0].window;
    let len = trajectories[0].values.len();
    for t in trajectories {
        if t.window != window || t.values.len() != len {
            return Err(Error::Invalid(format!(
                "trajectory '{}' does not match window {window} / length {len}",
                t.entity
            )));
        }
    }
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = optimal_offset(&trajectories[i], &trajectories[j], max_offset)?;
            let magnitude = r.offset.unsigned_abs() as f64;
            m.set(i, j, magnitude);
            m.set(j, i, magnitude);
        }
    }
    let scores = (0..n).map(|j| (0..n).map(|i| m.get(i, j)).sum()).collect();
    let entities = trajectories.iter().map(|t| t.entity.clone()).collect();
    Ok(CentralityReport { offsets: DistanceMatrix::new(entities, m)?, scores })
}

/// Runs an independent centrality report on each side of `split`.
///
/// Rows dated strictly before `split` form the first partition, the rest
/// the second; each partition must be longer than the window.
pub fn partitioned_centrality(
    returns: &ReturnsPanel,
    split: Date,
    window: usize,
    max_offset: usize,
) -> Result<(CentralityReport, CentralityReport)> {
    let first = returns.dates().first().expect("panel is nonempty");
    let last = returns.dates().last().expect("panel is nonempty");
    if split <= *first || split > *last {
        return Err(Error::Invalid(format!(
            "split date {split} outside the panel range {first}..{last}"
        )));
    }
    let head = returns.slice_dates(None, Some(split))?;
    let tail = returns.slice_dates(Some(split), None)?;
    for (name, part) in [("first", &head), ("second", &tail)] {
        if part.rows() <= window {
            return Err(Error::Invalid(format!(
                "{name} partition has {} rows, need more than the window {window}",
                part.rows()
            )));
        }
    }
    Ok((
        report_for_panel(&head, window, max_offset)?,
        report_for_panel(&tail, window, max_offset)?,
    ))
}

fn report_for_panel(
    returns: &ReturnsPanel,
    window: usize,
    max_offset: usize,
) -> Result<CentralityReport> {
    let trajectories: Vec<SlopeTrajectory> = returns
        .entities()
        .iter()
        .map(|e| rolling_slope(returns, e, window))
        .collect::<Result<_>>()?;
    centrality_report(&trajectories, max_offset)
}
