//! Distributional robustness of returns under extremes of a driver series.
//!
//! Months whose driver return falls in the top or bottom empirical decile
//! form an `extreme` sample and the remaining months a `stable` sample.
//! The distance between the two empirical distributions is the order-1
//! Wasserstein distance: the integral of the absolute difference of their
//! CDFs. A small distance means the return distribution barely changes
//! under extreme driver moves.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::Column;

/// Which conditioning regime a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeLabel {
    Extreme,
    Stable,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::Extreme => "extreme",
            RegimeLabel::Stable => "stable",
        }
    }
}

/// Sorted sample of real values treated as an empirical distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    pub label: RegimeLabel,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>, label: RegimeLabel) -> Result<EmpiricalDistribution> {
        if samples.is_empty() {
            return Err(Error::Invalid("empirical distribution needs samples".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite sample".into()));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples, label })
    }

    /// Samples in ascending order.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Robustness summary for one entity.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessScore {
    pub entity: String,
    /// Wasserstein distance between extreme- and stable-regime returns;
    /// lower means more robust.
    pub distance: f64,
    pub n_extreme: usize,
    pub n_stable: usize,
}

/// Linear-interpolation quantile of an ascending-sorted slice
/// (`h = (n - 1) p`).
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

const MIN_JOINT_OBSERVATIONS: usize = 20;

/// Splits `target` values into extreme and stable samples by the deciles
/// of the `driver` series.
///
/// Rows whose driver value lies at or below the 10th percentile or at or
/// above the 90th percentile (ties to extreme) contribute to the extreme
/// sample; everything else to the stable one. Both columns must share the
/// same dates.
pub fn split_by_inflation_deciles(
    driver: &Column,
    target: &Column,
) -> Result<(EmpiricalDistribution, EmpiricalDistribution)> {
    check_alignment(driver, target)?;
    let (lo_cut, hi_cut) = decile_cuts(&driver.values);
    let mut extreme = Vec::new();
    let mut stable = Vec::new();
    for (d, t) in driver.values.iter().zip(&target.values) {
        if *d <= lo_cut || *d >= hi_cut {
            extreme.push(*t);
        } else {
            stable.push(*t);
        }
    }
    if stable.is_empty() {
        return Err(Error::Domain(
            "driver deciles leave no stable observations".into(),
        ));
    }
    Ok((
        EmpiricalDistribution::new(extreme, RegimeLabel::Extreme)?,
        EmpiricalDistribution::new(stable, RegimeLabel::Stable)?,
    ))
}

fn check_alignment(driver: &Column, target: &Column) -> Result<()> {
    if driver.dates != target.dates {
        return Err(Error::Data(format!(
            "misaligned dates between '{}' and '{}'",
            driver.entity, target.entity
        )));
    }
    if driver.values.len() < MIN_JOINT_OBSERVATIONS {
        return Err(Error::Invalid(format!(
            "need at least {MIN_JOINT_OBSERVATIONS} joint observations, got {}",
            driver.values.len()
        )));
    }
    Ok(())
}

fn decile_cuts(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    (quantile_linear(&sorted, 0.1), quantile_linear(&sorted, 0.9))
}

/// Order-1 Wasserstein distance between two empirical distributions,
/// computed as the integral of `|F_p - F_q|` over the merged breakpoints.
pub fn wasserstein_1d(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> f64 {
    let a = p.samples();
    let b = q.samples();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if let Some(p0) = prev {
            total += (i as f64 / na - j as f64 / nb).abs() * (v - p0);
        }
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        prev = Some(v);
    }
    total
}

/// Decile split followed by the Wasserstein distance between the two
/// regimes.
pub fn equity_robustness(driver: &Column, target: &Column) -> Result<RobustnessScore> {
    let (extreme, stable) = split_by_inflation_deciles(driver, target)?;
    Ok(RobustnessScore {
        entity: target.entity.clone(),
        distance: wasserstein_1d(&stable, &extreme),
        n_extreme: extreme.len(),
        n_stable: stable.len(),
    })
}

/// Mean target return over top-decile driver rows minus the mean over
/// bottom-decile rows.
pub fn mean_return_discrepancy(driver: &Column, target: &Column) -> Result<f64> {
    check_alignment(driver, target)?;
    let (lo_cut, hi_cut) = decile_cuts(&driver.values);
    let mut top_sum = 0.0;
    let mut top_n = 0usize;
    let mut bottom_sum = 0.0;
    let mut bottom_n = 0usize;
    for (d, t) in driver.values.iter().zip(&target.values) {
        if *d >= hi_cut {
            top_sum += *t;
            top_n += 1;
        }
        if *d <= lo_cut {
            bottom_sum += *t;
            bottom_n += 1;
        }
    }
    debug_assert!(top_n > 0 && bottom_n > 0);
    Ok(top_sum / top_n as f64 - bottom_sum / bottom_n as f64)
}
