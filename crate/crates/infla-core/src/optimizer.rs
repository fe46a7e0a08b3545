//! Rolling constrained maximization of excess return over portfolio risk.
//!
//! The portfolio holds a fixed weight in its first (core) asset; the
//! remaining free weights live in per-asset boxes and must absorb the rest
//! of the budget, so the feasible set is a box-constrained simplex slice.
//! Each rolling window estimates mean returns and a sample covariance,
//! then projected-gradient ascent maximizes
//!
//! ```text
//! (w'mu - rf) / (w'Sigma w)        — the default, or
//! (w'mu - rf) / sqrt(w'Sigma w)    — the conventional ratio
//! ```
//!
//! over the feasible set. The solver is multi-start from deterministic
//! feasible points; rolling runs warm-start each window from the previous
//! solution, which the test suite verifies against cold starts.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::date::Date;
use crate::error::{Error, Result};
use crate::fp;
use crate::matrix::SquareMatrix;
use crate::panel::ReturnsPanel;

/// Denominator of the optimization ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Excess return over portfolio variance.
    #[default]
    Variance,
    /// Excess return over portfolio standard deviation.
    Stdev,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Variance => "variance",
            Objective::Stdev => "stdev",
        }
    }
}

impl core::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variance" => Ok(Objective::Variance),
            "stdev" => Ok(Objective::Stdev),
            other => Err(Error::Invalid(format!(
                "unknown objective '{other}' (expected 'variance' or 'stdev')"
            ))),
        }
    }
}

/// Assets, constraints and estimation parameters of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSpec {
    /// Asset names; the first is the core holding with a fixed weight.
    pub assets: Vec<String>,
    pub core_weight: f64,
    /// `[lo, hi]` bounds per free asset, aligned with `assets[1..]`.
    pub bounds: Vec<(f64, f64)>,
    pub risk_free: f64,
    pub window: usize,
    pub objective: Objective,
}

pub const DEFAULT_CORE_WEIGHT: f64 = 0.4;
pub const DEFAULT_BOUNDS: (f64, f64) = (0.025, 0.3);
pub const DEFAULT_RISK_FREE: f64 = 0.0025;
pub const DEFAULT_WINDOW: usize = 250;

impl PortfolioSpec {
    /// Validates bounds and overall feasibility:
    /// `core + sum(lo) <= 1 <= core + sum(hi)` and `0 <= lo <= hi`.
    pub fn new(
        assets: Vec<String>,
        core_weight: f64,
        bounds: Vec<(f64, f64)>,
        risk_free: f64,
        window: usize,
        objective: Objective,
    ) -> Result<PortfolioSpec> {
        if assets.len() < 2 {
            return Err(Error::Invalid("need a core asset plus at least one free asset".into()));
        }
        if bounds.len() != assets.len() - 1 {
            return Err(Error::Invalid(format!(
                "{} bounds for {} free assets",
                bounds.len(),
                assets.len() - 1
            )));
        }
        if !(0.0..=1.0).contains(&core_weight) {
            return Err(Error::Invalid(format!("core weight {core_weight} outside [0, 1]")));
        }
        let mut lo_sum = 0.0;
        let mut hi_sum = 0.0;
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(0.0 <= lo && lo <= hi) {
                return Err(Error::Invalid(format!(
                    "bad bounds [{lo}, {hi}] for free asset {}",
                    i + 1
                )));
            }
            lo_sum += lo;
            hi_sum += hi;
        }
        if core_weight + lo_sum > 1.0 || core_weight + hi_sum < 1.0 {
            return Err(Error::Invalid(format!(
                "infeasible constraints: core {core_weight} with free bounds summing to \
                 [{lo_sum}, {hi_sum}] cannot reach a total of 1"
            )));
        }
        if window < 2 {
            return Err(Error::Invalid("window must be at least 2".into()));
        }
        Ok(PortfolioSpec { assets, core_weight, bounds, risk_free, window, objective })
    }

    /// Spec with the default constraint set over the given assets.
    pub fn with_defaults(assets: Vec<String>) -> Result<PortfolioSpec> {
        let free = assets.len().saturating_sub(1);
        PortfolioSpec::new(
            assets,
            DEFAULT_CORE_WEIGHT,
            vec![DEFAULT_BOUNDS; free],
            DEFAULT_RISK_FREE,
            DEFAULT_WINDOW,
            Objective::Variance,
        )
    }

    /// Budget left for the free assets.
    pub fn free_total(&self) -> f64 {
        1.0 - self.core_weight
    }
}

/// Mean vector and sample covariance of one trailing window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowEstimates {
    pub mean: Vec<f64>,
    pub cov: SquareMatrix,
}

/// Time-indexed optimal weights with their objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTrajectory {
    pub assets: Vec<String>,
    /// Window-end dates, aligned with `weights`.
    pub dates: Vec<Date>,
    /// One full weight vector (core first) per window end.
    pub weights: Vec<Vec<f64>>,
    pub objectives: Vec<f64>,
}

/// Time mean and population variance of one asset's weight.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetWeightStats {
    pub asset: String,
    pub mean: f64,
    pub variance: f64,
}

pub type WeightStats = Vec<AssetWeightStats>;

/// One row of a core-weight sensitivity sweep; `stats` is `None` when the
/// core weight makes the constraint set infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub core_weight: f64,
    pub stats: Option<WeightStats>,
}

/// Sample mean and covariance (denominator `window - 1`) of the rows
/// `[end - window, end)`.
pub fn estimate_window(
    returns: &ReturnsPanel,
    end: usize,
    window: usize,
) -> Result<WindowEstimates> {
    if window < 2 {
        return Err(Error::Invalid("window must be at least 2".into()));
    }
    if end < window || end > returns.rows() {
        return Err(Error::Invalid(format!(
            "window end {end} needs {window} trailing rows within {} available",
            returns.rows()
        )));
    }
    let n = returns.n_entities();
    let start = end - window;
    let mut mean = vec![0.0; n];
    for t in start..end {
        for (i, m) in mean.iter_mut().enumerate() {
            *m += returns.value(t, i);
        }
    }
    for m in mean.iter_mut() {
        *m /= window as f64;
    }
    let mut cov = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut sum = 0.0;
            for t in start..end {
                sum += (returns.value(t, i) - mean[i]) * (returns.value(t, j) - mean[j]);
            }
            let v = sum / (window - 1) as f64;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok(WindowEstimates { mean, cov })
}

/// Ratio objective at a full weight vector.
pub fn portfolio_objective(
    weights: &[f64],
    mean: &[f64],
    cov: &SquareMatrix,
    risk_free: f64,
    objective: Objective,
) -> f64 {
    let excess: f64 = weights.iter().zip(mean).map(|(w, m)| w * m).sum::<f64>() - risk_free;
    let sw = cov.mul_vec(weights);
    let variance: f64 = weights.iter().zip(&sw).map(|(w, s)| w * s).sum();
    let denom = match objective {
        Objective::Variance => variance,
        Objective::Stdev => fp::sqrt(variance.max(0.0)),
    };
    excess / denom.max(1e-300)
}

/// Euclidean projection onto `{x : lo <= x <= hi, sum(x) = total}`.
///
/// Uses the exact breakpoint form of the KKT solution
/// `x_i = clamp(y_i - tau, lo_i, hi_i)` with `tau` chosen so the sum
/// matches. Requires `sum(lo) <= total <= sum(hi)`.
pub fn project_box_simplex(y: &[f64], bounds: &[(f64, f64)], total: f64) -> Result<Vec<f64>> {
    if y.len() != bounds.len() {
        return Err(Error::Invalid("point and bounds dimension mismatch".into()));
    }
    let lo_sum: f64 = bounds.iter().map(|b| b.0).sum();
    let hi_sum: f64 = bounds.iter().map(|b| b.1).sum();
    if total < lo_sum - 1e-12 || total > hi_sum + 1e-12 {
        return Err(Error::Invalid(format!(
            "total {total} outside the feasible sum range [{lo_sum}, {hi_sum}]"
        )));
    }
    let clamp_sum = |tau: f64| -> f64 {
        y.iter()
            .zip(bounds)
            .map(|(&yi, &(lo, hi))| (yi - tau).clamp(lo, hi))
            .sum()
    };
    let mut breakpoints: Vec<f64> = y
        .iter()
        .zip(bounds)
        .flat_map(|(&yi, &(lo, hi))| [yi - hi, yi - lo])
        .collect();
    breakpoints.sort_unstable_by(f64::total_cmp);

    // The sum is continuous, non-increasing and piecewise linear in tau,
    // running from sum(hi) at the first breakpoint to sum(lo) at the last.
    let mut tau = breakpoints[0];
    let mut prev_sum = clamp_sum(tau);
    for &b in &breakpoints[1..] {
        let s = clamp_sum(b);
        if s <= total {
            let span = b - tau;
            let drop = prev_sum - s;
            tau = if drop > 0.0 { tau + span * (prev_sum - total) / drop } else { tau };
            break;
        }
        tau = b;
        prev_sum = s;
    }
    Ok(y.iter()
        .zip(bounds)
        .map(|(&yi, &(lo, hi))| (yi - tau).clamp(lo, hi))
        .collect())
}

const STALL_LIMIT: usize = 50;
const STALL_REL_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 5_000;
const BACKTRACK_LIMIT: usize = 60;

struct Problem<'a> {
    mean: &'a [f64],
    cov_reg: SquareMatrix,
    spec: &'a PortfolioSpec,
}

impl Problem<'_> {
    fn full(&self, free: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(free.len() + 1);
        w.push(self.spec.core_weight);
        w.extend_from_slice(free);
        w
    }

    fn value(&self, free: &[f64]) -> f64 {
        portfolio_objective(
            &self.full(free),
            self.mean,
            &self.cov_reg,
            self.spec.risk_free,
            self.spec.objective,
        )
    }

    /// Gradient of the ratio with respect to the free weights.
    fn gradient(&self, free: &[f64]) -> Vec<f64> {
        let w = self.full(free);
        let excess: f64 =
            w.iter().zip(self.mean).map(|(wi, m)| wi * m).sum::<f64>() - self.spec.risk_free;
        let sw = self.cov_reg.mul_vec(&w);
        let variance: f64 = w.iter().zip(&sw).map(|(wi, s)| wi * s).sum::<f64>().max(1e-300);
        match self.spec.objective {
            Objective::Variance => (1..w.len())
                .map(|i| (self.mean[i] * variance - excess * 2.0 * sw[i]) / (variance * variance))
                .collect(),
            Objective::Stdev => {
                let sd = fp::sqrt(variance);
                (1..w.len())
                    .map(|i| self.mean[i] / sd - excess * sw[i] / (variance * sd))
                    .collect()
            }
        }
    }
}

/// Maximizes the ratio objective over the feasible set.
///
/// Projected-gradient ascent from five deterministic feasible starts;
/// ascent stops once the relative objective improvement stays below
/// 1e-10 for 50 iterations. Returns the full weight vector, core first.
pub fn solve_weights(est: &WindowEstimates, spec: &PortfolioSpec) -> Result<Vec<f64>> {
    let problem = build_problem(est, spec)?;
    let starts = default_starts(est, spec)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let (value, free) = ascend(&problem, start, spec)?;
        if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
            best = Some((value, free));
        }
    }
    let (_, free) = best.expect("at least one start");
    Ok(problem.full(&free))
}

fn build_problem<'a>(est: &'a WindowEstimates, spec: &'a PortfolioSpec) -> Result<Problem<'a>> {
    let n = spec.assets.len();
    if est.mean.len() != n || est.cov.n() != n {
        return Err(Error::Invalid(format!(
            "estimates cover {} assets, spec has {n}",
            est.mean.len()
        )));
    }
    if !est.cov.is_symmetric(1e-9) {
        return Err(Error::Invalid("covariance matrix is asymmetric".into()));
    }
    let scale = (0..n).map(|i| est.cov.get(i, i).abs()).fold(1.0f64, f64::max);
    if !cholesky_succeeds(&est.cov, 1e-10 * scale) {
        return Err(Error::Invalid(
            "covariance matrix is not positive semidefinite within tolerance".into(),
        ));
    }
    // Ridge keeps the denominator strictly positive on singular input.
    let trace = est.cov.trace();
    let eps = if trace > 0.0 { 1e-10 * trace / n as f64 } else { 1e-18 };
    let mut cov_reg = est.cov.clone();
    for i in 0..n {
        cov_reg.set(i, i, cov_reg.get(i, i) + eps);
    }
    Ok(Problem { mean: &est.mean, cov_reg, spec })
}

/// Cholesky feasibility of `m + shift I`; the cheap PSD test.
fn cholesky_succeeds(m: &SquareMatrix, shift: f64) -> bool {
    let n = m.n();
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        let mut d = m.get(j, j) + shift;
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= 0.0 {
            return false;
        }
        let root = fp::sqrt(d);
        l.set(j, j, root);
        for i in (j + 1)..n {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / root);
        }
    }
    true
}

fn default_starts(est: &WindowEstimates, spec: &PortfolioSpec) -> Result<Vec<Vec<f64>>> {
    let free = spec.assets.len() - 1;
    let total = spec.free_total();
    let lo_sum: f64 = spec.bounds.iter().map(|b| b.0).sum();

    let equal = vec![total / free as f64; free];
    let at_lo: Vec<f64> = spec.bounds.iter().map(|b| b.0).collect();
    let at_hi: Vec<f64> = spec.bounds.iter().map(|b| b.1).collect();
    let best_mean = (0..free)
        .max_by(|&a, &b| est.mean[a + 1].total_cmp(&est.mean[b + 1]))
        .unwrap_or(0);
    let tilted: Vec<f64> = (0..free)
        .map(|i| spec.bounds[i].0 + if i == best_mean { total - lo_sum } else { 0.0 })
        .collect();
    let inv_var: Vec<f64> = {
        let raw: Vec<f64> = (1..=free).map(|i| 1.0 / est.cov.get(i, i).max(1e-18)).collect();
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|r| total * r / sum).collect()
    };

    [equal, at_lo, at_hi, tilted, inv_var]
        .into_iter()
        .map(|y| project_box_simplex(&y, &spec.bounds, total))
        .collect()
}

fn ascend(problem: &Problem<'_>, start: Vec<f64>, spec: &PortfolioSpec) -> Result<(f64, Vec<f64>)> {
    let total = spec.free_total();
    let mut v = start;
    let mut value = problem.value(&v);
    let mut step = {
        let g = problem.gradient(&v);
        let norm = fp::sqrt(g.iter().map(|x| x * x).sum::<f64>());
        if norm > 0.0 { total.max(1e-3) / norm } else { 1.0 }
    };
    let mut stall = 0usize;
    let mut dead_ends = 0usize;
    for _ in 0..MAX_ITERATIONS {
        let g = problem.gradient(&v);
        let mut alpha = step;
        let mut improved = false;
        for _ in 0..BACKTRACK_LIMIT {
            let target: Vec<f64> = v.iter().zip(&g).map(|(x, gi)| x + alpha * gi).collect();
            let cand = project_box_simplex(&target, &spec.bounds, total)?;
            let cand_value = problem.value(&cand);
            if cand_value > value {
                let rel = (cand_value - value) / value.abs().max(1e-30);
                stall = if rel < STALL_REL_TOL { stall + 1 } else { 0 };
                value = cand_value;
                v = cand;
                step = alpha * 1.5;
                improved = true;
                dead_ends = 0;
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            dead_ends += 1;
            stall += 1;
            if dead_ends >= 2 {
                break;
            }
        }
        if stall >= STALL_LIMIT {
            break;
        }
    }
    Ok((value, v))
}

/// Warm-started internal solve: ascend from `warm` alone.
fn solve_from(est: &WindowEstimates, spec: &PortfolioSpec, warm: &[f64]) -> Result<Vec<f64>> {
    let problem = build_problem(est, spec)?;
    let start = project_box_simplex(warm, &spec.bounds, spec.free_total())?;
    let (_, free) = ascend(&problem, start, spec)?;
    Ok(problem.full(&free))
}

/// Optimizes every trailing window, warm-starting each solve from the
/// previous window's solution.
pub fn rolling_optimize(returns: &ReturnsPanel, spec: &PortfolioSpec) -> Result<WeightTrajectory> {
    rolling_impl(returns, spec, false)
}

/// [`rolling_optimize`] with a fresh multi-start solve in every window;
/// windows are then independent of each other.
pub fn rolling_optimize_cold(
    returns: &ReturnsPanel,
    spec: &PortfolioSpec,
) -> Result<WeightTrajectory> {
    rolling_impl(returns, spec, true)
}

fn rolling_impl(
    returns: &ReturnsPanel,
    spec: &PortfolioSpec,
    cold_start: bool,
) -> Result<WeightTrajectory> {
    let window = spec.window;
    let rows = returns.rows();
    if rows < window {
        return Err(Error::Invalid(format!(
            "{rows} return rows cannot fill a {window}-row window"
        )));
    }
    let cols: Vec<usize> = spec
        .assets
        .iter()
        .map(|a| returns.entity_index(a))
        .collect::<Result<_>>()?;
    let aligned = align_panel(returns, &cols)?;

    let mut dates = Vec::with_capacity(rows - window + 1);
    let mut weights = Vec::with_capacity(rows - window + 1);
    let mut objectives = Vec::with_capacity(rows - window + 1);
    let mut prev_free: Option<Vec<f64>> = None;
    for end in window..=rows {
        let est = estimate_window(&aligned, end, window)?;
        let w = match (&prev_free, cold_start) {
            (Some(warm), false) => solve_from(&est, spec, warm)?,
            _ => solve_weights(&est, spec)?,
        };
        objectives.push(portfolio_objective(
            &w,
            &est.mean,
            &est.cov,
            spec.risk_free,
            spec.objective,
        ));
        prev_free = Some(w[1..].to_vec());
        dates.push(aligned.dates()[end - 1]);
        weights.push(w);
    }
    Ok(WeightTrajectory { assets: spec.assets.clone(), dates, weights, objectives })
}

/// Reorders panel columns to the portfolio's asset order.
fn align_panel(returns: &ReturnsPanel, cols: &[usize]) -> Result<ReturnsPanel> {
    let rows = returns.rows();
    let mut values = Vec::with_capacity(rows * cols.len());
    for t in 0..rows {
        for &c in cols {
            values.push(returns.value(t, c));
        }
    }
    let entities = cols
        .iter()
        .map(|&c| returns.entities()[c].clone())
        .collect();
    ReturnsPanel::new(returns.dates().to_vec(), entities, values, returns.frequency())
}

/// Per-asset time mean and population variance of the weight trajectory.
pub fn weight_stats(traj: &WeightTrajectory) -> Result<WeightStats> {
    let steps = traj.weights.len();
    if steps == 0 {
        return Err(Error::Invalid("empty weight trajectory".into()));
    }
    Ok(traj
        .assets
        .iter()
        .enumerate()
        .map(|(i, asset)| {
            let mean = traj.weights.iter().map(|w| w[i]).sum::<f64>() / steps as f64;
            let variance = traj
                .weights
                .iter()
                .map(|w| (w[i] - mean) * (w[i] - mean))
                .sum::<f64>()
                / steps as f64;
            AssetWeightStats { asset: asset.clone(), mean, variance }
        })
        .collect())
}

/// Reruns the rolling optimization under each candidate core weight.
///
/// Core weights that make the constraint set infeasible yield a row with
/// `stats: None` instead of stopping the sweep.
pub fn sensitivity_sweep(
    returns: &ReturnsPanel,
    spec: &PortfolioSpec,
    core_weights: &[f64],
) -> Result<Vec<SweepRow>> {
    if core_weights.is_empty() {
        return Err(Error::Invalid("sweep needs at least one core weight".into()));
    }
    let mut rows = Vec::with_capacity(core_weights.len());
    for &cw in core_weights {
        let candidate = PortfolioSpec::new(
            spec.assets.clone(),
            cw,
            spec.bounds.clone(),
            spec.risk_free,
            spec.window,
            spec.objective,
        );
        let stats = match candidate {
            Ok(sub_spec) => Some(weight_stats(&rolling_optimize(returns, &sub_spec)?)?),
            Err(_) => None,
        };
        rows.push(SweepRow { core_weight: cw, stats });
    }
    Ok(rows)
}
