//! Verifies the rolling mean correlation against an independent oracle
//! that goes through the full covariance matrix of each window.

use infla_core::sectorcorr::{average_sector_correlation, rolling_correlation, SectorMap};
use infla_core::{Date, Frequency, ReturnsPanel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn daily_panel(columns: &[(&str, Vec<f64>)]) -> ReturnsPanel {
    let rows = columns[0].1.len();
    let mut d = Date::parse("2005-01-03").unwrap();
    let dates: Vec<Date> = (0..rows)
        .map(|_| {
            let cur = d;
            d = d.next_day();
            cur
        })
        .collect();
    let entities: Vec<String> = columns.iter().map(|(e, _)| e.to_string()).collect();
    let mut values = Vec::new();
    for t in 0..rows {
        for (_, col) in columns {
            values.push(col[t]);
        }
    }
    ReturnsPanel::new(dates, entities, values, Frequency::Daily).unwrap()
}

/// Two-pass covariance matrix of one window, then correlations, then the
/// mean of the upper triangle.
fn covariance_route_mean(window_rows: &[Vec<f64>]) -> f64 {
    let members = window_rows[0].len();
    let rows = window_rows.len() as f64;
    let means: Vec<f64> = (0..members)
        .map(|i| window_rows.iter().map(|r| r[i]).sum::<f64>() / rows)
        .collect();
    let mut cov = vec![vec![0.0; members]; members];
    for (i, cov_row) in cov.iter_mut().enumerate() {
        for (j, out) in cov_row.iter_mut().enumerate() {
            *out = window_rows
                .iter()
                .map(|r| (r[i] - means[i]) * (r[j] - means[j]))
                .sum::<f64>()
                / (rows - 1.0);
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..members {
        for j in (i + 1)..members {
            sum += cov[i][j] / (cov[i][i].sqrt() * cov[j][j].sqrt());
            count += 1;
        }
    }
    sum / count as f64
}

#[test]
fn rolling_mean_matches_covariance_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let rows = 200usize;
    let window = 120usize;
    let columns: Vec<(&str, Vec<f64>)> = ["p", "q", "r", "s", "t"]
        .iter()
        .map(|name| {
            let series: Vec<f64> = (0..rows).map(|_| rng.gen_range(-0.03..0.03)).collect();
            (*name, series)
        })
        .collect();
    let returns = daily_panel(&columns);
    let map = SectorMap::from_pairs(
        ["p", "q", "r", "s", "t"]
            .iter()
            .map(|e| (e.to_string(), "sector".to_string())),
    )
    .unwrap();
    let rc = rolling_correlation(&returns, &map, "sector", window).unwrap();
    assert_eq!(rc.mean_offdiag.len(), rows - window + 1);
    for (idx, got) in rc.mean_offdiag.iter().enumerate() {
        let window_rows: Vec<Vec<f64>> = (idx..idx + window)
            .map(|t| columns.iter().map(|(_, c)| c[t]).collect())
            .collect();
        let expected = covariance_route_mean(&window_rows);
        assert!((got - expected).abs() < 1e-12, "window {idx}: {got} vs {expected}");
    }
}

#[test]
fn full_range_average_equals_mean_of_window_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let rows = 150usize;
    let columns: Vec<(&str, Vec<f64>)> = ["x", "y", "z"]
        .iter()
        .map(|name| {
            let series: Vec<f64> = (0..rows).map(|_| rng.gen_range(-0.02..0.02)).collect();
            (*name, series)
        })
        .collect();
    let returns = daily_panel(&columns);
    let map = SectorMap::from_pairs(
        ["x", "y", "z"]
            .iter()
            .map(|e| (e.to_string(), "g".to_string())),
    )
    .unwrap();
    let rc = rolling_correlation(&returns, &map, "g", 60).unwrap();
    let avg =
        average_sector_correlation(&rc, rc.dates[0], *rc.dates.last().unwrap()).unwrap();
    let direct = rc.mean_offdiag.iter().sum::<f64>() / rc.mean_offdiag.len() as f64;
    assert!((avg.mean_correlation - direct).abs() < 1e-12);
    assert_eq!(avg.n_windows, rc.mean_offdiag.len());
}

#[test]
fn affine_transforms_leave_the_mean_untouched() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let rows = 160usize;
    let base: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..rows).map(|_| rng.gen_range(-0.02..0.02)).collect())
        .collect();
    let original: Vec<(&str, Vec<f64>)> = [("a", 0), ("b", 1), ("c", 2), ("d", 3)]
        .iter()
        .map(|&(n, i)| (n, base[i].clone()))
        .collect();
    // positive affine transform of one member, with a large offset that
    // would break a naive uncentered computation
    let transformed: Vec<(&str, Vec<f64>)> = [("a", 0), ("b", 1), ("c", 2), ("d", 3)]
        .iter()
        .map(|&(n, i)| {
            if i == 2 {
                (n, base[i].iter().map(|v| 3.5 * v + 5.0).collect())
            } else {
                (n, base[i].clone())
            }
        })
        .collect();
    let map = SectorMap::from_pairs(
        ["a", "b", "c", "d"]
            .iter()
            .map(|e| (e.to_string(), "g".to_string())),
    )
    .unwrap();
    let rc0 = rolling_correlation(&daily_panel(&original), &map, "g", 40).unwrap();
    let rc1 = rolling_correlation(&daily_panel(&transformed), &map, "g", 40).unwrap();
    for (a, b) in rc0.mean_offdiag.iter().zip(&rc1.mean_offdiag) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn per_window_bounds_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let rows = 140usize;
    let columns: Vec<(&str, Vec<f64>)> = ["m", "n", "o"]
        .iter()
        .map(|name| {
            let series: Vec<f64> = (0..rows).map(|_| rng.gen_range(-0.05..0.05)).collect();
            (*name, series)
        })
        .collect();
    let returns = daily_panel(&columns);
    let map = SectorMap::from_pairs(
        ["m", "n", "o"]
            .iter()
            .map(|e| (e.to_string(), "g".to_string())),
    )
    .unwrap();
    let rc = rolling_correlation(&returns, &map, "g", 30).unwrap();
    for v in &rc.mean_offdiag {
        assert!((-1.0 - 1e-10..=1.0 + 1e-10).contains(v));
    }
}
