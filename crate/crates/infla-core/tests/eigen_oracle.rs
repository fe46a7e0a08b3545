//! Cross-checks the Jacobi eigendecomposition against an independently
//! coded shifted-QR eigenvalue solver, plus the spectral properties the
//! decomposition must satisfy.

#![allow(clippy::needless_range_loop)]

use infla_core::matrix::SquareMatrix;
use infla_core::spectrum::{eigen_decompose, operator_norm, similarity_count};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng, scale: f64) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-scale..scale);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Eigenvalues by explicit QR iteration with a Wilkinson shift and
/// deflation. Givens rotations factor the active block, then the factors
/// are remultiplied in reverse order; no code is shared with the Jacobi
/// path under test.
fn qr_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let n = m.n();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let scale = m.frobenius_norm().max(1e-300);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut active = n;
    let mut iterations = 0usize;
    while active > 0 {
        if active == 1 {
            eigenvalues.push(a[0][0]);
            break;
        }
        let last_row_small = (0..active - 1)
            .all(|k| a[active - 1][k].abs() <= 1e-13 * scale);
        if last_row_small {
            eigenvalues.push(a[active - 1][active - 1]);
            active -= 1;
            continue;
        }
        let d = (a[active - 2][active - 2] - a[active - 1][active - 1]) / 2.0;
        let b = a[active - 1][active - 2];
        let shift = if d == 0.0 {
            a[active - 1][active - 1] - b.abs()
        } else {
            a[active - 1][active - 1] - b * b / (d + d.signum() * (d * d + b * b).sqrt())
        };
        qr_step(&mut a, active, shift);
        iterations += 1;
        assert!(iterations < 50_000, "QR oracle failed to converge");
    }
    eigenvalues
}

fn qr_step(a: &mut [Vec<f64>], m: usize, shift: f64) {
    for i in 0..m {
        a[i][i] -= shift;
    }
    let mut rotations: Vec<(usize, usize, f64, f64)> = Vec::new();
    for j in 0..m - 1 {
        for i in j + 1..m {
            let (ajj, aij) = (a[j][j], a[i][j]);
            if aij == 0.0 {
                continue;
            }
            let r = (ajj * ajj + aij * aij).sqrt();
            let (c, s) = (ajj / r, aij / r);
            for k in 0..m {
                let (t1, t2) = (a[j][k], a[i][k]);
                a[j][k] = c * t1 + s * t2;
                a[i][k] = -s * t1 + c * t2;
            }
            rotations.push((j, i, c, s));
        }
    }
    for &(j, i, c, s) in &rotations {
        for row in a.iter_mut().take(m) {
            let (t1, t2) = (row[j], row[i]);
            row[j] = c * t1 + s * t2;
            row[i] = -s * t1 + c * t2;
        }
    }
    for i in 0..m {
        a[i][i] += shift;
    }
}

#[test]
fn jacobi_matches_qr_oracle_on_random_symmetric_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let m = random_symmetric(8, &mut rng, 3.0);
        let spectrum = eigen_decompose(&m).unwrap();
        let mut jacobi = spectrum.eigenvalues.clone();
        jacobi.sort_by(f64::total_cmp);
        let mut oracle = qr_eigenvalues(&m);
        oracle.sort_by(f64::total_cmp);
        for (a, b) in jacobi.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "jacobi {a} vs oracle {b}");
        }
    }
}

#[test]
fn reconstruction_and_orthogonality_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let m = random_symmetric(8, &mut rng, 2.0);
        let spectrum = eigen_decompose(&m).unwrap();
        assert!(spectrum.orthogonality_defect() < 1e-10);
        assert!(spectrum.reconstruction_defect(&m) < 1e-10);
    }
}

#[test]
fn operator_norm_matches_largest_abs_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let m = random_symmetric(8, &mut rng, 5.0);
        let spectrum = eigen_decompose(&m).unwrap();
        let largest = spectrum.spectral_radius();
        let norm = operator_norm(&m);
        assert!(
            (largest - norm).abs() < 1e-8,
            "spectral radius {largest} vs power iteration {norm}"
        );
    }
}

#[test]
fn eigenvalues_scale_linearly() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let m = random_symmetric(6, &mut rng, 1.0);
    let c = 3.25;
    let scaled = eigen_decompose(&m.scaled(c)).unwrap();
    let base = eigen_decompose(&m).unwrap();
    // |c| > 1 preserves the |eigenvalue| ordering
    for (a, b) in scaled.eigenvalues.iter().zip(&base.eigenvalues) {
        assert!((a - c * b).abs() < 1e-10);
    }
}

#[test]
fn trace_is_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let m = random_symmetric(7, &mut rng, 2.0);
        let spectrum = eigen_decompose(&m).unwrap();
        let sum: f64 = spectrum.eigenvalues.iter().sum();
        assert!((sum - m.trace()).abs() < 1e-10);
    }
}

/// A matrix whose first rows are near-identical is a small perturbation
/// of a low-rank matrix, so most eigenvalues collapse toward zero.
#[test]
fn near_duplicate_rows_collapse_the_spectrum() {
    use infla_core::distance::trajectory_distance_matrix;
    use infla_core::NormalizedTrajectory;

    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let len = 120usize;
    let base: Vec<f64> = (0..len).map(|t| (t as f64 * 0.35).sin() + 0.2).collect();
    let noise = 1e-3;
    let mut trajectories = Vec::new();
    for e in 0..10 {
        let series: Vec<f64> = if e < 8 {
            base.iter().map(|v| v + rng.gen_range(-noise..noise)).collect()
        } else {
            (0..len).map(|t| (t as f64 * (0.9 + e as f64 * 0.17)).cos() * 2.0).collect()
        };
        let norm: f64 = series.iter().map(|v| v.abs()).sum();
        trajectories.push(NormalizedTrajectory {
            entity: format!("s{e}"),
            values: series.iter().map(|v| v / norm).collect(),
        });
    }
    let dist = trajectory_distance_matrix(&trajectories).unwrap();
    let spectrum = eigen_decompose(dist.matrix()).unwrap();
    let small = spectrum.eigenvalues.iter().filter(|v| v.abs() < 1e-2).count();
    assert!(small >= 7, "only {small} eigenvalues below 1e-2: {:?}", spectrum.eigenvalues);

    let count = similarity_count(&spectrum, 1e-2).unwrap();
    assert_eq!(count.similar_entities, Some(count.k + 1));
    assert!(count.k >= 7);
}
