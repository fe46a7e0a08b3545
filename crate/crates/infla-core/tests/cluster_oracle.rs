//! Checks the Lance-Williams agglomeration against a naive oracle that
//! recomputes every inter-cluster distance from the original matrix, and
//! the structural invariants of the distance matrix itself.

#![allow(clippy::type_complexity)]

use infla_core::distance::{
    cut_clusters, hierarchical_cluster, trajectory_distance_matrix, DistanceMatrix, Linkage,
};
use infla_core::matrix::SquareMatrix;
use infla_core::NormalizedTrajectory;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_distance_matrix(n: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(0.05..4.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let entities = (0..n).map(|i| format!("e{i}")).collect();
    DistanceMatrix::new(entities, m).unwrap()
}

fn random_trajectories(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<NormalizedTrajectory> {
    (0..n)
        .map(|i| {
            let series: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = series.iter().map(|v| v.abs()).sum();
            NormalizedTrajectory {
                entity: format!("e{i}"),
                values: series.iter().map(|v| v / norm).collect(),
            }
        })
        .collect()
}

/// Naive agglomeration: clusters are kept as explicit leaf sets and every
/// step recomputes all pairwise cluster distances directly from the
/// original matrix.
fn naive_merges(dist: &DistanceMatrix, linkage: Linkage) -> Vec<(usize, usize, f64, usize)> {
    let n = dist.n();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    for step in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), (usize, usize))> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let d = cluster_distance(dist, &clusters[a].1, &clusters[b].1, linkage);
                let ids = if clusters[a].0 < clusters[b].0 {
                    (clusters[a].0, clusters[b].0)
                } else {
                    (clusters[b].0, clusters[a].0)
                };
                let better = match &best {
                    None => true,
                    Some((bd, bids, _)) => d < *bd || (d == *bd && ids < *bids),
                };
                if better {
                    best = Some((d, ids, (a, b)));
                }
            }
        }
        let (height, ids, (a, b)) = best.unwrap();
        let (_, leaves_b) = clusters.remove(b);
        let (_, mut leaves_a) = clusters.remove(a);
        leaves_a.extend(leaves_b);
        let size = leaves_a.len();
        clusters.push((n + step, leaves_a));
        merges.push((ids.0, ids.1, height, size));
    }
    merges
}

fn cluster_distance(dist: &DistanceMatrix, a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    let cross = a.iter().flat_map(|&i| b.iter().map(move |&j| dist.get(i, j)));
    match linkage {
        Linkage::Average => cross.sum::<f64>() / (a.len() * b.len()) as f64,
        Linkage::Single => cross.fold(f64::INFINITY, f64::min),
        Linkage::Complete => cross.fold(f64::NEG_INFINITY, f64::max),
    }
}

#[test]
fn merge_sequence_matches_naive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for linkage in [Linkage::Average, Linkage::Single, Linkage::Complete] {
        for _ in 0..20 {
            let dist = random_distance_matrix(6, &mut rng);
            let dendro = hierarchical_cluster(&dist, linkage).unwrap();
            let oracle = naive_merges(&dist, linkage);
            assert_eq!(dendro.merges.len(), oracle.len());
            for (m, (left, right, height, size)) in dendro.merges.iter().zip(&oracle) {
                assert_eq!((m.left, m.right, m.size), (*left, *right, *size), "{linkage:?}");
                assert!((m.height - height).abs() < 1e-12, "{linkage:?}");
            }
        }
    }
}

#[test]
fn distance_matrix_matches_brute_force_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let trajectories = random_trajectories(3, 40, &mut rng);
    let dist = trajectory_distance_matrix(&trajectories).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let mut direct = 0.0;
            for t in 0..40 {
                direct += (trajectories[i].values[t] - trajectories[j].values[t]).abs();
            }
            assert!((dist.get(i, j) - direct).abs() < 1e-13);
        }
    }
}

#[test]
fn triangle_inequality_holds_on_sampled_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let trajectories = random_trajectories(8, 60, &mut rng);
    let dist = trajectory_distance_matrix(&trajectories).unwrap();
    for _ in 0..200 {
        let i = rng.gen_range(0..8);
        let j = rng.gen_range(0..8);
        let k = rng.gen_range(0..8);
        assert!(dist.get(i, j) <= dist.get(i, k) + dist.get(k, j) + 1e-12);
    }
}

#[test]
fn entity_permutation_permutes_the_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let trajectories = random_trajectories(7, 50, &mut rng);
    let dist = trajectory_distance_matrix(&trajectories).unwrap();

    let mut permuted = trajectories.clone();
    permuted.reverse();
    let dist_p = trajectory_distance_matrix(&permuted).unwrap();

    // permuting entities permutes rows and columns identically
    let n = trajectories.len();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(dist.get(i, j), dist_p.get(n - 1 - i, n - 1 - j));
        }
    }

    // and the clustering is isomorphic: cutting at any k yields the same
    // partition of entity names
    let dendro = hierarchical_cluster(&dist, Linkage::Average).unwrap();
    let dendro_p = hierarchical_cluster(&dist_p, Linkage::Average).unwrap();
    for k in 1..=n {
        let normalize = |clusters: Vec<Vec<String>>| {
            let mut sets: Vec<Vec<String>> = clusters
                .into_iter()
                .map(|mut c| {
                    c.sort();
                    c
                })
                .collect();
            sets.sort();
            sets
        };
        let a = normalize(cut_clusters(&dendro, k).unwrap());
        let b = normalize(cut_clusters(&dendro_p, k).unwrap());
        assert_eq!(a, b, "partition mismatch at k={k}");
    }
}

#[test]
fn average_linkage_heights_scale_with_the_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let dist = random_distance_matrix(6, &mut rng);
    let scaled = DistanceMatrix::new(dist.entities().to_vec(), dist.matrix().scaled(7.5)).unwrap();
    let base = hierarchical_cluster(&dist, Linkage::Average).unwrap();
    let big = hierarchical_cluster(&scaled, Linkage::Average).unwrap();
    for (a, b) in base.merges.iter().zip(&big.merges) {
        assert_eq!((a.left, a.right), (b.left, b.right));
        assert!((b.height - 7.5 * a.height).abs() < 1e-12 * b.height.max(1.0));
    }
}
