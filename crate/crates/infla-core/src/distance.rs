//! Pairwise L1 trajectory distances and agglomerative clustering.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::panel::NormalizedTrajectory;

/// Symmetric nonnegative matrix with zero diagonal over named entities.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    entities: Vec<String>,
    values: SquareMatrix,
}

impl DistanceMatrix {
    /// Validates symmetry (within 1e-12), a zero diagonal (within 1e-12)
    /// and nonnegative entries.
    pub fn new(entities: Vec<String>, values: SquareMatrix) -> Result<DistanceMatrix> {
        if entities.len() != values.n() {
            return Err(Error::Invalid(format!(
                "{} entities for a {}x{} matrix",
                entities.len(),
                values.n(),
                values.n()
            )));
        }
        if !values.is_symmetric(1e-12) {
            return Err(Error::Invalid(format!(
                "matrix asymmetric by {:.3e}",
                values.max_asymmetry()
            )));
        }
        for i in 0..values.n() {
            if values.get(i, i).abs() > 1e-12 {
                return Err(Error::Invalid(format!("nonzero diagonal at index {i}")));
            }
            for j in 0..values.n() {
                if values.get(i, j) < 0.0 {
                    return Err(Error::Invalid(format!("negative distance at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { entities, values })
    }

    pub fn n(&self) -> usize {
        self.entities.len()
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }
}

/// Rule for the distance between clusters during agglomeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Average,
    Single,
    Complete,
}

impl Linkage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Linkage::Average => "average",
            Linkage::Single => "single",
            Linkage::Complete => "complete",
        }
    }
}

impl core::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Linkage::Average),
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::Invalid(format!(
                "unknown linkage '{other}' (expected average, single or complete)"
            ))),
        }
    }
}

/// One agglomeration step. `left < right` are cluster ids: ids below `n`
/// are leaves in entity order, id `n + k` is the cluster created by the
/// k-th merge.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Stepwise dendrogram: `n - 1` merges plus a leaf order for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub entities: Vec<String>,
    pub merges: Vec<Merge>,
    pub leaf_order: Vec<usize>,
}

/// Builds the pairwise L1 distance matrix between unit-L1 trajectories.
pub fn trajectory_distance_matrix(
    trajectories: &[NormalizedTrajectory],
) -> Result<DistanceMatrix> {
    let n = trajectories.len();
    if n < 2 {
        return Err(Error::Invalid("need at least 2 trajectories".into()));
    }
    let len = trajectories[0].values.len();
    for t in trajectories {
        if t.values.len() != len {
            return Err(Error::Invalid(format!(
                "trajectory '{}' has length {}, expected {len}",
                t.entity,
                t.values.len()
            )));
        }
    }
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = trajectories[i]
                .values
                .iter()
                .zip(&trajectories[j].values)
                .map(|(a, b)| (a - b).abs())
                .sum();
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    let entities = trajectories.iter().map(|t| t.entity.clone()).collect();
    DistanceMatrix::new(entities, m)
}

struct ActiveCluster {
    id: usize,
    size: usize,
}

/// `(height, (left id, right id), (left position, right position))` of a
/// candidate merge.
type MergeCandidate = (f64, (usize, usize), (usize, usize));

/// Agglomerative clustering with Lance-Williams distance updates.
///
/// Ties on merge height are broken toward the lowest `(left, right)`
/// cluster-id pair, which makes the merge sequence deterministic.
#[allow(clippy::needless_range_loop)]
pub fn hierarchical_cluster(dist: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = dist.n();
    if n < 2 {
        return Err(Error::Invalid("need at least 2 entities to cluster".into()));
    }

    let mut active: Vec<ActiveCluster> =
        (0..n).map(|id| ActiveCluster { id, size: 1 }).collect();
    // Inter-cluster distances indexed by position in `active`.
    let mut d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dist.get(i, j)).collect())
        .collect();

    let mut merges: Vec<Merge> = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let m = active.len();
        let mut best: Option<MergeCandidate> = None;
        for p in 0..m {
            for q in (p + 1)..m {
                let height = d[p][q];
                let ids = ordered_ids(active[p].id, active[q].id);
                let candidate = (height, ids, (p, q));
                match &best {
                    Some((bh, bids, _)) if height > *bh || (height == *bh && ids >= *bids) => {}
                    _ => best = Some(candidate),
                }
            }
        }
        let (height, (left, right), (p, q)) = best.expect("at least one pair");

        let sa = active[p].size;
        let sb = active[q].size;
        let merged_size = sa + sb;

        // Distances from the merged cluster to every other active cluster.
        let mut new_row: Vec<f64> = Vec::with_capacity(m - 2);
        for r in 0..m {
            if r == p || r == q {
                continue;
            }
            let dp = d[p][r];
            let dq = d[q][r];
            let v = match linkage {
                Linkage::Average => (sa as f64 * dp + sb as f64 * dq) / merged_size as f64,
                Linkage::Single => dp.min(dq),
                Linkage::Complete => dp.max(dq),
            };
            new_row.push(v);
        }

        // Drop positions p < q, then append the merged cluster.
        active.remove(q);
        active.remove(p);
        d.remove(q);
        d.remove(p);
        for row in d.iter_mut() {
            row.remove(q);
            row.remove(p);
        }
        for (row, &v) in d.iter_mut().zip(&new_row) {
            row.push(v);
        }
        new_row.push(0.0);
        d.push(new_row);
        active.push(ActiveCluster { id: n + step, size: merged_size });

        merges.push(Merge { left, right, height, size: merged_size });
    }

    let leaf_order = leaf_order(n, &merges);
    Ok(Dendrogram { entities: dist.entities().to_vec(), merges, leaf_order })
}

fn ordered_ids(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Depth-first leaf order of the merge tree, left child first.
fn leaf_order(n: usize, merges: &[Merge]) -> Vec<usize> {
    let root = n + merges.len() - 1;
    let mut order = Vec::with_capacity(n);
    let mut stack = alloc::vec![root];
    while let Some(id) = stack.pop() {
        if id < n {
            order.push(id);
        } else {
            let m = &merges[id - n];
            stack.push(m.right);
            stack.push(m.left);
        }
    }
    order
}

/// The partition obtained by undoing the last `k - 1` merges.
///
/// Clusters are ordered by their smallest leaf index; members keep entity
/// order.
pub fn cut_clusters(dendro: &Dendrogram, k: usize) -> Result<Vec<Vec<String>>> {
    let n = dendro.entities.len();
    if k < 1 || k > n {
        return Err(Error::Invalid(format!("cluster count {k} out of range 1..={n}")));
    }
    let mut components: BTreeMap<usize, Vec<usize>> =
        (0..n).map(|i| (i, alloc::vec![i])).collect();
    for (step, merge) in dendro.merges.iter().take(n - k).enumerate() {
        let mut left = components.remove(&merge.left).expect("left cluster alive");
        let right = components.remove(&merge.right).expect("right cluster alive");
        left.extend(right);
        components.insert(n + step, left);
    }
    let mut clusters: Vec<Vec<usize>> = components
        .into_values()
        .map(|mut leaves| {
            leaves.sort_unstable();
            leaves
        })
        .collect();
    clusters.sort_by_key(|c| c[0]);
    Ok(clusters
        .into_iter()
        .map(|c| c.into_iter().map(|i| dendro.entities[i].clone()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{i}")).collect()
    }

    fn matrix_from(entities: usize, entries: &[(usize, usize, f64)]) -> DistanceMatrix {
        let mut m = SquareMatrix::zeros(entities);
        for &(i, j, v) in entries {
            m.set(i, j, v);
            m.set(j, i, v);
        }
        DistanceMatrix::new(names(entities), m).unwrap()
    }

    #[test]
    fn identical_trajectories_have_zero_distance() {
        let t = NormalizedTrajectory { entity: "a".to_string(), values: vec![0.5, -0.5] };
        let u = NormalizedTrajectory { entity: "b".to_string(), values: vec![0.5, -0.5] };
        let d = trajectory_distance_matrix(&[t, u]).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn sign_flip_example() {
        let t = NormalizedTrajectory { entity: "a".to_string(), values: vec![0.5, 0.5] };
        let u = NormalizedTrajectory { entity: "b".to_string(), values: vec![0.5, -0.5] };
        let d = trajectory_distance_matrix(&[t, u]).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let t = NormalizedTrajectory { entity: "a".to_string(), values: vec![1.0] };
        let u = NormalizedTrajectory { entity: "b".to_string(), values: vec![0.5, 0.5] };
        assert!(trajectory_distance_matrix(&[t, u]).is_err());
    }

    #[test]
    fn two_points_merge_once_at_their_distance() {
        let d = matrix_from(2, &[(0, 1, 3.5)]);
        let dendro = hierarchical_cluster(&d, Linkage::Average).unwrap();
        assert_eq!(dendro.merges.len(), 1);
        let m = &dendro.merges[0];
        assert_eq!((m.left, m.right, m.size), (0, 1, 2));
        assert_eq!(m.height, 3.5);
    }

    #[test]
    fn well_separated_pairs_merge_before_joining() {
        // two tight pairs (0,1) and (2,3) at distance 1, pairs 10 apart
        let d = matrix_from(
            4,
            &[
                (0, 1, 1.0),
                (2, 3, 1.0),
                (0, 2, 10.0),
                (0, 3, 10.0),
                (1, 2, 10.0),
                (1, 3, 10.0),
            ],
        );
        let dendro = hierarchical_cluster(&d, Linkage::Average).unwrap();
        assert_eq!(dendro.merges[0].height, 1.0);
        assert_eq!((dendro.merges[0].left, dendro.merges[0].right), (0, 1));
        assert_eq!(dendro.merges[1].height, 1.0);
        assert_eq!((dendro.merges[1].left, dendro.merges[1].right), (2, 3));
        assert_eq!(dendro.merges[2].height, 10.0);

        let clusters = cut_clusters(&dendro, 2).unwrap();
        assert_eq!(clusters, vec![vec!["e0", "e1"], vec!["e2", "e3"]]);
    }

    #[test]
    fn cut_extremes() {
        let d = matrix_from(3, &[(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0)]);
        let dendro = hierarchical_cluster(&d, Linkage::Average).unwrap();
        assert_eq!(cut_clusters(&dendro, 1).unwrap(), vec![vec!["e0", "e1", "e2"]]);
        assert_eq!(
            cut_clusters(&dendro, 3).unwrap(),
            vec![vec!["e0"], vec!["e1"], vec!["e2"]]
        );
        assert!(cut_clusters(&dendro, 0).is_err());
        assert!(cut_clusters(&dendro, 4).is_err());
    }

    #[test]
    fn merge_heights_are_monotone() {
        let d = matrix_from(
            4,
            &[
                (0, 1, 2.0),
                (0, 2, 4.0),
                (0, 3, 7.0),
                (1, 2, 3.0),
                (1, 3, 6.0),
                (2, 3, 5.0),
            ],
        );
        for linkage in [Linkage::Average, Linkage::Single, Linkage::Complete] {
            let dendro = hierarchical_cluster(&d, linkage).unwrap();
            for w in dendro.merges.windows(2) {
                assert!(w[1].height >= w[0].height, "{linkage:?}");
            }
        }
    }

    #[test]
    fn leaf_order_is_a_permutation() {
        let d = matrix_from(
            4,
            &[
                (0, 1, 2.0),
                (0, 2, 4.0),
                (0, 3, 7.0),
                (1, 2, 3.0),
                (1, 3, 6.0),
                (2, 3, 5.0),
            ],
        );
        let dendro = hierarchical_cluster(&d, Linkage::Average).unwrap();
        let mut order = dendro.leaf_order.clone();
        order.sort_unstable();
        assert_eq!(order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_asymmetric_and_negative_input() {
        let mut m = SquareMatrix::zeros(2);
        m.set(0, 1, 1.0);
        assert!(DistanceMatrix::new(names(2), m).is_err());

        let mut m = SquareMatrix::zeros(2);
        m.set(0, 1, -1.0);
        m.set(1, 0, -1.0);
        assert!(DistanceMatrix::new(names(2), m).is_err());
    }
}
