//! Seeded synthetic dataset generators and subset samplers.
//!
//! Everything here is a pure function of its arguments: equal seeds give
//! bit-identical outputs, which is what makes downstream experiments
//! reproducible from their config echo alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{dist_sq, Dataset, Partition};
use crate::error::{Error, Result};

/// Serializable description of a generator invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub kind: GenKind,
    pub seed: u64,
}

/// The generator family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    /// Two equal squares in 3D touching at one corner; labels by square.
    #[serde(rename = "two_squares_3d")]
    TwoSquares3d { n: usize, edge: f64 },
    /// `k` isotropic Gaussian clusters; labels by generating blob.
    GaussianBlobs { k: usize, n_per: usize, dim: usize, spread: f64, separation: f64 },
}

impl GenSpec {
    /// Runs the described generator.
    pub fn generate(&self) -> Result<(Dataset, Partition)> {
        match self.kind {
            GenKind::TwoSquares3d { n, edge } => two_squares_3d(n, edge, self.seed),
            GenKind::GaussianBlobs { k, n_per, dim, spread, separation } => {
                gaussian_blobs(k, n_per, dim, spread, separation, self.seed)
            }
        }
    }
}

/// The unit direction of the two-squares shared diagonal, `(1,1,0)/√2`.
pub fn two_squares_axis() -> [f64; 3] {
    let s = 1.0 / 2.0f64.sqrt();
    [s, s, 0.0]
}

/// Points uniform over two equal squares in 3D that share exactly one
/// corner at the origin.
///
/// Square 0 spans `[−edge, 0]²` in the z = 0 plane. Square 1 is `[0, edge]²`
/// rotated a quarter turn about the shared diagonal axis `(1,1,0)/√2`, so it
/// spans the plane of that axis and z. Both squares' own diagonals lie on
/// the axis line; the first ⌈n/2⌉ points sample square 0 (label 0), the rest
/// square 1 (label 1).
pub fn two_squares_3d(n: usize, edge: f64, seed: u64) -> Result<(Dataset, Partition)> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("need at least 2 points, got {n}")));
    }
    if !(edge > 0.0 && edge.is_finite()) {
        return Err(Error::InvalidParam(format!("edge must be positive, got {edge}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n0 = n.div_ceil(2);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n0 {
        let x = -rng.random::<f64>() * edge;
        let y = -rng.random::<f64>() * edge;
        points.push(vec![x, y, 0.0]);
        labels.push(0);
    }
    for _ in n0..n {
        let x = rng.random::<f64>() * edge;
        let y = rng.random::<f64>() * edge;
        // Rotate (x, y, 0) a quarter turn about (1,1,0)/√2: the diagonal
        // component stays, the off-diagonal component turns into −z.
        let u = (x + y) / 2.0;
        let w = -(x - y) / 2.0f64.sqrt();
        points.push(vec![u, u, w]);
        labels.push(1);
    }
    Ok((Dataset::new(points)?, Partition::new(labels, 2)))
}

/// Whether `point` lies in the closed region of the given two-squares side.
pub fn two_squares_contains(edge: f64, point: &[f64], square: usize) -> bool {
    let tol = 1e-9 * edge.max(1.0);
    match square {
        0 => {
            point[2].abs() <= tol
                && (-edge - tol..=tol).contains(&point[0])
                && (-edge - tol..=tol).contains(&point[1])
        }
        1 => {
            // invert the rotation: x = u − w/√2, y = u + w/√2 with u = p0 = p1
            if (point[0] - point[1]).abs() > tol {
                return false;
            }
            let x = point[0] - point[2] / 2.0f64.sqrt();
            let y = point[0] + point[2] / 2.0f64.sqrt();
            (-tol..=edge + tol).contains(&x) && (-tol..=edge + tol).contains(&y)
        }
        _ => false,
    }
}

/// `k` isotropic Gaussian blobs of `n_per` points each.
///
/// Blob centers sit `separation · j` along coordinate axis `j mod dim`, so
/// every pair of centers is at least `separation` apart.
pub fn gaussian_blobs(
    k: usize,
    n_per: usize,
    dim: usize,
    spread: f64,
    separation: f64,
    seed: u64,
) -> Result<(Dataset, Partition)> {
    if k == 0 || n_per == 0 || dim == 0 {
        return Err(Error::InvalidParam("k, n_per and dim must be positive".into()));
    }
    if !(spread > 0.0 && spread.is_finite()) || !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParam("spread and separation must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(k * n_per);
    let mut labels = Vec::with_capacity(k * n_per);
    for blob in 0..k {
        let mut center = vec![0.0; dim];
        center[blob % dim] = separation * blob as f64;
        for _ in 0..n_per {
            let point: Vec<f64> = center
                .iter()
                .map(|c| {
                    let offset: f64 = StandardNormal.sample(&mut rng);
                    c + spread * offset
                })
                .collect();
            points.push(point);
            labels.push(blob);
        }
    }
    Ok((Dataset::new(points)?, Partition::new(labels, k)))
}

/// Subset sampling strategy for picking transform targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMode {
    /// Sample without replacement, uniformly over the cluster.
    Uniform,
    /// Pick a random member and take its nearest cluster-mates, so the
    /// subset forms a spatially contiguous fragment.
    Ball,
}

/// Draws `⌈fraction · |cluster|⌉` member indices of the given cluster,
/// sorted ascending.
pub fn sample_subset(
    dataset: &Dataset,
    partition: &Partition,
    cluster: usize,
    fraction: f64,
    mode: SubsetMode,
    seed: u64,
) -> Result<Vec<usize>> {
    if cluster >= partition.k() {
        return Err(Error::ClusterOutOfRange { cluster, k: partition.k() });
    }
    if partition.len() != dataset.len() {
        return Err(Error::DimensionMismatch { expected: dataset.len(), got: partition.len() });
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParam(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let members = partition.cluster_members(cluster);
    if members.is_empty() {
        return Err(Error::InvalidPartition(vec![
            crate::dataset::PartitionViolation::EmptyCluster { cluster },
        ]));
    }
    let count = ((fraction * members.len() as f64).ceil() as usize).clamp(1, members.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut subset = match mode {
        SubsetMode::Uniform => rand::seq::index::sample(&mut rng, members.len(), count)
            .iter()
            .map(|i| members[i])
            .collect::<Vec<_>>(),
        SubsetMode::Ball => {
            let anchor = members[rng.random_range(0..members.len())];
            ball_subset_around(dataset, &members, anchor, count)
        }
    };
    subset.sort_unstable();
    Ok(subset)
}

/// The `count` cluster members nearest to `anchor` (anchor included),
/// distance ties broken by index.
pub fn ball_subset_around(
    dataset: &Dataset,
    members: &[usize],
    anchor: usize,
    count: usize,
) -> Vec<usize> {
    let mut by_distance: Vec<(f64, usize)> = members
        .iter()
        .map(|&i| (dist_sq(dataset.point(i), dataset.point(anchor)), i))
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    by_distance.into_iter().take(count).map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmeans::{clustering_error, kmeans_ideal};

    #[test]
    fn two_squares_points_lie_in_their_squares() {
        let (dataset, partition) = two_squares_3d(400, 1.0, 7).unwrap();
        for (i, p) in dataset.points().enumerate() {
            assert!(
                two_squares_contains(1.0, p, partition.label(i)),
                "point {i} {:?} outside square {}",
                p,
                partition.label(i)
            );
        }
    }

    #[test]
    fn two_squares_labels_recoverable_from_containment() {
        let (dataset, partition) = two_squares_3d(500, 2.5, 3).unwrap();
        for (i, p) in dataset.points().enumerate() {
            // interior points belong to exactly one square
            let in0 = two_squares_contains(2.5, p, 0);
            let in1 = two_squares_contains(2.5, p, 1);
            assert!(in0 || in1);
            if in0 && !in1 {
                assert_eq!(partition.label(i), 0);
            }
            if in1 && !in0 {
                assert_eq!(partition.label(i), 1);
            }
        }
    }

    #[test]
    fn two_squares_share_exactly_the_corner() {
        // the origin belongs to both closed squares
        assert!(two_squares_contains(1.0, &[0.0, 0.0, 0.0], 0));
        assert!(two_squares_contains(1.0, &[0.0, 0.0, 0.0], 1));
        // with many samples the squares approach each other only near it
        let (dataset, partition) = two_squares_3d(4000, 1.0, 11).unwrap();
        let mut min_cross = f64::INFINITY;
        let mut closest = (0, 0);
        for i in 0..dataset.len() {
            for j in i + 1..dataset.len() {
                if partition.label(i) != partition.label(j) {
                    let d = dist_sq(dataset.point(i), dataset.point(j));
                    if d < min_cross {
                        min_cross = d;
                        closest = (i, j);
                    }
                }
            }
        }
        let (i, j) = closest;
        let origin = [0.0, 0.0, 0.0];
        assert!(min_cross.sqrt() < 0.1, "squares should nearly touch, got {}", min_cross.sqrt());
        assert!(dist_sq(dataset.point(i), &origin).sqrt() < 0.2);
        assert!(dist_sq(dataset.point(j), &origin).sqrt() < 0.2);
    }

    #[test]
    fn two_squares_half_centroids_near_square_centers() {
        let n = 10_000;
        let edge = 1.0;
        let (dataset, partition) = two_squares_3d(n, edge, 42).unwrap();
        // 3σ bound for the mean of 5000 uniforms per coordinate
        let bound = 3.0 * edge / (12.0f64 * 5000.0).sqrt();
        let half0 = partition.cluster_members(0);
        let mu0 = crate::dataset::centroid(&dataset, &half0).unwrap();
        for (got, expected) in mu0.iter().zip(&[-edge / 2.0, -edge / 2.0, 0.0]) {
            assert!((got - expected).abs() <= bound, "{got} vs {expected} (±{bound})");
        }
        let half1 = partition.cluster_members(1);
        let mu1 = crate::dataset::centroid(&dataset, &half1).unwrap();
        // square 1's center sits on the axis at (edge/2, edge/2, 0); its
        // u-coordinate spread is edge/√24 ≤ edge/√12 so the same bound holds
        for (got, expected) in mu1.iter().zip(&[edge / 2.0, edge / 2.0, 0.0]) {
            assert!((got - expected).abs() <= bound, "{got} vs {expected} (±{bound})");
        }
    }

    #[test]
    fn two_squares_is_deterministic_and_split_evenly() {
        let a = two_squares_3d(101, 1.0, 5).unwrap();
        let b = two_squares_3d(101, 1.0, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.cluster_sizes(), vec![51, 50]);
        assert!(two_squares_3d(1, 1.0, 5).is_err());
        assert!(two_squares_3d(10, 0.0, 5).is_err());
    }

    #[test]
    fn blobs_single_cluster_all_label_zero() {
        let (_, partition) = gaussian_blobs(1, 7, 2, 1.0, 1.0, 9).unwrap();
        assert!(partition.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn blobs_ideal_recovers_well_separated_labels() {
        let (dataset, truth) = gaussian_blobs(2, 5, 2, 0.4, 10.0, 13).unwrap();
        let ideal = kmeans_ideal(&dataset, 2).unwrap();
        assert_eq!(clustering_error(&truth, &ideal.partition).unwrap(), 0);
    }

    #[test]
    fn blobs_are_deterministic() {
        let a = gaussian_blobs(3, 4, 3, 1.0, 5.0, 77).unwrap();
        let b = gaussian_blobs(3, 4, 3, 1.0, 5.0, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn genspec_json_round_trip() {
        let spec = GenSpec { kind: GenKind::TwoSquares3d { n: 100, edge: 1.5 }, seed: 4 };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"two_squares_3d\""));
        let back: GenSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let (d, p) = back.generate().unwrap();
        assert_eq!(d.len(), 100);
        assert_eq!(p.k(), 2);
    }

    #[test]
    fn subset_fraction_one_is_whole_cluster() {
        let (dataset, partition) = gaussian_blobs(2, 6, 2, 1.0, 4.0, 1).unwrap();
        let subset =
            sample_subset(&dataset, &partition, 1, 1.0, SubsetMode::Uniform, 3).unwrap();
        assert_eq!(subset, partition.cluster_members(1));
    }

    #[test]
    fn subset_minimal_fraction_is_singleton() {
        let (dataset, partition) = gaussian_blobs(1, 8, 2, 1.0, 4.0, 1).unwrap();
        let subset =
            sample_subset(&dataset, &partition, 0, 1.0 / 8.0, SubsetMode::Uniform, 3).unwrap();
        assert_eq!(subset.len(), 1);
    }

    #[test]
    fn ball_subset_on_a_line() {
        let dataset = Dataset::new((0..10).map(|i| vec![i as f64]).collect()).unwrap();
        let members: Vec<usize> = (0..10).collect();
        assert_eq!(ball_subset_around(&dataset, &members, 0, 3), vec![0, 1, 2]);
        assert_eq!(ball_subset_around(&dataset, &members, 9, 2), vec![9, 8]);
    }

    #[test]
    fn sampled_subsets_stay_inside_the_cluster() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (dataset, partition) = gaussian_blobs(3, 9, 2, 1.0, 5.0, 2).unwrap();
        for seed in 0..40u64 {
            let cluster = rng.random_range(0..3);
            let fraction = rng.random::<f64>().max(0.05);
            let mode = if seed % 2 == 0 { SubsetMode::Uniform } else { SubsetMode::Ball };
            let subset =
                sample_subset(&dataset, &partition, cluster, fraction, mode, seed).unwrap();
            let members = partition.cluster_members(cluster);
            let expected = ((fraction * members.len() as f64).ceil() as usize).min(members.len());
            assert_eq!(subset.len(), expected);
            assert!(subset.iter().all(|i| members.contains(i)));
            assert!(subset.windows(2).all(|w| w[0] < w[1]), "sorted, no duplicates");
        }
    }

    #[test]
    fn subset_rejects_bad_arguments() {
        let (dataset, partition) = gaussian_blobs(2, 4, 2, 1.0, 5.0, 2).unwrap();
        assert!(sample_subset(&dataset, &partition, 5, 0.5, SubsetMode::Uniform, 1).is_err());
        assert!(sample_subset(&dataset, &partition, 0, 0.0, SubsetMode::Uniform, 1).is_err());
        assert!(sample_subset(&dataset, &partition, 0, 1.1, SubsetMode::Uniform, 1).is_err());
    }
}
