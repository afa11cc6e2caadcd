//! Point sets in Euclidean space and hard cluster assignments.
//!
//! A [`Dataset`] is an immutable, ordered list of `n` points with `d` finite
//! coordinates each; index `i` refers to the same point for the dataset's
//! whole lifetime. A [`Partition`] assigns every point one of `k` cluster
//! labels. Partitions are plain data: they can hold invalid states (empty
//! clusters, out-of-range labels) so that [`validate_partition`] can report
//! exactly what is wrong.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An immutable set of `n` points in `d`-dimensional Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    // row-major, n * dim
    coords: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from per-point coordinate vectors.
    ///
    /// Requires at least one point, a positive dimension, equal lengths and
    /// finite coordinates throughout.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidParam("dataset must contain at least one point".into()));
        }
        let dim = points[0].len();
        let mut coords = Vec::with_capacity(n * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            for &c in p {
                if !c.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "point {i} has non-finite coordinate {c}"
                    )));
                }
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a dataset from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be positive".into()));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::InvalidParam(format!(
                "coordinate buffer of length {} is not a non-empty multiple of dim {dim}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParam(format!("non-finite coordinate {c}")));
        }
        Ok(Self { dim, coords })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// A dataset is never empty; provided for API completeness.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterator over all points in index order.
    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The flat row-major coordinate buffer.
    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfBounds { index: i, len: self.len() });
        }
        Ok(())
    }

    /// Returns a copy with point `i` replaced. Used by transforms; the
    /// original dataset is never mutated.
    pub(crate) fn with_points(&self, f: impl FnMut(usize, &mut [f64])) -> Dataset {
        let mut out = self.clone();
        let mut f = f;
        for i in 0..out.len() {
            let dim = out.dim;
            f(i, &mut out.coords[i * dim..(i + 1) * dim]);
        }
        out
    }
}

/// Assignment of each point to one of `k` clusters.
///
/// Construction performs no validation so that diagnostic code can inspect
/// broken assignments; call [`validate_partition`] or
/// [`Partition::check_for`] before trusting one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Self {
        Self { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Label of point `i`.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Indices of the members of cluster `c`, ascending.
    pub fn cluster_members(&self, c: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == c)
            .map(|(i, _)| i)
            .collect()
    }

    /// Per-cluster sizes, indexed by label. Out-of-range labels are ignored.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            if l < self.k {
                sizes[l] += 1;
            }
        }
        sizes
    }

    /// All violations of the partition invariants against a dataset of `n` points.
    pub fn violations(&self, n: usize) -> Vec<PartitionViolation> {
        let mut out = Vec::new();
        if self.labels.len() != n {
            out.push(PartitionViolation::LengthMismatch { labels: self.labels.len(), points: n });
        }
        for (i, &l) in self.labels.iter().enumerate() {
            if l >= self.k {
                out.push(PartitionViolation::LabelOutOfRange { index: i, label: l, k: self.k });
            }
        }
        for (c, size) in self.cluster_sizes().iter().enumerate() {
            if *size == 0 {
                out.push(PartitionViolation::EmptyCluster { cluster: c });
            }
        }
        out
    }

    /// Errors unless the partition is valid for `dataset`.
    pub fn check_for(&self, dataset: &Dataset) -> Result<()> {
        let violations = self.violations(dataset.len());
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidPartition(violations))
        }
    }
}

/// A single violated partition invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    LengthMismatch { labels: usize, points: usize },
    LabelOutOfRange { index: usize, label: usize, k: usize },
    EmptyCluster { cluster: usize },
}

impl std::fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::LengthMismatch { labels, points } => {
                write!(f, "label vector has length {labels} but dataset has {points} points")
            }
            Self::LabelOutOfRange { index, label, k } => {
                write!(f, "label {label} at point {index} out of range for k = {k}")
            }
            Self::EmptyCluster { cluster } => write!(f, "cluster {cluster} empty"),
        }
    }
}

/// Reports every violated partition invariant; an empty list means the
/// partition is valid for the dataset.
pub fn validate_partition(dataset: &Dataset, partition: &Partition) -> Vec<PartitionViolation> {
    partition.violations(dataset.len())
}

/// Per-cluster aggregate: gravity center, size, and within-cluster sum of
/// squared distances to the center.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub centroid: Vec<f64>,
    pub size: usize,
    pub within_ss: f64,
}

/// Coordinate-wise mean of the selected points.
///
/// `subset` must be non-empty, in bounds, and free of duplicates.
pub fn centroid(dataset: &Dataset, subset: &[usize]) -> Result<Vec<f64>> {
    if subset.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    check_subset(dataset, subset)?;
    Ok(centroid_unchecked(dataset, subset))
}

pub(crate) fn centroid_unchecked(dataset: &Dataset, subset: &[usize]) -> Vec<f64> {
    let mut mean = vec![0.0; dataset.dim()];
    for &i in subset {
        for (m, c) in mean.iter_mut().zip(dataset.point(i)) {
            *m += c;
        }
    }
    let inv = 1.0 / subset.len() as f64;
    for m in &mut mean {
        *m *= inv;
    }
    mean
}

pub(crate) fn check_subset(dataset: &Dataset, subset: &[usize]) -> Result<()> {
    let mut seen = vec![false; dataset.len()];
    for &i in subset {
        dataset.check_index(i)?;
        if seen[i] {
            return Err(Error::DuplicateIndex(i));
        }
        seen[i] = true;
    }
    Ok(())
}

/// One [`ClusterStats`] per cluster, in cluster-index order.
pub fn cluster_stats(dataset: &Dataset, partition: &Partition) -> Result<Vec<ClusterStats>> {
    partition.check_for(dataset)?;
    let k = partition.k();
    let d = dataset.dim();
    let mut sums = vec![vec![0.0; d]; k];
    let mut sizes = vec![0usize; k];
    for (i, p) in dataset.points().enumerate() {
        let l = partition.label(i);
        sizes[l] += 1;
        for (s, c) in sums[l].iter_mut().zip(p) {
            *s += c;
        }
    }
    let centroids: Vec<Vec<f64>> = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &n)| s.iter().map(|v| v / n as f64).collect())
        .collect();
    let mut within = vec![0.0; k];
    for (i, p) in dataset.points().enumerate() {
        let l = partition.label(i);
        within[l] += dist_sq(p, &centroids[l]);
    }
    Ok(centroids
        .into_iter()
        .zip(sizes)
        .zip(within)
        .map(|((centroid, size), within_ss)| ClusterStats { centroid, size, within_ss })
        .collect())
}

/// Squared Euclidean distance between two coordinate slices.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
