//! Cluster-preserving dataset transformations.
//!
//! Three families live here:
//!
//! * the **centric set transform** `x ↦ μ(P) + λ(x − μ(P))`, which contracts
//!   an arbitrary point set `P` toward its own gravity center by a factor
//!   `λ ∈ (0, 1]`. Applied to a whole cluster of a partition it is the
//!   **Γ\*** transform; applied to a subset of one cluster of an optimal
//!   k-means partition it is the **Γ⁺⁺** transform, and the optimal
//!   partition survives it (see the `analysis` module for the numerical
//!   certificate);
//! * a validity checker for **Kleinberg Γ-transformations** of distance
//!   matrices (within-cluster distances may only shrink, between-cluster
//!   distances may only grow). Γ⁺⁺ is deliberately *not* such a
//!   transformation — it may do the opposite on both counts;
//! * an **angular transform** that scales each point's angle to a fixed
//!   axis line, which is how the bundled experiment bends its synthetic
//!   datasets.
//!
//! All operations are pure: they return a fresh [`Dataset`] and never touch
//! their inputs.

use serde::{Deserialize, Serialize};

use crate::dataset::{centroid_unchecked, check_subset, dist_sq, Dataset, Partition};
use crate::error::{Error, Result};

/// Angle clamp: scaled angles are capped at π − ANGLE_EPS radians.
const ANGLE_EPS: f64 = 1e-9;

/// A serializable description of one transformation, as consumed by the
/// command-line `transform` pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformSpec {
    /// Contract an entire cluster toward its gravity center.
    GammaStar { cluster: usize, lambda: f64 },
    /// Contract a subset of one cluster toward the subset's gravity center.
    GammaPlusPlus { cluster: usize, subset: Vec<usize>, lambda: f64 },
    /// Contract an arbitrary index set toward its gravity center.
    CentricSet { subset: Vec<usize>, lambda: f64 },
    /// Scale every point's angle to the axis line through `center`.
    Angular { axis: Vec<f64>, factor: f64, center: Vec<f64> },
}

impl TransformSpec {
    /// Applies the transform. The partition is required for the Γ\* and Γ⁺⁺
    /// kinds and ignored otherwise.
    pub fn apply(&self, dataset: &Dataset, partition: Option<&Partition>) -> Result<Dataset> {
        match self {
            Self::GammaStar { cluster, lambda } => {
                let partition = partition.ok_or_else(|| {
                    Error::InvalidParam("gamma_star requires a labeled dataset".into())
                })?;
                gamma_star(dataset, partition, *cluster, *lambda)
            }
            Self::GammaPlusPlus { cluster, subset, lambda } => {
                let partition = partition.ok_or_else(|| {
                    Error::InvalidParam("gamma_plus_plus requires a labeled dataset".into())
                })?;
                gamma_plus_plus(dataset, partition, *cluster, subset, *lambda)
                    .map(|(data, _)| data)
            }
            Self::CentricSet { subset, lambda } => centric_set_transform(dataset, subset, *lambda),
            Self::Angular { axis, factor, center } => {
                angular_transform(dataset, axis, *factor, center)
            }
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(())
}

/// Centric set transform: maps every `x` in `subset` to
/// `μ(P) + λ(x − μ(P))` where `μ(P)` is the subset's gravity center.
///
/// Points outside the subset are copied bit-for-bit, and `λ = 1` returns the
/// whole dataset bit-identical. The subset's gravity center is invariant.
pub fn centric_set_transform(dataset: &Dataset, subset: &[usize], lambda: f64) -> Result<Dataset> {
    check_lambda(lambda)?;
    if subset.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    check_subset(dataset, subset)?;
    Ok(centric_map(dataset, subset, lambda))
}

/// The same map without the λ > 0 restriction: λ = 0 collapses the subset
/// onto its gravity center. Only the analysis code may evaluate that limit;
/// the public transform rejects it.
pub(crate) fn centric_map(dataset: &Dataset, subset: &[usize], lambda: f64) -> Dataset {
    debug_assert!((0.0..=1.0).contains(&lambda));
    if lambda == 1.0 {
        return dataset.clone();
    }
    let mu = centroid_unchecked(dataset, subset);
    let mut in_subset = vec![false; dataset.len()];
    for &i in subset {
        in_subset[i] = true;
    }
    dataset.with_points(|i, p| {
        if in_subset[i] {
            for (c, m) in p.iter_mut().zip(&mu) {
                *c = m + lambda * (*c - m);
            }
        }
    })
}

/// Γ\* transform: the centric set transform applied to the entire named
/// cluster of the partition.
pub fn gamma_star(
    dataset: &Dataset,
    partition: &Partition,
    cluster: usize,
    lambda: f64,
) -> Result<Dataset> {
    partition.check_for(dataset)?;
    if cluster >= partition.k() {
        return Err(Error::ClusterOutOfRange { cluster, k: partition.k() });
    }
    let members = partition.cluster_members(cluster);
    centric_set_transform(dataset, &members, lambda)
}

/// Γ⁺⁺ transform: the centric set transform applied to a subset of one
/// cluster. Returns the new dataset together with the (unchanged) partition
/// it is expected to preserve.
pub fn gamma_plus_plus(
    dataset: &Dataset,
    partition: &Partition,
    cluster: usize,
    subset: &[usize],
    lambda: f64,
) -> Result<(Dataset, Partition)> {
    partition.check_for(dataset)?;
    if cluster >= partition.k() {
        return Err(Error::ClusterOutOfRange { cluster, k: partition.k() });
    }
    check_lambda(lambda)?;
    if subset.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    check_subset(dataset, subset)?;
    if subset.iter().any(|&i| partition.label(i) != cluster) {
        return Err(Error::SubsetNotInCluster);
    }
    let transformed = centric_set_transform(dataset, subset, lambda)?;
    Ok((transformed, partition.clone()))
}

/// A symmetric, nonnegative pairwise distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry (to 1e-12), zero diagonal and nonnegativity.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidParam(format!(
                "expected {n}×{n} = {} entries, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidParam(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidParam(format!("invalid distance {v} at ({i},{j})")));
                }
                let w = values[j * n + i];
                if (v - w).abs() > 1e-12 * v.abs().max(w.abs()).max(1.0) {
                    return Err(Error::InvalidParam(format!(
                        "asymmetric entries at ({i},{j}): {v} vs {w}"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Pairwise Euclidean distances of a dataset.
pub fn distance_matrix(dataset: &Dataset) -> DistanceMatrix {
    let n = dataset.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = dist_sq(dataset.point(i), dataset.point(j)).sqrt();
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix { n, values }
}

/// A pair of points whose distance moved the wrong way for a Kleinberg
/// Γ-transformation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaViolation {
    pub i: usize,
    pub j: usize,
    pub same_cluster: bool,
    pub before: f64,
    pub after: f64,
}

/// Result of [`is_kleinberg_gamma_transform`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCheck {
    pub valid: bool,
    pub violations: Vec<GammaViolation>,
}

/// Checks whether `d_prime` is a Kleinberg Γ-transformation of `d` for the
/// given partition: same-cluster distances must not increase and
/// cross-cluster distances must not decrease (tolerance 1e-12, relative to
/// the distance scale).
pub fn is_kleinberg_gamma_transform(
    d: &DistanceMatrix,
    d_prime: &DistanceMatrix,
    partition: &Partition,
) -> Result<GammaCheck> {
    if d.len() != d_prime.len() {
        return Err(Error::DimensionMismatch { expected: d.len(), got: d_prime.len() });
    }
    if partition.len() != d.len() {
        return Err(Error::DimensionMismatch { expected: d.len(), got: partition.len() });
    }
    let n = d.len();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let before = d.get(i, j);
            let after = d_prime.get(i, j);
            let same_cluster = partition.label(i) == partition.label(j);
            if let Some(v) = pair_violation(i, j, same_cluster, before, after) {
                violations.push(v);
            }
        }
    }
    Ok(GammaCheck { valid: violations.is_empty(), violations })
}

fn pair_violation(
    i: usize,
    j: usize,
    same_cluster: bool,
    before: f64,
    after: f64,
) -> Option<GammaViolation> {
    let tol = 1e-12 * before.abs().max(after.abs()).max(1.0);
    let bad = if same_cluster { after > before + tol } else { after < before - tol };
    bad.then_some(GammaViolation { i, j, same_cluster, before, after })
}

/// Streaming equivalent of [`is_kleinberg_gamma_transform`] for two
/// embeddings of the same point set: distances are computed on the fly so
/// no n×n matrices are materialized. Returns the verdict and the number of
/// violating pairs.
pub fn kleinberg_check_datasets(
    before: &Dataset,
    after: &Dataset,
    partition: &Partition,
) -> Result<(bool, usize)> {
    if before.len() != after.len() {
        return Err(Error::DimensionMismatch { expected: before.len(), got: after.len() });
    }
    if partition.len() != before.len() {
        return Err(Error::DimensionMismatch { expected: before.len(), got: partition.len() });
    }
    let n = before.len();
    let mut violations = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let db = dist_sq(before.point(i), before.point(j)).sqrt();
            let da = dist_sq(after.point(i), after.point(j)).sqrt();
            let same = partition.label(i) == partition.label(j);
            if pair_violation(i, j, same, db, da).is_some() {
                violations += 1;
            }
        }
    }
    Ok((violations == 0, violations))
}

/// Scales each point's angle to the axis **line** through `center`.
///
/// Every offset `v = x − center` is decomposed into a component along the
/// unit axis and a perpendicular component. The angle `θ ∈ [0, π/2]`
/// between `v` and the axis line is replaced by `min(factor·θ, π − ε)`
/// while the offset norm, the perpendicular (azimuth) direction and the
/// sign of the axis component are all preserved. Points on the axis and
/// the center itself are fixed; `factor = 1` returns the dataset
/// bit-identical.
pub fn angular_transform(
    dataset: &Dataset,
    axis: &[f64],
    factor: f64,
    center: &[f64],
) -> Result<Dataset> {
    if axis.len() != dataset.dim() {
        return Err(Error::DimensionMismatch { expected: dataset.dim(), got: axis.len() });
    }
    if center.len() != dataset.dim() {
        return Err(Error::DimensionMismatch { expected: dataset.dim(), got: center.len() });
    }
    let axis_norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
    if axis_norm == 0.0 || !axis_norm.is_finite() {
        return Err(Error::ZeroAxis);
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidParam(format!("factor must be positive, got {factor}")));
    }
    if factor == 1.0 {
        return Ok(dataset.clone());
    }
    let unit_axis: Vec<f64> = axis.iter().map(|c| c / axis_norm).collect();

    Ok(dataset.with_points(|_, p| {
        let v: Vec<f64> = p.iter().zip(center).map(|(c, o)| c - o).collect();
        let r2: f64 = v.iter().map(|c| c * c).sum();
        if r2 == 0.0 {
            return;
        }
        let along: f64 = v.iter().zip(&unit_axis).map(|(a, b)| a * b).sum();
        let perp: Vec<f64> = v.iter().zip(&unit_axis).map(|(c, a)| c - along * a).collect();
        let perp_norm = perp.iter().map(|c| c * c).sum::<f64>().sqrt();
        if perp_norm == 0.0 {
            // on the axis line: θ = 0, nothing to scale
            return;
        }
        let side = if along >= 0.0 { 1.0 } else { -1.0 };
        let theta = perp_norm.atan2(along.abs());
        let scaled = (factor * theta).min(std::f64::consts::PI - ANGLE_EPS);
        let r = r2.sqrt();
        let (sin, cos) = scaled.sin_cos();
        for (idx, c) in p.iter_mut().enumerate() {
            *c = center[idx] + r * (cos * side * unit_axis[idx] + sin * perp[idx] / perp_norm);
        }
    }))
}
