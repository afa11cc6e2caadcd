//! Numerical certification that centric transforms preserve k-means optima.
//!
//! For a reference partition `{T, Z_2, …, Z_k}`, a subset `P ⊆ T` moved by
//! the centric set transform with factor `λ`, and any alternative
//! k-clustering `{K_i}` (an [`AlternativeSplit`]), define
//!
//! ```text
//! h(λ) = Q({T'(λ), Z_2, …, Z_k}) − Q({K_1'(λ), …, K_k'(λ)})
//! ```
//!
//! on the transformed points. `h` is a quadratic polynomial in λ whose λ²
//! coefficient
//!
//! ```text
//! Σ_i (|A_i| − |A_i|(|B_i| + Σ_j |C_{i,j}|) / |K_i|) · v_{A_i}ᵀ v_{A_i},
//! v_{A_i} = μ(A_i) − μ(P)
//! ```
//!
//! is nonnegative. When the reference is a k-means optimum, `h(1) ≤ 0` by
//! optimality and `h(0) ≤ 0` by a reassignment argument on the collapsed
//! subset, so `h(λ) ≤ 0` on all of `[0, 1]`: no alternative clustering can
//! beat the reference at any contraction level.
//!
//! The module evaluates `h` two independent ways — [`h_lambda`] from raw
//! costs on transformed coordinates, [`h_decompose`] from the closed-form
//! coefficients — and the agreement of the two routes is itself the main
//! correctness check. [`verify_theorem3`] closes the loop with the
//! exhaustive oracle on both sides of a transform.

mod splits;

pub use splits::{
    cluster_of_subset, enumerate_alternative_splits, sample_alternative_splits, AlternativeSplit,
    DEFAULT_SPLIT_BUDGET, DEFAULT_SPLIT_SAMPLES,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{centroid_unchecked, dist_sq, Dataset, Partition};
use crate::error::{Error, Result};
use crate::kmeans::{
    clustering_error, cost_of_labels, kmeans_ideal, two_set_between_ss, ClusteringResult,
};
use crate::transforms::{centric_map, gamma_plus_plus, gamma_star};

/// Optimality gaps below this are treated as degenerate ties: preservation
/// of "the" optimum is ill-posed when a distinct partition costs the same.
pub const TIE_GAP_THRESHOLD: f64 = 1e-9;

fn check_h_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && (0.0..=1.0).contains(&lambda)) {
        return Err(Error::InvalidParam(format!(
            "h(λ) is defined for λ in [0, 1], got {lambda}"
        )));
    }
    Ok(())
}

/// Evaluates `h(λ)` directly: applies the centric map to `p`, computes both
/// partition costs on the transformed points, and returns the difference.
///
/// `λ = 0` is allowed here as the analytic limit in which all of `P` sits
/// at `μ(P)`; the public dataset transforms reject it.
pub fn h_lambda(
    dataset: &Dataset,
    reference: &Partition,
    split: &AlternativeSplit,
    p: &[usize],
    lambda: f64,
) -> Result<f64> {
    check_h_lambda(lambda)?;
    reference.check_for(dataset)?;
    split.validate(reference, p)?;
    let transformed = centric_map(dataset, split.p(), lambda);
    let q_reference =
        cost_of_labels(&transformed, reference.labels(), reference.k(), false);
    let q_alternative = cost_of_labels(&transformed, &split.alt_labels(), split.k(), false);
    Ok(q_reference - q_alternative)
}

/// Size, gravity center and within-sum-of-squares of a subset; empty
/// subsets report size 0, a zero center and zero scatter.
fn subset_stats(dataset: &Dataset, subset: &[usize]) -> (usize, Vec<f64>, f64) {
    if subset.is_empty() {
        return (0, vec![0.0; dataset.dim()], 0.0);
    }
    let mu = centroid_unchecked(dataset, subset);
    let ss = subset.iter().map(|&i| dist_sq(dataset.point(i), &mu)).sum();
    (subset.len(), mu, ss)
}

/// The constant families of the `h(λ)` expansion, one entry per alternative
/// cluster (and per `Z_j` where applicable):
///
/// * `a_b[i]   = 2·v_{A_i}ᵀ(μ(P) − μ(B_i))`
/// * `b_p[i]   = ‖μ(P) − μ(B_i)‖²`
/// * `a_c[i][j] = 2·v_{A_i}ᵀ(μ(P) − μ(C_{i,j}))`
/// * `c_p[i][j] = ‖μ(P) − μ(C_{i,j})‖²`
///
/// Entries touching an empty set are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossConstants {
    pub a_b: Vec<f64>,
    pub b_p: Vec<f64>,
    pub a_c: Vec<Vec<f64>>,
    pub c_p: Vec<Vec<f64>>,
}

/// The closed-form quadratic decomposition of `h(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HLambdaAnalysis {
    /// Coefficient at λ²; nonnegative.
    pub quad_coeff: f64,
    /// Coefficient at λ.
    pub lin_coeff: f64,
    /// λ-independent part (the constant `c_h` plus the constant tails of
    /// the cross terms).
    pub const_coeff: f64,
    /// `v_{A_i} = μ(A_i) − μ(P)` per alternative cluster (zero for empty `A_i`).
    pub v_a: Vec<Vec<f64>>,
    pub cross_constants: CrossConstants,
    /// Whether some `A_i` is non-empty with `v_{A_i} ≠ 0`, which is what
    /// makes `quad_coeff` strictly positive.
    pub quad_strictly_positive: bool,
}

impl HLambdaAnalysis {
    /// Evaluates the fitted polynomial.
    pub fn h_at(&self, lambda: f64) -> f64 {
        (self.quad_coeff * lambda + self.lin_coeff) * lambda + self.const_coeff
    }
}

/// Expands `h(λ)` in closed form from subset statistics on the *original*
/// dataset — no transformed coordinates are ever touched, so this route is
/// independent of [`h_lambda`].
pub fn h_decompose(
    dataset: &Dataset,
    reference: &Partition,
    split: &AlternativeSplit,
    p: &[usize],
) -> Result<HLambdaAnalysis> {
    reference.check_for(dataset)?;
    split.validate(reference, p)?;
    let k = split.k();
    let d = dataset.dim();

    let (n_p, mu_p, _) = subset_stats(dataset, split.p());
    let t_members = reference.cluster_members(split.t_cluster());
    let y: Vec<usize> =
        t_members.iter().copied().filter(|i| split.p().binary_search(i).is_err()).collect();
    let (n_y, mu_y, ss_y) = subset_stats(dataset, &y);

    let mut v_a = vec![vec![0.0; d]; k];
    let mut quad = 0.0;
    let mut lin = 0.0;
    let mut cross = CrossConstants {
        a_b: vec![0.0; k],
        b_p: vec![0.0; k],
        a_c: vec![vec![0.0; k - 1]; k],
        c_p: vec![vec![0.0; k - 1]; k],
    };
    let mut strictly_positive = false;

    // c_h: the wholly λ-independent part of h
    let mut c_h = ss_y + two_set_between_ss(n_p, &mu_p, n_y, &mu_y);
    for &z in split.z_labels() {
        let members = reference.cluster_members(z);
        let (_, _, ss_z) = subset_stats(dataset, &members);
        c_h += ss_z;
    }

    // per-alternative-cluster pieces
    let mut const_cross_tail = 0.0;
    for i in 0..k {
        let (n_a, mu_a, _) = subset_stats(dataset, split.a_set(i));
        if n_a > 0 {
            for ((v, a), p_c) in v_a[i].iter_mut().zip(&mu_a).zip(&mu_p) {
                *v = a - p_c;
            }
        }
        let v_sq: f64 = v_a[i].iter().map(|c| c * c).sum();
        if n_a > 0 && v_sq > 0.0 {
            strictly_positive = true;
        }
        let (n_b, mu_b, ss_b) = subset_stats(dataset, split.b_set(i));
        c_h -= ss_b;
        let mut c_sizes = vec![0usize; k - 1];
        let mut c_means: Vec<Vec<f64>> = Vec::with_capacity(k - 1);
        for zj in 0..k - 1 {
            let (n_c, mu_c, ss_c) = subset_stats(dataset, split.c_set(i, zj));
            c_h -= ss_c;
            c_sizes[zj] = n_c;
            c_means.push(mu_c);
        }
        let n_i = n_a + n_b + c_sizes.iter().sum::<usize>();
        debug_assert!(n_i > 0, "alternative clusters are non-empty by construction");
        let inv_n_i = 1.0 / n_i as f64;

        if n_b > 0 {
            cross.b_p[i] = dist_sq(&mu_p, &mu_b);
            if n_a > 0 {
                cross.a_b[i] =
                    2.0 * v_a[i].iter().zip(mu_p.iter().zip(&mu_b)).map(|(v, (p, b))| v * (p - b)).sum::<f64>();
            }
        }
        for zj in 0..k - 1 {
            if c_sizes[zj] > 0 {
                cross.c_p[i][zj] = dist_sq(&mu_p, &c_means[zj]);
                if n_a > 0 {
                    cross.a_c[i][zj] = 2.0
                        * v_a[i]
                            .iter()
                            .zip(mu_p.iter().zip(&c_means[zj]))
                            .map(|(v, (p, c))| v * (p - c))
                            .sum::<f64>();
                }
            }
        }

        let rest = (n_b + c_sizes.iter().sum::<usize>()) as f64;
        quad += (n_a as f64 - n_a as f64 * rest * inv_n_i) * v_sq;
        let mut lin_i = n_a as f64 * n_b as f64 * cross.a_b[i];
        let mut const_i = n_a as f64 * n_b as f64 * cross.b_p[i];
        for zj in 0..k - 1 {
            lin_i += n_a as f64 * c_sizes[zj] as f64 * cross.a_c[i][zj];
            const_i += n_a as f64 * c_sizes[zj] as f64 * cross.c_p[i][zj];
        }
        lin -= inv_n_i * lin_i;
        const_cross_tail -= inv_n_i * const_i;

        // the between-group terms of K_i that never touch A_i
        let mut between_bc = 0.0;
        for zj in 0..k - 1 {
            between_bc +=
                n_b as f64 * c_sizes[zj] as f64 * pair_dist_sq(n_b, &mu_b, c_sizes[zj], &c_means[zj]);
            for zj2 in zj + 1..k - 1 {
                between_bc += c_sizes[zj] as f64
                    * c_sizes[zj2] as f64
                    * pair_dist_sq(c_sizes[zj], &c_means[zj], c_sizes[zj2], &c_means[zj2]);
            }
        }
        c_h -= inv_n_i * between_bc;
    }
    let constant = c_h + const_cross_tail;

    debug_assert!(quad >= -1e-12, "λ² coefficient must be nonnegative, got {quad}");
    Ok(HLambdaAnalysis {
        quad_coeff: quad,
        lin_coeff: lin,
        const_coeff: constant,
        v_a,
        cross_constants: cross,
        quad_strictly_positive: strictly_positive,
    })
}

fn pair_dist_sq(n_a: usize, mu_a: &[f64], n_b: usize, mu_b: &[f64]) -> f64 {
    if n_a == 0 || n_b == 0 {
        return 0.0;
    }
    dist_sq(mu_a, mu_b)
}

/// Exact quadratic through `(0, h0)`, `(½, h_half)`, `(1, h1)` — the
/// three-point certification route for the closed-form coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn through(h0: f64, h_half: f64, h1: f64) -> Self {
        let a = 2.0 * h0 - 4.0 * h_half + 2.0 * h1;
        let b = -3.0 * h0 + 4.0 * h_half - h1;
        Self { a, b, c: h0 }
    }

    pub fn at(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Outcome kind of a preservation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Preserved,
    TieSkipped,
    Violated,
}

/// Details carried by a `violated` verdict: both optima and the cost the
/// old optimum achieves on the transformed points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationDetails {
    pub labels_before: Vec<usize>,
    pub labels_after: Vec<usize>,
    pub before_labels_cost_after_transform: f64,
}

/// Verdict of one oracle-vs-oracle preservation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub verdict: VerdictKind,
    pub pre_cost: f64,
    pub post_cost: f64,
    pub gap_pre: Option<f64>,
    pub gap_post: Option<f64>,
    pub lambda: f64,
    pub subset_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationDetails>,
}

/// Checks that the Γ⁺⁺ transform of the ideal optimum leaves the ideal
/// optimum unchanged (up to relabeling).
///
/// Computes the exhaustive optimum, applies Γ⁺⁺ with subset `p` of its own
/// optimal clustering, recomputes the exhaustive optimum, and compares.
/// Near-ties (gap below [`TIE_GAP_THRESHOLD`] on either side) are skipped
/// rather than judged. A `violated` verdict would falsify the preservation
/// theorem or reveal an implementation bug.
pub fn verify_theorem3(
    dataset: &Dataset,
    k: usize,
    p: &[usize],
    lambda: f64,
) -> Result<TheoremVerdict> {
    let before = kmeans_ideal(dataset, k)?;
    verify_theorem3_with_reference(dataset, &before, p, lambda)
}

/// [`verify_theorem3`] with a precomputed ideal optimum for the input.
pub fn verify_theorem3_with_reference(
    dataset: &Dataset,
    before: &ClusteringResult,
    p: &[usize],
    lambda: f64,
) -> Result<TheoremVerdict> {
    let t = cluster_of_subset(&before.partition, p)?;
    let (transformed, _) = gamma_plus_plus(dataset, &before.partition, t, p, lambda)?;
    judge_preservation(before, &transformed, lambda, p.len())
}

/// Checks preservation of the ideal optimum under the full-cluster Γ\*
/// transform.
pub fn verify_gamma_star(
    dataset: &Dataset,
    k: usize,
    cluster: usize,
    lambda: f64,
) -> Result<TheoremVerdict> {
    let before = kmeans_ideal(dataset, k)?;
    verify_gamma_star_with_reference(dataset, &before, cluster, lambda)
}

/// [`verify_gamma_star`] with a precomputed ideal optimum.
pub fn verify_gamma_star_with_reference(
    dataset: &Dataset,
    before: &ClusteringResult,
    cluster: usize,
    lambda: f64,
) -> Result<TheoremVerdict> {
    let transformed = gamma_star(dataset, &before.partition, cluster, lambda)?;
    let size = before.partition.cluster_members(cluster).len();
    judge_preservation(before, &transformed, lambda, size)
}

fn judge_preservation(
    before: &ClusteringResult,
    transformed: &Dataset,
    lambda: f64,
    subset_size: usize,
) -> Result<TheoremVerdict> {
    let k = before.partition.k();
    let after = kmeans_ideal(transformed, k)?;
    let gap_pre = before.optimality_gap;
    let gap_post = after.optimality_gap;
    let tie = gap_pre.is_some_and(|g| g < TIE_GAP_THRESHOLD)
        || gap_post.is_some_and(|g| g < TIE_GAP_THRESHOLD);
    let preserved = clustering_error(&before.partition, &after.partition)? == 0;
    let verdict = if tie {
        VerdictKind::TieSkipped
    } else if preserved {
        VerdictKind::Preserved
    } else {
        VerdictKind::Violated
    };
    let violation = (verdict == VerdictKind::Violated).then(|| ViolationDetails {
        labels_before: before.partition.labels().to_vec(),
        labels_after: after.partition.labels().to_vec(),
        before_labels_cost_after_transform: cost_of_labels(
            transformed,
            before.partition.labels(),
            k,
            false,
        ),
    });
    Ok(TheoremVerdict {
        verdict,
        pre_cost: before.cost,
        post_cost: after.cost,
        gap_pre,
        gap_post,
        lambda,
        subset_size,
        violation,
    })
}

/// Outcome of the λ = 0 collapse argument on one alternative split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseVerdict {
    /// `h(0)`.
    pub h0: f64,
    pub q_reference0: f64,
    pub q_alternative0: f64,
    /// Cost after reassigning the whole collapsed subset to the alternative
    /// cluster whose center is nearest.
    pub q_reassigned0: f64,
    /// `Q(K″(0)) ≤ Q(K′(0))`.
    pub reassignment_ok: bool,
    /// `h(0) ≤ 0` (within tolerance).
    pub endpoint_ok: bool,
}

impl CollapseVerdict {
    pub fn passed(&self) -> bool {
        self.reassignment_ok && self.endpoint_ok
    }
}

/// Certifies the λ = 0 endpoint: with all of `P` collapsed onto `μ(P)`,
/// moving the collapsed subset wholesale into the alternative cluster with
/// the nearest center cannot raise the alternative's cost, and (for an
/// ideal-optimal reference) `h(0) ≤ 0`.
pub fn verify_lambda0_collapse(
    dataset: &Dataset,
    reference: &Partition,
    split: &AlternativeSplit,
    p: &[usize],
) -> Result<CollapseVerdict> {
    reference.check_for(dataset)?;
    split.validate(reference, p)?;
    let k = split.k();
    let transformed = centric_map(dataset, split.p(), 0.0);
    let alt_labels = split.alt_labels();
    let q_reference0 = cost_of_labels(&transformed, reference.labels(), k, false);
    let q_alternative0 = cost_of_labels(&transformed, &alt_labels, k, false);

    // centers of the K'_i(0) on the transformed points
    let d = dataset.dim();
    let mut sums = vec![vec![0.0; d]; k];
    let mut sizes = vec![0usize; k];
    for (i, point) in transformed.points().enumerate() {
        sizes[alt_labels[i]] += 1;
        for (s, c) in sums[alt_labels[i]].iter_mut().zip(point) {
            *s += c;
        }
    }
    let mu_p = centroid_unchecked(dataset, split.p());
    let mut nearest = 0usize;
    let mut nearest_d = f64::INFINITY;
    for i in 0..k {
        let mu_i: Vec<f64> = sums[i].iter().map(|s| s / sizes[i] as f64).collect();
        let dist = dist_sq(&mu_p, &mu_i);
        if dist < nearest_d {
            nearest_d = dist;
            nearest = i;
        }
    }

    // K″: the whole collapsed subset joins the nearest center's cluster.
    // Clusters that held only A-points go empty; cost still well defined.
    let mut reassigned = alt_labels;
    for &i in split.p() {
        reassigned[i] = nearest;
    }
    let q_reassigned0 = cost_of_labels(&transformed, &reassigned, k, true);

    let tol = 1e-9 * q_reference0.abs().max(q_alternative0.abs()).max(1.0);
    Ok(CollapseVerdict {
        h0: q_reference0 - q_alternative0,
        q_reference0,
        q_alternative0,
        q_reassigned0,
        reassignment_ok: q_reassigned0 <= q_alternative0 + tol,
        endpoint_ok: q_reference0 - q_alternative0 <= tol,
    })
}

/// Which transform a preservation suite exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteTheorem {
    /// Γ⁺⁺ on random uniform subsets of one optimal cluster.
    GammaPlusPlus,
    /// Γ\* on one full optimal cluster.
    GammaStar,
}

/// Configuration of a randomized oracle preservation suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub theorem: SuiteTheorem,
    pub instances: usize,
    /// Points per instance.
    pub n: usize,
    /// Dimensions cycled across instances.
    pub dims: Vec<usize>,
    /// Cluster counts cycled across instances.
    pub ks: Vec<usize>,
    /// Contraction factors cycled across instances.
    pub lambdas: Vec<f64>,
    /// Bounds for the Γ⁺⁺ subset size (clamped to the cluster size).
    pub subset_min: usize,
    pub subset_max: usize,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(theorem: SuiteTheorem) -> Self {
        Self {
            theorem,
            instances: 200,
            n: 12,
            dims: vec![2, 3],
            ks: vec![2, 3],
            lambdas: vec![0.25, 0.5, 0.75],
            subset_min: 2,
            subset_max: 5,
            seed: 0,
        }
    }
}

/// Aggregate outcome of a preservation suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub instances: usize,
    pub preserved: usize,
    pub tie_skipped: usize,
    pub violated: usize,
    /// Verdicts of every violated instance (empty when the suite passes).
    pub violations: Vec<TheoremVerdict>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.violated == 0
    }
}

/// Runs seeded random instances through the chosen preservation check.
///
/// Instances are uniform random point clouds regenerated until the ideal
/// optimum has a healthy optimality gap, so `tie_skipped` can arise only
/// from post-transform ties. Instances shard across threads; per-instance
/// seeds derive from the master seed, so the summary is deterministic.
pub fn run_preservation_suite(config: &SuiteConfig) -> Result<SuiteSummary> {
    if config.instances == 0 || config.n < 2 {
        return Err(Error::InvalidParam("need at least one instance of two points".into()));
    }
    if config.dims.is_empty() || config.ks.is_empty() || config.lambdas.is_empty() {
        return Err(Error::InvalidParam("dims, ks and lambdas must be non-empty".into()));
    }
    let verdicts: Vec<Result<TheoremVerdict>> = (0..config.instances)
        .into_par_iter()
        .map(|index| run_suite_instance(config, index))
        .collect();
    let mut summary = SuiteSummary {
        instances: config.instances,
        preserved: 0,
        tie_skipped: 0,
        violated: 0,
        violations: Vec::new(),
    };
    for verdict in verdicts {
        let verdict = verdict?;
        match verdict.verdict {
            VerdictKind::Preserved => summary.preserved += 1,
            VerdictKind::TieSkipped => summary.tie_skipped += 1,
            VerdictKind::Violated => {
                summary.violated += 1;
                summary.violations.push(verdict);
            }
        }
    }
    Ok(summary)
}

fn run_suite_instance(config: &SuiteConfig, index: usize) -> Result<TheoremVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let dim = config.dims[index % config.dims.len()];
    let k = config.ks[index % config.ks.len()];
    let lambda = config.lambdas[index % config.lambdas.len()];

    // draw until the pre-transform optimum is well separated from the
    // runner-up; degenerate draws are vanishingly rare for random clouds
    for _attempt in 0..64 {
        let dataset = Dataset::new(
            (0..config.n)
                .map(|_| (0..dim).map(|_| rng.random::<f64>() * 4.0).collect())
                .collect(),
        )?;
        let before = kmeans_ideal(&dataset, k)?;
        if before.optimality_gap.is_some_and(|g| g < TIE_GAP_THRESHOLD) {
            continue;
        }
        match config.theorem {
            SuiteTheorem::GammaPlusPlus => {
                let sizes = before.partition.cluster_sizes();
                let eligible: Vec<usize> =
                    (0..k).filter(|&c| sizes[c] >= config.subset_min.max(1)).collect();
                let Some(&cluster) = eligible.get(rng.random_range(0..eligible.len().max(1)))
                else {
                    continue;
                };
                let members = before.partition.cluster_members(cluster);
                let hi = config.subset_max.min(members.len());
                let lo = config.subset_min.clamp(1, hi);
                let size = rng.random_range(lo..=hi);
                let subset: Vec<usize> = rand::seq::index::sample(&mut rng, members.len(), size)
                    .iter()
                    .map(|i| members[i])
                    .collect();
                return verify_theorem3_with_reference(&dataset, &before, &subset, lambda);
            }
            SuiteTheorem::GammaStar => {
                let cluster = rng.random_range(0..k);
                return verify_gamma_star_with_reference(&dataset, &before, cluster, lambda);
            }
        }
    }
    Err(Error::InvalidParam(format!(
        "could not draw a gap-separated instance for suite index {index}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmeans::{cost, cost_pairwise};

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    fn random_instance(
        rng: &mut ChaCha8Rng,
        n: usize,
        dim: usize,
    ) -> Dataset {
        Dataset::new(
            (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>() * 4.0).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn h_is_zero_on_the_identity_split_at_lambda_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dataset = random_instance(&mut rng, 10, 2);
        let reference = kmeans_ideal(&dataset, 2).unwrap().partition;
        let p = &reference.cluster_members(0)[..2];
        let split = AlternativeSplit::identity(&reference, p).unwrap();
        let h = h_lambda(&dataset, &reference, &split, p, 1.0).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn h_at_one_is_nonpositive_for_ideal_references() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..20 {
            let n = 8 + trial % 4;
            let dataset = random_instance(&mut rng, n, 2);
            let reference = kmeans_ideal(&dataset, 2).unwrap().partition;
            let members = reference.cluster_members(0);
            let p = &members[..members.len().min(3)];
            for split in sample_alternative_splits(&reference, p, 20, trial as u64).unwrap() {
                let h = h_lambda(&dataset, &reference, &split, p, 1.0).unwrap();
                assert!(h <= 1e-9, "h(1) = {h} must be ≤ 0 for an optimal reference");
            }
        }
    }

    #[test]
    fn h_matches_pairwise_cost_reimplementation() {
        // independent oracle: compute both Q values through the pairwise
        // form on the transformed dataset
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dataset = random_instance(&mut rng, 10, 2);
        let reference = Partition::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1], 2);
        let p = [0, 2, 4];
        let alt = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let split = AlternativeSplit::from_alt_labels(&reference, &p, &alt).unwrap();
        for lambda in [0.0, 0.3, 0.5, 0.8, 1.0] {
            let h = h_lambda(&dataset, &reference, &split, &p, lambda).unwrap();
            let transformed = centric_map(&dataset, &p, lambda);
            let q_ref = cost_pairwise(&transformed, &reference).unwrap();
            let q_alt =
                cost_pairwise(&transformed, &Partition::new(alt.clone(), 2)).unwrap();
            assert!(rel_err(h, q_ref - q_alt) <= 1e-9, "lambda {lambda}");
        }
    }

    #[test]
    fn h_lambda_validates_inputs() {
        let dataset = Dataset::new(vec![vec![0.0], vec![1.0], vec![5.0], vec![6.0]]).unwrap();
        let reference = Partition::new(vec![0, 0, 1, 1], 2);
        let p = [0];
        let split = AlternativeSplit::identity(&reference, &p).unwrap();
        assert!(h_lambda(&dataset, &reference, &split, &p, 1.5).is_err());
        assert!(h_lambda(&dataset, &reference, &split, &p, -0.1).is_err());
        // split built for a different subset
        assert!(h_lambda(&dataset, &reference, &split, &[1], 0.5).is_err());
        // split built for a different reference
        let other = Partition::new(vec![0, 1, 0, 1], 2);
        assert!(h_lambda(&dataset, &other, &split, &p, 0.5).is_err());
    }

    #[test]
    fn decompose_quad_is_zero_when_subcentroids_coincide() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dataset = random_instance(&mut rng, 9, 3);
        let reference = kmeans_ideal(&dataset, 3).unwrap().partition;
        let t = (0..3).max_by_key(|&c| reference.cluster_members(c).len()).unwrap();
        let p = reference.cluster_members(t);
        // identity split: A_t = P so v_{A_t} = 0, all other A_i empty
        let split = AlternativeSplit::identity(&reference, &p).unwrap();
        let analysis = h_decompose(&dataset, &reference, &split, &p).unwrap();
        assert!(analysis.quad_coeff.abs() <= 1e-12);
        assert!(!analysis.quad_strictly_positive);
    }

    #[test]
    fn decompose_matches_hand_computed_coefficient() {
        // A_1 = {(1,1),(1,-1)} and A_2 = {(-1,1),(-1,-1)} around μ(P) = 0,
        // so v_{A_1} = (1,0), v_{A_2} = (-1,0). With |B_1| = 3, |B_2| = 1,
        // |C_{2,2}| = 2 the coefficient is
        //   (2 - 2·3/5)·1  +  (2 - 2·3/5)·1  =  0.8 + 0.8
        let points = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![0.0, 5.0],
            vec![0.0, 6.0],
            vec![0.0, 7.0],
            vec![0.0, 8.0],
            vec![10.0, 0.0],
            vec![12.0, 0.0],
        ];
        let dataset = Dataset::new(points).unwrap();
        let reference = Partition::new(vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1], 2);
        let p = [0, 1, 2, 3];
        let alt = vec![0, 0, 1, 1, 0, 0, 0, 1, 1, 1];
        let split = AlternativeSplit::from_alt_labels(&reference, &p, &alt).unwrap();
        assert_eq!(split.a_set(0), &[0, 1]);
        assert_eq!(split.b_set(0), &[4, 5, 6]);
        assert_eq!(split.b_set(1), &[7]);
        assert_eq!(split.c_set(1, 0), &[8, 9]);
        let analysis = h_decompose(&dataset, &reference, &split, &p).unwrap();
        assert_eq!(analysis.v_a[0], vec![1.0, 0.0]);
        assert_eq!(analysis.v_a[1], vec![-1.0, 0.0]);
        assert!((analysis.quad_coeff - 1.6).abs() <= 1e-12, "{}", analysis.quad_coeff);
        assert!(analysis.quad_strictly_positive);
    }

    #[test]
    fn decompose_agrees_with_direct_evaluation_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..30u64 {
            let n = 8 + (trial % 5) as usize;
            let dim = 2 + (trial % 2) as usize;
            let k = 2 + (trial % 2) as usize;
            let dataset = random_instance(&mut rng, n, dim);
            let reference = kmeans_ideal(&dataset, k).unwrap().partition;
            let t = (0..k).max_by_key(|&c| reference.cluster_members(c).len()).unwrap();
            let members = reference.cluster_members(t);
            let size = 2.min(members.len());
            let p = &members[..size];
            for split in sample_alternative_splits(&reference, p, 5, trial).unwrap() {
                let analysis = h_decompose(&dataset, &reference, &split, p).unwrap();
                for lambda in [0.0, 0.1, 0.25, 0.5, 0.77, 1.0] {
                    let direct = h_lambda(&dataset, &reference, &split, p, lambda).unwrap();
                    assert!(
                        rel_err(direct, analysis.h_at(lambda)) <= 1e-8,
                        "λ = {lambda}: direct {direct} vs closed form {}",
                        analysis.h_at(lambda)
                    );
                }
                assert!(analysis.quad_coeff >= -1e-12);
            }
        }
    }

    #[test]
    fn three_point_fit_recovers_closed_form_quad() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for trial in 0..20u64 {
            let dataset = random_instance(&mut rng, 10, 2);
            let reference = kmeans_ideal(&dataset, 2).unwrap().partition;
            let members = reference.cluster_members(0);
            let p = &members[..members.len().min(4)];
            for split in sample_alternative_splits(&reference, p, 5, trial + 100).unwrap() {
                let h_at = |lambda: f64| h_lambda(&dataset, &reference, &split, p, lambda).unwrap();
                let fit = Quadratic::through(h_at(0.0), h_at(0.5), h_at(1.0));
                let analysis = h_decompose(&dataset, &reference, &split, p).unwrap();
                assert!(rel_err(fit.a, analysis.quad_coeff) <= 1e-8);
                assert!(rel_err(fit.b, analysis.lin_coeff) <= 1e-8);
                assert!(rel_err(fit.c, analysis.const_coeff) <= 1e-8);
                assert!(rel_err(fit.at(0.3), h_at(0.3)) <= 1e-8);
            }
        }
    }

    #[test]
    fn theorem3_lambda_one_preserves_trivially() {
        let (dataset, _) = crate::datagen::gaussian_blobs(2, 6, 2, 0.5, 8.0, 44).unwrap();
        let optimum = kmeans_ideal(&dataset, 2).unwrap();
        let p = &optimum.partition.cluster_members(0)[..3];
        let verdict = verify_theorem3(&dataset, 2, p, 1.0).unwrap();
        assert_eq!(verdict.verdict, VerdictKind::Preserved);
        assert_eq!(verdict.pre_cost, verdict.post_cost);
    }

    #[test]
    fn theorem3_two_blob_instance_preserved() {
        let (dataset, _) = crate::datagen::gaussian_blobs(2, 6, 2, 0.6, 9.0, 45).unwrap();
        let optimum = kmeans_ideal(&dataset, 2).unwrap();
        let p = &optimum.partition.cluster_members(1)[..4];
        let verdict = verify_theorem3(&dataset, 2, p, 0.5).unwrap();
        assert_eq!(verdict.verdict, VerdictKind::Preserved);
        assert_eq!(verdict.subset_size, 4);
    }

    #[test]
    fn theorem3_three_blob_instance_preserved() {
        let (dataset, _) = crate::datagen::gaussian_blobs(3, 4, 2, 0.5, 8.0, 46).unwrap();
        let optimum = kmeans_ideal(&dataset, 3).unwrap();
        for lambda in [0.25, 0.75] {
            let p = &optimum.partition.cluster_members(2)[..2];
            let verdict = verify_theorem3(&dataset, 3, p, lambda).unwrap();
            assert_eq!(verdict.verdict, VerdictKind::Preserved, "lambda {lambda}");
        }
    }

    #[test]
    fn theorem3_rejects_subset_spanning_clusters() {
        let dataset = Dataset::new(vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]]).unwrap();
        // points 0 and 2 end up in different ideal clusters
        assert!(verify_theorem3(&dataset, 2, &[0, 2], 0.5).is_err());
    }

    #[test]
    fn gamma_star_verdicts_preserved() {
        let (dataset, _) = crate::datagen::gaussian_blobs(2, 6, 3, 0.5, 7.0, 47).unwrap();
        for lambda in [0.25, 0.5, 0.75] {
            let verdict = verify_gamma_star(&dataset, 2, 0, lambda).unwrap();
            assert_eq!(verdict.verdict, VerdictKind::Preserved);
        }
    }

    #[test]
    fn collapse_identity_split_has_zero_h0() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dataset = random_instance(&mut rng, 9, 2);
        let reference = kmeans_ideal(&dataset, 2).unwrap().partition;
        let p = &reference.cluster_members(0)[..2];
        let split = AlternativeSplit::identity(&reference, p).unwrap();
        let verdict = verify_lambda0_collapse(&dataset, &reference, &split, p).unwrap();
        assert_eq!(verdict.h0, 0.0);
        assert!(verdict.passed());
    }

    #[test]
    fn collapse_holds_for_every_enumerated_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..6 {
            let n = 7 + trial % 3;
            let k = 2 + trial % 2;
            let dataset = random_instance(&mut rng, n, 2);
            let reference = kmeans_ideal(&dataset, k).unwrap().partition;
            let t = (0..k).max_by_key(|&c| reference.cluster_members(c).len()).unwrap();
            let members = reference.cluster_members(t);
            let p = &members[..2.min(members.len())];
            for split in
                enumerate_alternative_splits(&reference, p, DEFAULT_SPLIT_BUDGET).unwrap()
            {
                let verdict = verify_lambda0_collapse(&dataset, &reference, &split, p).unwrap();
                assert!(
                    verdict.passed(),
                    "n={n} k={k}: h0={} reassigned={} alt={}",
                    verdict.h0,
                    verdict.q_reassigned0,
                    verdict.q_alternative0
                );
                let h0 = h_lambda(&dataset, &reference, &split, p, 0.0).unwrap();
                assert_eq!(h0, verdict.h0);
            }
        }
    }

    #[test]
    fn preservation_suite_has_no_violations() {
        let mut config = SuiteConfig::new(SuiteTheorem::GammaPlusPlus);
        config.instances = 12;
        config.n = 10;
        config.seed = 5;
        let summary = run_preservation_suite(&config).unwrap();
        assert!(summary.passed());
        assert_eq!(summary.preserved + summary.tie_skipped, 12);

        let mut config = SuiteConfig::new(SuiteTheorem::GammaStar);
        config.instances = 12;
        config.n = 10;
        config.seed = 6;
        let summary = run_preservation_suite(&config).unwrap();
        assert!(summary.passed());
    }

    #[test]
    fn suite_is_deterministic() {
        let mut config = SuiteConfig::new(SuiteTheorem::GammaPlusPlus);
        config.instances = 6;
        config.n = 9;
        config.seed = 11;
        let a = run_preservation_suite(&config).unwrap();
        let b = run_preservation_suite(&config).unwrap();
        assert_eq!(a, b);
    }
}
