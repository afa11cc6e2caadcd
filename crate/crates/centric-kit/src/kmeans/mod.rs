//! The k-means cost in its centroid and pairwise forms, Lloyd's algorithm
//! with seeded restarts, the exhaustive optimal oracle, and the
//! label-matching error metric.
//!
//! The cost of a partition Γ is
//!
//! ```text
//! Q(Γ) = Σ_j Σ_{x ∈ C_j} ‖x − μ_j‖²
//!      = Σ_j (1/n_j)  Σ_{{x,y} ⊆ C_j} ‖x − y‖²          (unordered pairs)
//!      = Σ_j (1/2n_j) Σ_{x ∈ C_j} Σ_{y ∈ C_j} ‖x − y‖²  (ordered pairs)
//! ```
//!
//! where μ_j is the gravity center of cluster C_j. [`cost`] evaluates the
//! first form; [`cost_pairwise`] evaluates the other two and checks that
//! they agree, which gives an independent route through the same number.

mod ideal;
mod matching;
pub(crate) mod partitions;

pub use ideal::{kmeans_ideal, kmeans_ideal_with_budget, DEFAULT_IDEAL_BUDGET};
pub use matching::clustering_error;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{dist_sq, Dataset, Partition};
use crate::error::{Error, Result};

/// K-means cost `Q` of a valid partition, centroid form.
pub fn cost(dataset: &Dataset, partition: &Partition) -> Result<f64> {
    partition.check_for(dataset)?;
    Ok(cost_of_labels(dataset, partition.labels(), partition.k(), false))
}

/// `Q` via both pairwise-distance forms.
///
/// Evaluates the unordered-pair and ordered-pair forms independently and
/// asserts that they agree to 1e-9 relative before returning the
/// unordered-pair value.
pub fn cost_pairwise(dataset: &Dataset, partition: &Partition) -> Result<f64> {
    let (unordered, ordered) = cost_pairwise_forms(dataset, partition)?;
    let scale = unordered.abs().max(ordered.abs()).max(1.0);
    assert!(
        (unordered - ordered).abs() <= 1e-9 * scale,
        "pairwise cost forms disagree: {unordered} vs {ordered}"
    );
    Ok(unordered)
}

/// The two pairwise forms of `Q`: `(unordered, ordered)`.
pub fn cost_pairwise_forms(dataset: &Dataset, partition: &Partition) -> Result<(f64, f64)> {
    partition.check_for(dataset)?;
    let k = partition.k();
    let mut unordered = vec![0.0f64; k];
    let mut ordered = vec![0.0f64; k];
    let n = dataset.len();
    for i in 0..n {
        let li = partition.label(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            if partition.label(j) == li {
                let d2 = dist_sq(dataset.point(i), dataset.point(j));
                ordered[li] += d2;
                if i < j {
                    unordered[li] += d2;
                }
            }
        }
    }
    let sizes = partition.cluster_sizes();
    let u: f64 = unordered.iter().zip(&sizes).map(|(s, &n_j)| s / n_j as f64).sum();
    let o: f64 = ordered.iter().zip(&sizes).map(|(s, &n_j)| s / (2.0 * n_j as f64)).sum();
    Ok((u, o))
}

/// Centroid-form cost for a raw label vector. With `allow_empty`, clusters
/// without members simply contribute nothing (used by internal analyses that
/// rearrange partitions; public entry points validate instead).
pub(crate) fn cost_of_labels(
    dataset: &Dataset,
    labels: &[usize],
    k: usize,
    allow_empty: bool,
) -> f64 {
    let d = dataset.dim();
    let mut sums = vec![0.0f64; k * d];
    let mut sizes = vec![0usize; k];
    for (i, p) in dataset.points().enumerate() {
        let l = labels[i];
        sizes[l] += 1;
        for (s, c) in sums[l * d..(l + 1) * d].iter_mut().zip(p) {
            *s += c;
        }
    }
    let mut centroids = sums;
    for (l, &size) in sizes.iter().enumerate() {
        if size == 0 {
            debug_assert!(allow_empty, "empty cluster {l} in cost computation");
            continue;
        }
        let inv = 1.0 / size as f64;
        for c in &mut centroids[l * d..(l + 1) * d] {
            *c *= inv;
        }
    }
    let mut total = 0.0;
    for (i, p) in dataset.points().enumerate() {
        let l = labels[i];
        total += dist_sq(p, &centroids[l * d..(l + 1) * d]);
    }
    total
}

/// Increase in within-group sum of squares when two groups with the given
/// gravity centers are pooled:
///
/// ```text
/// SS(A ∪ B) − SS(A) − SS(B) = ‖μ_A − μ_B‖² · n_A·n_B / (n_A + n_B)
/// ```
///
/// Zero when either group is empty.
pub fn two_set_between_ss(n_a: usize, mu_a: &[f64], n_b: usize, mu_b: &[f64]) -> f64 {
    if n_a == 0 || n_b == 0 {
        return 0.0;
    }
    let w = (n_a as f64 * n_b as f64) / (n_a + n_b) as f64;
    w * dist_sq(mu_a, mu_b)
}

/// Initialization strategy for Lloyd restarts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMethod {
    /// Each point draws a uniform label, with empty-cluster repair.
    UniformRandomAssignment,
    /// Squared-distance (D²) seeding of initial centers.
    #[default]
    KMeansPlusPlus,
}

/// Configuration for [`lloyd`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LloydConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative cost-improvement stopping threshold.
    pub tol: f64,
    pub seed: u64,
    pub init: InitMethod,
}

impl LloydConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            restarts: 20,
            max_iters: 300,
            tol: 1e-9,
            seed: 0,
            init: InitMethod::KMeansPlusPlus,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: InitMethod) -> Self {
        self.init = init;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParam("k must be positive".into()));
        }
        if self.k > n {
            return Err(Error::InvalidParam(format!("k = {} exceeds n = {n}", self.k)));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParam("restarts and max_iters must be positive".into()));
        }
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(Error::InvalidParam(format!("tol must be nonnegative, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Outcome of a clustering run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringResult {
    pub partition: Partition,
    /// `Q` of `partition`, recomputed from scratch on the returned labels.
    pub cost: f64,
    /// Lloyd iterations of the winning restart; 0 for the exhaustive oracle.
    pub iterations: usize,
    pub converged: bool,
    /// Final cost of every restart, in restart order.
    pub restart_costs: Vec<f64>,
    /// Gap to the second-best distinct partition; reported by the exhaustive
    /// oracle, `None` for Lloyd and for instances with a single partition.
    pub optimality_gap: Option<f64>,
}

/// Best-of-restarts Lloyd iteration.
///
/// Restarts draw independent RNG streams derived from the master seed by a
/// counter split, so results are identical whether restarts run serially or
/// in parallel. Ties between restart costs go to the lowest restart index.
pub fn lloyd(dataset: &Dataset, config: &LloydConfig) -> Result<ClusteringResult> {
    config.validate(dataset.len())?;
    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(dataset, config, r as u64))
        .collect();
    let mut best = 0;
    for (r, outcome) in outcomes.iter().enumerate() {
        if outcome.cost < outcomes[best].cost {
            best = r;
        }
    }
    let restart_costs: Vec<f64> = outcomes.iter().map(|o| o.cost).collect();
    let winner = &outcomes[best];
    let partition = Partition::new(winner.labels.clone(), config.k);
    let cost = cost(dataset, &partition)?;
    Ok(ClusteringResult {
        partition,
        cost,
        iterations: winner.iterations,
        converged: winner.converged,
        restart_costs,
        optimality_gap: None,
    })
}

struct RestartOutcome {
    labels: Vec<usize>,
    cost: f64,
    iterations: usize,
    converged: bool,
}

fn run_restart(dataset: &Dataset, config: &LloydConfig, restart: u64) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart);
    let (outcome, _history) = run_restart_traced(dataset, config, &mut rng);
    outcome
}

/// One restart plus its per-iteration cost history (non-increasing).
pub(crate) fn run_restart_traced(
    dataset: &Dataset,
    config: &LloydConfig,
    rng: &mut ChaCha8Rng,
) -> (RestartOutcome, Vec<f64>) {
    let n = dataset.len();
    let k = config.k;
    let mut labels = match config.init {
        InitMethod::UniformRandomAssignment => {
            (0..n).map(|_| rng.random_range(0..k)).collect::<Vec<_>>()
        }
        InitMethod::KMeansPlusPlus => {
            let centers = kmeanspp_centers(dataset, k, rng);
            assign_to_centers(dataset, &centers)
        }
    };
    repair_empty_clusters(dataset, &mut labels, k);

    let mut history = Vec::new();
    let mut prev_cost = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..config.max_iters {
        iterations += 1;
        let centroids = centroids_of(dataset, &labels, k);
        let changed = assign_points(dataset, &centroids, &mut labels);
        repair_empty_clusters(dataset, &mut labels, k);
        let cost = cost_of_labels(dataset, &labels, k, false);
        debug_assert!(
            cost <= prev_cost * (1.0 + 1e-9) + 1e-12,
            "Lloyd cost increased: {prev_cost} -> {cost}"
        );
        history.push(cost);
        if !changed || prev_cost - cost <= config.tol * prev_cost.max(f64::MIN_POSITIVE) {
            converged = true;
            prev_cost = cost;
            break;
        }
        prev_cost = cost;
    }
    (RestartOutcome { labels, cost: prev_cost, iterations, converged }, history)
}

fn centroids_of(dataset: &Dataset, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let d = dataset.dim();
    let mut sums = vec![vec![0.0; d]; k];
    let mut sizes = vec![0usize; k];
    for (i, p) in dataset.points().enumerate() {
        sizes[labels[i]] += 1;
        for (s, c) in sums[labels[i]].iter_mut().zip(p) {
            *s += c;
        }
    }
    for (sum, &size) in sums.iter_mut().zip(&sizes) {
        debug_assert!(size > 0, "centroids_of requires non-empty clusters");
        let inv = 1.0 / size as f64;
        for s in sum.iter_mut() {
            *s *= inv;
        }
    }
    sums
}

fn assign_to_centers(dataset: &Dataset, centers: &[usize]) -> Vec<usize> {
    dataset
        .points()
        .map(|p| {
            let mut best = 0;
            let mut best_d = dist_sq(p, dataset.point(centers[0]));
            for (c, &center) in centers.iter().enumerate().skip(1) {
                let d2 = dist_sq(p, dataset.point(center));
                if d2 < best_d {
                    best_d = d2;
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Nearest-centroid assignment; ties go to the lowest cluster index.
/// Returns whether any label changed.
fn assign_points(dataset: &Dataset, centroids: &[Vec<f64>], labels: &mut [usize]) -> bool {
    let mut changed = false;
    for (i, p) in dataset.points().enumerate() {
        let mut best = 0;
        let mut best_d = dist_sq(p, &centroids[0]);
        for (c, centroid) in centroids.iter().enumerate().skip(1) {
            let d2 = dist_sq(p, centroid);
            if d2 < best_d {
                best_d = d2;
                best = c;
            }
        }
        if labels[i] != best {
            labels[i] = best;
            changed = true;
        }
    }
    changed
}

/// Moves the point farthest from its centroid into each empty cluster,
/// lowest empty cluster first, never draining a cluster below one member.
fn repair_empty_clusters(dataset: &Dataset, labels: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let centroids = centroids_of_nonempty(dataset, labels, k, &sizes);
        let mut donor: Option<(usize, f64)> = None;
        for (i, p) in dataset.points().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let d2 = dist_sq(p, &centroids[labels[i]]);
            let better = match donor {
                None => true,
                Some((_, best)) => d2 > best,
            };
            if better {
                donor = Some((i, d2));
            }
        }
        let (mover, _) = donor.expect("k <= n guarantees a donor cluster with >= 2 members");
        labels[mover] = empty;
    }
}

fn centroids_of_nonempty(
    dataset: &Dataset,
    labels: &[usize],
    k: usize,
    sizes: &[usize],
) -> Vec<Vec<f64>> {
    let d = dataset.dim();
    let mut sums = vec![vec![0.0; d]; k];
    for (i, p) in dataset.points().enumerate() {
        for (s, c) in sums[labels[i]].iter_mut().zip(p) {
            *s += c;
        }
    }
    for (sum, &size) in sums.iter_mut().zip(sizes) {
        if size > 0 {
            let inv = 1.0 / size as f64;
            for s in sum.iter_mut() {
                *s *= inv;
            }
        }
    }
    sums
}

/// D²-weighted choice of `k` seed points.
fn kmeanspp_centers(dataset: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = dataset.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(rng.random_range(0..n));
    let mut d2: Vec<f64> =
        dataset.points().map(|p| dist_sq(p, dataset.point(centers[0]))).collect();
    while centers.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(weights) => weights.sample(rng),
            // All remaining mass is on already-chosen points (duplicates);
            // fall back to a uniform draw.
            Err(_) => rng.random_range(0..n),
        };
        centers.push(next);
        for (i, p) in dataset.points().enumerate() {
            let d = dist_sq(p, dataset.point(next));
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centers
}
