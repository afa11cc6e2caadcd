//! The repeated generate → perturb → cluster → score experiment.
//!
//! One experiment runs `repetitions` independent trials of a single arm.
//! Each trial generates (or reuses) a labeled dataset, applies the optional
//! pre-transform, applies the arm's perturbation, runs Lloyd and counts the
//! clustering error against the generating labels. Every random draw
//! derives from the master seed and the repetition index, so reports are
//! byte-identical across runs and thread counts.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use centric_kit::datagen::{sample_subset, GenSpec, SubsetMode};
use centric_kit::kmeans::{clustering_error, lloyd, LloydConfig};
use centric_kit::transforms::{
    angular_transform, gamma_plus_plus, kleinberg_check_datasets, TransformSpec,
};
use centric_kit::{Dataset, Error, Partition, Result};

/// One experiment arm: the perturbation applied per repetition after the
/// pre-transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentArm {
    /// Γ⁺⁺ with a fresh uniform subset of the cluster each repetition, of
    /// fraction drawn uniformly from `(0, max_fraction]`.
    GammaPlusPlus { cluster: usize, lambda: f64, max_fraction: f64 },
    /// Angular transform applied to one cluster's points only; optionally
    /// checked to be a valid Kleinberg Γ-transformation for the generating
    /// labels before clustering.
    AngularOnCluster {
        cluster: usize,
        factor: f64,
        axis: Vec<f64>,
        center: Vec<f64>,
        require_kleinberg: bool,
    },
}

/// Full experiment description; the report echoes it verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub generator: GenSpec,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Regenerate the dataset each repetition (seed + rep); otherwise every
    /// repetition reuses the seed-0 dataset.
    pub regenerate_per_rep: bool,
    pub pre_transform: Option<TransformSpec>,
    pub arm: ExperimentArm,
    pub lloyd: LloydConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::InvalidParam(format!(
                "unsupported experiment schema {}, expected 1",
                self.schema
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParam("repetitions must be positive".into()));
        }
        match &self.arm {
            ExperimentArm::GammaPlusPlus { lambda, max_fraction, .. } => {
                if !(*lambda > 0.0 && *lambda <= 1.0) {
                    return Err(Error::LambdaOutOfRange(*lambda));
                }
                if !(*max_fraction > 0.0 && *max_fraction <= 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "max_fraction must lie in (0, 1], got {max_fraction}"
                    )));
                }
            }
            ExperimentArm::AngularOnCluster { factor, .. } => {
                if !(*factor > 0.0 && factor.is_finite()) {
                    return Err(Error::InvalidParam(format!(
                        "angular factor must be positive, got {factor}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rep: usize,
    /// Size of the Γ⁺⁺ subset, when the arm samples one.
    pub subset_size: Option<usize>,
    /// Whether the per-repetition perturbation passed the Kleinberg check
    /// (only recorded when the arm requests the check).
    pub kleinberg_valid: Option<bool>,
    pub errors: usize,
    pub error_rate: f64,
    pub lloyd_cost: f64,
}

/// Aggregate statistics over the per-run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub repetitions: usize,
    /// Points per dataset.
    pub n: usize,
    pub mean_error_rate: f64,
    /// Population standard deviation of the per-run error rates.
    pub std_dev_error_rate: f64,
    pub max_errors: usize,
    /// `(error count, number of runs)` pairs, ascending by count.
    pub histogram: Vec<(usize, usize)>,
}

impl Aggregate {
    /// Recomputes the aggregate from per-run records.
    pub fn from_runs(n: usize, runs: &[RunRecord]) -> Self {
        let reps = runs.len();
        let mean = runs.iter().map(|r| r.error_rate).sum::<f64>() / reps as f64;
        let var =
            runs.iter().map(|r| (r.error_rate - mean).powi(2)).sum::<f64>() / reps as f64;
        let mut histogram = std::collections::BTreeMap::new();
        for r in runs {
            *histogram.entry(r.errors).or_insert(0usize) += 1;
        }
        Aggregate {
            repetitions: reps,
            n,
            mean_error_rate: mean,
            std_dev_error_rate: var.sqrt(),
            max_errors: runs.iter().map(|r| r.errors).max().unwrap_or(0),
            histogram: histogram.into_iter().collect(),
        }
    }
}

/// The serialized experiment outcome. Wall time is surfaced on stderr by
/// the command but kept out of the JSON so identical configs produce
/// byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

/// Runs the experiment. Repetitions execute in parallel; records are
/// assembled in repetition order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let base = if config.regenerate_per_rep { None } else { Some(config.generator.generate()?) };
    let runs: Vec<Result<RunRecord>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| run_one(config, base.as_ref(), rep))
        .collect();
    let runs: Result<Vec<RunRecord>> = runs.into_iter().collect();
    let runs = runs?;
    let aggregate = Aggregate::from_runs(dataset_len(config), &runs);
    Ok(ExperimentReport {
        schema: 1,
        config: config.clone(),
        runs,
        aggregate,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn dataset_len(config: &ExperimentConfig) -> usize {
    match config.generator.kind {
        centric_kit::datagen::GenKind::TwoSquares3d { n, .. } => n,
        centric_kit::datagen::GenKind::GaussianBlobs { k, n_per, .. } => k * n_per,
    }
}

fn run_one(
    config: &ExperimentConfig,
    base: Option<&(Dataset, Partition)>,
    rep: usize,
) -> Result<RunRecord> {
    let (dataset, truth) = match base {
        Some(pair) => pair.clone(),
        None => {
            let mut spec = config.generator.clone();
            spec.seed = spec.seed.wrapping_add(rep as u64);
            spec.generate()?
        }
    };
    let staged = match &config.pre_transform {
        Some(spec) => spec.apply(&dataset, Some(&truth))?,
        None => dataset,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(rep as u64);
    let mut subset_size = None;
    let mut kleinberg_valid = None;
    let perturbed = match &config.arm {
        ExperimentArm::GammaPlusPlus { cluster, lambda, max_fraction } => {
            let fraction = (1.0 - rng.random::<f64>()) * max_fraction;
            let subset_seed = rng.random::<u64>();
            let subset = sample_subset(
                &staged,
                &truth,
                *cluster,
                fraction,
                SubsetMode::Uniform,
                subset_seed,
            )?;
            subset_size = Some(subset.len());
            gamma_plus_plus(&staged, &truth, *cluster, &subset, *lambda)?.0
        }
        ExperimentArm::AngularOnCluster { cluster, factor, axis, center, require_kleinberg } => {
            let out = angular_on_cluster(&staged, &truth, *cluster, axis, *factor, center)?;
            if *require_kleinberg {
                let (valid, violations) = kleinberg_check_datasets(&staged, &out, &truth)?;
                kleinberg_valid = Some(valid);
                if !valid {
                    return Err(Error::InvalidParam(format!(
                        "angular arm is not a Kleinberg Γ-transformation: \
                         {violations} violating pairs in repetition {rep}"
                    )));
                }
            }
            out
        }
    };

    let mut lloyd_config = config.lloyd.clone();
    lloyd_config.seed = config.lloyd.seed.wrapping_add(rep as u64);
    let result = lloyd(&perturbed, &lloyd_config)?;
    let errors = clustering_error(&truth, &result.partition)?;
    Ok(RunRecord {
        rep,
        subset_size,
        kleinberg_valid,
        errors,
        error_rate: errors as f64 / perturbed.len() as f64,
        lloyd_cost: result.cost,
    })
}

/// Applies the angular transform to one cluster's points, leaving the rest
/// bit-identical.
pub fn angular_on_cluster(
    dataset: &Dataset,
    partition: &Partition,
    cluster: usize,
    axis: &[f64],
    factor: f64,
    center: &[f64],
) -> Result<Dataset> {
    partition.check_for(dataset)?;
    if cluster >= partition.k() {
        return Err(Error::ClusterOutOfRange { cluster, k: partition.k() });
    }
    let members = partition.cluster_members(cluster);
    let sub = Dataset::new(members.iter().map(|&i| dataset.point(i).to_vec()).collect())?;
    let transformed = angular_transform(&sub, axis, factor, center)?;
    let mut points: Vec<Vec<f64>> = dataset.points().map(|p| p.to_vec()).collect();
    for (slot, &i) in members.iter().enumerate() {
        points[i] = transformed.point(slot).to_vec();
    }
    Dataset::new(points)
}

/// The stock two-squares comparison at reduced size: n = 2000 by default,
/// the full-scale variant restores the 10 000-point original.
pub fn desk_scale_config(arm: ExperimentArm, full_scale: bool) -> ExperimentConfig {
    let n = if full_scale { 10_000 } else { 2_000 };
    let axis = centric_kit::datagen::two_squares_axis().to_vec();
    ExperimentConfig {
        schema: 1,
        generator: GenSpec {
            kind: centric_kit::datagen::GenKind::TwoSquares3d { n, edge: 1.0 },
            seed: 1,
        },
        repetitions: 200,
        master_seed: 7,
        regenerate_per_rep: true,
        pre_transform: Some(TransformSpec::Angular {
            axis,
            factor: 1.9,
            center: vec![0.0, 0.0, 0.0],
        }),
        arm,
        lloyd: LloydConfig::new(2),
    }
}

/// The stock Γ⁺⁺ arm: λ = 0.5 on uniform subsets of up to a third of
/// cluster 0.
pub fn stock_gamma_plus_plus_arm() -> ExperimentArm {
    ExperimentArm::GammaPlusPlus { cluster: 0, lambda: 0.5, max_fraction: 1.0 / 3.0 }
}

/// The stock Γ arm: angular factor 0.05 toward the shared diagonal on
/// cluster 0, Kleinberg-checked every repetition.
pub fn stock_gamma_arm() -> ExperimentArm {
    ExperimentArm::AngularOnCluster {
        cluster: 0,
        factor: 0.05,
        axis: centric_kit::datagen::two_squares_axis().to_vec(),
        center: vec![0.0, 0.0, 0.0],
        require_kleinberg: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(arm: ExperimentArm) -> ExperimentConfig {
        let mut config = desk_scale_config(arm, false);
        config.generator.kind = centric_kit::datagen::GenKind::TwoSquares3d { n: 120, edge: 1.0 };
        config.repetitions = 4;
        config
    }

    #[test]
    fn report_is_reproducible() {
        let config = tiny_config(stock_gamma_plus_plus_arm());
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.runs, b.runs);
        assert_eq!(a.aggregate, b.aggregate);
    }

    #[test]
    fn aggregate_matches_rederivation() {
        let config = tiny_config(stock_gamma_plus_plus_arm());
        let report = run_experiment(&config).unwrap();
        let re = Aggregate::from_runs(report.aggregate.n, &report.runs);
        assert_eq!(report.aggregate, re);
        let total: usize = report.aggregate.histogram.iter().map(|(_, f)| f).sum();
        assert_eq!(total, config.repetitions);
    }

    #[test]
    fn gamma_arm_passes_kleinberg_check() {
        let config = tiny_config(stock_gamma_arm());
        let report = run_experiment(&config).unwrap();
        assert!(report.runs.iter().all(|r| r.kleinberg_valid == Some(true)));
    }

    #[test]
    fn angular_on_cluster_leaves_other_cluster_alone() {
        let (dataset, truth) =
            centric_kit::datagen::two_squares_3d(50, 1.0, 3).unwrap();
        let axis = centric_kit::datagen::two_squares_axis();
        let out =
            angular_on_cluster(&dataset, &truth, 0, &axis, 0.05, &[0.0, 0.0, 0.0]).unwrap();
        for &i in &truth.cluster_members(1) {
            assert_eq!(out.point(i), dataset.point(i));
        }
        let moved = truth
            .cluster_members(0)
            .iter()
            .any(|&i| out.point(i) != dataset.point(i));
        assert!(moved);
    }

    #[test]
    fn config_validation_catches_bad_arms() {
        let mut config = tiny_config(stock_gamma_plus_plus_arm());
        config.arm = ExperimentArm::GammaPlusPlus { cluster: 0, lambda: 0.0, max_fraction: 0.3 };
        assert!(config.validate().is_err());
        config.arm = ExperimentArm::GammaPlusPlus { cluster: 0, lambda: 0.5, max_fraction: 0.0 };
        assert!(config.validate().is_err());
        config.schema = 2;
        assert!(config.validate().is_err());
    }
}
