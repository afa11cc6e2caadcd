//! Subcommand implementations. Each returns the process exit code:
//! 0 success, 1 usage or validation error (raised as `Err`), 2 verification
//! violation.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use centric_kit::analysis::{
    verify_gamma_star, verify_theorem3, run_preservation_suite, SuiteConfig, SuiteSummary,
    SuiteTheorem, TheoremVerdict, VerdictKind,
};
use centric_kit::datagen::{GenKind, GenSpec};
use centric_kit::io::{read_csv, write_csv, LabeledDataset};
use centric_kit::kmeans::{clustering_error, kmeans_ideal, lloyd, InitMethod, LloydConfig};
use centric_kit::transforms::TransformSpec;
use centric_kit::{Dataset, Partition};

use crate::args;
use crate::experiment::{
    desk_scale_config, run_experiment, stock_gamma_arm, stock_gamma_plus_plus_arm,
    ExperimentConfig,
};
use crate::plot::render_svg;

/// Exit code for a failed verification (distinct from usage errors).
pub const EXIT_VIOLATION: i32 = 2;

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Wrapper for GenSpec files: {"schema":1, "kind": ..., ...}
#[derive(Debug, Serialize, Deserialize)]
struct GenSpecFile {
    schema: u32,
    #[serde(flatten)]
    spec: GenSpec,
}

pub fn generate(args: &args::GenerateArgs) -> anyhow::Result<i32> {
    let spec = match (&args.config, args.kind) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let file: GenSpecFile = serde_json::from_str(&text)?;
            if file.schema != 1 {
                bail!("unsupported generator schema {}, expected 1", file.schema);
            }
            file.spec
        }
        (None, Some(kind)) => {
            let kind = match kind {
                args::GeneratorKind::TwoSquares3d => GenKind::TwoSquares3d {
                    n: args.n.context("--n is required for two-squares-3d")?,
                    edge: args.edge,
                },
                args::GeneratorKind::GaussianBlobs => GenKind::GaussianBlobs {
                    k: args.k.context("--k is required for gaussian-blobs")?,
                    n_per: args.n_per.context("--n-per is required for gaussian-blobs")?,
                    dim: args.dim.context("--dim is required for gaussian-blobs")?,
                    spread: args.spread,
                    separation: args.separation,
                },
            };
            GenSpec { kind, seed: args.seed }
        }
        (None, None) => bail!("either --kind or --config is required"),
    };
    let (dataset, partition) = spec.generate()?;
    write_csv(&args.out, &dataset, Some(partition.labels()))?;
    println!(
        "generated n={} d={} k={} seed={} -> {}",
        dataset.len(),
        dataset.dim(),
        partition.k(),
        spec.seed,
        args.out.display()
    );
    Ok(0)
}

/// Pipeline file: {"schema":1,"transforms":[TransformSpec,...]}
#[derive(Debug, Serialize, Deserialize)]
struct PipelineFile {
    schema: u32,
    transforms: Vec<TransformSpec>,
}

/// Sidecar written next to every transform output.
#[derive(Debug, Default, Serialize, Deserialize)]
struct ProvenanceFile {
    schema: u32,
    records: Vec<ProvenanceRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProvenanceRecord {
    input: String,
    output: String,
    transforms: Vec<TransformSpec>,
}

fn provenance_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    out.with_file_name(name)
}

pub fn transform(args: &args::TransformArgs) -> anyhow::Result<i32> {
    let loaded = read_csv(&args.input)?;
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let pipeline: PipelineFile = serde_json::from_str(&text)?;
    if pipeline.schema != 1 {
        bail!("unsupported pipeline schema {}, expected 1", pipeline.schema);
    }
    let partition = loaded.partition();
    let mut dataset = loaded.dataset.clone();
    for (step, spec) in pipeline.transforms.iter().enumerate() {
        dataset = spec
            .apply(&dataset, partition.as_ref())
            .with_context(|| format!("pipeline step {step}"))?;
    }
    write_csv(&args.out, &dataset, loaded.labels.as_deref())?;

    let sidecar = provenance_path(&args.out);
    let mut provenance: ProvenanceFile = match fs::read_to_string(&sidecar) {
        Ok(text) => serde_json::from_str(&text)?,
        Err(_) => ProvenanceFile { schema: 1, records: Vec::new() },
    };
    provenance.schema = 1;
    provenance.records.push(ProvenanceRecord {
        input: args.input.display().to_string(),
        output: args.out.display().to_string(),
        transforms: pipeline.transforms,
    });
    write_json(&sidecar, &provenance)?;
    println!(
        "transformed {} points in {} steps -> {}",
        dataset.len(),
        provenance.records.last().map_or(0, |r| r.transforms.len()),
        args.out.display()
    );
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ClusterResultFile {
    schema: u32,
    algorithm: &'static str,
    k: usize,
    cost: f64,
    iterations: usize,
    converged: bool,
    restart_costs: Vec<f64>,
    optimality_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    clustering_error: Option<usize>,
}

pub fn cluster(args: &args::ClusterArgs) -> anyhow::Result<i32> {
    let loaded = read_csv(&args.input)?;
    let dataset = &loaded.dataset;
    let (algorithm, result) = if args.ideal {
        let result = kmeans_ideal(dataset, args.k).map_err(|e| match e {
            centric_kit::Error::EnumerationBudget { .. } => anyhow::anyhow!(
                "{e}; run Lloyd instead by dropping --ideal"
            ),
            other => anyhow::Error::from(other),
        })?;
        ("ideal", result)
    } else {
        let config = LloydConfig::new(args.k)
            .with_restarts(args.restarts)
            .with_max_iters(args.max_iters)
            .with_tol(args.tol)
            .with_seed(args.seed)
            .with_init(match args.init {
                args::InitArg::KMeansPlusPlus => InitMethod::KMeansPlusPlus,
                args::InitArg::UniformRandomAssignment => InitMethod::UniformRandomAssignment,
            });
        ("lloyd", lloyd(dataset, &config)?)
    };
    write_csv(&args.out, dataset, Some(result.partition.labels()))?;

    let mut reference_error = None;
    if args.reference {
        let reference = loaded
            .partition()
            .context("--reference requires a label column in the input CSV")?;
        let err = clustering_error(&reference, &result.partition)?;
        println!("clustering_error: {err}");
        reference_error = Some(err);
    }
    println!(
        "{algorithm} k={} cost={} converged={} -> {}",
        args.k,
        result.cost,
        result.converged,
        args.out.display()
    );
    if let Some(path) = &args.result {
        write_json(
            path,
            &ClusterResultFile {
                schema: 1,
                algorithm,
                k: args.k,
                cost: result.cost,
                iterations: result.iterations,
                converged: result.converged,
                restart_costs: result.restart_costs.clone(),
                optimality_gap: result.optimality_gap,
                clustering_error: reference_error,
            },
        )?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct VerifyFile {
    schema: u32,
    theorem: &'static str,
    instances: usize,
    preserved: usize,
    tie_skipped: usize,
    violated: usize,
    verdicts: Vec<TheoremVerdict>,
}

pub fn verify(args: &args::VerifyArgs) -> anyhow::Result<i32> {
    let theorem_name = match args.theorem {
        args::TheoremArg::GammaPlusPlus => "gamma_plus_plus",
        args::TheoremArg::GammaStar => "gamma_star",
    };
    let file = if args.random_suite {
        let mut config = SuiteConfig::new(match args.theorem {
            args::TheoremArg::GammaPlusPlus => SuiteTheorem::GammaPlusPlus,
            args::TheoremArg::GammaStar => SuiteTheorem::GammaStar,
        });
        config.instances = args.instances;
        config.n = args.n;
        config.dims = args.dim.clone();
        config.ks = args.k.clone();
        config.lambdas = args.lambda.clone();
        config.subset_min = args.subset_min;
        config.subset_max = args.subset_max;
        config.seed = args.seed;
        let summary: SuiteSummary = run_preservation_suite(&config)?;
        VerifyFile {
            schema: 1,
            theorem: theorem_name,
            instances: summary.instances,
            preserved: summary.preserved,
            tie_skipped: summary.tie_skipped,
            violated: summary.violated,
            verdicts: summary.violations,
        }
    } else {
        let input = args.input.as_ref().context("provide --input or --random-suite")?;
        let loaded = read_csv(input)?;
        let k = *args.k.first().context("--k is required")?;
        let lambda = *args.lambda.first().context("--lambda is required")?;
        let verdict = match args.theorem {
            args::TheoremArg::GammaPlusPlus => {
                if args.p_indices.is_empty() {
                    bail!("gamma-plus-plus verification needs --p-indices");
                }
                verify_theorem3(&loaded.dataset, k, &args.p_indices, lambda)?
            }
            args::TheoremArg::GammaStar => {
                verify_gamma_star(&loaded.dataset, k, args.cluster, lambda)?
            }
        };
        VerifyFile {
            schema: 1,
            theorem: theorem_name,
            instances: 1,
            preserved: usize::from(verdict.verdict == VerdictKind::Preserved),
            tie_skipped: usize::from(verdict.verdict == VerdictKind::TieSkipped),
            violated: usize::from(verdict.verdict == VerdictKind::Violated),
            verdicts: vec![verdict],
        }
    };
    println!(
        "{}: preserved={} tie_skipped={} violated={} (of {})",
        file.theorem, file.preserved, file.tie_skipped, file.violated, file.instances
    );
    if let Some(path) = &args.out {
        write_json(path, &file)?;
    }
    Ok(if file.violated > 0 { EXIT_VIOLATION } else { 0 })
}

pub fn experiment(args: &args::ExperimentArgs) -> anyhow::Result<i32> {
    let config: ExperimentConfig = match (&args.config, args.stock) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text)?
        }
        (None, Some(arm)) => desk_scale_config(
            match arm {
                args::StockArm::Gamma => stock_gamma_arm(),
                args::StockArm::GammaPlusPlus => stock_gamma_plus_plus_arm(),
            },
            args.full_scale,
        ),
        (None, None) => bail!("either --config or --stock is required"),
    };
    if let Some(path) = &args.emit_config {
        write_json(path, &config)?;
        println!("wrote config -> {}", path.display());
        return Ok(0);
    }
    let report = run_experiment(&config)?;
    write_json(&args.out, &report)?;
    if let Some(path) = &args.runs_csv {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record([
            "rep",
            "subset_size",
            "kleinberg_valid",
            "errors",
            "error_rate",
            "lloyd_cost",
        ])?;
        for run in &report.runs {
            writer.write_record([
                run.rep.to_string(),
                run.subset_size.map_or(String::new(), |s| s.to_string()),
                run.kleinberg_valid.map_or(String::new(), |v| v.to_string()),
                run.errors.to_string(),
                format!("{}", run.error_rate),
                format!("{}", run.lloyd_cost),
            ])?;
        }
        writer.flush()?;
    }
    println!(
        "experiment: reps={} mean_error_rate={} std_dev={} max_errors={} -> {}",
        report.aggregate.repetitions,
        report.aggregate.mean_error_rate,
        report.aggregate.std_dev_error_rate,
        report.aggregate.max_errors,
        args.out.display()
    );
    eprintln!("wall time: {:.2}s", report.wall_time_secs);
    Ok(0)
}

pub fn plot(args: &args::PlotArgs) -> anyhow::Result<i32> {
    let loaded = read_csv(&args.input)?;
    let labels: Option<Vec<usize>> = match &args.labels {
        Some(path) => {
            let label_file = read_csv(path)?;
            let labels = label_file
                .labels
                .with_context(|| format!("{} has no label column", path.display()))?;
            if labels.len() != loaded.dataset.len() {
                bail!(
                    "{} labels for {} points",
                    labels.len(),
                    loaded.dataset.len()
                );
            }
            Some(labels)
        }
        None => loaded.labels.clone(),
    };
    let dataset = if args.columns.is_empty() {
        loaded.dataset.clone()
    } else {
        project_columns(&loaded.dataset, &args.columns)?
    };
    let svg = render_svg(&dataset, labels.as_deref())?;
    fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
    println!("plotted {} points -> {}", dataset.len(), args.out.display());
    Ok(0)
}

fn project_columns(dataset: &Dataset, columns: &[usize]) -> anyhow::Result<Dataset> {
    if !(columns.len() == 2 || columns.len() == 3) {
        bail!("--columns takes exactly 2 or 3 column indices");
    }
    for &c in columns {
        if c == 0 || c > dataset.dim() {
            bail!("column {c} out of range 1..={}", dataset.dim());
        }
    }
    Ok(Dataset::new(
        dataset
            .points()
            .map(|p| columns.iter().map(|&c| p[c - 1]).collect())
            .collect(),
    )?)
}
