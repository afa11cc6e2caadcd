//! Cluster-preserving transformations for k-means.
//!
//! This crate builds labeled test datasets by perturbing existing ones in
//! ways that provably do not move the optimal k-means clustering:
//!
//! * [`transforms::gamma_star`] contracts a whole cluster toward its
//!   gravity center — the classic centric transform;
//! * [`transforms::gamma_plus_plus`] contracts an arbitrary subset of one
//!   cluster toward the *subset's* gravity center, a strictly more flexible
//!   perturbation that can stretch within-cluster distances and shrink
//!   between-cluster distances (so it is not a Kleinberg Γ-transformation,
//!   which [`transforms::is_kleinberg_gamma_transform`] can certify);
//! * [`kmeans`] provides the cost function in centroid and pairwise forms,
//!   a seeded Lloyd solver, and `kmeans_ideal`, an exhaustive oracle that
//!   finds the exact global optimum on small instances;
//! * [`analysis`] numerically certifies the preservation claim: the cost
//!   advantage `h(λ)` of the reference optimum over any alternative
//!   clustering is a quadratic in λ with nonnegative leading coefficient
//!   and nonpositive endpoints, hence nonpositive on all of `[0, 1]`;
//! * [`datagen`] generates the synthetic datasets (two 3D squares touching
//!   at a corner, Gaussian blobs) and subset samples the experiments use.
//!
//! Everything is deterministic given explicit seeds; parallel and serial
//! execution produce identical results.

pub mod analysis;
pub mod dataset;
mod error;
pub mod datagen;
pub mod io;
pub mod kmeans;
pub mod transforms;

pub use dataset::{
    centroid, cluster_stats, validate_partition, ClusterStats, Dataset, Partition,
    PartitionViolation,
};
pub use error::{Error, Result};
