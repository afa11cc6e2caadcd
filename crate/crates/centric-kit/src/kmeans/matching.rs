//! Label-permutation-invariant disagreement count between two partitions.

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::dataset::Partition;
use crate::error::{Error, Result};

/// Minimum number of points whose labels disagree, over all bijective
/// relabelings of the candidate's clusters.
///
/// Cluster counts may differ; the smaller side is padded with empty virtual
/// clusters so the matching stays bijective. Solved as a maximum-agreement
/// assignment over the confusion matrix.
pub fn clustering_error(reference: &Partition, candidate: &Partition) -> Result<usize> {
    if reference.len() != candidate.len() {
        return Err(Error::InvalidParam(format!(
            "partition lengths differ: {} vs {}",
            reference.len(),
            candidate.len()
        )));
    }
    for (name, p) in [("reference", reference), ("candidate", candidate)] {
        if let Some(&bad) = p.labels().iter().find(|&&l| l >= p.k()) {
            return Err(Error::InvalidParam(format!(
                "{name} partition has label {bad} out of range for k = {}",
                p.k()
            )));
        }
    }
    let n = reference.len();
    let k = reference.k().max(candidate.k()).max(1);
    let mut confusion = vec![vec![0i64; k]; k];
    for (&r, &c) in reference.labels().iter().zip(candidate.labels()) {
        confusion[r][c] += 1;
    }
    let weights = Matrix::from_rows(confusion).expect("square confusion matrix");
    let (agreement, _) = kuhn_munkres(&weights);
    Ok(n - agreement as usize)
}
