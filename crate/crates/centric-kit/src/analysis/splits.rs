//! Alternative clusterings laid out against a reference partition.
//!
//! For a reference partition `{T, Z_2, …, Z_k}` with a distinguished subset
//! `P ⊆ T` and `Y = T ∖ P`, an [`AlternativeSplit`] records an arbitrary
//! competing k-clustering `{K_1, …, K_k}` through its intersections with
//! the reference pieces:
//!
//! * `A_i = K_i ∩ P` — the `{A_i}` partition `P` (empty parts allowed),
//! * `B_i = K_i ∩ Y`,
//! * `C_{i,j} = K_i ∩ Z_j`,
//!
//! with every reconstructed `K_i = A_i ∪ B_i ∪ C_{i,2} ∪ … ∪ C_{i,k}`
//! non-empty. This is exactly the bookkeeping needed to expand the cost
//! difference `h(λ)` in closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Partition;
use crate::error::{Error, Result};
use crate::kmeans::partitions::{stirling2, KBlockPartitions};

/// Default cap on exhaustive alternative-split enumeration (the count at
/// n = 10, k = 3; the split space grows like kⁿ).
pub const DEFAULT_SPLIT_BUDGET: u128 = 9330;

/// Default number of sampled splits when enumeration is out of budget.
pub const DEFAULT_SPLIT_SAMPLES: usize = 500;

/// An alternative k-clustering, decomposed against a reference partition
/// and a subset `P` of one reference cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeSplit {
    n: usize,
    k: usize,
    t_cluster: usize,
    /// reference labels of the non-T clusters, ascending
    z_labels: Vec<usize>,
    p: Vec<usize>,
    a: Vec<Vec<usize>>,
    b: Vec<Vec<usize>>,
    /// c[i][zj] ⊆ cluster z_labels[zj]
    c: Vec<Vec<Vec<usize>>>,
}

impl AlternativeSplit {
    /// Decomposes an alternative label vector against `reference` and `p`.
    ///
    /// `alt_labels` must describe a partition into exactly `reference.k()`
    /// non-empty clusters over the same points.
    pub fn from_alt_labels(
        reference: &Partition,
        p: &[usize],
        alt_labels: &[usize],
    ) -> Result<Self> {
        let n = reference.len();
        let k = reference.k();
        if alt_labels.len() != n {
            return Err(Error::InconsistentSplit(format!(
                "alternative labels cover {} points, reference has {n}",
                alt_labels.len()
            )));
        }
        let alt = Partition::new(alt_labels.to_vec(), k);
        let violations = alt.violations(n);
        if !violations.is_empty() {
            return Err(Error::InconsistentSplit(format!(
                "alternative labels are not a valid {k}-clustering: {}",
                violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
            )));
        }
        let t_cluster = cluster_of_subset(reference, p)?;
        let z_labels: Vec<usize> = (0..k).filter(|&c| c != t_cluster).collect();
        let mut in_p = vec![false; n];
        for &i in p {
            in_p[i] = true;
        }
        let mut a = vec![Vec::new(); k];
        let mut b = vec![Vec::new(); k];
        let mut c = vec![vec![Vec::new(); z_labels.len()]; k];
        for i in 0..n {
            let alt_cluster = alt_labels[i];
            let ref_cluster = reference.label(i);
            if in_p[i] {
                a[alt_cluster].push(i);
            } else if ref_cluster == t_cluster {
                b[alt_cluster].push(i);
            } else {
                let zj = z_labels.binary_search(&ref_cluster).expect("z label present");
                c[alt_cluster][zj].push(i);
            }
        }
        let mut sorted_p = p.to_vec();
        sorted_p.sort_unstable();
        Ok(Self { n, k, t_cluster, z_labels, p: sorted_p, a, b, c })
    }

    /// Assembles a split from explicit `A_i`, `B_i`, `C_{i,j}` sets,
    /// validating the partition structure against the reference.
    pub fn from_parts(
        reference: &Partition,
        p: &[usize],
        a: Vec<Vec<usize>>,
        b: Vec<Vec<usize>>,
        c: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let n = reference.len();
        let k = reference.k();
        if a.len() != k || b.len() != k || c.len() != k {
            return Err(Error::InconsistentSplit(format!(
                "need exactly {k} A/B/C families, got {}/{}/{}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        let mut alt_labels = vec![usize::MAX; n];
        let mut place = |indices: &[usize], cluster: usize| -> Result<()> {
            for &i in indices {
                if i >= n {
                    return Err(Error::IndexOutOfBounds { index: i, len: n });
                }
                if alt_labels[i] != usize::MAX {
                    return Err(Error::InconsistentSplit(format!(
                        "point {i} appears in two alternative clusters"
                    )));
                }
                alt_labels[i] = cluster;
            }
            Ok(())
        };
        for (i, set) in a.iter().enumerate() {
            place(set, i)?;
        }
        for (i, set) in b.iter().enumerate() {
            place(set, i)?;
        }
        for (i, family) in c.iter().enumerate() {
            if family.len() != k - 1 {
                return Err(Error::InconsistentSplit(format!(
                    "C family {i} has {} parts, expected {}",
                    family.len(),
                    k - 1
                )));
            }
            for set in family {
                place(set, i)?;
            }
        }
        if let Some(missing) = alt_labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InconsistentSplit(format!(
                "point {missing} not covered by any alternative cluster"
            )));
        }
        let split = Self::from_alt_labels(reference, p, &alt_labels)?;
        // the A/B/C sets must agree with the reference-derived decomposition
        let sorted = |mut v: Vec<usize>| {
            v.sort_unstable();
            v
        };
        for i in 0..k {
            if sorted(a[i].clone()) != split.a[i] {
                return Err(Error::InconsistentSplit(format!("A_{i} is not K_{i} ∩ P")));
            }
            if sorted(b[i].clone()) != split.b[i] {
                return Err(Error::InconsistentSplit(format!("B_{i} is not K_{i} ∩ Y")));
            }
            for (zj, set) in c[i].iter().enumerate() {
                if sorted(set.clone()) != split.c[i][zj] {
                    return Err(Error::InconsistentSplit(format!(
                        "C_{{{i},{}}} is not K_{i} ∩ Z",
                        zj + 2
                    )));
                }
            }
        }
        Ok(split)
    }

    /// The reference itself viewed as an alternative split (h ≡ 0 on it).
    pub fn identity(reference: &Partition, p: &[usize]) -> Result<Self> {
        Self::from_alt_labels(reference, p, reference.labels())
    }

    /// Re-checks this split against a reference partition and subset.
    pub fn validate(&self, reference: &Partition, p: &[usize]) -> Result<()> {
        if reference.len() != self.n || reference.k() != self.k {
            return Err(Error::InconsistentSplit(format!(
                "split was built for n = {}, k = {}; got n = {}, k = {}",
                self.n,
                self.k,
                reference.len(),
                reference.k()
            )));
        }
        let mut sorted_p = p.to_vec();
        sorted_p.sort_unstable();
        if sorted_p != self.p {
            return Err(Error::InconsistentSplit("subset P differs from the split's P".into()));
        }
        if cluster_of_subset(reference, p)? != self.t_cluster {
            return Err(Error::InconsistentSplit("subset P lies in a different cluster".into()));
        }
        for (i, set) in self.a.iter().enumerate() {
            if set.iter().any(|x| !self.p.contains(x)) {
                return Err(Error::InconsistentSplit(format!("A_{i} escapes P")));
            }
        }
        for (i, set) in self.b.iter().enumerate() {
            if set
                .iter()
                .any(|&x| reference.label(x) != self.t_cluster || self.p.binary_search(&x).is_ok())
            {
                return Err(Error::InconsistentSplit(format!("B_{i} escapes Y")));
            }
        }
        for family in &self.c {
            for (zj, set) in family.iter().enumerate() {
                if set.iter().any(|&x| reference.label(x) != self.z_labels[zj]) {
                    return Err(Error::InconsistentSplit("C set escapes its Z cluster".into()));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t_cluster(&self) -> usize {
        self.t_cluster
    }

    /// The subset `P`, ascending.
    pub fn p(&self) -> &[usize] {
        &self.p
    }

    /// Reference labels of the `Z_j` clusters, ascending.
    pub fn z_labels(&self) -> &[usize] {
        &self.z_labels
    }

    pub fn a_set(&self, i: usize) -> &[usize] {
        &self.a[i]
    }

    pub fn b_set(&self, i: usize) -> &[usize] {
        &self.b[i]
    }

    pub fn c_set(&self, i: usize, zj: usize) -> &[usize] {
        &self.c[i][zj]
    }

    /// Rebuilds the alternative label vector `K_i` over all points.
    pub fn alt_labels(&self) -> Vec<usize> {
        let mut labels = vec![0usize; self.n];
        for i in 0..self.k {
            for &x in self.a[i].iter().chain(&self.b[i]).chain(self.c[i].iter().flatten()) {
                labels[x] = i;
            }
        }
        labels
    }
}

/// The reference cluster containing every point of `p`; errors if `p` is
/// empty, out of bounds, has duplicates, or spans clusters.
pub fn cluster_of_subset(partition: &Partition, p: &[usize]) -> Result<usize> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut seen = vec![false; partition.len()];
    for &i in p {
        if i >= partition.len() {
            return Err(Error::IndexOutOfBounds { index: i, len: partition.len() });
        }
        if seen[i] {
            return Err(Error::DuplicateIndex(i));
        }
        seen[i] = true;
    }
    let t = partition.label(p[0]);
    if p.iter().any(|&i| partition.label(i) != t) {
        return Err(Error::SubsetNotInCluster);
    }
    Ok(t)
}

/// Every alternative split of the instance: all partitions of the points
/// into exactly `k` non-empty clusters, within the enumeration budget.
pub fn enumerate_alternative_splits(
    reference: &Partition,
    p: &[usize],
    budget: u128,
) -> Result<Vec<AlternativeSplit>> {
    let n = reference.len();
    let k = reference.k();
    let count = stirling2(n, k);
    if count > budget {
        return Err(Error::EnumerationBudget { partitions: count, budget });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut enumerator = KBlockPartitions::new(n, k);
    while let Some(labels) = enumerator.next_labels() {
        out.push(AlternativeSplit::from_alt_labels(reference, p, labels)?);
    }
    Ok(out)
}

/// `count` seeded random alternative splits (valid k-clusterings).
pub fn sample_alternative_splits(
    reference: &Partition,
    p: &[usize],
    count: usize,
    seed: u64,
) -> Result<Vec<AlternativeSplit>> {
    let n = reference.len();
    let k = reference.k();
    if k > n {
        return Err(Error::InvalidParam(format!("k = {k} exceeds n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        // keep every alternative cluster non-empty: plant the k labels on a
        // random set of k distinct positions
        let positions = rand::seq::index::sample(&mut rng, n, k);
        for (cluster, pos) in positions.iter().enumerate() {
            labels[pos] = cluster;
        }
        out.push(AlternativeSplit::from_alt_labels(reference, p, &labels)?);
    }
    Ok(out)
}
