//! Lexicographic enumeration of set partitions into a fixed number of blocks.
//!
//! Partitions are represented as restricted growth strings: the canonical
//! label vector in which block labels appear in first-occurrence order. The
//! enumerator yields label vectors in lexicographic order, which makes
//! "first strict improvement wins" scans deterministic and gives the
//! lexicographically smallest optimum under exact cost ties.

/// Streaming enumerator over all canonical label vectors of `n` elements
/// with exactly `k` non-empty blocks.
pub(crate) struct KBlockPartitions {
    n: usize,
    k: usize,
    labels: Vec<usize>,
    prefix_max: Vec<usize>,
    state: State,
}

enum State {
    Fresh,
    Running,
    Done,
}

impl KBlockPartitions {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 1 && k <= n, "need 1 <= k <= n");
        Self { n, k, labels: vec![0; n], prefix_max: vec![0; n], state: State::Fresh }
    }

    /// Next canonical label vector, or `None` once exhausted.
    pub(crate) fn next_labels(&mut self) -> Option<&[usize]> {
        loop {
            match self.state {
                State::Done => return None,
                State::Fresh => {
                    self.state = State::Running;
                }
                State::Running => {
                    if !self.advance() {
                        self.state = State::Done;
                        return None;
                    }
                }
            }
            if self.prefix_max[self.n - 1] + 1 == self.k {
                return Some(&self.labels);
            }
        }
    }

    /// Steps to the lexicographically next restricted growth string whose
    /// labels stay below `k`; returns false when exhausted.
    fn advance(&mut self) -> bool {
        // labels[0] is pinned to 0; scan for the rightmost position that can
        // still grow, then reset everything to its right to 0.
        for i in (1..self.n).rev() {
            let cap = self.prefix_max[i - 1] + 1;
            if self.labels[i] < cap && self.labels[i] + 1 < self.k {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..self.n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1];
                }
                return true;
            }
        }
        false
    }
}

/// Stirling number of the second kind, saturating at `u128::MAX`.
pub(crate) fn stirling2(n: usize, k: usize) -> u128 {
    if k == 0 {
        return u128::from(n == 0);
    }
    if k > n {
        return 0;
    }
    // S(i, j) = j * S(i-1, j) + S(i-1, j-1), rolling row over j.
    let mut row = vec![0u128; k + 1];
    row[0] = 1; // S(0, 0)
    for _ in 1..=n {
        for j in (1..=k).rev() {
            row[j] = (j as u128).saturating_mul(row[j]).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}
