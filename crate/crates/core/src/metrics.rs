//! Clustering-comparison metrics: NMI, chance-adjusted NMI and pairwise
//! precision/recall/F1.
//!
//! All information measures use natural logarithms. NMI is normalized by the
//! geometric mean of the entropies, `I(U,V) / sqrt(H(U) * H(V))`. The
//! adjusted variant subtracts the expected mutual information of random
//! partitions with the same marginals, computed exactly from the
//! hypergeometric model with log-factorials:
//! `aNMI = (I - E[I]) / (sqrt(H(U) * H(V)) - E[I])`.
//!
//! Floating-point sums are accumulated by sorting the term multiset first,
//! which makes every metric exactly symmetric in its two arguments and
//! deterministic across runs.
//!
//! Degenerate inputs the sources never evaluate are fixed by convention:
//! if either entropy is zero the (a)NMI is 1 for identical partitions and 0
//! otherwise; if the adjusted denominator vanishes the aNMI is 0; empty pair
//! sets give precision and recall 1 and `F1 = 0` when `P + R = 0`.

use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::ledger::Address;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    /// The two partitions cover different address sets; carries the
    /// symmetric difference split by side.
    UniverseMismatch {
        only_left: Vec<Address>,
        only_right: Vec<Address>,
    },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::UniverseMismatch {
                only_left,
                only_right,
            } => {
                write!(
                    f,
                    "partitions cover different universes ({} addresses only left, {} only right)",
                    only_left.len(),
                    only_right.len()
                )
            }
        }
    }
}
impl core::error::Error for MetricsError {}

/// Joint cluster-membership counts of two partitions over one universe.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    /// `(row, column, count)` sorted by `(row, column)`; zero cells omitted.
    cells: Vec<(u32, u32, u64)>,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
    n: u64,
}

pub fn contingency(u: &Partition, v: &Partition) -> Result<ContingencyTable, MetricsError> {
    if !u.same_universe(v) {
        let (only_left, only_right) = u.universe_difference(v);
        return Err(MetricsError::UniverseMismatch {
            only_left,
            only_right,
        });
    }
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    for (cu, cv) in u.cluster_ids().iter().zip(v.cluster_ids()) {
        *counts.entry((cu.0, cv.0)).or_insert(0) += 1;
    }
    let mut cells: Vec<(u32, u32, u64)> = counts.into_iter().map(|((i, j), c)| (i, j, c)).collect();
    cells.sort_unstable_by_key(|&(i, j, _)| (i, j));
    let mut row_marginals = alloc::vec![0u64; u.cluster_count()];
    let mut col_marginals = alloc::vec![0u64; v.cluster_count()];
    for &(i, j, c) in &cells {
        row_marginals[i as usize] += c;
        col_marginals[j as usize] += c;
    }
    Ok(ContingencyTable {
        cells,
        row_marginals,
        col_marginals,
        n: u.len() as u64,
    })
}

/// Sorts the terms before adding so the sum only depends on the term
/// multiset, not the construction order.
fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

fn entropy_of(marginals: &[u64], n: u64) -> f64 {
    let n = n as f64;
    let terms = marginals
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| {
            let a = a as f64;
            (a / n) * libm::log(n / a)
        })
        .collect();
    stable_sum(terms)
}

impl ContingencyTable {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cells(&self) -> &[(u32, u32, u64)] {
        &self.cells
    }

    pub fn row_marginals(&self) -> &[u64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[u64] {
        &self.col_marginals
    }

    /// Mutual information in nats.
    pub fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        let terms = self
            .cells
            .iter()
            .map(|&(i, j, c)| {
                let joint = c as f64;
                let product =
                    self.row_marginals[i as usize] as f64 * self.col_marginals[j as usize] as f64;
                (joint / n) * libm::log(joint * n / product)
            })
            .collect();
        stable_sum(terms)
    }

    pub fn row_entropy(&self) -> f64 {
        entropy_of(&self.row_marginals, self.n)
    }

    pub fn col_entropy(&self) -> f64 {
        entropy_of(&self.col_marginals, self.n)
    }

    /// Expected mutual information of two random partitions with these
    /// marginals, under the hypergeometric permutation model. Exact
    /// summation; factorials go through a log-factorial table.
    pub fn expected_mutual_information(&self) -> f64 {
        let n = self.n;
        let mut log_factorial = alloc::vec![0.0f64; n as usize + 1];
        for k in 1..=n as usize {
            log_factorial[k] = log_factorial[k - 1] + libm::log(k as f64);
        }
        let lf = |x: u64| log_factorial[x as usize];
        let n_f = n as f64;
        let mut terms = Vec::new();
        for &a in &self.row_marginals {
            if a == 0 {
                continue;
            }
            for &b in &self.col_marginals {
                if b == 0 {
                    continue;
                }
                let lo = 1.max((a + b).saturating_sub(n));
                let hi = a.min(b);
                for nij in lo..=hi {
                    // Grouped so every subexpression is invariant under
                    // swapping the two partitions; with the sorted term sum
                    // this makes the metric exactly symmetric.
                    let numerator = (lf(a) + lf(b)) + (lf(n - a) + lf(n - b));
                    let denominator =
                        (lf(n) + lf(nij)) + ((lf(a - nij) + lf(b - nij)) + lf(n + nij - a - b));
                    let log_probability = numerator - denominator;
                    let information =
                        (nij as f64 / n_f) * libm::log(nij as f64 * n_f / (a as f64 * b as f64));
                    terms.push(information * libm::exp(log_probability));
                }
            }
        }
        stable_sum(terms)
    }
}

/// Normalized mutual information in [0, 1].
pub fn nmi(u: &Partition, v: &Partition) -> Result<f64, MetricsError> {
    let table = contingency(u, v)?;
    let h_u = table.row_entropy();
    let h_v = table.col_entropy();
    if h_u == 0.0 || h_v == 0.0 {
        return Ok(if u == v { 1.0 } else { 0.0 });
    }
    Ok(table.mutual_information() / libm::sqrt(h_u * h_v))
}

/// Chance-adjusted NMI; at most 1, near 0 for independent partitions, may be
/// negative.
pub fn anmi(u: &Partition, v: &Partition) -> Result<f64, MetricsError> {
    let table = contingency(u, v)?;
    let h_u = table.row_entropy();
    let h_v = table.col_entropy();
    if h_u == 0.0 || h_v == 0.0 {
        return Ok(if u == v { 1.0 } else { 0.0 });
    }
    let information = table.mutual_information();
    let expected = table.expected_mutual_information();
    let scale = libm::sqrt(h_u * h_v);
    let denominator = scale - expected;
    // E[I] can reach the normalizer only in degenerate cases where I = E[I]
    // as well; the comparison tolerates the rounding of the log/exp round
    // trips in the expectation.
    if denominator.abs() <= 64.0 * f64::EPSILON * scale.max(1.0) {
        return Ok(0.0);
    }
    Ok((information - expected) / denominator)
}

/// Classification of all unordered address pairs by same-cluster agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }
}

fn pairs_of(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Pair counts of predicted partition `v` against reference `u`, computed in
/// closed form from the contingency table. A true positive is a pair
/// clustered together in both; a false positive is together in `v` only; a
/// false negative together in `u` only.
pub fn pair_counts(u: &Partition, v: &Partition) -> Result<PairCounts, MetricsError> {
    let table = contingency(u, v)?;
    let together_both: u64 = table.cells.iter().map(|&(_, _, c)| pairs_of(c)).sum();
    let together_u: u64 = table.row_marginals.iter().map(|&a| pairs_of(a)).sum();
    let together_v: u64 = table.col_marginals.iter().map(|&b| pairs_of(b)).sum();
    let total = pairs_of(table.n);
    let true_positive = together_both;
    let false_negative = together_u - together_both;
    let false_positive = together_v - together_both;
    Ok(PairCounts {
        true_positive,
        false_positive,
        false_negative,
        true_negative: total - true_positive - false_positive - false_negative,
    })
}

/// `(precision, recall, F1)`; empty denominators score 1 by convention and
/// F1 is 0 when precision and recall are both 0.
pub fn precision_recall_f1(counts: &PairCounts) -> (f64, f64, f64) {
    let precision = if counts.true_positive + counts.false_positive == 0 {
        1.0
    } else {
        counts.true_positive as f64 / (counts.true_positive + counts.false_positive) as f64
    };
    let recall = if counts.true_positive + counts.false_negative == 0 {
        1.0
    } else {
        counts.true_positive as f64 / (counts.true_positive + counts.false_negative) as f64
    };
    (precision, recall, f1_score(precision, recall))
}

/// Harmonic mean of precision and recall.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}
