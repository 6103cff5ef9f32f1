//! Alignment of predicted partitions with a ground-truth labeling and
//! per-heuristic metric rows.
//!
//! A heuristic's output usually covers far more addresses than the labeled
//! set, so both sides are restricted to the ground-truth universe before any
//! metric is computed. Labeled addresses the heuristic never clustered become
//! singletons on the predicted side by default (dropping them would silently
//! inflate precision); `drop_uncovered` switches to plain intersection.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ledger::Address;
use crate::metrics::{self, MetricsError};
use crate::partition::Partition;

/// Address-to-user labeling serving as the reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    /// Sorted by address, unique.
    entries: Vec<(Address, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundTruthError {
    Empty,
    DuplicateAddress(Address),
    EmptyLabel(Address),
    EmptyAddress,
}

impl fmt::Display for GroundTruthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTruthError::Empty => write!(f, "ground truth has no entries"),
            GroundTruthError::DuplicateAddress(a) => {
                write!(f, "address {a} labeled more than once")
            }
            GroundTruthError::EmptyLabel(a) => write!(f, "address {a} has an empty label"),
            GroundTruthError::EmptyAddress => write!(f, "empty address in ground truth"),
        }
    }
}
impl core::error::Error for GroundTruthError {}

impl GroundTruth {
    pub fn new(mut entries: Vec<(Address, String)>) -> Result<Self, GroundTruthError> {
        if entries.is_empty() {
            return Err(GroundTruthError::Empty);
        }
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        for (addr, label) in &entries {
            if addr.is_empty() {
                return Err(GroundTruthError::EmptyAddress);
            }
            if label.is_empty() {
                return Err(GroundTruthError::EmptyLabel(addr.clone()));
            }
        }
        for window in entries.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(GroundTruthError::DuplicateAddress(window[0].0.clone()));
            }
        }
        Ok(GroundTruth { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Address, &str)> {
        self.entries.iter().map(|(a, l)| (a, l.as_str()))
    }

    pub fn label_of(&self, address: &Address) -> Option<&str> {
        self.entries
            .binary_search_by(|(a, _)| a.cmp(address))
            .ok()
            .map(|i| self.entries[i].1.as_str())
    }

    /// The labeling as a canonical partition over the labeled addresses.
    pub fn partition(&self) -> Partition {
        Partition::from_labels(self.entries.clone()).expect("entries are unique")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// No ground-truth address appears in the predicted partition.
    EmptyOverlap,
    Metrics(MetricsError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::EmptyOverlap => {
                write!(
                    f,
                    "no ground-truth address appears in the predicted partition"
                )
            }
            EvalError::Metrics(e) => write!(f, "{e}"),
        }
    }
}
impl core::error::Error for EvalError {}

impl From<MetricsError> for EvalError {
    fn from(e: MetricsError) -> Self {
        EvalError::Metrics(e)
    }
}

/// Restricts the ground truth and a predicted partition to one universe and
/// re-canonicalizes both. Predicted clusters lose their unlabeled addresses;
/// labeled addresses missing from the prediction become predicted-side
/// singletons, or are dropped entirely when `drop_uncovered` is set.
pub fn align(
    gt: &GroundTruth,
    predicted: &Partition,
    drop_uncovered: bool,
) -> Result<(Partition, Partition), EvalError> {
    #[derive(Clone, PartialEq, Eq, Hash)]
    enum Side {
        Covered(u32),
        Uncovered(u32),
    }
    let mut gt_pairs = Vec::new();
    let mut predicted_pairs = Vec::new();
    let mut overlap = 0usize;
    let mut next_uncovered = 0u32;
    for (addr, label) in gt.iter() {
        let side = match predicted.cluster_of(addr) {
            Some(cluster) => {
                overlap += 1;
                Side::Covered(cluster.0)
            }
            None if drop_uncovered => continue,
            None => {
                let id = next_uncovered;
                next_uncovered += 1;
                Side::Uncovered(id)
            }
        };
        gt_pairs.push((addr.clone(), String::from(label)));
        predicted_pairs.push((addr.clone(), side));
    }
    if overlap == 0 {
        return Err(EvalError::EmptyOverlap);
    }
    let gt_side = Partition::from_labels(gt_pairs).expect("ground truth addresses are unique");
    let predicted_side =
        Partition::from_labels(predicted_pairs).expect("ground truth addresses are unique");
    Ok((gt_side, predicted_side))
}

/// One row of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub nmi: f64,
    pub anmi: f64,
}

/// Evaluates each named run against the ground truth; rows keep input order.
pub fn evaluate(
    gt: &GroundTruth,
    runs: &[(&str, &Partition)],
    drop_uncovered: bool,
) -> Result<Vec<EvalRow>, EvalError> {
    let mut rows = Vec::with_capacity(runs.len());
    for (name, predicted) in runs {
        let (gt_side, predicted_side) = align(gt, predicted, drop_uncovered)?;
        let counts = metrics::pair_counts(&gt_side, &predicted_side)?;
        let (precision, recall, f1) = metrics::precision_recall_f1(&counts);
        rows.push(EvalRow {
            name: String::from(*name),
            precision,
            recall,
            f1,
            nmi: metrics::nmi(&gt_side, &predicted_side)?,
            anmi: metrics::anmi(&gt_side, &predicted_side)?,
        });
    }
    Ok(rows)
}
