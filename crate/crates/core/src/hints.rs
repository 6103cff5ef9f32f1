//! Identity hint network over H1 users.
//!
//! Nodes are H1 clusters ("users"). For every non-coinbase transaction, an
//! edge links the sending user to each recipient user, provided the number of
//! distinct recipient users stays below the threshold and no recipient equals
//! the sender (which would indicate an already-known change address). Edge
//! weights count the qualifying transactions; community detection treats the
//! graph as unweighted unless asked otherwise.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::ledger::{Address, Ledger};
use crate::partition::Partition;

pub const DEFAULT_MAX_RECIPIENTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HintGraph {
    user_count: usize,
    /// Keys are `(min, max)` cluster-id pairs; values count the distinct
    /// transactions contributing the hint.
    edges: BTreeMap<(u32, u32), u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HintError {
    /// An address of the ledger is missing from the supplied partition.
    UnassignedAddress { tx_index: usize, address: Address },
    /// A transaction's input addresses map to more than one cluster, which
    /// contradicts the common-input construction of the partition.
    MixedInputClusters { tx_index: usize },
}

impl fmt::Display for HintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HintError::UnassignedAddress { tx_index, address } => {
                write!(
                    f,
                    "tx {tx_index}: address {address} not assigned in the partition"
                )
            }
            HintError::MixedInputClusters { tx_index } => {
                write!(f, "tx {tx_index}: input addresses span multiple clusters")
            }
        }
    }
}
impl core::error::Error for HintError {}

/// Builds the hint network of `ledger` over the users of `h1`, which must be
/// the common-input partition of the same ledger. Users without edges remain
/// present as isolated nodes so that every user survives to the community
/// stage.
pub fn build_hint_graph(
    ledger: &Ledger,
    h1: &Partition,
    max_recipients: usize,
) -> Result<HintGraph, HintError> {
    let mut edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for tx in ledger.transactions() {
        if tx.is_coinbase || tx.inputs.is_empty() {
            continue;
        }
        let cluster_of = |address: &Address| {
            h1.cluster_of(address)
                .ok_or_else(|| HintError::UnassignedAddress {
                    tx_index: tx.index,
                    address: address.clone(),
                })
        };
        let sender = cluster_of(&tx.inputs[0].address)?.0;
        for input in &tx.inputs[1..] {
            if cluster_of(&input.address)?.0 != sender {
                return Err(HintError::MixedInputClusters { tx_index: tx.index });
            }
        }
        let mut recipients = BTreeSet::new();
        for output in &tx.outputs {
            recipients.insert(cluster_of(&output.address)?.0);
        }
        if recipients.len() >= max_recipients || recipients.contains(&sender) {
            continue;
        }
        for recipient in recipients {
            let key = (sender.min(recipient), sender.max(recipient));
            *edges.entry(key).or_insert(0) += 1;
        }
    }
    Ok(HintGraph {
        user_count: h1.cluster_count(),
        edges,
    })
}

impl HintGraph {
    pub fn user_count(&self) -> usize {
        self.user_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, weight)` with `u < v`, ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    /// Users with no incident hint edge.
    pub fn isolates(&self) -> Vec<u32> {
        let mut connected = alloc::vec![false; self.user_count];
        for &(u, v) in self.edges.keys() {
            connected[u as usize] = true;
            connected[v as usize] = true;
        }
        (0..self.user_count as u32)
            .filter(|&u| !connected[u as usize])
            .collect()
    }
}
