//! Alluvial-diagram flow data: one vertical axis per partition, one flow per
//! pair of clusters adjacent axes share addresses between.
//!
//! Vertical cluster orders are chosen by iterated barycenter sweeps
//! (left-to-right, then right-to-left). A sweep's reordering is kept only if
//! it strictly reduces the total pairwise-inversion crossing count, so the
//! count never increases and the iteration terminates; ties fall back to
//! canonical cluster ids.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::partition::{ClusterId, Partition};

pub const DEFAULT_MAX_SWEEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlluvialNode {
    pub id: ClusterId,
    pub label: String,
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlluvialAxis {
    pub name: String,
    /// Clusters in vertical display order.
    pub clusters: Vec<AlluvialNode>,
}

/// Addresses shared by `left` (on axis `axis`) and `right` (on axis
/// `axis + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlluvialFlow {
    pub axis: usize,
    pub left: ClusterId,
    pub right: ClusterId,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlluvialSpec {
    pub axes: Vec<AlluvialAxis>,
    pub flows: Vec<AlluvialFlow>,
    /// Number of addresses every axis partitions.
    pub universe: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlluvialError {
    TooFewAxes { got: usize },
    UniverseMismatch,
}

impl fmt::Display for AlluvialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlluvialError::TooFewAxes { got } => {
                write!(f, "alluvial diagrams need at least 2 partitions, got {got}")
            }
            AlluvialError::UniverseMismatch => {
                write!(f, "alluvial axes must partition one shared universe")
            }
        }
    }
}
impl core::error::Error for AlluvialError {}

/// Computes flows and vertical orders for the given named partitions, which
/// must share one universe (align them first).
pub fn alluvial(
    partitions: &[(&str, &Partition)],
    max_sweeps: usize,
) -> Result<AlluvialSpec, AlluvialError> {
    if partitions.len() < 2 {
        return Err(AlluvialError::TooFewAxes {
            got: partitions.len(),
        });
    }
    let first = partitions[0].1;
    for (_, p) in &partitions[1..] {
        if !p.same_universe(first) {
            return Err(AlluvialError::UniverseMismatch);
        }
    }

    let universe = first.len() as u64;
    let sizes: Vec<Vec<u64>> = partitions.iter().map(|(_, p)| p.cluster_sizes()).collect();

    // Flows per adjacent axis pair, from lockstep iteration over the shared
    // sorted universe.
    let mut flows_per_pair: Vec<Vec<AlluvialFlow>> = Vec::new();
    for k in 0..partitions.len() - 1 {
        let left = partitions[k].1.cluster_ids();
        let right = partitions[k + 1].1.cluster_ids();
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for (l, r) in left.iter().zip(right) {
            *counts.entry((l.0, r.0)).or_insert(0) += 1;
        }
        let mut flows: Vec<AlluvialFlow> = counts
            .into_iter()
            .map(|((l, r), count)| AlluvialFlow {
                axis: k,
                left: ClusterId(l),
                right: ClusterId(r),
                count,
            })
            .collect();
        flows.sort_unstable_by_key(|f| (f.left, f.right));
        flows_per_pair.push(flows);
    }

    // Vertical orders, initially by canonical id.
    let mut orders: Vec<Vec<u32>> = sizes
        .iter()
        .map(|s| (0..s.len() as u32).collect())
        .collect();

    let mut best_orders = orders.clone();
    let mut best_crossings = total_crossings(&flows_per_pair, &best_orders);
    for _ in 0..max_sweeps {
        sweep(&mut orders, &flows_per_pair, &sizes);
        let crossings = total_crossings(&flows_per_pair, &orders);
        if crossings < best_crossings {
            best_crossings = crossings;
            best_orders = orders.clone();
        } else {
            break;
        }
    }

    let axes = partitions
        .iter()
        .zip(&best_orders)
        .zip(&sizes)
        .map(|(((name, _), order), axis_sizes)| AlluvialAxis {
            name: String::from(*name),
            clusters: order
                .iter()
                .map(|&c| AlluvialNode {
                    id: ClusterId(c),
                    label: c.to_string(),
                    size: axis_sizes[c as usize],
                })
                .collect(),
        })
        .collect();

    Ok(AlluvialSpec {
        axes,
        flows: flows_per_pair.into_iter().flatten().collect(),
        universe,
    })
}

/// One barycenter pass: left-to-right then right-to-left. Cluster positions
/// are block midpoints in address units; each axis is reordered by the
/// flow-weighted mean position of its neighbors on the fixed side.
fn sweep(orders: &mut [Vec<u32>], flows_per_pair: &[Vec<AlluvialFlow>], sizes: &[Vec<u64>]) {
    let axes = orders.len();
    for k in 1..axes {
        reorder_axis(orders, flows_per_pair, sizes, k, k - 1);
    }
    for k in (0..axes - 1).rev() {
        reorder_axis(orders, flows_per_pair, sizes, k, k + 1);
    }
}

fn midpoints(order: &[u32], sizes: &[u64]) -> Vec<f64> {
    let mut position = alloc::vec![0.0f64; sizes.len()];
    let mut offset = 0.0;
    for &c in order {
        let size = sizes[c as usize] as f64;
        position[c as usize] = offset + size / 2.0;
        offset += size;
    }
    position
}

/// Reorders `axis` by the barycenter of its flow neighbors on `fixed`, which
/// is the adjacent axis on either side.
fn reorder_axis(
    orders: &mut [Vec<u32>],
    flows_per_pair: &[Vec<AlluvialFlow>],
    sizes: &[Vec<u64>],
    axis: usize,
    fixed: usize,
) {
    let reference = midpoints(&orders[fixed], &sizes[fixed]);
    let mut weighted = alloc::vec![(0.0f64, 0u64); sizes[axis].len()];
    let pair = axis.min(fixed);
    for flow in &flows_per_pair[pair] {
        let (own, other) = if fixed < axis {
            (flow.right.0, flow.left.0)
        } else {
            (flow.left.0, flow.right.0)
        };
        let entry = &mut weighted[own as usize];
        entry.0 += reference[other as usize] * flow.count as f64;
        entry.1 += flow.count;
    }
    sort_by_barycenter(&mut orders[axis], &weighted);
}

fn sort_by_barycenter(order: &mut [u32], weighted: &[(f64, u64)]) {
    order.sort_by(|&a, &b| {
        let bary = |c: u32| {
            let (sum, count) = weighted[c as usize];
            if count == 0 {
                f64::INFINITY
            } else {
                sum / count as f64
            }
        };
        bary(a).total_cmp(&bary(b)).then(a.cmp(&b))
    });
}

/// Prefix-sum tree for weighted inversion counting.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick {
            tree: alloc::vec![0; len + 1],
        }
    }

    fn add(&mut self, mut index: usize, value: u64) {
        index += 1;
        while index < self.tree.len() {
            self.tree[index] += value;
            index += index & index.wrapping_neg();
        }
    }

    /// Sum of values at indices `0..=index`.
    fn prefix(&self, mut index: usize) -> u64 {
        index += 1;
        let mut sum = 0;
        while index > 0 {
            sum += self.tree[index];
            index -= index & index.wrapping_neg();
        }
        sum
    }
}

/// Weighted pairwise-inversion crossing count over all adjacent axis pairs.
/// Two flows cross iff their left and right display positions are oppositely
/// ordered (strictly); each crossing pair contributes the product of its
/// counts.
fn total_crossings(flows_per_pair: &[Vec<AlluvialFlow>], orders: &[Vec<u32>]) -> u64 {
    let mut total = 0u64;
    for (k, flows) in flows_per_pair.iter().enumerate() {
        let rank = |order: &[u32]| {
            let mut r = alloc::vec![0usize; order.len()];
            for (i, &c) in order.iter().enumerate() {
                r[c as usize] = i;
            }
            r
        };
        let left_rank = rank(&orders[k]);
        let right_rank = rank(&orders[k + 1]);
        // Scanning flows by ascending (left, right) position, a flow crosses
        // exactly the already-seen flows whose right position is strictly
        // larger; ties on either side never cross.
        let mut sorted: Vec<(usize, usize, u64)> = flows
            .iter()
            .map(|f| {
                (
                    left_rank[f.left.0 as usize],
                    right_rank[f.right.0 as usize],
                    f.count,
                )
            })
            .collect();
        sorted.sort_unstable();
        let mut seen = Fenwick::new(orders[k + 1].len());
        let mut seen_total = 0u64;
        for (_, right, count) in sorted {
            let up_to_right = seen.prefix(right);
            total += count * (seen_total - up_to_right);
            seen.add(right, count);
            seen_total += count;
        }
    }
    total
}

impl AlluvialSpec {
    /// Crossing count of the final layout.
    pub fn crossing_count(&self) -> u64 {
        let mut flows_per_pair = alloc::vec![Vec::new(); self.axes.len().saturating_sub(1)];
        for flow in &self.flows {
            flows_per_pair[flow.axis].push(flow.clone());
        }
        let orders: Vec<Vec<u32>> = self
            .axes
            .iter()
            .map(|axis| axis.clusters.iter().map(|c| c.id.0).collect())
            .collect();
        total_crossings(&flows_per_pair, &orders)
    }

    /// Flow totals must match the universe on both sides of every pair.
    pub fn flows_between(&self, axis: usize) -> impl Iterator<Item = &AlluvialFlow> {
        self.flows.iter().filter(move |f| f.axis == axis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::Address;
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn addr(s: &str) -> Address {
        Address::new(s)
    }

    fn partition(assignment: &[(&str, u32)]) -> Partition {
        Partition::from_labels(assignment.iter().map(|(a, c)| (addr(a), *c)).collect()).unwrap()
    }

    #[test]
    fn flows_count_shared_addresses() {
        let a = partition(&[("a", 0), ("b", 0), ("c", 1)]);
        let b = partition(&[("a", 0), ("b", 1), ("c", 1)]);
        let spec = alluvial(&[("A", &a), ("B", &b)], DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(spec.flows.len(), 3);
        let find = |l: u32, r: u32| {
            spec.flows
                .iter()
                .find(|f| f.left == ClusterId(l) && f.right == ClusterId(r))
                .map(|f| f.count)
        };
        assert_eq!(find(0, 0), Some(1));
        assert_eq!(find(0, 1), Some(1));
        assert_eq!(find(1, 1), Some(1));
    }

    #[test]
    fn identical_partitions_form_a_perfect_matching() {
        let p = partition(&[("a", 0), ("b", 0), ("c", 1), ("d", 2)]);
        let spec = alluvial(&[("L", &p), ("R", &p)], DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(spec.flows.len(), p.cluster_count());
        for flow in &spec.flows {
            assert_eq!(flow.left, flow.right);
        }
        assert_eq!(spec.crossing_count(), 0);
    }

    #[test]
    fn flow_conservation_per_axis_pair() {
        let a = partition(&[("a", 0), ("b", 0), ("c", 1), ("d", 2)]);
        let b = partition(&[("a", 0), ("b", 1), ("c", 1), ("d", 2)]);
        let c = partition(&[("a", 0), ("b", 0), ("c", 0), ("d", 1)]);
        let spec = alluvial(&[("gt", &a), ("h1", &b), ("h4", &c)], DEFAULT_MAX_SWEEPS).unwrap();
        for k in 0..2 {
            let total: u64 = spec.flows_between(k).map(|f| f.count).sum();
            assert_eq!(total, spec.universe);
        }
        // Axis sizes also add up to the universe.
        for axis in &spec.axes {
            assert_eq!(
                axis.clusters.iter().map(|c| c.size).sum::<u64>(),
                spec.universe
            );
        }
    }

    #[test]
    fn single_axis_is_rejected() {
        let p = partition(&[("a", 0)]);
        assert_eq!(
            alluvial(&[("only", &p)], DEFAULT_MAX_SWEEPS).unwrap_err(),
            AlluvialError::TooFewAxes { got: 1 }
        );
    }

    #[test]
    fn mismatched_universes_are_rejected() {
        let a = partition(&[("a", 0), ("b", 0)]);
        let b = partition(&[("a", 0), ("z", 0)]);
        assert_eq!(
            alluvial(&[("A", &a), ("B", &b)], DEFAULT_MAX_SWEEPS).unwrap_err(),
            AlluvialError::UniverseMismatch
        );
    }

    #[test]
    fn layout_never_increases_crossings() {
        let mut rng = SplitMix64::new(0xF00D);
        for _ in 0..30 {
            let n = 6 + rng.next_below(40) as usize;
            let mut make = |k: u64| {
                let pairs = (0..n)
                    .map(|i| {
                        (
                            Address::new(alloc::format!("x{i:03}")),
                            rng.next_below(k) as u32,
                        )
                    })
                    .collect();
                Partition::from_labels(pairs).unwrap()
            };
            let a = make(4);
            let b = make(5);
            let c = make(3);
            let axes: Vec<(&str, &Partition)> = vec![("a", &a), ("b", &b), ("c", &c)];
            let unoptimized = alluvial(&axes, 0).unwrap();
            let optimized = alluvial(&axes, DEFAULT_MAX_SWEEPS).unwrap();
            assert!(optimized.crossing_count() <= unoptimized.crossing_count());
        }
    }

    #[test]
    fn barycenter_can_remove_crossings() {
        // Canonical orders put b's right cluster between a's and d's, which
        // crosses the c flow; one sweep resolves it.
        let left = partition(&[("a", 0), ("b", 0), ("c", 1), ("d", 1)]);
        let right = partition(&[("a", 0), ("c", 0), ("b", 1), ("d", 2)]);
        let axes: Vec<(&str, &Partition)> = vec![("L", &left), ("R", &right)];
        let unoptimized = alluvial(&axes, 0).unwrap();
        let optimized = alluvial(&axes, DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(unoptimized.crossing_count(), 1);
        assert_eq!(optimized.crossing_count(), 0);
    }

    #[test]
    fn crossing_count_matches_pair_enumeration() {
        let brute = |spec: &AlluvialSpec| {
            let mut total = 0u64;
            for pair in 0..spec.axes.len() - 1 {
                let rank_of = |axis: usize, id: ClusterId| {
                    spec.axes[axis]
                        .clusters
                        .iter()
                        .position(|c| c.id == id)
                        .unwrap() as i64
                };
                let flows: Vec<&AlluvialFlow> = spec.flows_between(pair).collect();
                for i in 0..flows.len() {
                    for j in (i + 1)..flows.len() {
                        let (a, b) = (flows[i], flows[j]);
                        let left = rank_of(pair, a.left) - rank_of(pair, b.left);
                        let right = rank_of(pair + 1, a.right) - rank_of(pair + 1, b.right);
                        if left * right < 0 {
                            total += a.count * b.count;
                        }
                    }
                }
            }
            total
        };
        let mut rng = SplitMix64::new(0xCC);
        for _ in 0..20 {
            let n = 5 + rng.next_below(30) as usize;
            let mut make = |k: u64| {
                let pairs = (0..n)
                    .map(|i| {
                        (
                            Address::new(alloc::format!("x{i:03}")),
                            rng.next_below(k) as u32,
                        )
                    })
                    .collect();
                Partition::from_labels(pairs).unwrap()
            };
            let a = make(5);
            let b = make(4);
            let axes: Vec<(&str, &Partition)> = vec![("a", &a), ("b", &b)];
            let spec = alluvial(&axes, 3).unwrap();
            assert_eq!(spec.crossing_count(), brute(&spec));
        }
    }

    #[test]
    fn deterministic_output() {
        let a = partition(&[("a", 0), ("b", 1), ("c", 1), ("d", 2)]);
        let b = partition(&[("a", 2), ("b", 2), ("c", 0), ("d", 1)]);
        let axes: Vec<(&str, &Partition)> = vec![("A", &a), ("B", &b)];
        assert_eq!(
            alluvial(&axes, DEFAULT_MAX_SWEEPS).unwrap(),
            alluvial(&axes, DEFAULT_MAX_SWEEPS).unwrap()
        );
    }
}
