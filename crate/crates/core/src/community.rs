//! Modularity and Louvain community detection with explicit hierarchy levels.
//!
//! Modularity follows the standard form `Q = sum_c (e_c/m - (d_c/2m)^2)`
//! where `e_c` is the intra-community edge weight (each edge once, self-loops
//! included), `d_c` the summed degree of the community and `m` the total edge
//! weight. The optimizer is the usual two-phase scheme: repeated single-node
//! moves to the neighboring community with the largest strictly positive
//! gain, then aggregation of communities into a coarser graph, repeated until
//! a pass makes no move. There is no randomness anywhere: nodes are swept in
//! ascending id order and gain ties keep the lowest community id, so repeated
//! runs produce identical dendrograms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::hints::HintGraph;
use crate::partition::Partition;

/// Undirected graph over dense node ids with non-negative edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    /// Per node: `(neighbor, weight)` sorted by neighbor id, self-loops kept
    /// separately.
    adj: Vec<Vec<(u32, f64)>>,
    self_loops: Vec<f64>,
    /// `degree(v) = sum of incident weights + 2 * selfloop(v)`.
    degrees: Vec<f64>,
    /// `2m`, the sum of all degrees.
    total_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommunityError {
    /// The graph has no edge weight; modularity is undefined.
    EmptyGraph,
    LevelOutOfRange {
        requested: usize,
        available: usize,
    },
}

impl fmt::Display for CommunityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommunityError::EmptyGraph => write!(f, "graph has no edges"),
            CommunityError::LevelOutOfRange {
                requested,
                available,
            } => {
                write!(
                    f,
                    "level {requested} out of range, dendrogram has {available} level(s)"
                )
            }
        }
    }
}
impl core::error::Error for CommunityError {}

impl WeightedGraph {
    /// Builds a graph from an edge list. Parallel edges accumulate; an edge
    /// `(v, v, w)` becomes a self-loop of weight `w`.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (u32, u32, f64)>) -> Self {
        let mut pairs: Vec<Vec<(u32, f64)>> = alloc::vec![Vec::new(); node_count];
        let mut self_loops = alloc::vec![0.0; node_count];
        for (u, v, w) in edges {
            debug_assert!(w >= 0.0, "edge weights must be non-negative");
            if u == v {
                self_loops[u as usize] += w;
            } else {
                pairs[u as usize].push((v, w));
                pairs[v as usize].push((u, w));
            }
        }
        let adj: Vec<Vec<(u32, f64)>> = pairs.into_iter().map(merge_parallel).collect();
        Self::from_parts(adj, self_loops)
    }

    /// Hint network as a graph over users; `weighted` keeps the transaction
    /// counts as weights, otherwise every hint edge weighs 1.
    pub fn from_hint_graph(hints: &HintGraph, weighted: bool) -> Self {
        Self::from_edges(
            hints.user_count(),
            hints
                .edges()
                .map(|(u, v, w)| (u, v, if weighted { w as f64 } else { 1.0 })),
        )
    }

    fn from_parts(adj: Vec<Vec<(u32, f64)>>, self_loops: Vec<f64>) -> Self {
        let degrees: Vec<f64> = adj
            .iter()
            .zip(&self_loops)
            .map(|(neighbors, s)| neighbors.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * s)
            .collect();
        let total_degree = degrees.iter().sum();
        WeightedGraph {
            adj,
            self_loops,
            degrees,
            total_degree,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    /// Total edge weight `m` (self-loops counted once).
    pub fn total_edge_weight(&self) -> f64 {
        self.total_degree / 2.0
    }

    /// Collapses each community into a single node. Intra-community weight
    /// becomes a self-loop, so the total degree is conserved. The assignment
    /// must be dense over `0..communities`.
    pub fn aggregate(&self, assignment: &[u32]) -> WeightedGraph {
        assert_eq!(assignment.len(), self.node_count());
        let communities = assignment
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0);
        let mut self_loops = alloc::vec![0.0; communities];
        let mut acc: Vec<HashMap<u32, f64>> = alloc::vec![HashMap::new(); communities];
        for u in 0..self.node_count() {
            let cu = assignment[u];
            self_loops[cu as usize] += self.self_loops[u];
            for &(v, w) in &self.adj[u] {
                let cv = assignment[v as usize];
                if cu == cv {
                    if u < v as usize {
                        self_loops[cu as usize] += w;
                    }
                } else {
                    *acc[cu as usize].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        let adj: Vec<Vec<(u32, f64)>> = acc
            .into_iter()
            .map(|m| {
                let mut neighbors: Vec<(u32, f64)> = m.into_iter().collect();
                neighbors.sort_unstable_by_key(|&(v, _)| v);
                neighbors
            })
            .collect();
        Self::from_parts(adj, self_loops)
    }
}

fn merge_parallel(mut neighbors: Vec<(u32, f64)>) -> Vec<(u32, f64)> {
    neighbors.sort_unstable_by_key(|&(v, _)| v);
    let mut merged: Vec<(u32, f64)> = Vec::with_capacity(neighbors.len());
    for (v, w) in neighbors {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += w,
            _ => merged.push((v, w)),
        }
    }
    merged
}

/// Newman-Girvan modularity of the given node-to-community assignment.
pub fn modularity(graph: &WeightedGraph, assignment: &[u32]) -> Result<f64, CommunityError> {
    modularity_with_resolution(graph, assignment, 1.0)
}

/// Modularity with a resolution parameter scaling the null-model term;
/// `resolution = 1` is the plain definition.
pub fn modularity_with_resolution(
    graph: &WeightedGraph,
    assignment: &[u32],
    resolution: f64,
) -> Result<f64, CommunityError> {
    assert_eq!(assignment.len(), graph.node_count());
    if graph.total_degree == 0.0 {
        return Err(CommunityError::EmptyGraph);
    }
    let communities = assignment
        .iter()
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut intra = alloc::vec![0.0f64; communities];
    let mut degree_sum = alloc::vec![0.0f64; communities];
    for u in 0..graph.node_count() {
        let cu = assignment[u];
        intra[cu as usize] += graph.self_loops[u];
        for &(v, w) in &graph.adj[u] {
            if v as usize > u && assignment[v as usize] == cu {
                intra[cu as usize] += w;
            }
        }
        degree_sum[cu as usize] += graph.degrees[u];
    }
    let m = graph.total_edge_weight();
    let mut q = 0.0;
    for c in 0..communities {
        let fraction = degree_sum[c] / graph.total_degree;
        q += intra[c] / m - resolution * fraction * fraction;
    }
    Ok(q)
}

/// One partition per hierarchy level, level 1 finest, each mapping the
/// *original* graph's nodes to community ids.
#[derive(Debug, Clone, PartialEq)]
pub struct DendrogramLevel {
    pub assignment: Vec<u32>,
    pub modularity: f64,
}

impl DendrogramLevel {
    pub fn community_count(&self) -> usize {
        self.assignment
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    levels: Vec<DendrogramLevel>,
}

impl Dendrogram {
    pub fn levels(&self) -> &[DendrogramLevel] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, level: usize) -> Result<&DendrogramLevel, CommunityError> {
        if level == 0 || level > self.levels.len() {
            return Err(CommunityError::LevelOutOfRange {
                requested: level,
                available: self.levels.len(),
            });
        }
        Ok(&self.levels[level - 1])
    }
}

// Guard against pathological non-shrinking aggregation cycles; real inputs
// exhaust their moves long before this.
const MAX_LEVELS: usize = 64;

/// Louvain optimization at resolution 1.
pub fn louvain(graph: &WeightedGraph) -> Result<Dendrogram, CommunityError> {
    louvain_with_resolution(graph, 1.0)
}

pub fn louvain_with_resolution(
    graph: &WeightedGraph,
    resolution: f64,
) -> Result<Dendrogram, CommunityError> {
    if graph.total_degree == 0.0 {
        return Err(CommunityError::EmptyGraph);
    }
    let mut levels: Vec<DendrogramLevel> = Vec::new();
    let mut current = graph.clone();
    let mut node_of: Vec<u32> = (0..graph.node_count() as u32).collect();
    while levels.len() < MAX_LEVELS {
        let (assignment, moved) = one_level(&current, resolution);
        if !moved && !levels.is_empty() {
            break;
        }
        let composed: Vec<u32> = node_of.iter().map(|&nd| assignment[nd as usize]).collect();
        let q = modularity_with_resolution(graph, &composed, resolution)?;
        levels.push(DendrogramLevel {
            assignment: composed.clone(),
            modularity: q,
        });
        if !moved {
            break;
        }
        node_of = composed;
        current = current.aggregate(&assignment);
    }
    Ok(Dendrogram { levels })
}

// Far beyond observed convergence (tens of sweeps); bounds phase 1 even if
// rounding ever produced a move cycle.
const MAX_SWEEPS_PER_LEVEL: usize = 256;

/// Phase 1: sweeps nodes in ascending id order, moving each to the community
/// with the maximal strictly positive gain, until a full sweep moves nothing.
/// Returns the dense assignment and whether any move happened.
fn one_level(graph: &WeightedGraph, resolution: f64) -> (Vec<u32>, bool) {
    let n = graph.node_count();
    let m = graph.total_edge_weight();
    let two_m_sq = 2.0 * m * m;
    let mut comm: Vec<u32> = (0..n as u32).collect();
    let mut comm_degree: Vec<f64> = graph.degrees.clone();
    let mut moved_any = false;

    for _ in 0..MAX_SWEEPS_PER_LEVEL {
        let mut moves = 0usize;
        for node in 0..n {
            let old = comm[node];
            let k = graph.degrees[node];
            // Weight from this node to each neighboring community,
            // self-loops excluded. BTreeMap gives ascending-id iteration for
            // the deterministic tie-break.
            let mut weight_to: BTreeMap<u32, f64> = BTreeMap::new();
            for &(v, w) in &graph.adj[node] {
                *weight_to.entry(comm[v as usize]).or_insert(0.0) += w;
            }
            // Gains are computed against the node's communities with the
            // node itself removed.
            comm_degree[old as usize] -= k;
            let gain_of = |c: u32, w: f64, comm_degree: &[f64]| {
                w / m - resolution * comm_degree[c as usize] * k / two_m_sq
            };
            let stay = gain_of(
                old,
                weight_to.get(&old).copied().unwrap_or(0.0),
                &comm_degree,
            );
            let mut best_comm = old;
            let mut best_gain = stay;
            for (&c, &w) in &weight_to {
                if c == old {
                    continue;
                }
                let gain = gain_of(c, w, &comm_degree);
                if gain > best_gain {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            comm[node] = best_comm;
            comm_degree[best_comm as usize] += k;
            if best_comm != old {
                moves += 1;
            }
        }
        if moves == 0 {
            break;
        }
        moved_any = true;
    }

    // Relabel to dense ids, ordered by ascending surviving label.
    let mut dense = alloc::vec![u32::MAX; n];
    let mut present: Vec<u32> = comm.clone();
    present.sort_unstable();
    present.dedup();
    for (rank, label) in present.into_iter().enumerate() {
        dense[label as usize] = rank as u32;
    }
    let assignment = comm.into_iter().map(|c| dense[c as usize]).collect();
    (assignment, moved_any)
}

/// Composes the address-to-user partition with a dendrogram level's
/// user-to-community mapping. Users beyond the dendrogram's node range (for
/// instance when the hint graph was built over fewer users) become singleton
/// communities.
pub fn project_level(
    dendrogram: &Dendrogram,
    level: usize,
    h1: &Partition,
) -> Result<Partition, CommunityError> {
    #[derive(Clone, PartialEq, Eq, Hash)]
    enum Label {
        Community(u32),
        Isolate(u32),
    }
    let level = dendrogram.level(level)?;
    let pairs = h1
        .iter()
        .map(|(addr, cid)| {
            let user = cid.0 as usize;
            let label = match level.assignment.get(user) {
                Some(&c) => Label::Community(c),
                None => Label::Isolate(cid.0),
            };
            (addr.clone(), label)
        })
        .collect();
    Ok(Partition::from_labels(pairs).expect("partition addresses are unique"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::Address;
    use alloc::vec;
    use proptest::prelude::*;

    fn clique_edges(nodes: &[u32]) -> Vec<(u32, u32, f64)> {
        let mut edges = Vec::new();
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                edges.push((nodes[i], nodes[j], 1.0));
            }
        }
        edges
    }

    fn two_cliques() -> WeightedGraph {
        let mut edges = clique_edges(&[0, 1, 2]);
        edges.extend(clique_edges(&[3, 4, 5]));
        WeightedGraph::from_edges(6, edges)
    }

    /// Independent dense-matrix modularity:
    /// `Q = (1/2m) * sum_ij (A_ij - d_i d_j / 2m) [c_i == c_j]` with
    /// `A_ii = 2 * selfloop(i)`.
    fn modularity_reference(n: usize, edges: &[(u32, u32, f64)], assignment: &[u32]) -> f64 {
        let mut a = vec![vec![0.0f64; n]; n];
        for &(u, v, w) in edges {
            if u == v {
                a[u as usize][u as usize] += 2.0 * w;
            } else {
                a[u as usize][v as usize] += w;
                a[v as usize][u as usize] += w;
            }
        }
        let deg: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
        let two_m: f64 = deg.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if assignment[i] == assignment[j] {
                    q += a[i][j] - deg[i] * deg[j] / two_m;
                }
            }
        }
        q / two_m
    }

    #[test]
    fn two_cliques_split_has_modularity_half() {
        let g = two_cliques();
        let q = modularity(&g, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(q, 0.5);
    }

    #[test]
    fn one_community_has_zero_modularity() {
        let g = two_cliques();
        assert_eq!(modularity(&g, &[0; 6]).unwrap(), 0.0);
        let irregular =
            WeightedGraph::from_edges(4, vec![(0, 1, 3.0), (1, 2, 1.0), (2, 3, 5.0), (0, 0, 2.0)]);
        assert_eq!(modularity(&irregular, &[0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn bridged_cliques_modularity() {
        let mut edges = clique_edges(&[0, 1, 2]);
        edges.extend(clique_edges(&[3, 4, 5]));
        edges.push((2, 3, 1.0));
        let g = WeightedGraph::from_edges(6, edges);
        let q = modularity(&g, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((q - 10.0 / 28.0).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_is_rejected() {
        let g = WeightedGraph::from_edges(5, vec![]);
        assert_eq!(modularity(&g, &[0; 5]), Err(CommunityError::EmptyGraph));
        assert_eq!(louvain(&g).unwrap_err(), CommunityError::EmptyGraph);
    }

    #[test]
    fn louvain_recovers_two_cliques() {
        let g = two_cliques();
        let d = louvain(&g).unwrap();
        assert_eq!(d.depth(), 1);
        let level = &d.levels()[0];
        assert_eq!(level.assignment, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(level.modularity, 0.5);
    }

    #[test]
    fn louvain_recovers_clique_ring() {
        // Four 4-cliques joined in a ring by single bridges.
        let mut edges = Vec::new();
        for c in 0..4u32 {
            let base = c * 4;
            edges.extend(clique_edges(&[base, base + 1, base + 2, base + 3]));
        }
        edges.push((3, 4, 1.0));
        edges.push((7, 8, 1.0));
        edges.push((11, 12, 1.0));
        edges.push((15, 0, 1.0));
        let g = WeightedGraph::from_edges(16, edges.clone());
        let d = louvain(&g).unwrap();
        let level1 = &d.levels()[0];
        // Each clique ends up intact in one community.
        for c in 0..4usize {
            let com = level1.assignment[c * 4];
            for i in 1..4 {
                assert_eq!(level1.assignment[c * 4 + i], com, "clique {c} split");
            }
        }
        let clique_partition: Vec<u32> = (0..16).map(|i| (i / 4) as u32).collect();
        let q_cliques = modularity(&g, &clique_partition).unwrap();
        assert!(level1.modularity >= q_cliques - 1e-12);
    }

    #[test]
    fn louvain_never_undershoots_a_planted_partition() {
        // Twelve 5-cliques in a sparse ring. Whatever the optimizer settles
        // on must score at least as well as the planted structure.
        let clique_size = 5u32;
        let cliques = 12u32;
        let mut edges = Vec::new();
        for c in 0..cliques {
            let base = c * clique_size;
            let members: Vec<u32> = (base..base + clique_size).collect();
            edges.extend(clique_edges(&members));
            edges.push((base, (base + clique_size) % (cliques * clique_size), 1.0));
        }
        let n = (cliques * clique_size) as usize;
        let g = WeightedGraph::from_edges(n, edges);
        let planted: Vec<u32> = (0..n as u32).map(|i| i / clique_size).collect();
        let planted_q = modularity(&g, &planted).unwrap();
        let d = louvain(&g).unwrap();
        let best = d.levels().last().unwrap();
        assert!(
            best.modularity >= planted_q - 1e-12,
            "found {} < planted {planted_q}",
            best.modularity
        );
    }

    #[test]
    fn degree_zero_nodes_stay_singleton() {
        let mut edges = clique_edges(&[0, 1, 2]);
        edges.extend(clique_edges(&[3, 4, 5]));
        let g = WeightedGraph::from_edges(8, edges);
        let d = louvain(&g).unwrap();
        let level = &d.levels()[0];
        assert_ne!(level.assignment[6], level.assignment[7]);
        assert_ne!(level.assignment[6], level.assignment[0]);
        assert_ne!(level.assignment[6], level.assignment[3]);
    }

    #[test]
    fn aggregation_conserves_total_degree() {
        let mut edges = clique_edges(&[0, 1, 2]);
        edges.extend(clique_edges(&[3, 4, 5]));
        edges.push((2, 3, 2.5));
        edges.push((4, 4, 1.5));
        let g = WeightedGraph::from_edges(6, edges);
        let aggregated = g.aggregate(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(aggregated.node_count(), 2);
        assert!((aggregated.total_degree - g.total_degree).abs() < 1e-12);
    }

    #[test]
    fn dendrograms_are_byte_identical_across_runs() {
        let mut edges = clique_edges(&[0, 1, 2, 3]);
        edges.extend(clique_edges(&[4, 5, 6]));
        edges.push((0, 4, 1.0));
        edges.push((2, 5, 1.0));
        let g = WeightedGraph::from_edges(7, edges);
        let a = louvain(&g).unwrap();
        let b = louvain(&g).unwrap();
        assert_eq!(a.depth(), b.depth());
        for (la, lb) in a.levels().iter().zip(b.levels()) {
            assert_eq!(la.assignment, lb.assignment);
            assert_eq!(la.modularity.to_bits(), lb.modularity.to_bits());
        }
    }

    #[test]
    fn project_composes_with_h1() {
        let h1 = Partition::from_labels(vec![
            (Address::new("a"), 0u32),
            (Address::new("b"), 0),
            (Address::new("c"), 1),
        ])
        .unwrap();
        let dendrogram = Dendrogram {
            levels: vec![DendrogramLevel {
                assignment: vec![0, 0],
                modularity: 0.0,
            }],
        };
        let p = project_level(&dendrogram, 1, &h1).unwrap();
        assert_eq!(p.cluster_count(), 1);
    }

    #[test]
    fn identity_level_projects_to_h1() {
        let h1 = Partition::from_labels(vec![
            (Address::new("a"), 0u32),
            (Address::new("b"), 0),
            (Address::new("c"), 1),
        ])
        .unwrap();
        let dendrogram = Dendrogram {
            levels: vec![DendrogramLevel {
                assignment: vec![0, 1],
                modularity: 0.0,
            }],
        };
        assert_eq!(project_level(&dendrogram, 1, &h1).unwrap(), h1);
    }

    #[test]
    fn users_beyond_dendrogram_become_singletons() {
        // Users 0 and 1 in the dendrogram, user 2 (addresses d, e) not.
        let h1 = Partition::from_labels(vec![
            (Address::new("a"), 0u32),
            (Address::new("b"), 1),
            (Address::new("d"), 2),
            (Address::new("e"), 2),
        ])
        .unwrap();
        let dendrogram = Dendrogram {
            levels: vec![DendrogramLevel {
                assignment: vec![0, 0],
                modularity: 0.0,
            }],
        };
        let p = project_level(&dendrogram, 1, &h1).unwrap();
        assert_eq!(
            p.cluster_of(&Address::new("a")),
            p.cluster_of(&Address::new("b"))
        );
        assert_eq!(
            p.cluster_of(&Address::new("d")),
            p.cluster_of(&Address::new("e"))
        );
        assert_ne!(
            p.cluster_of(&Address::new("a")),
            p.cluster_of(&Address::new("d"))
        );
        assert!(p.coarsens(&h1));
    }

    #[test]
    fn out_of_range_level_is_rejected() {
        let g = two_cliques();
        let d = louvain(&g).unwrap();
        let h1 = Partition::from_labels(
            (0..6u32)
                .map(|i| (Address::new(alloc::format!("a{i}")), i))
                .collect(),
        )
        .unwrap();
        assert!(project_level(&d, 1, &h1).is_ok());
        assert_eq!(
            project_level(&d, d.depth() + 1, &h1).unwrap_err(),
            CommunityError::LevelOutOfRange {
                requested: 2,
                available: 1
            }
        );
        assert!(matches!(
            project_level(&d, 0, &h1),
            Err(CommunityError::LevelOutOfRange { .. })
        ));
    }

    fn arbitrary_graph() -> impl Strategy<Value = (usize, Vec<(u32, u32, f64)>)> {
        (2usize..50).prop_flat_map(|n| {
            let edges = proptest::collection::vec((0..n as u32, 0..n as u32, 1u32..5), 1..(3 * n))
                .prop_map(|es| {
                    es.into_iter()
                        .map(|(u, v, w)| (u, v, w as f64))
                        .collect::<Vec<_>>()
                });
            (Just(n), edges)
        })
    }

    proptest! {
        #[test]
        fn modularity_matches_reference((n, edges) in arbitrary_graph(),
                                        labels in proptest::collection::vec(0u32..6, 50)) {
            let g = WeightedGraph::from_edges(n, edges.clone());
            let assignment: Vec<u32> = labels[..n].to_vec();
            let q = modularity(&g, &assignment).unwrap();
            let reference = modularity_reference(n, &edges, &assignment);
            prop_assert!((q - reference).abs() < 1e-12);
        }

        #[test]
        fn louvain_levels_are_monotone_and_consistent((n, edges) in arbitrary_graph()) {
            let g = WeightedGraph::from_edges(n, edges.clone());
            let d = louvain(&g).unwrap();
            prop_assert!(d.depth() >= 1);
            let mut previous = f64::NEG_INFINITY;
            for level in d.levels() {
                prop_assert!(level.modularity >= previous - 1e-12);
                previous = level.modularity;
                let reference = modularity_reference(n, &edges, &level.assignment);
                prop_assert!((level.modularity - reference).abs() < 1e-12);
            }
            // Each level coarsens the previous one.
            for pair in d.levels().windows(2) {
                let (fine, coarse) = (&pair[0].assignment, &pair[1].assignment);
                let mut image = alloc::vec![u32::MAX; n];
                for i in 0..n {
                    let f = fine[i] as usize;
                    if image[f] == u32::MAX {
                        image[f] = coarse[i];
                    }
                    prop_assert_eq!(image[f], coarse[i]);
                }
            }
        }

        #[test]
        fn aggregate_conserves_weight((n, edges) in arbitrary_graph(),
                                      labels in proptest::collection::vec(0u32..4, 50)) {
            let g = WeightedGraph::from_edges(n, edges);
            // Densify labels over the nodes present.
            let mut seen: Vec<u32> = labels[..n].to_vec();
            seen.sort_unstable();
            seen.dedup();
            let assignment: Vec<u32> = labels[..n]
                .iter()
                .map(|l| seen.binary_search(l).unwrap() as u32)
                .collect();
            let aggregated = g.aggregate(&assignment);
            prop_assert!((aggregated.total_degree - g.total_degree).abs() < 1e-12);
            // Modularity of the aggregated identity partition equals the
            // original partition's modularity.
            let ids: Vec<u32> = (0..aggregated.node_count() as u32).collect();
            let q_orig = modularity(&g, &assignment).unwrap();
            let q_agg = modularity(&aggregated, &ids).unwrap();
            prop_assert!((q_orig - q_agg).abs() < 1e-12);
        }
    }
}
