//! Address clustering and user re-identification over transaction ledgers.
//!
//! The crate covers the full analysis path: a transaction [`ledger`] model,
//! the common-input and change-address clustering [`heuristics`], the
//! identity [`hints`] network over clustered users, Louvain [`community`]
//! detection with hierarchy levels, clustering-comparison [`metrics`],
//! ground-truth [`evaluation`] and [`alluvial`](mod@crate::alluvial) flow
//! layouts, plus a seeded
//! synthetic generator ([`simgen`]) with exact ground truth.
//!
//! The crate is `no_std` (alloc required); file formats and the command-line
//! driver live in the companion `reident-cli` crate. Everything here is
//! deterministic: equal inputs produce byte-identical outputs, with no
//! randomness and no iteration-order dependence.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alluvial;
pub mod community;
pub mod evaluation;
pub mod heuristics;
pub mod hints;
pub mod ledger;
pub mod metrics;
pub mod partition;
pub mod rng;
pub mod simgen;
pub mod union_find;

pub use alluvial::{alluvial, AlluvialAxis, AlluvialFlow, AlluvialNode, AlluvialSpec};
pub use community::{
    louvain, louvain_with_resolution, modularity, modularity_with_resolution, Dendrogram,
    DendrogramLevel, WeightedGraph,
};
pub use evaluation::{align, evaluate, EvalRow, GroundTruth};
pub use heuristics::{cluster_h1, cluster_with_change, ChangeHeuristic};
pub use hints::{build_hint_graph, HintGraph};
pub use ledger::{Address, FirstSeen, Ledger, Transaction, TxInput, TxOutput};
pub use metrics::{anmi, nmi, pair_counts, precision_recall_f1, PairCounts};
pub use partition::{ClusterId, Partition};
pub use simgen::{describe, generate, SimConfig, SimSummary};
