//! Address clustering heuristics.
//!
//! `cluster_h1` links all addresses spent together in one transaction's
//! inputs and takes connected components. `cluster_with_change` additionally
//! links each detected one-time change address to the inputs of its
//! transaction, using either the two-output rule (H2) or the unique-fresh-
//! output rule (H3). Both change heuristics only ever merge H1 clusters, so
//! their partitions coarsen the H1 partition.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::ledger::{Address, FirstSeen, Ledger, Transaction};
use crate::partition::Partition;
use crate::union_find::UnionFind;

/// Which change-address rule `cluster_with_change` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeHeuristic {
    /// Exactly two outputs, one fresh and one previously seen.
    H2,
    /// The single output address appearing for the first time.
    H3,
}

/// Interns every address occurring in the ledger (inputs first, then
/// outputs, in transaction order) and returns the dense ids per transaction
/// input list.
struct Interner<'a> {
    ids: HashMap<&'a str, u32>,
    addrs: Vec<&'a Address>,
}

impl<'a> Interner<'a> {
    fn new() -> Self {
        Interner {
            ids: HashMap::new(),
            addrs: Vec::new(),
        }
    }

    fn intern(&mut self, addr: &'a Address) -> u32 {
        if let Some(&id) = self.ids.get(addr.as_str()) {
            return id;
        }
        let id = self.addrs.len() as u32;
        self.ids.insert(addr.as_str(), id);
        self.addrs.push(addr);
        id
    }
}

fn components_to_partition(interner: Interner<'_>, uf: &mut UnionFind) -> Partition {
    let pairs = interner
        .addrs
        .iter()
        .enumerate()
        .map(|(id, addr)| ((*addr).clone(), uf.find(id as u32)))
        .collect();
    Partition::from_labels(pairs).expect("interned addresses are unique")
}

/// Common-input-ownership clustering: two addresses share a cluster iff they
/// are connected through transactions that spend them together. Every address
/// appearing anywhere in the ledger is covered; output-only addresses come
/// out as singletons.
pub fn cluster_h1(ledger: &Ledger) -> Partition {
    let (interner, mut uf) = h1_forest(ledger);
    components_to_partition(interner, &mut uf)
}

fn h1_forest(ledger: &Ledger) -> (Interner<'_>, UnionFind) {
    let mut interner = Interner::new();
    let mut input_ids: Vec<Vec<u32>> = Vec::with_capacity(ledger.len());
    for tx in ledger.transactions() {
        let ids = tx
            .inputs
            .iter()
            .map(|i| interner.intern(&i.address))
            .collect();
        input_ids.push(ids);
        for output in &tx.outputs {
            interner.intern(&output.address);
        }
    }

    let mut uf = UnionFind::new(interner.addrs.len());
    for ids in &input_ids {
        // A path between the inputs suffices for connectivity.
        for pair in ids.windows(2) {
            uf.union(pair[0], pair[1]);
        }
    }
    (interner, uf)
}

/// Two-output change rule: if a transaction has exactly two outputs with
/// distinct addresses, one appearing for the first time and the other seen
/// before, the fresh one is the change address. Coinbase transactions and
/// fresh addresses that also occur among the inputs are excluded.
pub fn detect_change_h2<'t>(tx: &'t Transaction, first_seen: &FirstSeen) -> Option<&'t Address> {
    if tx.is_coinbase || tx.outputs.len() != 2 {
        return None;
    }
    let (a, b) = (&tx.outputs[0].address, &tx.outputs[1].address);
    if a == b {
        return None;
    }
    let fresh_at = |addr: &Address| first_seen.index_of(addr) == Some(tx.index);
    let seen_before = |addr: &Address| matches!(first_seen.index_of(addr), Some(i) if i < tx.index);
    let candidate = match (fresh_at(a), seen_before(b), fresh_at(b), seen_before(a)) {
        (true, true, _, _) => a,
        (_, _, true, true) => b,
        _ => return None,
    };
    if tx.input_addresses().any(|i| i == candidate) {
        return None;
    }
    Some(candidate)
}

/// Unique-fresh-output change rule: the change address is the only output
/// address appearing for the first time, provided the transaction is not a
/// coin generation and the address is not among the inputs.
pub fn detect_change_h3<'t>(tx: &'t Transaction, first_seen: &FirstSeen) -> Option<&'t Address> {
    if tx.is_coinbase {
        return None;
    }
    let mut fresh: Option<&Address> = None;
    for addr in tx.output_addresses() {
        if first_seen.index_of(addr) == Some(tx.index) {
            match fresh {
                None => fresh = Some(addr),
                Some(prev) if prev == addr => {}
                Some(_) => return None,
            }
        }
    }
    let candidate = fresh?;
    if tx.input_addresses().any(|i| i == candidate) {
        return None;
    }
    Some(candidate)
}

/// H1 clustering augmented with one edge per detected change address, linking
/// it to the first input address of its transaction. The resulting partition
/// coarsens the H1 partition.
pub fn cluster_with_change(ledger: &Ledger, heuristic: ChangeHeuristic) -> Partition {
    let first_seen = ledger.first_seen();
    let (mut interner, mut uf) = h1_forest(ledger);
    for tx in ledger.transactions() {
        let Some(first_input) = tx.inputs.first() else {
            continue;
        };
        let change = match heuristic {
            ChangeHeuristic::H2 => detect_change_h2(tx, &first_seen),
            ChangeHeuristic::H3 => detect_change_h3(tx, &first_seen),
        };
        if let Some(change) = change {
            let change_id = interner.intern(change);
            let input_id = interner.intern(&first_input.address);
            uf.union(change_id, input_id);
        }
    }
    components_to_partition(interner, &mut uf)
}
