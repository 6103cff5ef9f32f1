//! Transaction data model.
//!
//! A [`Ledger`] is an ordered sequence of transactions whose inputs carry
//! resolved `(address, amount)` pairs. Amounts are integers in the smallest
//! currency unit so that the conservation rule — inputs equal outputs plus
//! fee — can be checked exactly. Timestamps are advisory only: they are
//! approximate in the source data and may even invert causal order, so every
//! notion of "before" in this crate is defined by ledger index, never by
//! timestamp.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

/// An address: an opaque identifier with string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(String);

impl Address {
    pub fn new(s: impl Into<String>) -> Self {
        Address(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Address {
    fn from(s: &str) -> Self {
        Address::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxOutput {
    pub address: Address,
    pub amount: u64,
}

/// An input spends a previous output; it carries the resolved address and
/// amount of that output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxInput {
    pub address: Address,
    pub amount: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    /// Position in the ledger's canonical order.
    pub index: usize,
    /// Approximate time in seconds; informational only.
    pub timestamp: i64,
    pub inputs: Vec<TxInput>,
    pub outputs: Vec<TxOutput>,
    pub is_coinbase: bool,
    pub fee: u64,
}

impl Transaction {
    pub fn input_sum(&self) -> u128 {
        self.inputs.iter().map(|i| i.amount as u128).sum()
    }

    pub fn output_sum(&self) -> u128 {
        self.outputs.iter().map(|o| o.amount as u128).sum()
    }

    /// Iterator over the distinct slots' addresses on the input side.
    pub fn input_addresses(&self) -> impl Iterator<Item = &Address> {
        self.inputs.iter().map(|i| &i.address)
    }

    pub fn output_addresses(&self) -> impl Iterator<Item = &Address> {
        self.outputs.iter().map(|o| &o.address)
    }
}

/// Ordered transaction sequence. Construction does not validate; call
/// [`Ledger::validate`] to obtain the list of invariant violations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ledger {
    transactions: Vec<Transaction>,
}

impl Ledger {
    pub fn new(transactions: Vec<Transaction>) -> Self {
        Ledger { transactions }
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Checks every ledger invariant and returns one entry per violation.
    /// Violations are data, not failures: an empty result means the ledger is
    /// valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut emitted: HashSet<&Address> = HashSet::new();

        for (i, tx) in self.transactions.iter().enumerate() {
            let mut report = |kind| violations.push(Violation { index: i, kind });

            if tx.index != i {
                report(ViolationKind::IndexMismatch {
                    expected: i,
                    found: tx.index,
                });
            }
            if tx.outputs.is_empty() {
                report(ViolationKind::EmptyOutputs);
            }
            if tx.is_coinbase {
                if !tx.inputs.is_empty() {
                    report(ViolationKind::CoinbaseWithInputs);
                }
            } else {
                if tx.inputs.is_empty() {
                    report(ViolationKind::MissingInputs);
                }
                let ins = tx.input_sum();
                let outs = tx.output_sum();
                if ins != outs + tx.fee as u128 {
                    report(ViolationKind::ConservationMismatch {
                        input_sum: ins,
                        output_sum: outs,
                        fee: tx.fee,
                    });
                }
            }
            for input in &tx.inputs {
                if input.address.is_empty() {
                    report(ViolationKind::EmptyAddress);
                } else if !emitted.contains(&input.address) {
                    report(ViolationKind::DanglingInput {
                        address: input.address.clone(),
                    });
                }
            }
            for output in &tx.outputs {
                if output.address.is_empty() {
                    report(ViolationKind::EmptyAddress);
                }
            }
            // Outputs become spendable only for strictly later transactions,
            // so they are registered after the input checks.
            for output in &tx.outputs {
                emitted.insert(&output.address);
            }
        }
        violations
    }

    /// Index of the first transaction emitting each address as an output.
    /// Appearance order is ledger index order, not timestamp order.
    pub fn first_seen(&self) -> FirstSeen {
        let mut map = HashMap::new();
        for (i, tx) in self.transactions.iter().enumerate() {
            for output in &tx.outputs {
                map.entry(output.address.clone()).or_insert(i);
            }
        }
        FirstSeen { map }
    }
}

/// Address -> index of the transaction whose outputs first contain it.
#[derive(Debug, Clone, Default)]
pub struct FirstSeen {
    map: HashMap<Address, usize>,
}

impl FirstSeen {
    pub fn index_of(&self, address: &Address) -> Option<usize> {
        self.map.get(address).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    IndexMismatch {
        expected: usize,
        found: usize,
    },
    EmptyOutputs,
    /// Non-coinbase transaction with no inputs.
    MissingInputs,
    CoinbaseWithInputs,
    ConservationMismatch {
        input_sum: u128,
        output_sum: u128,
        fee: u64,
    },
    /// Input spends an address never emitted by an earlier transaction.
    DanglingInput {
        address: Address,
    },
    EmptyAddress,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tx {}: ", self.index)?;
        match &self.kind {
            ViolationKind::IndexMismatch { expected, found } => {
                write!(f, "index {found} does not match position {expected}")
            }
            ViolationKind::EmptyOutputs => write!(f, "no outputs"),
            ViolationKind::MissingInputs => write!(f, "non-coinbase transaction with no inputs"),
            ViolationKind::CoinbaseWithInputs => write!(f, "coinbase transaction with inputs"),
            ViolationKind::ConservationMismatch {
                input_sum,
                output_sum,
                fee,
            } => write!(
                f,
                "conservation violated: inputs {input_sum} != outputs {output_sum} + fee {fee}"
            ),
            ViolationKind::DanglingInput { address } => {
                write!(f, "input address {address} never emitted earlier")
            }
            ViolationKind::EmptyAddress => write!(f, "empty address"),
        }
    }
}
