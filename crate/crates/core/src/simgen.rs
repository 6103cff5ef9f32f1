//! Seeded synthetic-ledger generator with exact ground truth.
//!
//! The simulated economy is intentionally small: a fixed set of users, a
//! coinbase minting to a random user every `coinbase_every` transactions
//! (index 0 is always a coinbase so the economy is bootstrapped), and
//! payments in between. A payment picks a funded payer, gathers the payer's
//! unspent outputs largest-first until the amount is covered (no partial
//! spending, so multi-input transactions arise naturally), pays 1..=fanout_max
//! recipients, and returns any remainder either to a fresh never-reused
//! change address (probability `change_prob`) or to one of the payer's
//! existing addresses. Every address belongs to exactly one user, which is
//! the ground truth.
//!
//! Randomness comes from a single [`SplitMix64`] stream; the draw order is
//! part of the format and documented in the repository README, so equal
//! configurations reproduce ledgers bit-for-bit.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use hashbrown::HashSet;

use crate::evaluation::GroundTruth;
use crate::ledger::{Address, Ledger, Transaction, TxInput, TxOutput};
use crate::rng::SplitMix64;

/// Payment and coinbase amounts are uniform in `1..=MAX_AMOUNT`.
pub const MAX_AMOUNT: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub users: u64,
    pub txs: u64,
    /// Probability that a recipient reuses one of their existing addresses.
    pub addr_reuse_prob: f64,
    /// Probability that change goes to a fresh one-time address.
    pub change_prob: f64,
    /// Maximum recipients per payment.
    pub fanout_max: u64,
    /// A coinbase funds a random user every this many transactions.
    pub coinbase_every: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            users: 100,
            txs: 1000,
            addr_reuse_prob: 0.3,
            change_prob: 0.7,
            fanout_max: 3,
            coinbase_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    InfeasibleConfig(&'static str),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InfeasibleConfig(reason) => write!(f, "infeasible config: {reason}"),
        }
    }
}
impl core::error::Error for SimError {}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.users == 0 {
            return Err(SimError::InfeasibleConfig("users must be at least 1"));
        }
        if self.txs == 0 {
            return Err(SimError::InfeasibleConfig("txs must be at least 1"));
        }
        if self.fanout_max == 0 {
            return Err(SimError::InfeasibleConfig("fanout_max must be at least 1"));
        }
        if self.coinbase_every == 0 {
            return Err(SimError::InfeasibleConfig(
                "coinbase_every must be at least 1",
            ));
        }
        if self.coinbase_every > self.txs {
            return Err(SimError::InfeasibleConfig(
                "coinbase_every exceeds txs: no coinbase would ever fund a user",
            ));
        }
        if self.users > u32::MAX as u64 {
            return Err(SimError::InfeasibleConfig("users must fit in 32 bits"));
        }
        for p in [self.addr_reuse_prob, self.change_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InfeasibleConfig(
                    "probabilities must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }
}

/// Unspent output keyed for largest-first selection; the sequence number
/// makes the order total.
type UtxoKey = (u64, Reverse<u32>, Reverse<u64>);

struct Economy {
    rng: SplitMix64,
    users: u64,
    addr_reuse_prob: f64,
    /// Owner per address id, in creation order.
    owner_of: Vec<u32>,
    /// Addresses of each user, in creation order.
    addresses_of: Vec<Vec<u32>>,
    wallets: Vec<BinaryHeap<UtxoKey>>,
    balances: Vec<u64>,
    utxo_seq: u64,
}

impl Economy {
    fn address_string(id: u32) -> String {
        alloc::format!("a{id:08}")
    }

    fn fresh_address(&mut self, user: u32) -> u32 {
        let id = self.owner_of.len() as u32;
        self.owner_of.push(user);
        self.addresses_of[user as usize].push(id);
        id
    }

    /// Address an incoming payment to `user`: an existing address with
    /// probability `addr_reuse_prob` (no draw is consumed while the user has
    /// none), otherwise a fresh one.
    fn receiving_address(&mut self, user: u32) -> u32 {
        let existing = self.addresses_of[user as usize].len() as u64;
        if existing > 0 && self.rng.chance(self.addr_reuse_prob) {
            let pick = self.rng.next_below(existing) as usize;
            self.addresses_of[user as usize][pick]
        } else {
            self.fresh_address(user)
        }
    }

    fn credit(&mut self, user: u32, address: u32, amount: u64) {
        self.utxo_seq += 1;
        self.wallets[user as usize].push((amount, Reverse(address), Reverse(self.utxo_seq)));
        self.balances[user as usize] += amount;
    }

    /// First funded user scanning cyclically upward from a uniform start.
    fn pick_payer(&mut self) -> Option<u32> {
        let start = self.rng.next_below(self.users);
        (0..self.users)
            .map(|off| ((start + off) % self.users) as u32)
            .find(|&u| self.balances[u as usize] > 0)
    }

    /// Pops the payer's largest outputs until they cover `amount`.
    fn gather_inputs(&mut self, payer: u32, amount: u64) -> Vec<TxInput> {
        let wallet = &mut self.wallets[payer as usize];
        let mut gathered = 0u64;
        let mut inputs = Vec::new();
        while gathered < amount {
            let (value, Reverse(address), _) =
                wallet.pop().expect("payer balance covers the payment");
            gathered += value;
            inputs.push(TxInput {
                address: Address::new(Self::address_string(address)),
                amount: value,
            });
        }
        self.balances[payer as usize] -= gathered;
        inputs
    }
}

/// Generates a valid ledger and its ground truth. Deterministic for a given
/// config: the same seed yields byte-identical output.
pub fn generate(config: &SimConfig) -> Result<(Ledger, GroundTruth), SimError> {
    config.validate()?;
    let mut economy = Economy {
        rng: SplitMix64::new(config.seed),
        users: config.users,
        addr_reuse_prob: config.addr_reuse_prob,
        owner_of: Vec::new(),
        addresses_of: alloc::vec![Vec::new(); config.users as usize],
        wallets: (0..config.users).map(|_| BinaryHeap::new()).collect(),
        balances: alloc::vec![0; config.users as usize],
        utxo_seq: 0,
    };

    let mut transactions = Vec::with_capacity(config.txs as usize);
    for index in 0..config.txs {
        let timestamp =
            1_500_000_000 + 600 * index as i64 + (economy.rng.next_below(1201) as i64 - 600);

        let tx = if index % config.coinbase_every == 0 {
            let user = economy.rng.next_below(config.users) as u32;
            let amount = 1 + economy.rng.next_below(MAX_AMOUNT);
            let address = economy.receiving_address(user);
            economy.credit(user, address, amount);
            Transaction {
                index: index as usize,
                timestamp,
                inputs: Vec::new(),
                outputs: alloc::vec![TxOutput {
                    address: Address::new(Economy::address_string(address)),
                    amount,
                }],
                is_coinbase: true,
                fee: 0,
            }
        } else {
            let payer = economy.pick_payer().ok_or(SimError::InfeasibleConfig(
                "no user ever has spendable funds",
            ))?;
            let balance = economy.balances[payer as usize];
            let fanout = 1 + economy.rng.next_below(config.fanout_max);
            let amount = 1 + economy.rng.next_below(MAX_AMOUNT.min(balance));
            let recipients = fanout.min(amount);

            let recipient_users: Vec<u32> = (0..recipients)
                .map(|_| economy.rng.next_below(config.users) as u32)
                .collect();
            let mut parts = Vec::with_capacity(recipients as usize);
            let mut remaining = amount;
            for slot in 0..recipients - 1 {
                let slots_after = recipients - 1 - slot;
                let part = 1 + economy.rng.next_below(remaining - slots_after);
                parts.push(part);
                remaining -= part;
            }
            parts.push(remaining);

            let recipient_addresses: Vec<u32> = recipient_users
                .iter()
                .map(|&user| economy.receiving_address(user))
                .collect();

            // Inputs are gathered before any crediting, so a payment to the
            // payer itself cannot be spent by this same transaction.
            let inputs = economy.gather_inputs(payer, amount);
            let gathered: u64 = inputs.iter().map(|i| i.amount).sum();
            let change = gathered - amount;

            let change_address = if change > 0 {
                Some(if economy.rng.chance(config.change_prob) {
                    economy.fresh_address(payer)
                } else {
                    let owned = economy.addresses_of[payer as usize].len() as u64;
                    let pick = economy.rng.next_below(owned) as usize;
                    economy.addresses_of[payer as usize][pick]
                })
            } else {
                None
            };

            let mut outputs = Vec::with_capacity(recipients as usize + 1);
            for ((user, address), part) in
                recipient_users.iter().zip(&recipient_addresses).zip(&parts)
            {
                economy.credit(*user, *address, *part);
                outputs.push(TxOutput {
                    address: Address::new(Economy::address_string(*address)),
                    amount: *part,
                });
            }
            if let Some(address) = change_address {
                economy.credit(payer, address, change);
                outputs.push(TxOutput {
                    address: Address::new(Economy::address_string(address)),
                    amount: change,
                });
            }

            Transaction {
                index: index as usize,
                timestamp,
                inputs,
                outputs,
                is_coinbase: false,
                fee: 0,
            }
        };
        transactions.push(tx);
    }

    let ground_truth = GroundTruth::new(
        economy
            .owner_of
            .iter()
            .enumerate()
            .map(|(id, &user)| {
                (
                    Address::new(Economy::address_string(id as u32)),
                    alloc::format!("u{user}"),
                )
            })
            .collect(),
    )
    .expect("at least the coinbase address exists");

    Ok((Ledger::new(transactions), ground_truth))
}

/// Dataset statistics in the style of a labeled-collection summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimSummary {
    pub transactions: u64,
    pub distinct_addresses: u64,
    pub users: u64,
    pub max_addresses_per_user: u64,
    pub single_address_users: u64,
}

pub fn describe(ledger: &Ledger, gt: &GroundTruth) -> SimSummary {
    let mut distinct: HashSet<&Address> = HashSet::new();
    for tx in ledger.transactions() {
        for input in &tx.inputs {
            distinct.insert(&input.address);
        }
        for output in &tx.outputs {
            distinct.insert(&output.address);
        }
    }
    let mut per_user: hashbrown::HashMap<&str, u64> = hashbrown::HashMap::new();
    for (_, label) in gt.iter() {
        *per_user.entry(label).or_insert(0) += 1;
    }
    SimSummary {
        transactions: ledger.len() as u64,
        distinct_addresses: distinct.len() as u64,
        users: per_user.len() as u64,
        max_addresses_per_user: per_user.values().copied().max().unwrap_or(0),
        single_address_users: per_user.values().filter(|&&c| c == 1).count() as u64,
    }
}
