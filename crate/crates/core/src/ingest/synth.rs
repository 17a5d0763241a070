//! Seeded synthetic ledgers with planted structure and exact ground truth.
//!
//! Every planted component uses its own fresh addresses, so components never
//! interact. The component shapes are:
//!
//! * **entity** of `k` addresses: one coinbase per address, then `m` co-spend
//!   transactions whose input sets overlap in a chain (the overlap address
//!   receives change from the previous co-spend). Each co-spend pays a fresh
//!   payee.
//! * **chain** of `L` links: a coinbase funds `d0`; link `i` spends `d(i-1)`
//!   into `{d(i), payee(i)}`; a terminal one-output transaction spends `d(L)`
//!   so the last link also has a disposable output.
//! * **repeat group** of `s` transactions: one coinbase funds the input set
//!   `X`; each member spends `X` into `Y ∪ X` (change back to itself), so all
//!   members share identical input and output sets.
//! * **deposit** with `r` receipts: `r` one-input one-output payments from
//!   fresh, coinbase-funded payers into one address that never spends.
//! * **filler**: a coinbase funds `f`, then `f` is spent into fresh outputs
//!   (optionally one heavy-tailed hub address among them).
//!
//! Components are randomly interleaved while keeping each component's own
//! order, so the stream is temporally valid and passes strict ingestion.

use super::block::{Block, TransactionRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

fn default_addresses_per_filler() -> usize {
    2
}

fn default_max_block_transactions() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Address count of each planted multi-address entity.
    #[serde(default)]
    pub entities: Vec<usize>,
    /// Link count of each planted disposable-address chain.
    #[serde(default)]
    pub chains: Vec<usize>,
    /// Member count of each planted repeat group (at least 2).
    #[serde(default)]
    pub repeats: Vec<usize>,
    /// Receipt count of each planted deposit address.
    #[serde(default)]
    pub deposits: Vec<usize>,
    #[serde(default)]
    pub fillers: usize,
    #[serde(default = "default_addresses_per_filler")]
    pub addresses_per_filler: usize,
    /// Shared receive-only addresses that fillers pay with Zipf-distributed
    /// popularity.
    #[serde(default)]
    pub hubs: usize,
    #[serde(default = "default_max_block_transactions")]
    pub max_block_transactions: usize,
    /// Upper bound on generated transactions, if any.
    #[serde(default)]
    pub transaction_budget: Option<usize>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            entities: Vec::new(),
            chains: Vec::new(),
            repeats: Vec::new(),
            deposits: Vec::new(),
            fillers: 0,
            addresses_per_filler: default_addresses_per_filler(),
            hubs: 0,
            max_block_transactions: default_max_block_transactions(),
            transaction_budget: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid generator config: {0}")]
    Invalid(String),
    #[error("config needs {needed} transactions but the budget is {budget}")]
    OverBudget { needed: usize, budget: usize },
}

fn cospend_count(size: usize) -> usize {
    if size < 2 {
        0
    } else {
        1 + (size - 2) / 16
    }
}

impl GeneratorConfig {
    /// Exact number of transactions the config produces.
    pub fn planned_transactions(&self) -> usize {
        let entities: usize = self.entities.iter().map(|&k| k + cospend_count(k)).sum();
        let chains: usize = self.chains.iter().map(|&l| l + 2).sum();
        let repeats: usize = self.repeats.iter().map(|&s| s + 1).sum();
        let deposits: usize = self.deposits.iter().map(|&r| 2 * r).sum();
        entities + chains + repeats + deposits + 2 * self.fillers
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |what: &str| Err(ConfigError::Invalid(what.to_owned()));
        if self.entities.contains(&0) {
            return bad("entity sizes must be at least 1");
        }
        if self.chains.contains(&0) {
            return bad("chain lengths must be at least 1");
        }
        if self.repeats.iter().any(|&s| s < 2) {
            return bad("repeat groups need at least 2 members");
        }
        if self.deposits.contains(&0) {
            return bad("deposits need at least 1 receipt");
        }
        if self.fillers > 0 && self.addresses_per_filler == 0 {
            return bad("addresses_per_filler must be at least 1");
        }
        if self.max_block_transactions == 0 {
            return bad("max_block_transactions must be at least 1");
        }
        if let Some(budget) = self.transaction_budget {
            let needed = self.planned_transactions();
            if needed > budget {
                return Err(ConfigError::OverBudget { needed, budget });
            }
        }
        Ok(())
    }

    /// A config of roughly `transactions` transactions with heavy-tailed
    /// entity sizes and chain lengths, about 1.2 addresses per transaction.
    pub fn scaled(transactions: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ca1_ab1e);
        let entity_sizes = Zipf::new(400.0, 1.6).expect("valid zipf");
        let chain_lengths = Zipf::new(50.0, 1.3).expect("valid zipf");
        let repeat_sizes = Zipf::new(40.0, 1.8).expect("valid zipf");
        let deposit_receipts = Zipf::new(100.0, 1.5).expect("valid zipf");

        let mut config = GeneratorConfig {
            hubs: (transactions / 200).max(1),
            ..GeneratorConfig::default()
        };
        let mut fill = |share: f64, out: &mut Vec<usize>, dist: &Zipf<f64>, min: usize, cost: fn(usize) -> usize| {
            let target = (transactions as f64 * share) as usize;
            let mut used = 0;
            while used < target {
                let v = (dist.sample(&mut rng) as usize).max(min);
                used += cost(v);
                out.push(v);
            }
        };
        fill(0.20, &mut config.entities, &entity_sizes, 2, |k| k + cospend_count(k));
        fill(0.20, &mut config.chains, &chain_lengths, 1, |l| l + 2);
        fill(0.05, &mut config.repeats, &repeat_sizes, 2, |s| s + 1);
        fill(0.05, &mut config.deposits, &deposit_receipts, 1, |r| 2 * r);
        let mut used = config.planned_transactions();
        // fillers come in pairs; an odd remainder grows one repeat group
        if transactions.saturating_sub(used) % 2 == 1 {
            if let Some(size) = config.repeats.first_mut() {
                *size += 1;
                used += 1;
            }
        }
        config.fillers = transactions.saturating_sub(used) / 2;
        config
    }
}

/// Counts the generator keeps while emitting, independent of any net.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorAccounting {
    pub places: usize,
    pub transitions: usize,
    pub pre_arcs: usize,
    pub post_arcs: usize,
    pub accumulate_only: usize,
    pub disposable: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticGroundTruth {
    /// Every address, grouped by owner. Groups are ordered by the first
    /// appearance of their earliest member; members by first appearance.
    pub entity_partition: Vec<Vec<String>>,
    /// Link transaction ids of each planted chain, in execution order.
    pub planted_chains: Vec<Vec<String>>,
    /// Member transaction ids of each planted repeat group, in order.
    pub planted_repeat_groups: Vec<Vec<String>>,
    pub deposit_addresses: Vec<String>,
    pub hub_addresses: Vec<String>,
    pub accounting: GeneratorAccounting,
}

#[derive(Debug, Clone, Copy)]
enum Tag {
    Plain,
    ChainLink(usize),
    Repeat(usize),
}

#[derive(Debug, Clone)]
struct PendingTx {
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    tag: Tag,
}

impl PendingTx {
    fn new(inputs: Vec<u32>, outputs: Vec<u32>, tag: Tag) -> Self {
        Self { inputs, outputs, tag }
    }

    fn coinbase(output: u32) -> Self {
        Self::new(Vec::new(), vec![output], Tag::Plain)
    }
}

const BASE58: &[u8] = b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

struct AddressBook {
    names: Vec<String>,
    owner: Vec<u32>,
    seen: FxHashSet<String>,
    owners: u32,
}

impl AddressBook {
    fn new() -> Self {
        Self {
            names: Vec::new(),
            owner: Vec::new(),
            seen: FxHashSet::default(),
            owners: 0,
        }
    }

    fn new_owner(&mut self) -> u32 {
        self.owners += 1;
        self.owners - 1
    }

    fn fresh_owned(&mut self, rng: &mut ChaCha8Rng, owner: u32) -> u32 {
        let name = loop {
            let mut s = String::with_capacity(34);
            s.push('1');
            for _ in 0..33 {
                s.push(BASE58[rng.random_range(0..BASE58.len())] as char);
            }
            if self.seen.insert(s.clone()) {
                break s;
            }
        };
        self.names.push(name);
        self.owner.push(owner);
        (self.names.len() - 1) as u32
    }

    fn fresh(&mut self, rng: &mut ChaCha8Rng) -> u32 {
        let owner = self.new_owner();
        self.fresh_owned(rng, owner)
    }
}

fn entity_component(book: &mut AddressBook, rng: &mut ChaCha8Rng, size: usize) -> Vec<PendingTx> {
    let owner = book.new_owner();
    let members: Vec<u32> = (0..size).map(|_| book.fresh_owned(rng, owner)).collect();
    let mut txs: Vec<PendingTx> = members.iter().map(|&a| PendingTx::coinbase(a)).collect();
    let m = cospend_count(size);
    if m == 0 {
        return txs;
    }
    // segment boundaries; the first segment holds at least two addresses
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, size - 2, m - 1)
        .into_iter()
        .map(|c| c + 2)
        .collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(size);
    for j in 0..m {
        let mut inputs: Vec<u32> = Vec::new();
        if j > 0 {
            inputs.push(members[bounds[j] - 1]);
        }
        inputs.extend_from_slice(&members[bounds[j]..bounds[j + 1]]);
        let mut outputs = vec![book.fresh(rng)];
        if j + 1 < m {
            // change to the address the next co-spend shares
            outputs.push(members[bounds[j + 1] - 1]);
        }
        inputs.shuffle(rng);
        outputs.shuffle(rng);
        txs.push(PendingTx::new(inputs, outputs, Tag::Plain));
    }
    txs
}

fn chain_component(book: &mut AddressBook, rng: &mut ChaCha8Rng, length: usize, chain: usize) -> Vec<PendingTx> {
    let mut current = book.fresh(rng);
    let mut txs = vec![PendingTx::coinbase(current)];
    for _ in 0..length {
        let next = book.fresh(rng);
        let payee = book.fresh(rng);
        let mut outputs = vec![next, payee];
        outputs.shuffle(rng);
        txs.push(PendingTx::new(vec![current], outputs, Tag::ChainLink(chain)));
        current = next;
    }
    let sink = book.fresh(rng);
    txs.push(PendingTx::new(vec![current], vec![sink], Tag::Plain));
    txs
}

fn repeat_component(book: &mut AddressBook, rng: &mut ChaCha8Rng, size: usize, group: usize) -> Vec<PendingTx> {
    let owner = book.new_owner();
    let inputs: Vec<u32> = (0..rng.random_range(1..=2)).map(|_| book.fresh_owned(rng, owner)).collect();
    let payees: Vec<u32> = (0..rng.random_range(1..=2)).map(|_| book.fresh(rng)).collect();
    let mut outputs = payees;
    outputs.extend_from_slice(&inputs);
    outputs.shuffle(rng);
    let mut txs = vec![PendingTx::new(Vec::new(), inputs.clone(), Tag::Plain)];
    for _ in 0..size {
        txs.push(PendingTx::new(inputs.clone(), outputs.clone(), Tag::Repeat(group)));
    }
    txs
}

fn deposit_component(book: &mut AddressBook, rng: &mut ChaCha8Rng, receipts: usize) -> (u32, Vec<PendingTx>) {
    let deposit = book.fresh(rng);
    let mut txs = Vec::with_capacity(2 * receipts);
    for _ in 0..receipts {
        let payer = book.fresh(rng);
        txs.push(PendingTx::coinbase(payer));
        txs.push(PendingTx::new(vec![payer], vec![deposit], Tag::Plain));
    }
    (deposit, txs)
}

fn filler_component(
    book: &mut AddressBook,
    rng: &mut ChaCha8Rng,
    outputs: usize,
    hubs: &[u32],
    hub_pick: Option<&Zipf<f64>>,
) -> Vec<PendingTx> {
    let source = book.fresh(rng);
    let mut outs = Vec::with_capacity(outputs);
    if let Some(dist) = hub_pick {
        if rng.random_bool(0.5) {
            let rank = dist.sample(rng) as usize;
            outs.push(hubs[rank.clamp(1, hubs.len()) - 1]);
        }
    }
    while outs.len() < outputs {
        outs.push(book.fresh(rng));
    }
    outs.shuffle(rng);
    vec![PendingTx::coinbase(source), PendingTx::new(vec![source], outs, Tag::Plain)]
}

fn tx_hash(rng: &mut ChaCha8Rng, seen: &mut FxHashSet<[u64; 4]>) -> String {
    loop {
        let words: [u64; 4] = rng.random();
        if seen.insert(words) {
            return words.iter().map(|w| format!("{w:016x}")).collect();
        }
    }
}

/// Generates a block stream and the structure planted in it. A pure function
/// of `(config, seed)`.
pub fn generate_synthetic(config: &GeneratorConfig, seed: u64) -> Result<(Vec<Block>, SyntheticGroundTruth), ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut book = AddressBook::new();
    let mut components: Vec<Vec<PendingTx>> = Vec::new();
    let mut truth = SyntheticGroundTruth::default();

    for &size in &config.entities {
        components.push(entity_component(&mut book, &mut rng, size));
    }
    for (i, &length) in config.chains.iter().enumerate() {
        components.push(chain_component(&mut book, &mut rng, length, i));
    }
    for (i, &size) in config.repeats.iter().enumerate() {
        components.push(repeat_component(&mut book, &mut rng, size, i));
    }
    let mut deposits = Vec::new();
    for &receipts in &config.deposits {
        let (deposit, txs) = deposit_component(&mut book, &mut rng, receipts);
        deposits.push(deposit);
        components.push(txs);
    }
    let hubs: Vec<u32> = if config.fillers > 0 {
        (0..config.hubs).map(|_| book.fresh(&mut rng)).collect()
    } else {
        Vec::new()
    };
    let hub_pick = if hubs.is_empty() {
        None
    } else {
        Some(Zipf::new(hubs.len() as f64, 1.2).expect("valid zipf"))
    };
    for _ in 0..config.fillers {
        components.push(filler_component(
            &mut book,
            &mut rng,
            config.addresses_per_filler,
            &hubs,
            hub_pick.as_ref(),
        ));
    }

    // uniform random interleaving that keeps each component's order
    let mut schedule: Vec<u32> = components
        .iter()
        .enumerate()
        .flat_map(|(c, txs)| std::iter::repeat_n(c as u32, txs.len()))
        .collect();
    schedule.shuffle(&mut rng);

    truth.planted_chains = vec![Vec::new(); config.chains.len()];
    truth.planted_repeat_groups = vec![Vec::new(); config.repeats.len()];

    let n_addr = book.names.len();
    let mut first_seen = vec![u32::MAX; n_addr];
    let mut seen_order: Vec<u32> = Vec::with_capacity(n_addr);
    let mut receives = vec![0u32; n_addr];
    let mut spends = vec![0u32; n_addr];
    let mut cursors = vec![0usize; components.len()];
    let mut hashes = FxHashSet::default();
    let mut records = Vec::with_capacity(schedule.len());
    let mut acc = GeneratorAccounting::default();

    for c in schedule {
        let c = c as usize;
        let tx = &components[c][cursors[c]];
        cursors[c] += 1;
        let tx_id = tx_hash(&mut rng, &mut hashes);
        match tx.tag {
            Tag::ChainLink(i) => truth.planted_chains[i].push(tx_id.clone()),
            Tag::Repeat(i) => truth.planted_repeat_groups[i].push(tx_id.clone()),
            Tag::Plain => {}
        }
        for (list, counter, arcs) in [
            (&tx.inputs, &mut spends, &mut acc.pre_arcs),
            (&tx.outputs, &mut receives, &mut acc.post_arcs),
        ] {
            let mut distinct = list.clone();
            distinct.sort_unstable();
            distinct.dedup();
            *arcs += distinct.len();
            for &a in &distinct {
                counter[a as usize] += 1;
            }
        }
        for &a in tx.inputs.iter().chain(&tx.outputs) {
            if first_seen[a as usize] == u32::MAX {
                first_seen[a as usize] = seen_order.len() as u32;
                seen_order.push(a);
            }
        }
        let name = |a: &u32| book.names[*a as usize].clone();
        records.push(TransactionRecord {
            tx_id,
            inputs: tx.inputs.iter().map(name).collect(),
            outputs: tx.outputs.iter().map(name).collect(),
        });
    }

    acc.transitions = records.len();
    acc.places = seen_order.len();
    acc.accumulate_only = (0..n_addr).filter(|&a| spends[a] == 0 && receives[a] > 0).count();
    acc.disposable = (0..n_addr).filter(|&a| spends[a] == 1 && receives[a] == 1).count();
    truth.accounting = acc;

    let mut group_of_owner = vec![usize::MAX; book.owners as usize];
    for &a in &seen_order {
        let owner = book.owner[a as usize] as usize;
        if group_of_owner[owner] == usize::MAX {
            group_of_owner[owner] = truth.entity_partition.len();
            truth.entity_partition.push(Vec::new());
        }
        truth.entity_partition[group_of_owner[owner]].push(book.names[a as usize].clone());
    }
    truth.deposit_addresses = deposits.iter().map(|&a| book.names[a as usize].clone()).collect();
    truth.hub_addresses = hubs
        .iter()
        .filter(|&&a| first_seen[a as usize] != u32::MAX)
        .map(|&a| book.names[a as usize].clone())
        .collect();

    let mut blocks = Vec::new();
    let mut rest = records.into_iter().peekable();
    let mut height = 0u64;
    while rest.peek().is_some() {
        let size = rng.random_range(1..=config.max_block_transactions);
        let transactions: Vec<_> = rest.by_ref().take(size).collect();
        blocks.push(Block::new(height, transactions));
        height += 1;
    }
    Ok((blocks, truth))
}
