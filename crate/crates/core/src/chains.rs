//! Chains of disposable-address transactions.
//!
//! A disposable address is received exactly once and spent exactly once.
//! The candidate transactions have a single input, which is disposable, and
//! exactly two outputs, at least one of them disposable. A candidate whose
//! input was funded by a non-candidate starts a chain; each chain is then
//! extended by following the candidate that spends one of its disposable
//! outputs.

use crate::net::{NetError, PlaceId, PlaceTransitionNet, Side, TransitionId};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("disposable transactions form a cycle through {0}")]
    Cycle(TransitionId),
    #[error("disposable sets do not belong to this net")]
    Mismatch,
}

/// Places with exactly one `pre` arc and one `post` arc, ascending.
pub fn disposable_addresses(net: &PlaceTransitionNet) -> Result<Vec<PlaceId>, ChainError> {
    let pre = net.incidence(Side::Pre)?;
    let post = net.incidence(Side::Post)?;
    Ok(net
        .places()
        .filter(|p| pre.row_nnz(p.index()) == 1 && post.row_nnz(p.index()) == 1)
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DisposableSets {
    /// Disposable addresses.
    pub addresses: Vec<PlaceId>,
    /// One-input, two-output transactions linking disposable addresses.
    pub transactions: Vec<TransitionId>,
    /// Members of `transactions` whose funding transaction is not a member.
    pub starts: Vec<TransitionId>,
    is_address: Vec<bool>,
    is_transaction: Vec<bool>,
}

impl DisposableSets {
    pub fn is_disposable(&self, p: PlaceId) -> bool {
        self.is_address.get(p.index()).copied().unwrap_or(false)
    }

    pub fn contains_transaction(&self, t: TransitionId) -> bool {
        self.is_transaction.get(t.index()).copied().unwrap_or(false)
    }
}

/// The transaction that funded the single input of `t`.
fn prev(net: &PlaceTransitionNet, t: usize) -> Option<usize> {
    let input = *net.side(Side::Pre).col_rows(t).first()?;
    net.side(Side::Post).row_cols(input as usize).first().map(|&c| c as usize)
}

/// Candidate successors of `t`: disposable-set transactions spending one of
/// its disposable outputs, ascending.
fn successors(net: &PlaceTransitionNet, sets: &DisposableSets, t: usize) -> Vec<usize> {
    let mut next: Vec<usize> = net
        .side(Side::Post)
        .col_rows(t)
        .iter()
        .filter(|&&o| sets.is_address[o as usize])
        .filter_map(|&o| net.side(Side::Pre).row_cols(o as usize).first())
        .map(|&s| s as usize)
        .filter(|&s| sets.is_transaction[s])
        .collect();
    next.sort_unstable();
    next.dedup();
    next
}

pub fn disposable_transactions(
    net: &PlaceTransitionNet,
    addresses: &[PlaceId],
) -> Result<DisposableSets, ChainError> {
    let pre = net.incidence(Side::Pre)?;
    let post = net.incidence(Side::Post)?;
    let mut is_address = vec![false; net.num_places()];
    for &p in addresses {
        *is_address.get_mut(p.index()).ok_or(ChainError::Mismatch)? = true;
    }

    let mut is_transaction = vec![false; net.num_transitions()];
    let mut transactions = Vec::new();
    for t in net.transitions() {
        let inputs = pre.col_rows(t.index());
        let outputs = post.col_rows(t.index());
        if inputs.len() == 1
            && outputs.len() == 2
            && is_address[inputs[0] as usize]
            && outputs.iter().any(|&o| is_address[o as usize])
        {
            is_transaction[t.index()] = true;
            transactions.push(t);
        }
    }

    let starts = transactions
        .iter()
        .copied()
        .filter(|t| prev(net, t.index()).is_none_or(|p| !is_transaction[p]))
        .collect();

    Ok(DisposableSets {
        addresses: addresses.to_vec(),
        transactions,
        starts,
        is_address,
        is_transaction,
    })
}

/// An ordered run of linked disposable-set transactions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub links: Vec<TransitionId>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// The input of every link followed by every link's outputs, without
    /// repeats, in first-seen order.
    pub fn addresses(&self, net: &PlaceTransitionNet) -> Vec<PlaceId> {
        let mut out: Vec<PlaceId> = Vec::new();
        for &t in &self.links {
            for side in [Side::Pre, Side::Post] {
                for &p in net.side(side).col_rows(t.index()) {
                    let p = PlaceId::new(p as usize);
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

/// A link with more than one successor: the walk took `chosen` and left
/// `bypassed` out of every chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BypassedSuccessor {
    pub from: TransitionId,
    pub chosen: TransitionId,
    pub bypassed: TransitionId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainSet {
    /// Sorted by descending length, ties by first link.
    pub chains: Vec<Chain>,
    pub bypassed: Vec<BypassedSuccessor>,
}

impl ChainSet {
    /// Chains with at least two links.
    pub fn multi_link_count(&self) -> usize {
        self.chains.iter().filter(|c| c.len() >= 2).count()
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.chains.iter().map(|c| c.len() as u64).collect()
    }
}

/// Walks one chain from every start. When a link has several successors the
/// smallest transition id is followed.
pub fn build_chains(net: &PlaceTransitionNet, sets: &DisposableSets) -> Result<ChainSet, ChainError> {
    net.require_sealed()?;
    if sets.is_address.len() != net.num_places() || sets.is_transaction.len() != net.num_transitions() {
        return Err(ChainError::Mismatch);
    }

    let mut in_chain = vec![false; net.num_transitions()];
    let mut result = ChainSet::default();
    for &start in &sets.starts {
        let mut links = vec![start];
        in_chain[start.index()] = true;
        let mut current = start.index();
        loop {
            let next = successors(net, sets, current);
            let Some((&chosen, others)) = next.split_first() else { break };
            for &b in others {
                result.bypassed.push(BypassedSuccessor {
                    from: TransitionId::new(current),
                    chosen: TransitionId::new(chosen),
                    bypassed: TransitionId::new(b),
                });
            }
            if in_chain[chosen] {
                return Err(ChainError::Cycle(TransitionId::new(chosen)));
            }
            in_chain[chosen] = true;
            links.push(TransitionId::new(chosen));
            current = chosen;
        }
        result.chains.push(Chain { links });
    }

    // Each member has a unique funder, so members unreachable from the
    // starts through any successor can only sit on a funding cycle.
    let mut reached = vec![false; net.num_transitions()];
    let mut queue: VecDeque<usize> = sets.starts.iter().map(|t| t.index()).collect();
    for &t in &queue {
        reached[t] = true;
    }
    while let Some(t) = queue.pop_front() {
        for s in successors(net, sets, t) {
            if !reached[s] {
                reached[s] = true;
                queue.push_back(s);
            }
        }
    }
    if let Some(&t) = sets.transactions.iter().find(|t| !reached[t.index()]) {
        return Err(ChainError::Cycle(t));
    }

    result
        .chains
        .sort_by(|a, b| b.len().cmp(&a.len()).then(a.links[0].cmp(&b.links[0])));
    Ok(result)
}

/// Convenience: disposable addresses, the disposable sets, then chains.
pub fn find_chains(net: &PlaceTransitionNet) -> Result<(DisposableSets, ChainSet), ChainError> {
    let addresses = disposable_addresses(net)?;
    let sets = disposable_transactions(net, &addresses)?;
    let chains = build_chains(net, &sets)?;
    Ok((sets, chains))
}

/// One row of the chain export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReportRow {
    pub length: usize,
    pub transactions: Vec<String>,
    pub addresses: Vec<String>,
}

pub fn chain_report(net: &PlaceTransitionNet, chains: &ChainSet) -> Vec<ChainReportRow> {
    chains
        .chains
        .iter()
        .map(|c| ChainReportRow {
            length: c.len(),
            transactions: c
                .links
                .iter()
                .map(|t| net.transaction_ids()[t.index()].clone())
                .collect(),
            addresses: c
                .addresses(net)
                .iter()
                .map(|p| net.addresses()[p.index()].clone())
                .collect(),
        })
        .collect()
}
