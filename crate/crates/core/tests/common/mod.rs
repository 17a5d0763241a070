//! Seeded random ledgers and brute-force oracles shared by the integration
//! tests. The oracles deliberately avoid the library's algorithms: they read
//! columns cell by cell and search explicit adjacency lists.

#![allow(dead_code)]

use chainpetri::ingest::{Block, TransactionRecord};
use chainpetri::{PlaceTransitionNet, Side, TransitionId};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, VecDeque};

/// A random ledger over at most `max_places` addresses and exactly
/// `num_tx` transactions. About one transaction in six copies the input and
/// output lists of an earlier one; lists may name an address twice.
pub fn random_blocks(seed: u64, max_places: usize, num_tx: usize) -> Vec<Block> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<String> = (0..max_places.max(1)).map(|i| format!("addr{i}")).collect();
    let mut history: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    let mut blocks = Vec::new();
    let mut height = 0;
    let mut emitted = 0;
    while emitted < num_tx {
        let size = rng.random_range(1..=8).min(num_tx - emitted);
        let mut txs = Vec::with_capacity(size);
        for _ in 0..size {
            let (inputs, outputs) = if !history.is_empty() && rng.random_bool(1.0 / 6.0) {
                history.choose(&mut rng).cloned().unwrap()
            } else {
                let n_in = rng.random_range(0..=3);
                let n_out = rng.random_range(1..=3);
                let pick = |rng: &mut ChaCha8Rng, n| -> Vec<String> {
                    (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect()
                };
                (pick(&mut rng, n_in), pick(&mut rng, n_out))
            };
            txs.push(TransactionRecord::new(format!("tx{emitted}"), inputs.clone(), outputs.clone()));
            history.push((inputs, outputs));
            emitted += 1;
        }
        blocks.push(Block::new(height, txs));
        height += 1 + rng.random_range(0..3);
    }
    blocks
}

/// `(place, value)` entries of one column, read cell by cell.
fn column(net: &PlaceTransitionNet, side: Side, t: usize) -> Column {
    let m = net.incidence(side).unwrap();
    net.column_places(side, TransitionId::new(t))
        .unwrap()
        .into_iter()
        .map(|p| (p.index(), m.get(p.index(), t)))
        .collect()
}

type Column = Vec<(usize, u32)>;

fn columns(net: &PlaceTransitionNet) -> Vec<(Column, Column)> {
    (0..net.num_transitions())
        .map(|t| (column(net, Side::Pre, t), column(net, Side::Post, t)))
        .collect()
}

/// Connected components of the graph joining every pair of addresses spent
/// in the same transaction; isolated places are singletons. Each component
/// sorted, components ordered by smallest member.
pub fn co_input_components(net: &PlaceTransitionNet) -> Vec<Vec<usize>> {
    let n = net.num_places();
    let mut adjacency = vec![Vec::new(); n];
    for t in 0..net.num_transitions() {
        let inputs: Vec<usize> = column(net, Side::Pre, t).into_iter().map(|(p, _)| p).collect();
        // a star is enough for connectivity and keeps wide inputs linear
        if let Some((&hub, rest)) = inputs.split_first() {
            for &b in rest {
                adjacency[hub].push(b);
                adjacency[b].push(hub);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut members = Vec::new();
        while let Some(p) = queue.pop_front() {
            members.push(p);
            for &q in &adjacency[p] {
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// All-pairs comparison of `(pre, post)` columns. Groups of size ≥ 2,
/// each ascending, ordered by first member.
pub fn all_pairs_repeats(net: &PlaceTransitionNet) -> Vec<Vec<usize>> {
    let columns = columns(net);
    let n = columns.len();
    let mut assigned = vec![false; n];
    let mut groups = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut group = vec![i];
        for j in i + 1..n {
            if !assigned[j] && columns[j] == columns[i] {
                assigned[j] = true;
                group.push(j);
            }
        }
        if group.len() >= 2 {
            groups.push(group);
        }
    }
    groups
}

/// Same grouping as [`all_pairs_repeats`] by sorting columns; usable on nets
/// too large for the quadratic scan.
pub fn sorted_repeats(net: &PlaceTransitionNet) -> Vec<Vec<usize>> {
    let columns = columns(net);
    let mut order: Vec<usize> = (0..columns.len()).collect();
    order.sort_by(|&a, &b| columns[a].cmp(&columns[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = order
        .chunk_by(|&a, &b| columns[a] == columns[b])
        .filter(|g| g.len() >= 2)
        .map(|g| g.to_vec())
        .collect();
    groups.sort();
    groups
}

/// `P(L > x)` at 0 and at every distinct value, by direct counting.
pub fn counted_ccdf(values: &[u64]) -> Vec<(u64, f64)> {
    let mut xs: BTreeMap<u64, ()> = values.iter().map(|&v| (v, ())).collect();
    xs.insert(0, ());
    xs.keys()
        .map(|&x| {
            let above = values.iter().filter(|&&v| v > x).count();
            (x, above as f64 / values.len() as f64)
        })
        .collect()
}

pub fn ids(v: &[TransitionId]) -> Vec<usize> {
    v.iter().map(|t| t.index()).collect()
}
