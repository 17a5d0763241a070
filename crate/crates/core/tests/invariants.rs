//! Property tests for the structural invariants of nets, entities, chains
//! and statistics.

mod common;

use chainpetri::analytics::{ccdf, degree_multiset, repeated_groups, summary, top_k_active, DegreeSide};
use chainpetri::chains::find_chains;
use chainpetri::entities::{build_entity_net, compute_entities, compute_entities_closure};
use chainpetri::ingest::{ingest, parse_block, Block, IngestMode, IngestReport, TransactionRecord};
use chainpetri::{PlaceTransitionNet, Side};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn record() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (prop::collection::vec(0u8..24, 0..4), prop::collection::vec(0u8..24, 1..4))
}

/// Blocks over a small address alphabet so that collisions are common.
fn blocks() -> impl Strategy<Value = Vec<Block>> {
    prop::collection::vec(prop::collection::vec(record(), 0..6), 0..8).prop_map(|raw| {
        let mut n = 0;
        raw.into_iter()
            .enumerate()
            .map(|(h, txs)| {
                let txs = txs
                    .into_iter()
                    .map(|(i, o)| {
                        n += 1;
                        let name = |v: Vec<u8>| v.into_iter().map(|a| format!("a{a}")).collect::<Vec<_>>();
                        TransactionRecord::new(format!("t{n}"), name(i), name(o))
                    })
                    .collect();
                Block::new(h as u64, txs)
            })
            .collect()
    })
}

fn net_of(blocks: &[Block]) -> (PlaceTransitionNet, IngestReport) {
    ingest(blocks, IngestMode::Lax).unwrap()
}

proptest! {
    #[test]
    fn construction_is_deterministic(b in blocks()) {
        let (x, _) = net_of(&b);
        let (y, _) = net_of(&b);
        prop_assert_eq!(x.snapshot_bytes().unwrap(), y.snapshot_bytes().unwrap());
    }

    #[test]
    fn address_nets_are_binary_and_conserve_arcs(b in blocks()) {
        let (net, _) = net_of(&b);
        for side in [Side::Pre, Side::Post] {
            prop_assert!(net.incidence(side).unwrap().triplets().all(|(_, _, v)| v == 1));
        }
        let txs: Vec<&TransactionRecord> = b.iter().flat_map(|b| &b.transactions).collect();
        let distinct = |f: fn(&TransactionRecord) -> &Vec<String>| -> usize {
            txs.iter().map(|t| f(t).iter().collect::<BTreeSet<_>>().len()).sum()
        };
        prop_assert_eq!(net.arc_count(Side::Pre), distinct(|t| &t.inputs));
        prop_assert_eq!(net.arc_count(Side::Post), distinct(|t| &t.outputs));
    }

    #[test]
    fn rows_and_columns_agree(b in blocks()) {
        let (net, _) = net_of(&b);
        for side in [Side::Pre, Side::Post] {
            for p in net.places() {
                let row = net.row_transitions(side, p).unwrap();
                for t in net.transitions() {
                    let in_col = net.column_places(side, t).unwrap().contains(&p);
                    prop_assert_eq!(row.contains(&t), in_col);
                }
                prop_assert_eq!(net.row_nnz(side, p).unwrap(), row.len());
            }
        }
    }

    #[test]
    fn snapshot_round_trip(b in blocks()) {
        let (net, _) = net_of(&b);
        let back = PlaceTransitionNet::load_snapshot_str(
            std::str::from_utf8(&net.snapshot_bytes().unwrap()).unwrap(),
        ).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(summary(&back).unwrap(), summary(&net).unwrap());
    }

    #[test]
    fn encoding_then_parsing_is_identity(b in blocks()) {
        for block in &b {
            prop_assert_eq!(&parse_block(&block.to_json()).unwrap(), block);
        }
    }

    #[test]
    fn partition_matches_oracle_and_separates_inputs(b in blocks()) {
        let (net, _) = net_of(&b);
        let partition = compute_entities(&net).unwrap();
        prop_assert_eq!(&partition, &compute_entities_closure(&net).unwrap());
        let found: Vec<Vec<usize>> = partition.entities().iter()
            .map(|e| e.iter().map(|p| p.index()).collect()).collect();
        prop_assert_eq!(found, common::co_input_components(&net));
        for t in net.transitions() {
            let owners: BTreeSet<usize> = net.column_places(Side::Pre, t).unwrap()
                .into_iter().map(|p| partition.entity_of(p)).collect();
            prop_assert!(owners.len() <= 1);
        }
        let multi_input = net.transitions().any(|t| net.column_places(Side::Pre, t).unwrap().len() >= 2);
        prop_assert!(partition.len() <= net.num_places());
        if !multi_input {
            prop_assert_eq!(partition.len(), net.num_places());
        }
    }

    #[test]
    fn entity_net_conserves_mass(b in blocks()) {
        let (net, _) = net_of(&b);
        let entity_net = build_entity_net(&net, &compute_entities(&net).unwrap()).unwrap().net;
        prop_assert_eq!(entity_net.transaction_ids(), net.transaction_ids());
        for side in [Side::Pre, Side::Post] {
            prop_assert_eq!(
                entity_net.incidence(side).unwrap().col_sums(),
                net.incidence(side).unwrap().col_sums()
            );
        }
    }

    #[test]
    fn chains_are_disjoint_and_ordered(b in blocks()) {
        let (net, _) = net_of(&b);
        let Ok((sets, chains)) = find_chains(&net) else {
            // random lax streams can form funding cycles; those are reported, not chained
            return Ok(());
        };
        let mut used = BTreeSet::new();
        for chain in &chains.chains {
            prop_assert!(chain.links.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(chain.links.iter().all(|t| sets.contains_transaction(*t)));
            prop_assert!(sets.starts.contains(&chain.links[0]));
            prop_assert!(chain.addresses(&net).len() > chain.len());
            for t in &chain.links {
                prop_assert!(used.insert(*t));
            }
        }
        prop_assert_eq!(find_chains(&net).unwrap().1, chains);
    }

    #[test]
    fn repeats_match_oracles_and_coarsen(b in blocks()) {
        let (net, _) = net_of(&b);
        let r = repeated_groups(&net).unwrap();
        let groups: Vec<Vec<usize>> = r.groups.iter().map(|g| common::ids(g)).collect();
        prop_assert_eq!(&groups, &common::all_pairs_repeats(&net));
        prop_assert_eq!(&groups, &common::sorted_repeats(&net));
        prop_assert_eq!(r.repetition_count, groups.iter().map(|g| g.len() - 1).sum::<usize>());

        let entity_net = build_entity_net(&net, &compute_entities(&net).unwrap()).unwrap().net;
        let coarse = repeated_groups(&entity_net).unwrap();
        for g in &r.groups {
            prop_assert!(coarse.groups.iter().any(|c| g.iter().all(|t| c.contains(t))));
        }
        prop_assert!(coarse.repetition_count >= r.repetition_count);
    }

    #[test]
    fn ccdf_is_monotone(values in prop::collection::vec(0u64..50, 1..200)) {
        let points = ccdf(&values).unwrap().points;
        prop_assert_eq!(&points, &common::counted_ccdf(&values));
        prop_assert!(points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 >= w[1].1));
        prop_assert_eq!(points.last().unwrap().1, 0.0);
    }

    #[test]
    fn top_k_is_a_prefix_of_the_full_ranking(b in blocks(), k in 1usize..10) {
        let (net, _) = net_of(&b);
        let all = top_k_active(&net, net.num_places().max(1)).unwrap();
        let top = top_k_active(&net, k).unwrap();
        prop_assert_eq!(&all[..top.len()], &top[..]);
        let ordered = all.windows(2).all(|w| {
            let (a, b) = (w[0].pre_nnz + w[0].post_nnz, w[1].pre_nnz + w[1].post_nnz);
            a > b || (a == b && w[0].place < w[1].place)
        });
        prop_assert!(ordered);
    }

    #[test]
    fn summary_agrees_with_ingest_report(b in blocks()) {
        let (net, report) = net_of(&b);
        let s = summary(&net).unwrap();
        prop_assert_eq!(
            (s.places, s.transitions, s.pre_arcs, s.post_arcs),
            (report.addresses, report.transactions, report.pre_arcs, report.post_arcs)
        );
        prop_assert_eq!(degree_multiset(&net, DegreeSide::Both).unwrap().counts.len(), net.num_places());
    }

    #[test]
    fn strict_ingest_rejects_exactly_unfunded_spends(b in blocks()) {
        let (_, lax) = net_of(&b);
        prop_assert_eq!(lax.rejected, 0);
        let (_, strict) = ingest(&b, IngestMode::Strict).unwrap();
        // replay the nonnegative balance rule independently
        let mut balance = std::collections::HashMap::<String, i64>::new();
        let mut expected = Vec::new();
        for tx in b.iter().flat_map(|b| &b.transactions) {
            let inputs: BTreeSet<&String> = tx.inputs.iter().collect();
            if inputs.iter().any(|a| balance.get(*a).copied().unwrap_or(0) <= 0) {
                expected.push(tx.tx_id.clone());
                continue;
            }
            for a in inputs {
                *balance.get_mut(a).unwrap() -= 1;
            }
            for a in tx.outputs.iter().collect::<BTreeSet<_>>() {
                *balance.entry(a.clone()).or_default() += 1;
            }
        }
        let rejected: Vec<String> = strict.rejections.iter().map(|r| r.tx_id.clone()).collect();
        prop_assert_eq!(rejected, expected);
    }
}
