//! The seven-transaction, six-address worked example used throughout the
//! docs and tests.
//!
//! ```text
//! t1: ∅ -> {a1}          t5: {a2, a3} -> {a5, a6}
//! t2: ∅ -> {a1}          t6: ∅ -> {a2}
//! t3: {a1} -> {a2, a3, a4}
//! t4: ∅ -> {a2}          t7: {a2, a6} -> {a5}
//! ```
//!
//! Addresses are first seen in the order a1..a6, so `alpha{i}` becomes place
//! `i - 1` and `theta{j}` becomes transition `j - 1`.

use crate::ingest::{ingest, Block, IngestMode, TransactionRecord};
use crate::net::PlaceTransitionNet;

fn tx(id: &str, inputs: &[&str], outputs: &[&str]) -> TransactionRecord {
    TransactionRecord::new(id, inputs.iter().copied(), outputs.iter().copied())
}

/// The worked example split over two blocks.
pub fn worked_example_blocks() -> Vec<Block> {
    vec![
        Block::new(
            0,
            vec![
                tx("theta1", &[], &["alpha1"]),
                tx("theta2", &[], &["alpha1"]),
                tx("theta3", &["alpha1"], &["alpha2", "alpha3", "alpha4"]),
                tx("theta4", &[], &["alpha2"]),
            ],
        ),
        Block::new(
            1,
            vec![
                tx("theta5", &["alpha2", "alpha3"], &["alpha5", "alpha6"]),
                tx("theta6", &[], &["alpha2"]),
                tx("theta7", &["alpha2", "alpha6"], &["alpha5"]),
            ],
        ),
    ]
}

/// The sealed address-level net of the worked example.
pub fn worked_example_net() -> PlaceTransitionNet {
    ingest(&worked_example_blocks(), IngestMode::Lax)
        .expect("worked example ingests")
        .0
}
