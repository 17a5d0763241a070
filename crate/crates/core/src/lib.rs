//! Blockchain ledgers as place/transition nets.
//!
//! Addresses are places, transactions are transitions, and the net's sparse
//! `pre`/`post` incidence carries every input and output arc. On top of that
//! model the crate derives:
//!
//! * owner entities from shared-input co-occurrence ([`entities`]),
//! * chains of disposable-address transactions ([`chains`]),
//! * degree distributions, top activity, accumulate-only addresses and
//!   repeated-transaction groups ([`analytics`]).
//!
//! Block data comes in through [`ingest`], either as canonical block JSON, as
//! blockchain.info-style rawblocks, or from the seeded synthetic generator.
//!
//! ```
//! use chainpetri::{analytics, entities, fixtures};
//!
//! let net = fixtures::worked_example_net();
//! let partition = entities::compute_entities(&net).unwrap();
//! assert_eq!(partition.len(), 4);
//! let summary = analytics::summary(&net).unwrap();
//! assert_eq!((summary.pre_arcs, summary.post_arcs), (5, 10));
//! ```

pub mod analytics;
pub mod chains;
pub mod cli;
pub mod entities;
pub mod fixtures;
pub mod ingest;
pub mod net;

pub use net::{NetError, PlaceId, PlaceTransitionNet, Side, SparseIncidence, TransitionId};
