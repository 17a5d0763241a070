//! Block ingestion: parsing, rawblock conversion, the sequential fold into a
//! net, and the seeded synthetic-ledger generator.

mod block;
mod rawblock;
pub mod synth;

pub use block::{parse_block, parse_block_stream, Block, ParseError, TransactionRecord};
pub use rawblock::{convert_rawblock, convert_rawblock_stream, to_rawblock_json, ConversionReport};
pub use synth::{generate_synthetic, ConfigError, GeneratorAccounting, GeneratorConfig, SyntheticGroundTruth};

use crate::net::{NetError, PlaceTransitionNet, Side};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How strictly inputs are checked against earlier outputs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IngestMode {
    /// Accept every well-formed transaction.
    #[default]
    Lax,
    /// Reject a transaction if any input address has a receives-minus-spends
    /// balance of zero or less at that point in the stream.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RejectReason {
    /// Strict mode: an input address had no unspent receive left.
    UnfundedInput { address: String },
    /// The transaction id was already ingested.
    DuplicateTransaction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub tx_id: String,
    pub height: u64,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub blocks: usize,
    pub transactions: usize,
    pub addresses: usize,
    pub pre_arcs: usize,
    pub post_arcs: usize,
    pub rejected: usize,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("block heights must strictly increase: {found} follows {previous}")]
    Ordering { previous: u64, found: u64 },
    #[error("block {height}: {source}")]
    Net {
        height: u64,
        #[source]
        source: NetError,
    },
}

/// Incremental block-by-block ingestion into an unsealed net.
#[derive(Debug)]
pub struct Ingestor {
    mode: IngestMode,
    net: PlaceTransitionNet,
    report: IngestReport,
    last_height: Option<u64>,
}

impl Ingestor {
    pub fn new(mode: IngestMode) -> Self {
        Self {
            mode,
            net: PlaceTransitionNet::new(),
            report: IngestReport::default(),
            last_height: None,
        }
    }

    pub fn push_block(&mut self, block: &Block) -> Result<(), IngestError> {
        if let Some(previous) = self.last_height {
            if block.height <= previous {
                return Err(IngestError::Ordering {
                    previous,
                    found: block.height,
                });
            }
        }
        self.last_height = Some(block.height);
        self.report.blocks += 1;
        for tx in &block.transactions {
            self.push_transaction(block.height, tx)?;
        }
        Ok(())
    }

    fn reject(&mut self, height: u64, tx: &TransactionRecord, reason: RejectReason) {
        self.report.rejections.push(Rejection {
            tx_id: tx.tx_id.clone(),
            height,
            reason,
        });
    }

    fn push_transaction(&mut self, height: u64, tx: &TransactionRecord) -> Result<(), IngestError> {
        if self.net.lookup_transaction(&tx.tx_id).is_some() {
            self.reject(height, tx, RejectReason::DuplicateTransaction);
            return Ok(());
        }
        if self.mode == IngestMode::Strict {
            let unfunded = tx.inputs.iter().find(|addr| {
                self.net
                    .lookup_address(addr)
                    .is_none_or(|p| self.net.utxo_count(p).unwrap_or(0) <= 0)
            });
            if let Some(addr) = unfunded {
                let reason = RejectReason::UnfundedInput {
                    address: addr.clone(),
                };
                self.reject(height, tx, reason);
                return Ok(());
            }
        }
        self.net
            .record_transaction(&tx.tx_id, &tx.inputs, &tx.outputs)
            .map_err(|source| IngestError::Net { height, source })?;
        Ok(())
    }

    /// Seals the net and completes the report.
    pub fn finish(self) -> (PlaceTransitionNet, IngestReport) {
        let net = self.net.sealed();
        let mut report = self.report;
        report.transactions = net.num_transitions();
        report.addresses = net.num_places();
        report.pre_arcs = net.arc_count(Side::Pre);
        report.post_arcs = net.arc_count(Side::Post);
        report.rejected = report.rejections.len();
        (net, report)
    }
}

/// Folds an ordered block stream into a sealed net.
pub fn ingest<'a, I>(blocks: I, mode: IngestMode) -> Result<(PlaceTransitionNet, IngestReport), IngestError>
where
    I: IntoIterator<Item = &'a Block>,
{
    let mut ingestor = Ingestor::new(mode);
    for block in blocks {
        ingestor.push_block(block)?;
    }
    Ok(ingestor.finish())
}
