//! Adapter for blockchain.info-style `rawblock` JSON.
//!
//! Only a small subset is read: top-level `height` and `tx`; per transaction
//! `hash`, `inputs[].prev_out.addr` and `out[].addr`. An input without
//! `prev_out` is the coinbase input and contributes no address.

use super::block::{syntax, Block, ParseError, TransactionRecord};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Accounting for entries the converter could not map to an address.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversionReport {
    /// Outputs without an `addr` (script-only outputs).
    pub skipped_outputs: usize,
    /// Inputs whose `prev_out` has no `addr`.
    pub skipped_inputs: usize,
    /// Inputs without `prev_out` (coinbase inputs).
    pub coinbase_inputs: usize,
    /// Transactions left with no addressable output, dropped from the block.
    pub dropped_transactions: Vec<String>,
}

impl ConversionReport {
    pub fn merge(&mut self, other: &ConversionReport) {
        self.skipped_outputs += other.skipped_outputs;
        self.skipped_inputs += other.skipped_inputs;
        self.coinbase_inputs += other.coinbase_inputs;
        self.dropped_transactions
            .extend(other.dropped_transactions.iter().cloned());
    }
}

fn invalid(tx_id: Option<&str>, message: impl Into<String>) -> ParseError {
    ParseError::Validation {
        tx_id: tx_id.map(str::to_owned),
        message: message.into(),
    }
}

fn addr_of(v: &Value) -> Option<&str> {
    v.get("addr").and_then(Value::as_str).filter(|s| !s.is_empty())
}

/// Converts one rawblock document into a canonical [`Block`].
pub fn convert_rawblock(text: &str) -> Result<(Block, ConversionReport), ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| syntax(text, &e))?;
    convert_rawblock_value(&value)
}

/// Converts a whitespace-separated sequence of rawblock documents.
pub fn convert_rawblock_stream(text: &str) -> Result<(Vec<Block>, ConversionReport), ParseError> {
    let mut blocks = Vec::new();
    let mut report = ConversionReport::default();
    for value in serde_json::Deserializer::from_str(text).into_iter::<Value>() {
        let value = value.map_err(|e| syntax(text, &e))?;
        let (block, part) = convert_rawblock_value(&value)?;
        report.merge(&part);
        blocks.push(block);
    }
    Ok((blocks, report))
}

pub(crate) fn convert_rawblock_value(value: &Value) -> Result<(Block, ConversionReport), ParseError> {
    let height = value
        .get("height")
        .ok_or_else(|| invalid(None, "missing field `height`"))?
        .as_u64()
        .ok_or_else(|| invalid(None, "`height` must be a nonnegative integer"))?;
    let txs = value
        .get("tx")
        .ok_or_else(|| invalid(None, "missing field `tx`"))?
        .as_array()
        .ok_or_else(|| invalid(None, "`tx` must be an array"))?;

    let mut report = ConversionReport::default();
    let mut transactions = Vec::with_capacity(txs.len());
    for (i, tx) in txs.iter().enumerate() {
        let hash = tx
            .get("hash")
            .and_then(Value::as_str)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| invalid(None, format!("tx #{i}: missing `hash`")))?;

        let mut inputs = Vec::new();
        if let Some(list) = tx.get("inputs") {
            let list = list
                .as_array()
                .ok_or_else(|| invalid(Some(hash), "`inputs` must be an array"))?;
            for input in list {
                match input.get("prev_out") {
                    None | Some(Value::Null) => report.coinbase_inputs += 1,
                    Some(prev) => match addr_of(prev) {
                        Some(a) => inputs.push(a.to_owned()),
                        None => report.skipped_inputs += 1,
                    },
                }
            }
        }

        let mut outputs = Vec::new();
        let outs = tx
            .get("out")
            .ok_or_else(|| invalid(Some(hash), "missing field `out`"))?
            .as_array()
            .ok_or_else(|| invalid(Some(hash), "`out` must be an array"))?;
        for out in outs {
            match addr_of(out) {
                Some(a) => outputs.push(a.to_owned()),
                None => report.skipped_outputs += 1,
            }
        }

        if outputs.is_empty() {
            report.dropped_transactions.push(hash.to_owned());
            continue;
        }
        transactions.push(TransactionRecord {
            tx_id: hash.to_owned(),
            inputs,
            outputs,
        });
    }
    Ok((Block { height, transactions }, report))
}

/// Renders a canonical block in rawblock shape. Used to build converter
/// fixtures; the inverse of [`convert_rawblock`] on addressable data.
pub fn to_rawblock_json(block: &Block) -> String {
    let tx: Vec<Value> = block
        .transactions
        .iter()
        .map(|t| {
            let inputs: Vec<Value> = if t.inputs.is_empty() {
                vec![serde_json::json!({"sequence": 4294967295u64, "script": "04ffff001d0104"})]
            } else {
                t.inputs
                    .iter()
                    .map(|a| serde_json::json!({"prev_out": {"addr": a, "value": 0}}))
                    .collect()
            };
            let out: Vec<Value> = t
                .outputs
                .iter()
                .map(|a| serde_json::json!({"addr": a, "value": 0}))
                .collect();
            serde_json::json!({"hash": t.tx_id, "inputs": inputs, "out": out})
        })
        .collect();
    serde_json::json!({"height": block.height, "tx": tx}).to_string()
}
