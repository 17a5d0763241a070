//! Canonical block schema.
//!
//! ```json
//! {"height": 0, "transactions": [{"tx_id": "...", "inputs": ["..."], "outputs": ["..."]}]}
//! ```
//!
//! Field order is irrelevant and unknown fields are ignored. A file may hold
//! one block or several whitespace/newline-separated blocks.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransactionRecord {
    pub tx_id: String,
    /// Input addresses; empty for a coinbase.
    pub inputs: Vec<String>,
    /// Output addresses; never empty.
    pub outputs: Vec<String>,
}

impl TransactionRecord {
    pub fn new<I, O>(tx_id: impl Into<String>, inputs: I, outputs: O) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
        O: IntoIterator,
        O::Item: Into<String>,
    {
        Self {
            tx_id: tx_id.into(),
            inputs: inputs.into_iter().map(Into::into).collect(),
            outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_coinbase(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    /// Transactions in validation order.
    pub transactions: Vec<TransactionRecord>,
}

impl Block {
    pub fn new(height: u64, transactions: Vec<TransactionRecord>) -> Self {
        Self { height, transactions }
    }

    /// Canonical JSON encoding (single line).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("block serialization cannot fail")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed JSON at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid block{}: {message}", tx_id.as_ref().map(|t| format!(" (transaction {t:?})")).unwrap_or_default())]
    Validation { tx_id: Option<String>, message: String },
}

fn validation(tx_id: Option<&str>, message: impl Into<String>) -> ParseError {
    ParseError::Validation {
        tx_id: tx_id.map(str::to_owned),
        message: message.into(),
    }
}

/// Translates serde_json's 1-based line/column into a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len();
    }
    text.len()
}

pub(crate) fn syntax(text: &str, e: &serde_json::Error) -> ParseError {
    ParseError::Syntax {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    }
}

/// Parses exactly one canonical block.
pub fn parse_block(text: &str) -> Result<Block, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| syntax(text, &e))?;
    block_from_value(value)
}

/// Parses a stream of concatenated or newline-delimited blocks.
pub fn parse_block_stream(text: &str) -> Result<Vec<Block>, ParseError> {
    let mut blocks = Vec::new();
    for value in serde_json::Deserializer::from_str(text).into_iter::<Value>() {
        let value = value.map_err(|e| syntax(text, &e))?;
        blocks.push(block_from_value(value)?);
    }
    Ok(blocks)
}

fn address_list(
    tx: &Map<String, Value>,
    field: &str,
    tx_id: &str,
) -> Result<Vec<String>, ParseError> {
    let items = tx
        .get(field)
        .ok_or_else(|| validation(Some(tx_id), format!("missing field `{field}`")))?
        .as_array()
        .ok_or_else(|| validation(Some(tx_id), format!("`{field}` must be an array")))?;
    items
        .iter()
        .map(|item| match item.as_str() {
            Some(s) if !s.is_empty() => Ok(s.to_owned()),
            _ => Err(validation(
                Some(tx_id),
                format!("`{field}` entries must be non-empty strings"),
            )),
        })
        .collect()
}

pub(crate) fn block_from_value(value: Value) -> Result<Block, ParseError> {
    let obj = value
        .as_object()
        .ok_or_else(|| validation(None, "block must be a JSON object"))?;
    let height = obj
        .get("height")
        .ok_or_else(|| validation(None, "missing field `height`"))?
        .as_u64()
        .ok_or_else(|| validation(None, "`height` must be a nonnegative integer"))?;
    let txs = obj
        .get("transactions")
        .ok_or_else(|| validation(None, "missing field `transactions`"))?
        .as_array()
        .ok_or_else(|| validation(None, "`transactions` must be an array"))?;

    let mut transactions = Vec::with_capacity(txs.len());
    for (i, tx) in txs.iter().enumerate() {
        let tx = tx
            .as_object()
            .ok_or_else(|| validation(None, format!("transaction #{i} must be an object")))?;
        let tx_id = match tx.get("tx_id") {
            Some(Value::String(s)) if !s.is_empty() => s.as_str(),
            Some(_) => {
                return Err(validation(
                    None,
                    format!("transaction #{i}: `tx_id` must be a non-empty string"),
                ))
            }
            None => return Err(validation(None, format!("transaction #{i}: missing field `tx_id`"))),
        };
        let inputs = address_list(tx, "inputs", tx_id)?;
        let outputs = address_list(tx, "outputs", tx_id)?;
        if outputs.is_empty() {
            return Err(validation(Some(tx_id), "output list is empty"));
        }
        transactions.push(TransactionRecord {
            tx_id: tx_id.to_owned(),
            inputs,
            outputs,
        });
    }
    Ok(Block { height, transactions })
}
