// Converts blockchain.info-style rawblocks and ingests them.

use chainpetri::analytics::summary;
use chainpetri::ingest::{convert_rawblock, ingest, IngestMode};
use std::error::Error;
use std::fmt::Write;
use std::path::Path;

pub fn run() -> Result<String, Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/worked_example/rawblock");
    let mut blocks = Vec::new();
    let mut out = String::new();
    for h in 0..2 {
        let text = std::fs::read_to_string(dir.join(format!("block_{h}.json")))?;
        let (block, report) = convert_rawblock(&text)?;
        writeln!(
            out,
            "block {}: {} transactions, {} coinbase inputs, {} script-only outputs skipped",
            block.height,
            block.transactions.len(),
            report.coinbase_inputs,
            report.skipped_outputs
        )?;
        blocks.push(block);
    }
    let (net, _) = ingest(&blocks, IngestMode::Strict)?;
    writeln!(out, "{:?}", summary(&net)?)?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
