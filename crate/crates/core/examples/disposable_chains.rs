// Plants disposable-address chains in a synthetic ledger and recovers them.

use chainpetri::chains::{chain_report, find_chains};
use chainpetri::ingest::{generate_synthetic, ingest, GeneratorConfig, IngestMode};
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let config = GeneratorConfig {
        chains: vec![3, 5, 2],
        entities: vec![4],
        fillers: 10,
        ..GeneratorConfig::default()
    };
    let (blocks, truth) = generate_synthetic(&config, 11)?;
    let (net, _) = ingest(&blocks, IngestMode::Strict)?;
    let (sets, chains) = find_chains(&net)?;

    let mut out = String::new();
    writeln!(
        out,
        "{} disposable addresses, {} candidate transactions, {} chain starts",
        sets.addresses.len(),
        sets.transactions.len(),
        sets.starts.len()
    )?;
    let report = chain_report(&net, &chains);
    for row in &report {
        writeln!(out, "chain of {}: {}", row.length, row.transactions.join(" -> "))?;
    }
    let mut planted = truth.planted_chains.clone();
    planted.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let recovered: Vec<Vec<String>> = report.into_iter().map(|r| r.transactions).collect();
    writeln!(out, "matches planted chains: {}", recovered == planted)?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
