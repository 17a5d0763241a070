// The most active addresses and the addresses that only ever receive.

use chainpetri::analytics::{accumulate_only, summary, top_k_active};
use chainpetri::ingest::{generate_synthetic, ingest, GeneratorConfig, IngestMode};
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let config = GeneratorConfig {
        deposits: vec![40, 25],
        hubs: 3,
        fillers: 200,
        ..GeneratorConfig::default()
    };
    let (blocks, truth) = generate_synthetic(&config, 3)?;
    let (net, _) = ingest(&blocks, IngestMode::Strict)?;
    let mut out = String::new();
    writeln!(out, "{:?}", summary(&net)?)?;
    for row in top_k_active(&net, 5)? {
        writeln!(out, "{:<36} pre {:>4} post {:>4}", net.address(row.place)?, row.pre_nnz, row.post_nnz)?;
    }
    let receive_only = accumulate_only(&net)?;
    writeln!(
        out,
        "{} accumulate-only addresses; planted deposits: {:?}",
        receive_only.len(),
        truth.deposit_addresses
    )?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
