// Degree multisets of a synthetic ledger and their CCDFs as CSV.

use chainpetri::analytics::{ccdf, degree_multiset, DegreeSide};
use chainpetri::ingest::{generate_synthetic, ingest, GeneratorConfig, IngestMode};
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let (blocks, _) = generate_synthetic(&GeneratorConfig::scaled(2_000, 7), 7)?;
    let (net, _) = ingest(&blocks, IngestMode::Lax)?;
    let mut out = String::new();
    for side in [DegreeSide::Pre, DegreeSide::Post, DegreeSide::Both] {
        let degrees = degree_multiset(&net, side)?;
        let series = ccdf(&degrees.counts)?;
        let max = series.points.last().map_or(0, |p| p.0);
        writeln!(out, "{side:?}: {} places, max degree {max}", degrees.counts.len())?;
        for line in series.to_csv().lines().take(4) {
            writeln!(out, "  {line}")?;
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
