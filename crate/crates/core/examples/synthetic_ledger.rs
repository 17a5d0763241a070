// Generates a seeded synthetic ledger and checks the analyses against the
// generator's ground truth.

use chainpetri::analytics::{repeated_groups, summary};
use chainpetri::entities::{compute_entities, entity_report};
use chainpetri::ingest::{generate_synthetic, ingest, GeneratorConfig, IngestMode};
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let config = GeneratorConfig {
        entities: vec![6, 3],
        chains: vec![4],
        repeats: vec![3],
        deposits: vec![5],
        fillers: 30,
        ..GeneratorConfig::default()
    };
    let (blocks, truth) = generate_synthetic(&config, 2024)?;
    let (net, report) = ingest(&blocks, IngestMode::Strict)?;
    let mut out = String::new();
    writeln!(out, "{} blocks, {} transactions, {} rejected", report.blocks, report.transactions, report.rejected)?;

    let s = summary(&net)?;
    let a = &truth.accounting;
    writeln!(
        out,
        "summary matches accounting: {}",
        (s.places, s.transitions, s.pre_arcs, s.post_arcs, s.accumulate_only, s.disposable)
            == (a.places, a.transitions, a.pre_arcs, a.post_arcs, a.accumulate_only, a.disposable)
    )?;

    let partition = compute_entities(&net)?;
    let largest = entity_report(&net, &partition).into_iter().next();
    writeln!(out, "{} entities, largest has {} addresses", partition.len(), largest.map_or(0, |r| r.size))?;
    writeln!(out, "{} entities planted", truth.entity_partition.len())?;
    writeln!(out, "repeat groups: {} found, {} planted", repeated_groups(&net)?.group_count(), truth.planted_repeat_groups.len())?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
