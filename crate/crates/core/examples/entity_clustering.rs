// Groups addresses that were spent together into entities and builds the
// entity-level net.

use chainpetri::entities::{build_entity_net, compute_entities, compute_entities_closure, entity_report};
use chainpetri::{fixtures, Side};
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let net = fixtures::worked_example_net();
    let partition = compute_entities(&net)?;
    assert_eq!(partition, compute_entities_closure(&net)?);

    let mut out = String::new();
    for row in entity_report(&net, &partition) {
        writeln!(out, "entity {} ({} addresses): {}", row.entity, row.size, row.addresses.join(", "))?;
    }

    let entity_net = build_entity_net(&net, &partition)?;
    for side in [Side::Pre, Side::Post] {
        writeln!(out, "{side:?}E")?;
        for row in entity_net.net.incidence(side)?.to_dense() {
            writeln!(out, "  {row:?}")?;
        }
    }
    let cyclic: Vec<&str> = entity_net
        .cyclic_transitions()
        .iter()
        .map(|t| entity_net.net.transaction_ids()[t.index()].as_str())
        .collect();
    writeln!(out, "transactions paying back into a spending entity: {cyclic:?}")?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
