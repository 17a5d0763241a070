// Transactions with identical inputs and outputs, at address and entity
// level.

use chainpetri::analytics::repeated_groups;
use chainpetri::entities::{build_entity_net, compute_entities};
use chainpetri::fixtures;
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let net = fixtures::worked_example_net();
    let entity_net = build_entity_net(&net, &compute_entities(&net)?)?.net;
    let mut out = String::new();
    for (level, n) in [("address", &net), ("entity", &entity_net)] {
        let r = repeated_groups(n)?;
        let groups: Vec<Vec<&str>> = r
            .groups
            .iter()
            .map(|g| g.iter().map(|t| n.transaction_ids()[t.index()].as_str()).collect())
            .collect();
        writeln!(
            out,
            "{level}: {} groups, {} repeats, fraction {:.4}, {groups:?}",
            r.group_count(),
            r.repetition_count,
            r.fraction
        )?;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
