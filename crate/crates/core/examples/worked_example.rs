// Ingests the seven-transaction worked example and prints its incidence
// matrices.

use chainpetri::{fixtures, PlaceTransitionNet, Side};
use std::error::Error;
use std::fmt::Write;

fn render(net: &PlaceTransitionNet, side: Side) -> Result<String, Box<dyn Error>> {
    let mut out = String::new();
    let dense = net.incidence(side)?.to_dense();
    write!(out, "{:>8}", "")?;
    for t in net.transaction_ids() {
        write!(out, "{t:>8}")?;
    }
    writeln!(out)?;
    for (addr, row) in net.addresses().iter().zip(dense) {
        write!(out, "{addr:>8}")?;
        for v in row {
            write!(out, "{v:>8}")?;
        }
        writeln!(out)?;
    }
    Ok(out)
}

pub fn run() -> Result<String, Box<dyn Error>> {
    let net = fixtures::worked_example_net();
    let mut out = String::new();
    writeln!(out, "pre (spends)\n{}", render(&net, Side::Pre)?)?;
    writeln!(out, "post (receives)\n{}", render(&net, Side::Post)?)?;
    for p in net.places() {
        writeln!(out, "{} holds {} unspent receive(s)", net.address(p)?, net.utxo_count(p)?)?;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
