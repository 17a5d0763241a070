// Saves a sealed net as a JSON snapshot and loads it back.

use chainpetri::{fixtures, PlaceTransitionNet};
use std::error::Error;
use std::fmt::Write;

pub fn run() -> Result<String, Box<dyn Error>> {
    let net = fixtures::worked_example_net();
    let bytes = net.snapshot_bytes()?;
    let back = PlaceTransitionNet::load_snapshot(bytes.as_slice())?;
    let mut out = String::new();
    writeln!(out, "{}", String::from_utf8(bytes.clone())?)?;
    writeln!(out, "round trip equal: {}", back == net)?;
    writeln!(out, "bytes stable: {}", back.snapshot_bytes()? == bytes)?;

    let broken = String::from_utf8(bytes)?.replace("\"pre\":[[0,", "\"pre\":[[99,");
    let err = PlaceTransitionNet::load_snapshot_str(&broken).unwrap_err();
    writeln!(out, "corrupted snapshot rejected in section {:?}: {err}", err.section())?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run()?);
    Ok(())
}
