//! Scramble a multiplier beyond recognition and recover its encoding and P(x).

use gfre::extract::ExtractOptions;
use gfre::reveng::reverse_engineer;
use gfre::scramble::scramble;
use gfre::specgen::{generate_mastrovito, lookup};

pub fn run_example() -> Result<Vec<usize>, Box<dyn std::error::Error>> {
    let p = lookup(32, None).ok_or("no default for m = 32")?;
    let g = generate_mastrovito(&p);
    let s = scramble(&g.netlist, &g.truth, 2024)?;
    let rep = reverse_engineer(&s.netlist, &ExtractOptions::with_threads(4))?;
    let json = rep.to_json(&s.netlist);
    println!("recovered P(x) = {}", rep.p());
    println!(
        "LSB output wire: {}, MSB output wire: {}",
        json.outputs[0].wire, json.outputs[31].wire
    );
    println!("spec check: {}, word pairings: {}", json.verified, json.ambiguity);
    println!("matches ground truth: {:?}", json.compare(&s.truth));
    Ok(json.irreducible)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("reverse engineering");
}
