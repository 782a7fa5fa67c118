//! Verify a generated multiplier, then break one gate and show the residual.

use gfre::extract::{verify, ExtractOptions, IoMap};
use gfre::netlist::{Gate, GateType};
use gfre::specgen::{generate_mastrovito, lookup};

pub fn run_example() -> Result<(bool, bool), Box<dyn std::error::Error>> {
    let p = lookup(16, None).ok_or("no default for m = 16")?;
    let g = generate_mastrovito(&p);
    let io = IoMap::from_truth(&g.netlist, &g.truth)?;
    let opts = ExtractOptions::with_threads(4);
    let good = verify(&g.netlist, &p, &io, &opts)?;
    println!("original: equal = {}", good.verdict.equal);

    let victim = g.reduction_gates[0];
    let gate = g.netlist.gate(victim).clone();
    let broken = g.netlist.with_gate(
        victim,
        Gate {
            kind: GateType::Or,
            ..gate
        },
    )?;
    let io = IoMap::from_truth(&broken, &g.truth)?;
    let bad = verify(&broken, &p, &io, &opts)?;
    println!(
        "XOR -> OR at {}: equal = {}",
        g.netlist.name(gate.output),
        bad.verdict.equal
    );
    for r in bad.verdict.mismatches() {
        println!("  residual at {}: {}", r.name, r.text);
    }
    Ok((good.verdict.equal, bad.verdict.equal))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("verification");
}
