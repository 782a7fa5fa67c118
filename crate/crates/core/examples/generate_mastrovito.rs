//! Generate a Mastrovito multiplier and write it in both netlist formats.

use gfre::netlist::GateType;
use gfre::specgen::{generate_mastrovito, lookup};

pub fn run_example() -> Result<(usize, usize), Box<dyn std::error::Error>> {
    let p = lookup(8, None).ok_or("no default for m = 8")?;
    let g = generate_mastrovito(&p);
    let n = &g.netlist;
    let ands = n.count_gates(GateType::And);
    let xors = n.count_gates(GateType::Xor);
    println!(
        "P(x) = {p}: {ands} AND, {xors} XOR, {} in the reduction stage",
        g.reduction_gates.len()
    );

    let dir = std::env::temp_dir().join("gfre-generate-example");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("gf8.eqn"), n.to_equations())?;
    std::fs::write(dir.join("gf8.v"), n.to_verilog("gf8"))?;
    std::fs::write(
        dir.join("gf8.truth.json"),
        serde_json::to_string_pretty(&g.truth)?,
    )?;
    println!("wrote {}", dir.display());
    Ok((ands, xors))
}

#[allow(dead_code)]
fn main() {
    run_example().expect("generation");
}
