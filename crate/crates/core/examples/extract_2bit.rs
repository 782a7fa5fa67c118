//! Parse the 2-bit GF(2^2) multiplier netlist and extract both outputs.

use gfre::extract::{assemble_signature, extract_all, ExtractOptions};
use gfre::netlist::parse_equations;

const NETLIST: &str = "\
inputs a0 a1 b0 b1
outputs z0 z1
i1 = NAND(a0, b0)
i2 = NAND(a1, b1)
i3 = NAND(a1, b0)
i4 = NAND(a0, b1)
i5 = NOT(i2)
i6 = XOR(i3, i4)
z0 = XOR(i1, i2)
z1 = XOR(i5, i6)
";

pub fn run_example() -> Result<Vec<String>, Box<dyn std::error::Error>> {
    let n = parse_equations(NETLIST)?;
    let r = extract_all(&n, &ExtractOptions::with_threads(2))?;
    let order = [n.var("z0").expect("z0"), n.var("z1").expect("z1")];
    let sig = assemble_signature(&r, &order)?;
    let rows: Vec<String> = sig.iter().map(|f| f.to_text(n.vars())).collect();
    for (i, row) in rows.iter().enumerate() {
        println!("x^{i}: {row}");
    }
    for o in &r.per_output {
        println!(
            "{}: {} gates, peak {} terms",
            o.name, o.stats.gate_count, o.stats.peak_terms
        );
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("2-bit extraction");
}
