//! Golden specification and reduction cost for the two GF(2^4) polynomials.

use gfre::specgen::{build_spec, lookup, xor_cost};

pub fn run_example() -> Result<Vec<usize>, Box<dyn std::error::Error>> {
    let mut costs = Vec::new();
    for name in ["p1", "p2"] {
        let p = lookup(4, Some(name)).ok_or("catalog entry missing")?;
        let (spec, names) = build_spec(&p);
        println!("P(x) = {p}");
        for (k, outs) in spec.assignment_table() {
            let outs: Vec<String> = outs.iter().map(|i| format!("z{i}")).collect();
            println!("  s{k} -> {}", outs.join(", "));
        }
        for (i, z) in spec.outputs.iter().enumerate() {
            println!("  z{i} = {}", z.to_text(&names));
        }
        let c = xor_cost(&p);
        println!("  reduction XORs: {c}");
        costs.push(c);
    }
    Ok(costs)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spec construction");
}
