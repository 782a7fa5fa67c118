//! List the built-in irreducible polynomials with their reduction cost.

use gfre::specgen::{nist_polynomials, xor_cost};

pub fn run_example() -> Result<usize, Box<dyn std::error::Error>> {
    println!("{:>4}  {:<22} {:>8}  P(x)", "m", "name", "red.XOR");
    for e in nist_polynomials() {
        let p = e.poly();
        let mark = if e.default { "*" } else { " " };
        println!("{:>4}{mark} {:<22} {:>8}  {p}", e.degree(), e.name, xor_cost(&p));
    }
    Ok(nist_polynomials().len())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("catalog listing");
}
