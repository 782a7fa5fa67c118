//! Read a hand-written structural Verilog multiplier and print it back.

use gfre::extract::{verify, ExtractOptions, IoMap};
use gfre::netlist::parse_structural_verilog;
use gfre::specgen::IrreduciblePoly;

const SOURCE: &str = "
// GF(2^2) multiplier, P(x) = x^2 + x + 1
module gf2 (input [1:0] a, input [1:0] b, output [1:0] z);
  wire p00, p11, p01, p10, t;
  and (p00, a[0], b[0]);
  and (p11, a[1], b[1]);
  and (p01, a[0], b[1]);
  and (p10, a[1], b[0]);
  xor (z[0], p00, p11);
  xor (t, p01, p10);
  xor (z[1], t, p11);
endmodule
";

pub fn run_example() -> Result<bool, Box<dyn std::error::Error>> {
    let n = parse_structural_verilog(SOURCE)?;
    let text = n.to_verilog("gf2");
    print!("{text}");
    let again = parse_structural_verilog(&text)?;
    assert_eq!(again.to_verilog("gf2"), text);
    let p: IrreduciblePoly = "2,1,0".parse()?;
    let io = IoMap::by_prefix(&n, "a", "b", "z")?;
    let v = verify(&n, &p, &io, &ExtractOptions::with_threads(1))?;
    println!("// verified: {}", v.verdict.equal);
    Ok(v.verdict.equal)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("verilog round trip");
}
