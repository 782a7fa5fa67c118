//! Extraction, verification and reverse engineering of gate-level GF(2^m)
//! multipliers by backward rewriting of GF(2) polynomials, plus a reference
//! Mastrovito multiplier generator.
//!
//! The typical flow:
//!
//! 1. parse a netlist ([`netlist::parse_equations`] or
//!    [`netlist::parse_structural_verilog`]),
//! 2. rewrite every output cone in parallel ([`extract::extract_all`]),
//! 3. either compare against a golden specification ([`extract::verify`])
//!    or recover bit positions and `P(x)` from the extracted expressions
//!    ([`reveng::reverse_engineer`]).

pub mod cli;
pub mod extract;
pub mod netlist;
pub mod poly;
pub mod report;
pub mod reveng;
pub mod scramble;
pub mod specgen;
