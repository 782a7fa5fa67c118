//! Text and JSON renderings of extraction, verification and reverse
//! engineering results.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::extract::{ExtractionResult, Verdict};
use crate::netlist::Netlist;
use crate::reveng::RevengReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub name: String,
    pub polynomial: String,
    pub gate_count: usize,
    pub peak_terms: usize,
    pub substitutions: usize,
    pub time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub name: String,
    pub position: usize,
    pub residual: String,
}

/// `verdict` is `"equal"`, `"mismatch"`, or absent for a plain extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractReport {
    pub outputs: Vec<OutputRow>,
    pub verdict: Option<String>,
    pub residuals: Vec<ResidualRow>,
}

impl ExtractReport {
    pub fn new(n: &Netlist, r: &ExtractionResult, verdict: Option<&Verdict>) -> Self {
        let outputs = r
            .per_output
            .iter()
            .map(|o| OutputRow {
                name: o.name.clone(),
                polynomial: o.polynomial.to_text(n.vars()),
                gate_count: o.stats.gate_count,
                peak_terms: o.stats.peak_terms,
                substitutions: o.stats.substitutions,
                time_ms: o.stats.elapsed.as_secs_f64() * 1e3,
            })
            .collect();
        let residuals = verdict.map_or_else(Vec::new, |v| {
            v.residuals
                .iter()
                .map(|r| ResidualRow {
                    name: r.name.clone(),
                    position: r.position,
                    residual: r.text.clone(),
                })
                .collect()
        });
        Self {
            outputs,
            verdict: verdict.map(|v| if v.equal { "equal" } else { "mismatch" }.to_owned()),
            residuals,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for o in &self.outputs {
            let _ = writeln!(
                s,
                "{} = {}\n    gates {}, peak terms {}, substitutions {}, {:.3} ms",
                o.name, o.polynomial, o.gate_count, o.peak_terms, o.substitutions, o.time_ms
            );
        }
        if let Some(v) = &self.verdict {
            let _ = writeln!(s, "verdict: {v}");
            for r in self.residuals.iter().filter(|r| r.residual != "0") {
                let _ = writeln!(
                    s,
                    "residual at {} (position {}): {}",
                    r.name, r.position, r.residual
                );
            }
        }
        s
    }
}

pub fn reveng_text(n: &Netlist, rep: &RevengReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "m = {}", rep.m);
    let _ = writeln!(s, "P(x) = {}", rep.p());
    let _ = writeln!(s, "output order (LSB first):");
    for e in &rep.outputs.entries {
        let _ = writeln!(s, "  {:>4}  {}", e.position, n.name(e.output));
    }
    let _ = writeln!(s, "input positions (word A, word B):");
    for (i, &(u, v)) in rep.inputs.pairs.iter().enumerate() {
        let _ = writeln!(s, "  {:>4}  {}  {}", i, n.name(u), n.name(v));
    }
    let _ = writeln!(
        s,
        "verified against recovered spec: {}",
        if rep.spec_check.equal { "yes" } else { "no" }
    );
    let _ = writeln!(s, "word pairings consistent with positions: {}", rep.ambiguity);
    s
}
