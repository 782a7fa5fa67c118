use std::collections::BTreeSet;

use thiserror::Error;

use crate::netlist::Netlist;
use crate::poly::VarId;
use crate::specgen::GroundTruth;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("wire `{0}` does not exist in the netlist")]
    UnknownWire(String),
    #[error("`{0}` is mapped to an operand bit but is not a primary input")]
    NotAPrimaryInput(String),
    #[error("`{0}` is mapped to an output bit but is not a primary output")]
    NotAPrimaryOutput(String),
    #[error("wire `{0}` is mapped more than once")]
    Duplicate(String),
    #[error("width mismatch: |A| = {a}, |B| = {b}, |Z| = {z}")]
    WidthMismatch { a: usize, b: usize, z: usize },
    #[error("operand width {got} does not match the degree {expected} of P(x)")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("primary {kind} `{name}` is not covered by the mapping")]
    Incomplete { kind: &'static str, name: String },
    #[error("no primary output matches prefix `{0}` followed by a bit index")]
    NoMatchingOutputs(String),
    #[error("no bit-order mapping given; pass --map or --io-prefixes")]
    Missing,
}

/// Declared bit order of a multiplier: `a[i]`, `b[i]` and `z[i]` are the
/// wires at position `i` (LSB first). Covers every primary input and
/// output exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoMap {
    a: Vec<VarId>,
    b: Vec<VarId>,
    z: Vec<VarId>,
}

impl IoMap {
    pub fn new(n: &Netlist, a: Vec<VarId>, b: Vec<VarId>, z: Vec<VarId>) -> Result<Self, MappingError> {
        if a.len() != b.len() || a.len() != z.len() {
            return Err(MappingError::WidthMismatch {
                a: a.len(),
                b: b.len(),
                z: z.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for &v in a.iter().chain(&b).chain(&z) {
            if !seen.insert(v) {
                return Err(MappingError::Duplicate(n.name(v).to_owned()));
            }
        }
        for &v in a.iter().chain(&b) {
            if !n.is_primary_input(v) {
                return Err(MappingError::NotAPrimaryInput(n.name(v).to_owned()));
            }
        }
        for &v in &z {
            if !n.is_primary_output(v) {
                return Err(MappingError::NotAPrimaryOutput(n.name(v).to_owned()));
            }
        }
        if let Some(&v) = n.primary_inputs().iter().find(|v| !seen.contains(v)) {
            return Err(MappingError::Incomplete {
                kind: "input",
                name: n.name(v).to_owned(),
            });
        }
        if let Some(&v) = n.primary_outputs().iter().find(|v| !seen.contains(v)) {
            return Err(MappingError::Incomplete {
                kind: "output",
                name: n.name(v).to_owned(),
            });
        }
        Ok(Self { a, b, z })
    }

    pub fn from_names<S: AsRef<str>>(n: &Netlist, a: &[S], b: &[S], z: &[S]) -> Result<Self, MappingError> {
        let look = |names: &[S]| -> Result<Vec<VarId>, MappingError> {
            names
                .iter()
                .map(|s| {
                    n.var(s.as_ref())
                        .ok_or_else(|| MappingError::UnknownWire(s.as_ref().to_owned()))
                })
                .collect()
        };
        Self::new(n, look(a)?, look(b)?, look(z)?)
    }

    /// Wires named `{pa}{i}`, `{pb}{i}`, `{pz}{i}`; the width is the number
    /// of primary outputs matching `{pz}<digits>`. Bus-style `{p}[{i}]`
    /// names are accepted as well.
    pub fn by_prefix(n: &Netlist, pa: &str, pb: &str, pz: &str) -> Result<Self, MappingError> {
        let index_of = |name: &str, prefix: &str| -> Option<usize> {
            let rest = name.strip_prefix(prefix)?;
            let rest = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .unwrap_or(rest);
            if rest.is_empty() || !rest.bytes().all(|c| c.is_ascii_digit()) {
                return None;
            }
            rest.parse().ok()
        };
        let m = n
            .primary_outputs()
            .iter()
            .filter(|&&v| index_of(n.name(v), pz).is_some())
            .count();
        if m == 0 {
            return Err(MappingError::NoMatchingOutputs(pz.to_owned()));
        }
        let word = |prefix: &str, pool: &[VarId]| -> Result<Vec<VarId>, MappingError> {
            (0..m)
                .map(|i| {
                    pool.iter()
                        .copied()
                        .find(|&v| index_of(n.name(v), prefix) == Some(i))
                        .ok_or_else(|| MappingError::UnknownWire(format!("{prefix}{i}")))
                })
                .collect()
        };
        let a = word(pa, n.primary_inputs())?;
        let b = word(pb, n.primary_inputs())?;
        let z = word(pz, n.primary_outputs())?;
        Self::new(n, a, b, z)
    }

    pub fn from_truth(n: &Netlist, t: &GroundTruth) -> Result<Self, MappingError> {
        Self::from_names(n, &t.input_word("A"), &t.input_word("B"), &t.output_word())
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn a(&self) -> &[VarId] {
        &self.a
    }

    pub fn b(&self) -> &[VarId] {
        &self.b
    }

    pub fn z(&self) -> &[VarId] {
        &self.z
    }

    /// The same map with the two operand words exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            z: self.z.clone(),
        }
    }
}
