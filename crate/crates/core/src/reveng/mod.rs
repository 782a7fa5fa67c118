//! Recovery of the bit order and the irreducible polynomial of a
//! multiplier whose wire names carry no information.
//!
//! The input is the set of extracted output polynomials. In-field product
//! sets `s_i` occur in exactly one output each and have `i + 1` products,
//! which fixes the output order. Walking `s_0, s_1, ..` fixes the input bit
//! positions. The products of `s_m` then reveal `P(x)`: output `i` holds all
//! of them exactly when `x^i` is a term of `P(x)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{
    extract_all, verify_extracted, ExtractError, ExtractOptions, ExtractionResult, IoMap, Verdict,
};
use crate::netlist::Netlist;
use crate::poly::{Monomial, Polynomial, VarId, VarTable};
use crate::specgen::{GroundTruth, IrreduciblePoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RevengError {
    #[error("no valid encoding: {0}")]
    NoValidEncoding(String),
    #[error("inconsistent input encoding: {0}")]
    InconsistentEncoding(String),
    #[error("every candidate product of s_m is a dummy")]
    EmptySm,
    #[error("cannot read P(x) from s_m: {0}")]
    NotReducible(String),
    #[error("extraction stage: {0}")]
    Extract(#[from] ExtractError),
}

impl RevengError {
    /// True for failures caused by the circuit not looking like a
    /// multiplier, as opposed to tool or input errors.
    pub fn is_structural(&self) -> bool {
        !matches!(self, RevengError::Extract(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InFieldEntry {
    pub position: usize,
    pub output: VarId,
    /// `s_position`: the products found only in this output.
    pub product_set: Polynomial,
}

/// Outputs ordered by recovered bit position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InFieldAssignment {
    pub entries: Vec<InFieldEntry>,
}

impl InFieldAssignment {
    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn output_order(&self) -> Vec<VarId> {
        self.entries.iter().map(|e| e.output).collect()
    }
}

/// Input bit positions. `pairs[i] = (u, v)` holds the two wires at position
/// `i`; every `u` forms one operand word and every `v` the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputPositionMap {
    pub position: BTreeMap<VarId, usize>,
    pub pairs: Vec<(VarId, VarId)>,
}

impl InputPositionMap {
    pub fn word_a(&self) -> Vec<VarId> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn word_b(&self) -> Vec<VarId> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Recovered `P(x)` together with the evidence used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredPoly {
    pub p: IrreduciblePoly,
    /// Candidates of `s'_m` found in some output.
    pub s_m: Vec<Monomial>,
    /// Candidates of `s'_m` found in no output.
    pub dummies: Vec<Monomial>,
}

/// Assigns output positions from the sizes of their unique-product cores.
pub fn find_output_encoding(r: &ExtractionResult) -> Result<InFieldAssignment, RevengError> {
    let m = r.per_output.len();
    if m == 0 {
        return Err(RevengError::NoValidEncoding("the netlist has no outputs".into()));
    }
    let mut seen: FxHashMap<&Monomial, usize> = FxHashMap::default();
    for o in &r.per_output {
        for t in o.polynomial.terms() {
            if t.degree() != 2 {
                return Err(RevengError::NoValidEncoding(format!(
                    "output `{}` has a term of degree {}",
                    o.name,
                    t.degree()
                )));
            }
            *seen.entry(t).or_default() += 1;
        }
    }
    let mut slots: Vec<Option<InFieldEntry>> = vec![None; m];
    for o in &r.per_output {
        let unique = Polynomial::from_monomials(o.polynomial.terms().filter(|t| seen[t] == 1).cloned());
        let size = unique.len();
        if size == 0 || size > m {
            return Err(RevengError::NoValidEncoding(format!(
                "output `{}` has {size} unique products, expected 1..={m}",
                o.name
            )));
        }
        let slot = &mut slots[size - 1];
        if let Some(prev) = slot {
            let prev = r
                .per_output
                .iter()
                .find(|p| p.output == prev.output)
                .expect("known");
            return Err(RevengError::NoValidEncoding(format!(
                "outputs `{}` and `{}` both have {size} unique products",
                prev.name, o.name
            )));
        }
        *slot = Some(InFieldEntry {
            position: size - 1,
            output: o.output,
            product_set: unique,
        });
    }
    Ok(InFieldAssignment {
        entries: slots
            .into_iter()
            .map(|s| s.expect("m outputs fill m slots"))
            .collect(),
    })
}

/// Assigns input positions by walking `s_0 .. s_{m-1}` and splits each
/// position pair into the two operand words.
///
/// At position 0 the wire with the smaller name goes first. At position
/// `i >= 1` the new wire multiplied with the second wire of position 0
/// goes first, since `s_i` holds `a_i b_0` and `a_0 b_i`.
pub fn find_input_encoding(
    assign: &InFieldAssignment,
    names: &VarTable,
) -> Result<InputPositionMap, RevengError> {
    let mut position: BTreeMap<VarId, usize> = BTreeMap::new();
    let mut pairs: Vec<(VarId, VarId)> = Vec::with_capacity(assign.m());
    for e in &assign.entries {
        let i = e.position;
        let fresh: Vec<VarId> = e
            .product_set
            .vars()
            .into_iter()
            .filter(|v| !position.contains_key(v))
            .collect();
        let [u, v] = fresh[..] else {
            return Err(RevengError::InconsistentEncoding(format!(
                "s_{i} introduces {} new inputs, expected 2",
                fresh.len()
            )));
        };
        position.insert(u, i);
        position.insert(v, i);
        for t in e.product_set.terms() {
            let sum: usize = t.vars().iter().map(|w| position[w]).sum();
            if sum != i {
                return Err(RevengError::InconsistentEncoding(format!(
                    "a product in s_{i} has inputs at positions summing to {sum}"
                )));
            }
        }
        let pair = if i == 0 {
            if names.name(u) <= names.name(v) {
                (u, v)
            } else {
                (v, u)
            }
        } else {
            let (a0, b0) = pairs[0];
            let has = |x: VarId, y: VarId| e.product_set.contains(&Monomial::new([x, y]));
            if has(u, b0) && has(v, a0) {
                (u, v)
            } else if has(v, b0) && has(u, a0) {
                (v, u)
            } else {
                return Err(RevengError::InconsistentEncoding(format!(
                    "s_{i} does not pair its new inputs with position 0"
                )));
            }
        };
        pairs.push(pair);
    }
    Ok(InputPositionMap { position, pairs })
}

/// Reads `P(x)` off the outputs that contain every product of `s_m`.
pub fn recover_irreducible(
    r: &ExtractionResult,
    assign: &InFieldAssignment,
    inputs: &InputPositionMap,
) -> Result<RecoveredPoly, RevengError> {
    let m = assign.m();
    if m == 1 {
        // GF(2) has no reduction; x + 1 is the only degree-1 candidate.
        return Ok(RecoveredPoly {
            p: IrreduciblePoly::new(1, [0]).expect("x+1"),
            s_m: Vec::new(),
            dummies: Vec::new(),
        });
    }
    let by_output: FxHashMap<VarId, &Polynomial> =
        r.per_output.iter().map(|o| (o.output, &o.polynomial)).collect();
    let outputs: Vec<&Polynomial> = assign.entries.iter().map(|e| by_output[&e.output]).collect();

    let mut candidates = Vec::new();
    for i in 1..=m / 2 {
        let j = m - i;
        let (x0, x1) = inputs.pairs[i];
        let (y0, y1) = inputs.pairs[j];
        if i == j {
            candidates.push(Monomial::new([x0, x1]));
        } else {
            for x in [x0, x1] {
                for y in [y0, y1] {
                    candidates.push(Monomial::new([x, y]));
                }
            }
        }
    }
    let (s_m, dummies): (Vec<Monomial>, Vec<Monomial>) = candidates
        .into_iter()
        .partition(|c| outputs.iter().any(|z| z.contains(c)));
    if s_m.is_empty() {
        return Err(RevengError::EmptySm);
    }
    let tail: BTreeSet<usize> = (0..m)
        .filter(|&i| s_m.iter().all(|t| outputs[i].contains(t)))
        .collect();
    if tail.is_empty() {
        return Err(RevengError::NotReducible("no output contains all of s_m".into()));
    }
    let p = IrreduciblePoly::new(m, tail).map_err(|e| RevengError::NotReducible(e.to_string()))?;
    Ok(RecoveredPoly { p, s_m, dummies })
}

#[derive(Clone, Debug)]
pub struct RevengReport {
    pub m: usize,
    pub outputs: InFieldAssignment,
    pub inputs: InputPositionMap,
    pub recovered: RecoveredPoly,
    /// Verification of the netlist against the recovered specification.
    pub spec_check: Verdict,
    /// `2^(m-1)`, the number of word pairings consistent with the positions.
    pub ambiguity: BigUint,
    pub extraction: ExtractionResult,
}

impl RevengReport {
    pub fn p(&self) -> &IrreduciblePoly {
        &self.recovered.p
    }

    pub fn to_json(&self, n: &Netlist) -> RevengJson {
        let name = |v: VarId| n.name(v).to_owned();
        let outputs = self
            .outputs
            .entries
            .iter()
            .map(|e| WirePosition {
                wire: name(e.output),
                position: e.position,
            })
            .collect();
        let inputs = self
            .inputs
            .pairs
            .iter()
            .enumerate()
            .flat_map(|(i, &(u, v))| {
                [(u, "A"), (v, "B")].map(|(w, word)| InputWire {
                    wire: name(w),
                    position: i,
                    word: word.to_owned(),
                })
            })
            .collect();
        RevengJson {
            m: self.m,
            irreducible: self.p().exponents(),
            outputs,
            inputs,
            verified: self.spec_check.equal,
            ambiguity: self.ambiguity.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WirePosition {
    pub wire: String,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputWire {
    pub wire: String,
    pub position: usize,
    pub word: String,
}

/// Serialized form of a [`RevengReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevengJson {
    pub m: usize,
    pub irreducible: Vec<usize>,
    pub outputs: Vec<WirePosition>,
    pub inputs: Vec<InputWire>,
    pub verified: bool,
    pub ambiguity: String,
}

/// How a recovered report lines up with a generator's ground truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruthComparison {
    pub irreducible: bool,
    pub output_positions: bool,
    /// The unordered pair of wires at each input position.
    pub input_pairs: bool,
    /// Word membership, allowing the two words to be exchanged globally.
    pub words_up_to_swap: bool,
}

impl TruthComparison {
    pub fn all(&self) -> bool {
        self.irreducible && self.output_positions && self.input_pairs && self.words_up_to_swap
    }
}

impl RevengJson {
    pub fn compare(&self, truth: &GroundTruth) -> TruthComparison {
        let mut outs: Vec<(&str, usize)> = self
            .outputs
            .iter()
            .map(|o| (o.wire.as_str(), o.position))
            .collect();
        let mut want: Vec<(&str, usize)> = truth
            .outputs
            .iter()
            .map(|o| (o.wire.as_str(), o.position))
            .collect();
        outs.sort();
        want.sort();

        let pairs = |it: Vec<(&str, usize)>| -> BTreeSet<(usize, BTreeSet<String>)> {
            let mut by_pos: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
            for (w, p) in it {
                by_pos.entry(p).or_default().insert(w.to_owned());
            }
            by_pos.into_iter().collect()
        };
        let got = pairs(
            self.inputs
                .iter()
                .map(|i| (i.wire.as_str(), i.position))
                .collect(),
        );
        let exp = pairs(
            truth
                .inputs
                .iter()
                .map(|i| (i.wire.as_str(), i.position))
                .collect(),
        );

        let word_of = |wire: &str| {
            truth
                .inputs
                .iter()
                .find(|t| t.wire == wire)
                .map(|t| t.word.as_str())
        };
        let straight = self
            .inputs
            .iter()
            .all(|i| word_of(&i.wire) == Some(i.word.as_str()));
        let flip = |w: &str| if w == "A" { "B" } else { "A" };
        let swapped = self
            .inputs
            .iter()
            .all(|i| word_of(&i.wire) == Some(flip(&i.word)));

        TruthComparison {
            irreducible: self.irreducible == truth.irreducible,
            output_positions: outs == want,
            input_pairs: got == exp,
            words_up_to_swap: self.inputs.len() == truth.inputs.len() && (straight || swapped),
        }
    }
}

/// Extracts `n`, recovers encodings and `P(x)`, and verifies the netlist
/// against the recovered specification.
pub fn reverse_engineer(n: &Netlist, opts: &ExtractOptions) -> Result<RevengReport, RevengError> {
    let extraction = extract_all(n, opts)?;
    reverse_engineer_extracted(n, extraction)
}

pub fn reverse_engineer_extracted(
    n: &Netlist,
    extraction: ExtractionResult,
) -> Result<RevengReport, RevengError> {
    let outputs = find_output_encoding(&extraction)?;
    let inputs = find_input_encoding(&outputs, n.vars())?;
    let recovered = recover_irreducible(&extraction, &outputs, &inputs)?;
    let io = IoMap::new(n, inputs.word_a(), inputs.word_b(), outputs.output_order())
        .map_err(|e| RevengError::NoValidEncoding(e.to_string()))?;
    let spec_check = verify_extracted(n, &extraction, &recovered.p, &io)?;
    let m = outputs.m();
    Ok(RevengReport {
        m,
        outputs,
        inputs,
        recovered,
        spec_check,
        ambiguity: BigUint::from(1u8) << (m - 1),
        extraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_equations, tests::FIG3};
    use crate::specgen::{build_spec, generate_mastrovito};

    fn spec_result(exps: &str) -> (ExtractionResult, VarTable) {
        let (spec, mut names) = build_spec(&exps.parse().unwrap());
        // Outputs listed MSB first so that order carries no hint.
        let outs = spec
            .outputs
            .iter()
            .enumerate()
            .rev()
            .map(|(i, z)| {
                let name = format!("z{i}");
                (names.intern(&name), name, z.clone())
            })
            .collect();
        (ExtractionResult::from_polynomials(outs), names)
    }

    #[test]
    fn fig2_encodings_and_polynomial() {
        let (r, names) = spec_result("4,1,0");
        let out = find_output_encoding(&r).unwrap();
        let order: Vec<&str> = out.entries.iter().map(|e| names.name(e.output)).collect();
        assert_eq!(order, ["z0", "z1", "z2", "z3"]);
        assert_eq!(out.entries[0].product_set.to_text(&names), "a0*b0");
        let inp = find_input_encoding(&out, &names).unwrap();
        let pairs: Vec<(&str, &str)> = inp
            .pairs
            .iter()
            .map(|&(u, v)| (names.name(u), names.name(v)))
            .collect();
        assert_eq!(pairs, [("a0", "b0"), ("a1", "b1"), ("a2", "b2"), ("a3", "b3")]);
        let rec = recover_irreducible(&r, &out, &inp).unwrap();
        assert_eq!(rec.p.exponents(), [4, 1, 0]);
        let dummies: BTreeSet<String> = rec
            .dummies
            .iter()
            .map(|d| Polynomial::from_monomial(d.clone()).to_text(&names))
            .collect();
        assert_eq!(dummies, BTreeSet::from(["a1*a3".to_owned(), "b1*b3".to_owned()]));
        assert_eq!(rec.s_m.len(), 3);
    }

    #[test]
    fn p1_spec_recovers_p1() {
        let (r, names) = spec_result("4,3,0");
        let out = find_output_encoding(&r).unwrap();
        let inp = find_input_encoding(&out, &names).unwrap();
        assert_eq!(
            recover_irreducible(&r, &out, &inp).unwrap().p.exponents(),
            [4, 3, 0]
        );
    }

    #[test]
    fn fig3_round_trip() {
        let n = parse_equations(FIG3).unwrap();
        let rep = reverse_engineer(&n, &ExtractOptions::with_threads(2)).unwrap();
        let j = rep.to_json(&n);
        assert_eq!(j.irreducible, [2, 1, 0]);
        assert_eq!(j.outputs[0].wire, "z0");
        assert_eq!(j.outputs[1].wire, "z1");
        assert!(j.verified);
        assert_eq!(j.ambiguity, "2");
    }

    #[test]
    fn single_bit_multiplier() {
        let g = generate_mastrovito(&"1,0".parse().unwrap());
        let rep = reverse_engineer(&g.netlist, &ExtractOptions::with_threads(1)).unwrap();
        assert_eq!(rep.p().exponents(), [1, 0]);
        assert!(rep.spec_check.equal);
        assert_eq!(rep.ambiguity, BigUint::from(1u8));
    }

    #[test]
    fn xor_only_netlist_is_rejected() {
        let n = parse_equations("inputs a b\noutputs z\nz = XOR(a, b)\n").unwrap();
        let err = reverse_engineer(&n, &ExtractOptions::with_threads(1)).unwrap_err();
        assert!(matches!(err, RevengError::NoValidEncoding(_)), "{err}");
        assert!(err.is_structural());
    }

    #[test]
    fn colliding_cores_are_rejected() {
        let n = parse_equations("inputs a b c d\noutputs y z\ny = AND(a, b)\nz = AND(c, d)\n").unwrap();
        let err = reverse_engineer(&n, &ExtractOptions::with_threads(1)).unwrap_err();
        assert!(matches!(err, RevengError::NoValidEncoding(_)), "{err}");
    }

    #[test]
    fn generated_large_ambiguity_is_decimal() {
        let p: IrreduciblePoly = "8,4,3,1,0".parse().unwrap();
        let g = generate_mastrovito(&p);
        let rep = reverse_engineer(&g.netlist, &ExtractOptions::with_threads(2)).unwrap();
        let j = rep.to_json(&g.netlist);
        assert_eq!(j.ambiguity, "128");
        assert!(j.compare(&g.truth).all());
    }
}
