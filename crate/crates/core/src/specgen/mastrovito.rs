use serde::{Deserialize, Serialize};

use super::{build_spec, product_pairs, GfSpec, IrreduciblePoly};
use crate::netlist::{GateType, Netlist, NetlistBuilder};

/// A generated multiplier and what is known about its construction.
#[derive(Clone, Debug)]
pub struct Mastrovito {
    pub netlist: Netlist,
    pub spec: GfSpec,
    /// Indices (into `netlist.gates()`) of the XORs that fold out-of-field
    /// product sets into the outputs. Its length equals `xor_cost(p)`.
    pub reduction_gates: Vec<usize>,
    pub truth: GroundTruth,
}

/// Wire-to-role mapping of a multiplier; survives scrambling as a sidecar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub m: usize,
    /// Exponents of `P(x)`, descending.
    pub irreducible: Vec<usize>,
    pub inputs: Vec<InputTruth>,
    pub outputs: Vec<OutputTruth>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputTruth {
    pub wire: String,
    /// `"A"` or `"B"`.
    pub word: String,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputTruth {
    pub wire: String,
    pub position: usize,
}

impl GroundTruth {
    pub fn for_standard_names(p: &IrreduciblePoly) -> Self {
        let m = p.degree();
        let word = |w: &'static str| {
            (0..m).map(move |i| InputTruth {
                wire: format!("{}{i}", w.to_ascii_lowercase()),
                word: w.to_owned(),
                position: i,
            })
        };
        GroundTruth {
            m,
            irreducible: p.exponents(),
            inputs: word("A").chain(word("B")).collect(),
            outputs: (0..m)
                .map(|i| OutputTruth {
                    wire: format!("z{i}"),
                    position: i,
                })
                .collect(),
        }
    }

    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Self {
        let mut t = self.clone();
        for i in &mut t.inputs {
            i.wire = rename(&i.wire);
        }
        for o in &mut t.outputs {
            o.wire = rename(&o.wire);
        }
        t
    }

    pub fn input_word(&self, word: &str) -> Vec<&str> {
        let mut v: Vec<&InputTruth> = self.inputs.iter().filter(|i| i.word == word).collect();
        v.sort_by_key(|i| i.position);
        v.into_iter().map(|i| i.wire.as_str()).collect()
    }

    pub fn output_word(&self) -> Vec<&str> {
        let mut v: Vec<&OutputTruth> = self.outputs.iter().collect();
        v.sort_by_key(|o| o.position);
        v.into_iter().map(|o| o.wire.as_str()).collect()
    }
}

struct TreeBuilder {
    b: NetlistBuilder,
    gates: usize,
}

impl TreeBuilder {
    fn gate(&mut self, out: &str, kind: GateType, ins: &[&str]) -> usize {
        self.b.add_gate(out, kind, ins).expect("generator arity");
        self.gates += 1;
        self.gates - 1
    }

    /// Balanced XOR tree over `leaves` whose root is named `root`. Internal
    /// wires are `{prefix}_{n}`. Needs at least two leaves.
    fn xor_tree(&mut self, leaves: Vec<String>, root: &str, prefix: &str) -> Vec<usize> {
        assert!(leaves.len() >= 2);
        let mut level = leaves;
        let mut made = Vec::new();
        let mut n = 0;
        while level.len() > 1 {
            let last_level = level.len() == 2;
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                if let [l, r] = pair {
                    let out = if last_level {
                        root.to_owned()
                    } else {
                        n += 1;
                        format!("{prefix}_{n}")
                    };
                    made.push(self.gate(&out, GateType::Xor, &[l, r]));
                    next.push(out);
                } else {
                    next.push(pair[0].clone());
                }
            }
            level = next;
        }
        made
    }
}

/// Flat Mastrovito multiplier: `m^2` ANDs, one XOR tree per product set,
/// one reduction tree per output. Inputs `a0..`, `b0..`; outputs `z0..`.
pub fn generate_mastrovito(p: &IrreduciblePoly) -> Mastrovito {
    let m = p.degree();
    let (spec, _) = build_spec(p);
    let mut t = TreeBuilder {
        b: NetlistBuilder::new(),
        gates: 0,
    };
    for w in ["a", "b"] {
        for i in 0..m {
            t.b.add_input(&format!("{w}{i}")).expect("fresh input");
        }
    }
    for i in 0..m {
        t.b.add_output(&format!("z{i}")).expect("fresh output");
    }
    let pp = |i: usize, j: usize| format!("p{i}_{j}");
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (format!("a{i}"), format!("b{j}"));
            let out = if m == 1 { "z0".to_owned() } else { pp(i, j) };
            t.gate(&out, GateType::And, &[&a, &b]);
        }
    }

    // Root wire of each product-set tree; a set of one product is its AND.
    let mut set_wire = Vec::with_capacity(2 * m - 1);
    for k in 0..=2 * m - 2 {
        let leaves: Vec<String> = product_pairs(k, m).map(|(i, j)| pp(i, j)).collect();
        if leaves.len() == 1 {
            set_wire.push(leaves[0].clone());
            continue;
        }
        let alone = k < m && spec.columns[k].len() == 1;
        let root = if alone { format!("z{k}") } else { format!("s{k}") };
        t.xor_tree(leaves, &root, &format!("s{k}"));
        set_wire.push(root);
    }

    let mut reduction_gates = Vec::new();
    for (i, col) in spec.columns.iter().enumerate() {
        if col.len() == 1 {
            continue;
        }
        let leaves = col.iter().map(|&k| set_wire[k].clone()).collect();
        reduction_gates.extend(t.xor_tree(leaves, &format!("z{i}"), &format!("r{i}")));
    }

    let netlist = t.b.build().expect("generated netlist is well formed");
    Mastrovito {
        netlist,
        spec,
        reduction_gates,
        truth: GroundTruth::for_standard_names(p),
    }
}
