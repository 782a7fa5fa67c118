//! Gate-level combinational netlists: construction, validation, topological
//! order, per-output logic cones and bit-parallel simulation.

mod equations;
mod verilog;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poly::{PolyError, VarId, VarTable};

pub use equations::parse_equations;
pub use verilog::parse_structural_verilog;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unsupported cell `{cell}`")]
    UnsupportedGate { cell: String, line: usize },
    #[error("line {line}: unsupported Verilog construct `{token}`")]
    UnsupportedVerilog { token: String, line: usize },
    #[error("wire `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("wire `{0}` is used but is neither a primary input nor driven by a gate")]
    UndeclaredWire(String),
    #[error("primary output `{0}` is not driven")]
    UndrivenOutput(String),
    #[error("`{0}` is declared more than once")]
    DuplicateDeclaration(String),
    #[error("gate `{gate}` takes {expected} input(s), got {got}")]
    Arity {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("combinational cycle: {}", .0.join(" -> "))]
    CombinationalCycle(Vec<String>),
    #[error("`{0}` is not a primary output")]
    NotAnOutput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateType {
    And,
    Or,
    Xor,
    Xnor,
    Nand,
    Nor,
    Not,
    Buf,
    Aoi21,
    Oai21,
    Const0,
    Const1,
}

impl GateType {
    pub const ALL: [GateType; 12] = [
        GateType::And,
        GateType::Or,
        GateType::Xor,
        GateType::Xnor,
        GateType::Nand,
        GateType::Nor,
        GateType::Not,
        GateType::Buf,
        GateType::Aoi21,
        GateType::Oai21,
        GateType::Const0,
        GateType::Const1,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateType::Const0 | GateType::Const1 => 0,
            GateType::Not | GateType::Buf => 1,
            GateType::Aoi21 | GateType::Oai21 => 3,
            _ => 2,
        }
    }

    /// Upper-case cell name used in the equation format.
    pub fn name(self) -> &'static str {
        match self {
            GateType::And => "AND",
            GateType::Or => "OR",
            GateType::Xor => "XOR",
            GateType::Xnor => "XNOR",
            GateType::Nand => "NAND",
            GateType::Nor => "NOR",
            GateType::Not => "NOT",
            GateType::Buf => "BUF",
            GateType::Aoi21 => "AOI21",
            GateType::Oai21 => "OAI21",
            GateType::Const0 => "CONST0",
            GateType::Const1 => "CONST1",
        }
    }

    /// Case-insensitive lookup. `INV` is accepted as an alias of `NOT`.
    pub fn from_name(name: &str) -> Result<GateType, PolyError> {
        let upper = name.to_ascii_uppercase();
        if upper == "INV" {
            return Ok(GateType::Not);
        }
        GateType::ALL
            .into_iter()
            .find(|g| g.name() == upper)
            .ok_or_else(|| PolyError::UnsupportedGate(name.to_owned()))
    }

    /// Evaluates the gate on 64 input vectors at once.
    pub fn eval_words(self, x: &[u64]) -> u64 {
        match self {
            GateType::Const0 => 0,
            GateType::Const1 => !0,
            GateType::Buf => x[0],
            GateType::Not => !x[0],
            GateType::And => x[0] & x[1],
            GateType::Nand => !(x[0] & x[1]),
            GateType::Or => x[0] | x[1],
            GateType::Nor => !(x[0] | x[1]),
            GateType::Xor => x[0] ^ x[1],
            GateType::Xnor => !(x[0] ^ x[1]),
            GateType::Aoi21 => !((x[0] & x[1]) | x[2]),
            GateType::Oai21 => !((x[0] | x[1]) & x[2]),
        }
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateType {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateType::from_name(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub output: VarId,
    pub kind: GateType,
    pub inputs: Vec<VarId>,
}

/// Transitive fan-in of one primary output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub output: VarId,
    /// Gate indices in topological order.
    pub gates: Vec<usize>,
    /// Primary inputs the output depends on structurally.
    pub support: BTreeSet<VarId>,
}

/// Accumulates declarations and gates, then validates them into a
/// [`Netlist`].
#[derive(Clone, Debug, Default)]
pub struct NetlistBuilder {
    vars: VarTable,
    gates: Vec<Gate>,
    inputs: Vec<VarId>,
    outputs: Vec<VarId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, name: &str) -> VarId {
        self.vars.intern(name)
    }

    pub fn add_input(&mut self, name: &str) -> Result<VarId, NetlistError> {
        let v = self.vars.intern(name);
        if self.inputs.contains(&v) {
            return Err(NetlistError::DuplicateDeclaration(name.to_owned()));
        }
        self.inputs.push(v);
        Ok(v)
    }

    pub fn add_output(&mut self, name: &str) -> Result<VarId, NetlistError> {
        let v = self.vars.intern(name);
        if self.outputs.contains(&v) {
            return Err(NetlistError::DuplicateDeclaration(name.to_owned()));
        }
        self.outputs.push(v);
        Ok(v)
    }

    pub fn add_gate(&mut self, output: &str, kind: GateType, inputs: &[&str]) -> Result<VarId, NetlistError> {
        if inputs.len() != kind.arity() {
            return Err(NetlistError::Arity {
                gate: output.to_owned(),
                expected: kind.arity(),
                got: inputs.len(),
            });
        }
        let out = self.vars.intern(output);
        let inputs = inputs.iter().map(|n| self.vars.intern(n)).collect();
        self.gates.push(Gate {
            output: out,
            kind,
            inputs,
        });
        Ok(out)
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        let NetlistBuilder {
            vars,
            gates,
            inputs,
            outputs,
        } = self;
        let mut is_input = vec![false; vars.len()];
        for &v in &inputs {
            is_input[v.index()] = true;
        }
        let mut driver = vec![None; vars.len()];
        for (i, g) in gates.iter().enumerate() {
            if is_input[g.output.index()] || driver[g.output.index()].is_some() {
                return Err(NetlistError::MultipleDrivers(vars.name(g.output).to_owned()));
            }
            driver[g.output.index()] = Some(i);
        }
        for g in &gates {
            for &u in &g.inputs {
                if !is_input[u.index()] && driver[u.index()].is_none() {
                    return Err(NetlistError::UndeclaredWire(vars.name(u).to_owned()));
                }
            }
        }
        for &o in &outputs {
            if !is_input[o.index()] && driver[o.index()].is_none() {
                return Err(NetlistError::UndrivenOutput(vars.name(o).to_owned()));
            }
        }
        let mut n = Netlist {
            vars,
            gates,
            inputs,
            outputs,
            is_input,
            driver,
            topo: Vec::new(),
        };
        n.topo = n.topological_sort()?;
        Ok(n)
    }
}

/// A validated, acyclic gate-level netlist. Read-only once built.
#[derive(Clone, Debug)]
pub struct Netlist {
    vars: VarTable,
    gates: Vec<Gate>,
    inputs: Vec<VarId>,
    outputs: Vec<VarId>,
    is_input: Vec<bool>,
    driver: Vec<Option<usize>>,
    topo: Vec<usize>,
}

impl Netlist {
    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    pub fn name(&self, v: VarId) -> &str {
        self.vars.name(v)
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.vars.get(name)
    }

    /// Gates in file order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, index: usize) -> &Gate {
        &self.gates[index]
    }

    pub fn primary_inputs(&self) -> &[VarId] {
        &self.inputs
    }

    pub fn primary_outputs(&self) -> &[VarId] {
        &self.outputs
    }

    pub fn is_primary_input(&self, v: VarId) -> bool {
        self.is_input.get(v.index()).copied().unwrap_or(false)
    }

    pub fn is_primary_output(&self, v: VarId) -> bool {
        self.outputs.contains(&v)
    }

    /// Index of the gate driving `v`, if any.
    pub fn driver(&self, v: VarId) -> Option<usize> {
        self.driver.get(v.index()).copied().flatten()
    }

    /// Gate indices in the order computed at build time.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Kahn's algorithm; among ready gates the one with the smallest output
    /// id goes first.
    pub fn topological_sort(&self) -> Result<Vec<usize>, NetlistError> {
        let n = self.gates.len();
        let mut pending = vec![0usize; n];
        let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, g) in self.gates.iter().enumerate() {
            for &u in &g.inputs {
                if let Some(d) = self.driver(u) {
                    pending[i] += 1;
                    fanout[d].push(i);
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<(VarId, usize)>> = (0..n)
            .filter(|&i| pending[i] == 0)
            .map(|i| Reverse((self.gates[i].output, i)))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((_, i))) = ready.pop() {
            order.push(i);
            for &j in &fanout[i] {
                pending[j] -= 1;
                if pending[j] == 0 {
                    ready.push(Reverse((self.gates[j].output, j)));
                }
            }
        }
        if order.len() < n {
            return Err(NetlistError::CombinationalCycle(self.find_cycle(&pending)));
        }
        Ok(order)
    }

    fn find_cycle(&self, pending: &[usize]) -> Vec<String> {
        // Every gate left with pending inputs lies on or behind a cycle, so
        // walking backwards through such gates must revisit one.
        let Some(start) = (0..self.gates.len()).find(|&i| pending[i] > 0) else {
            return Vec::new();
        };
        let mut seen_at = vec![usize::MAX; self.gates.len()];
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if seen_at[cur] != usize::MAX {
                let mut cycle: Vec<String> = path[seen_at[cur]..]
                    .iter()
                    .rev()
                    .map(|&g: &usize| self.name(self.gates[g].output).to_owned())
                    .collect();
                cycle.push(cycle[0].clone());
                return cycle;
            }
            seen_at[cur] = path.len();
            path.push(cur);
            cur = self.gates[cur]
                .inputs
                .iter()
                .filter_map(|&u| self.driver(u))
                .find(|&d| pending[d] > 0)
                .expect("blocked gate has a blocked predecessor");
        }
    }

    /// Logic cone of primary output `out`.
    pub fn extract_cone(&self, out: VarId) -> Result<Cone, NetlistError> {
        if !self.is_primary_output(out) {
            let name = self.vars.try_name(out).unwrap_or("?").to_owned();
            return Err(NetlistError::NotAnOutput(name));
        }
        let mut in_cone = vec![false; self.gates.len()];
        let mut support = BTreeSet::new();
        let mut stack = vec![out];
        let mut visited = vec![false; self.vars.len()];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut visited[v.index()], true) {
                continue;
            }
            if self.is_primary_input(v) {
                support.insert(v);
            } else if let Some(d) = self.driver(v) {
                in_cone[d] = true;
                stack.extend(self.gates[d].inputs.iter().copied());
            }
        }
        let gates = self.topo.iter().copied().filter(|&g| in_cone[g]).collect();
        Ok(Cone {
            output: out,
            gates,
            support,
        })
    }

    pub fn cones(&self) -> Vec<Cone> {
        self.outputs
            .iter()
            .map(|&o| self.extract_cone(o).expect("primary output"))
            .collect()
    }

    /// Gates that no primary output depends on.
    pub fn unreachable_gates(&self) -> Vec<usize> {
        let mut used = vec![false; self.gates.len()];
        for c in self.cones() {
            for g in c.gates {
                used[g] = true;
            }
        }
        (0..self.gates.len()).filter(|&g| !used[g]).collect()
    }

    /// Bit-parallel simulation of the whole netlist. Returns one word per
    /// variable.
    pub fn simulate(&self, input: impl Fn(VarId) -> u64) -> Vec<u64> {
        self.simulate_gates(&self.topo, input)
    }

    /// Simulates only `gates`, which must be topologically ordered and close
    /// over their own fan-in (a [`Cone`] qualifies).
    pub fn simulate_gates(&self, gates: &[usize], input: impl Fn(VarId) -> u64) -> Vec<u64> {
        let mut val = vec![0u64; self.vars.len()];
        for &v in &self.inputs {
            val[v.index()] = input(v);
        }
        let mut args = Vec::with_capacity(3);
        for &gi in gates {
            let g = &self.gates[gi];
            args.clear();
            args.extend(g.inputs.iter().map(|u| val[u.index()]));
            val[g.output.index()] = g.kind.eval_words(&args);
        }
        val
    }

    /// Rebuilds the netlist with every wire renamed through `rename` and the
    /// gate list permuted by `gate_order` (indices into [`Netlist::gates`]).
    pub fn relabeled(
        &self,
        rename: impl Fn(&str) -> String,
        gate_order: &[usize],
        input_order: &[usize],
        output_order: &[usize],
    ) -> Result<Netlist, NetlistError> {
        let mut b = NetlistBuilder::new();
        for &i in input_order {
            b.add_input(&rename(self.name(self.inputs[i])))?;
        }
        for &i in output_order {
            b.add_output(&rename(self.name(self.outputs[i])))?;
        }
        for &gi in gate_order {
            let g = &self.gates[gi];
            let ins: Vec<String> = g.inputs.iter().map(|&u| rename(self.name(u))).collect();
            let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
            b.add_gate(&rename(self.name(g.output)), g.kind, &ins)?;
        }
        b.build()
    }

    /// The netlist with gate `index` replaced by `gate`; fails if the result
    /// is ill-formed or cyclic.
    pub fn with_gate(&self, index: usize, gate: Gate) -> Result<Netlist, NetlistError> {
        if gate.inputs.len() != gate.kind.arity() {
            return Err(NetlistError::Arity {
                gate: self.vars.try_name(gate.output).unwrap_or("?").to_owned(),
                expected: gate.kind.arity(),
                got: gate.inputs.len(),
            });
        }
        let mut b = NetlistBuilder {
            vars: self.vars.clone(),
            gates: self.gates.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
        };
        b.gates[index] = gate;
        b.build()
    }

    /// Same declarations and gates, in the same order, compared by name.
    pub fn structurally_eq(&self, other: &Netlist) -> bool {
        let names =
            |n: &Netlist, vs: &[VarId]| -> Vec<String> { vs.iter().map(|&v| n.name(v).to_owned()).collect() };
        names(self, &self.inputs) == names(other, &other.inputs)
            && names(self, &self.outputs) == names(other, &other.outputs)
            && self.gates.len() == other.gates.len()
            && self.gates.iter().zip(&other.gates).all(|(g, h)| {
                g.kind == h.kind
                    && self.name(g.output) == other.name(h.output)
                    && names(self, &g.inputs) == names(other, &h.inputs)
            })
    }

    pub fn to_equations(&self) -> String {
        equations::write_equations(self)
    }

    pub fn to_verilog(&self, module: &str) -> String {
        verilog::write_verilog(self, module)
    }

    pub fn count_gates(&self, kind: GateType) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }
}
