use super::{PolyError, Polynomial};
use crate::netlist::GateType;

/// GF(2) polynomial of a gate output over its input expressions.
///
/// NOT = 1+a, AND = ab, OR = a+b+ab, XOR = a+b; the inverted and compound
/// cells are built from those.
pub fn gate_polynomial(kind: GateType, inputs: &[Polynomial]) -> Result<Polynomial, PolyError> {
    if inputs.len() != kind.arity() {
        return Err(PolyError::ArityMismatch {
            gate: kind.name().to_owned(),
            expected: kind.arity(),
            got: inputs.len(),
        });
    }
    let one = Polynomial::one();
    let not = |p: Polynomial| &p + &one;
    let and = |a: &Polynomial, b: &Polynomial| a * b;
    let or = |a: &Polynomial, b: &Polynomial| &(a + b) + &(a * b);
    let p = match kind {
        GateType::Const0 => Polynomial::zero(),
        GateType::Const1 => Polynomial::one(),
        GateType::Buf => inputs[0].clone(),
        GateType::Not => not(inputs[0].clone()),
        GateType::And => and(&inputs[0], &inputs[1]),
        GateType::Nand => not(and(&inputs[0], &inputs[1])),
        GateType::Or => or(&inputs[0], &inputs[1]),
        GateType::Nor => not(or(&inputs[0], &inputs[1])),
        GateType::Xor => &inputs[0] + &inputs[1],
        GateType::Xnor => not(&inputs[0] + &inputs[1]),
        GateType::Aoi21 => not(or(&and(&inputs[0], &inputs[1]), &inputs[2])),
        GateType::Oai21 => not(and(&or(&inputs[0], &inputs[1]), &inputs[2])),
    };
    Ok(p)
}
