//! Independent oracles shared by the integration tests. Nothing here calls
//! into the specification builder or the rewriting engine.

#![allow(dead_code)]

use gfre::netlist::{Gate, GateType, Netlist};
use gfre::poly::{Polynomial, VarId};
use gfre::specgen::{GroundTruth, IrreduciblePoly};
use rand::Rng;

/// Dense GF(2)[x] element, bit `i` of word `i / 64` is the coefficient of `x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Poly(pub Vec<u64>);

impl Gf2Poly {
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Gf2Poly(Vec::new());
        for &e in exps {
            p.flip(e);
        }
        p
    }

    pub fn x() -> Self {
        Self::from_exponents(&[1])
    }

    pub fn flip(&mut self, e: usize) {
        if self.0.len() <= e / 64 {
            self.0.resize(e / 64 + 1, 0);
        }
        self.0[e / 64] ^= 1 << (e % 64);
    }

    pub fn bit(&self, e: usize) -> bool {
        self.0.get(e / 64).is_some_and(|w| w >> (e % 64) & 1 == 1)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn is_one(&self) -> bool {
        self.degree() == Some(0)
    }

    pub fn xor(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Gf2Poly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0) ^ o.0.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    fn xor_shifted(&mut self, o: &Self, k: usize) {
        let (words, bits) = (k / 64, k % 64);
        let need = o.0.len() + words + 1;
        if self.0.len() < need {
            self.0.resize(need, 0);
        }
        for (i, &w) in o.0.iter().enumerate() {
            self.0[i + words] ^= w << bits;
            if bits != 0 {
                self.0[i + words + 1] ^= w >> (64 - bits);
            }
        }
    }

    pub fn shl(&self, k: usize) -> Self {
        let mut r = Gf2Poly(Vec::new());
        r.xor_shifted(self, k);
        r
    }

    /// Remainder modulo `m` by repeated subtraction of shifted `m`.
    pub fn rem(&self, m: &Self) -> Self {
        let dm = m.degree().expect("nonzero modulus");
        let mut r = self.clone();
        while let Some(d) = r.degree() {
            if d < dm {
                break;
            }
            r.xor_shifted(m, d - dm);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Gf2Poly(Vec::new());
        if let Some(d) = self.degree() {
            for e in 0..=d {
                if self.bit(e) {
                    r.xor_shifted(o, e);
                }
            }
        }
        r
    }

    pub fn mulmod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

/// Ben-Or: `f` of degree `m` is irreducible iff `gcd(x^(2^i) - x, f) = 1`
/// for every `1 <= i <= m/2`.
pub fn is_irreducible(exps: &[usize]) -> bool {
    let f = Gf2Poly::from_exponents(exps);
    let m = f.degree().expect("nonzero");
    if m == 0 {
        return false;
    }
    let x = Gf2Poly::x();
    let mut power = x.rem(&f);
    for _ in 1..=m / 2 {
        power = power.mulmod(&power, &f);
        let g = power.xor(&x).gcd(&f);
        if !g.is_one() {
            return false;
        }
    }
    true
}

/// Field product for `m <= 64` by shift-and-add with reduction.
pub fn gf_mul(a: u64, b: u64, exps: &[usize]) -> u64 {
    let m = exps[0];
    let mut acc: u128 = 0;
    for i in 0..m {
        if a >> i & 1 == 1 {
            acc ^= (b as u128) << i;
        }
    }
    let modulus: u128 = exps.iter().fold(0, |p, &e| p | 1u128 << e);
    for d in (m..2 * m).rev() {
        if acc >> d & 1 == 1 {
            acc ^= modulus << (d - m);
        }
    }
    acc as u64
}

/// Netlist outputs (LSB first, per `truth`) for 64 input pairs at once.
/// `a[k]`, `b[k]` are operand words of lane `k`.
pub fn simulate_words(n: &Netlist, truth: &GroundTruth, a: &[u64], b: &[u64]) -> Vec<u64> {
    assert!(a.len() <= 64 && a.len() == b.len());
    let word = |ws: Vec<&str>| -> Vec<VarId> { ws.iter().map(|w| n.var(w).expect("wire")).collect() };
    let aw = word(truth.input_word("A"));
    let bw = word(truth.input_word("B"));
    let zw = word(truth.output_word());
    let lanes = |vals: &[u64], bit: usize| -> u64 {
        vals.iter()
            .enumerate()
            .fold(0, |acc, (k, v)| acc | (v >> bit & 1) << k)
    };
    let vals = n.simulate(|v| {
        if let Some(i) = aw.iter().position(|&x| x == v) {
            lanes(a, i)
        } else if let Some(i) = bw.iter().position(|&x| x == v) {
            lanes(b, i)
        } else {
            0
        }
    });
    (0..a.len())
        .map(|k| {
            zw.iter()
                .enumerate()
                .fold(0u64, |acc, (i, z)| acc | (vals[z.index()] >> k & 1) << i)
        })
        .collect()
}

/// Evaluates polynomials `zs[i]` over operand words for 64 lanes.
pub fn eval_words(zs: &[&Polynomial], aw: &[VarId], bw: &[VarId], a: &[u64], b: &[u64]) -> Vec<u64> {
    let lanes = |vals: &[u64], bit: usize| -> u64 {
        vals.iter()
            .enumerate()
            .fold(0, |acc, (k, v)| acc | (v >> bit & 1) << k)
    };
    let bits: Vec<u64> = zs
        .iter()
        .map(|z| {
            z.evaluate_words(|v| {
                aw.iter()
                    .position(|&x| x == v)
                    .map(|i| lanes(a, i))
                    .or_else(|| bw.iter().position(|&x| x == v).map(|i| lanes(b, i)))
            })
            .expect("bound")
        })
        .collect();
    (0..a.len())
        .map(|k| {
            bits.iter()
                .enumerate()
                .fold(0u64, |acc, (i, w)| acc | (w >> k & 1) << i)
        })
        .collect()
}

/// Every `(a, b)` pair for degree `m`, chunked into 64-lane batches.
pub fn all_pairs(m: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    let total = 1u64 << (2 * m);
    let mut out = Vec::new();
    let mut start = 0;
    while start < total {
        let end = (start + 64).min(total);
        let a = (start..end).map(|x| x & ((1 << m) - 1)).collect();
        let b = (start..end).map(|x| x >> m).collect();
        out.push((a, b));
        start = end;
    }
    out
}

pub fn random_pairs(m: usize, batches: usize, rng: &mut impl Rng) -> Vec<(Vec<u64>, Vec<u64>)> {
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    (0..batches)
        .map(|_| {
            let a = (0..64).map(|_| rng.gen::<u64>() & mask).collect();
            let b = (0..64).map(|_| rng.gen::<u64>() & mask).collect();
            (a, b)
        })
        .collect()
}

/// True if the two netlists disagree on some lane; both must use the wire
/// names of `truth`.
pub fn outputs_differ(
    x: &Netlist,
    y: &Netlist,
    batches: &[(Vec<u64>, Vec<u64>)],
    truth: &GroundTruth,
) -> bool {
    batches
        .iter()
        .any(|(a, b)| simulate_words(x, truth, a, b) != simulate_words(y, truth, a, b))
}

/// A single-gate mutation: retype or rewire gate `index`.
pub fn mutate(n: &Netlist, rng: &mut impl Rng) -> Option<(String, Netlist)> {
    let index = rng.gen_range(0..n.gates().len());
    let g = n.gate(index).clone();
    let topo_pos: Vec<usize> = {
        let mut pos = vec![0; n.gates().len()];
        for (k, &gi) in n.topo_order().iter().enumerate() {
            pos[gi] = k;
        }
        pos
    };
    if rng.gen_bool(0.5) {
        let kind = match g.kind {
            GateType::Xor => [GateType::Or, GateType::And][rng.gen_range(0..2)],
            GateType::And | GateType::Or => GateType::Xor,
            _ => return None,
        };
        let name = format!("retype {} {} -> {}", n.name(g.output), g.kind, kind);
        let m = n.with_gate(index, Gate { kind, ..g }).ok()?;
        Some((name, m))
    } else {
        // Rewire one pin to a primary input or an earlier gate output.
        let pin = rng.gen_range(0..g.inputs.len());
        let earlier: Vec<VarId> = n
            .primary_inputs()
            .iter()
            .copied()
            .chain(
                n.gates()
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| topo_pos[*k] < topo_pos[index])
                    .map(|(_, h)| h.output),
            )
            .filter(|&v| !g.inputs.contains(&v))
            .collect();
        if earlier.is_empty() {
            return None;
        }
        let to = earlier[rng.gen_range(0..earlier.len())];
        let mut inputs = g.inputs.clone();
        let from = inputs[pin];
        inputs[pin] = to;
        let name = format!(
            "rewire {} pin {pin}: {} -> {}",
            n.name(g.output),
            n.name(from),
            n.name(to)
        );
        let m = n.with_gate(index, Gate { inputs, ..g }).ok()?;
        Some((name, m))
    }
}

pub fn poly(exps: &str) -> IrreduciblePoly {
    exps.parse().expect("well-formed exponent list")
}
