//! Golden GF(2^m) multiplication specifications in the polynomial basis.
//!
//! Column `k` of the schoolbook product is the product set
//! `s_k = sum_{i+j=k} a_i b_j`. Sets with `k < m` land in output `z_k`;
//! every `s_k` with `k >= m` is folded into the outputs named by the
//! exponents of `x^k mod P(x)`.

mod catalog;
mod mastrovito;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poly::{Monomial, Polynomial, VarId, VarTable};

pub use catalog::{lookup, nist_polynomials, warn_if_uncataloged, NamedPoly};
pub use mastrovito::{generate_mastrovito, GroundTruth, InputTruth, Mastrovito, OutputTruth};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid irreducible polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("exponent {k} is outside 0..={max} for degree {m}")]
    InvalidExponent { k: usize, m: usize, max: usize },
}

/// `P(x) = x^m + P'(x)`, stored as the degree and the exponents of the tail
/// `P'(x)`. Irreducibility is assumed, not checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IrreduciblePoly {
    m: usize,
    tail: BTreeSet<usize>,
}

impl IrreduciblePoly {
    pub fn new(m: usize, tail: impl IntoIterator<Item = usize>) -> Result<Self, SpecError> {
        if m == 0 {
            return Err(SpecError::InvalidPolynomial("degree must be at least 1".into()));
        }
        let tail: BTreeSet<usize> = tail.into_iter().collect();
        if let Some(&e) = tail.iter().find(|&&e| e >= m) {
            return Err(SpecError::InvalidPolynomial(format!(
                "tail exponent {e} is not below the degree {m}"
            )));
        }
        if !tail.contains(&0) {
            return Err(SpecError::InvalidPolynomial(
                "constant term missing, so x divides P(x)".into(),
            ));
        }
        Ok(Self { m, tail })
    }

    /// From the full exponent list; the largest exponent is the degree.
    pub fn from_exponents(exps: &[usize]) -> Result<Self, SpecError> {
        let m = *exps
            .iter()
            .max()
            .ok_or_else(|| SpecError::InvalidPolynomial("no exponents".into()))?;
        let mut seen = BTreeSet::new();
        for &e in exps {
            if !seen.insert(e) {
                return Err(SpecError::InvalidPolynomial(format!("exponent {e} repeated")));
            }
        }
        Self::new(m, exps.iter().copied().filter(|&e| e != m))
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Exponents of `P'(x)`, ascending.
    pub fn tail(&self) -> &BTreeSet<usize> {
        &self.tail
    }

    /// All exponents including `m`, descending, e.g. `[4, 1, 0]`.
    pub fn exponents(&self) -> Vec<usize> {
        std::iter::once(self.m)
            .chain(self.tail.iter().rev().copied())
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.tail.len() + 1
    }

    /// Comma-separated exponent list, the CLI syntax.
    pub fn to_csv(&self) -> String {
        self.exponents()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for IrreduciblePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .map(|e| match e {
                0 => "1".to_owned(),
                1 => "x".to_owned(),
                e => format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl FromStr for IrreduciblePoly {
    type Err = SpecError;

    /// Parses `"233,74,0"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let exps = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| SpecError::InvalidPolynomial(format!("bad exponent `{}`", t.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_exponents(&exps)
    }
}

/// Exponents of `x^k mod P(x)`, for `0 <= k <= 2m-2`.
pub fn reduce_exponent(k: usize, p: &IrreduciblePoly) -> Result<BTreeSet<usize>, SpecError> {
    let m = p.m;
    let max = 2 * m - 2;
    if k > max {
        return Err(SpecError::InvalidExponent { k, m, max });
    }
    if k < m {
        return Ok(BTreeSet::from([k]));
    }
    let mut cur = vec![false; m];
    cur[m - 1] = true;
    for _ in m - 1..k {
        let carry = cur[m - 1];
        cur.rotate_right(1);
        cur[0] = false;
        if carry {
            for &e in &p.tail {
                cur[e] ^= true;
            }
        }
    }
    Ok((0..m).filter(|&e| cur[e]).collect())
}

/// `reduce_exponent` for every `k` in `0..=2m-2`.
pub fn reduction_table(p: &IrreduciblePoly) -> Vec<BTreeSet<usize>> {
    (0..=2 * p.m - 2)
        .map(|k| reduce_exponent(k, p).expect("k in range"))
        .collect()
}

/// `s_k = sum_{i+j=k} a_i b_j` as a polynomial.
pub fn product_set(k: usize, a: &[VarId], b: &[VarId]) -> Polynomial {
    let m = a.len();
    let lo = (k + 1).saturating_sub(m);
    let hi = k.min(m - 1);
    Polynomial::from_monomials((lo..=hi).map(|i| Monomial::new([a[i], b[k - i]])))
}

/// Pairs `(i, j)` with `i + j = k`, ascending in `i`.
pub(crate) fn product_pairs(k: usize, m: usize) -> impl Iterator<Item = (usize, usize)> {
    let lo = (k + 1).saturating_sub(m);
    let hi = k.min(m - 1);
    (lo..=hi).map(move |i| (i, k - i))
}

/// Expected output polynomials of a GF(2^m) multiplier.
#[derive(Clone, Debug)]
pub struct GfSpec {
    pub p: IrreduciblePoly,
    pub a: Vec<VarId>,
    pub b: Vec<VarId>,
    /// `outputs[i]` is the polynomial of `z_i`.
    pub outputs: Vec<Polynomial>,
    /// `columns[i]` lists the product-set indices summed into `z_i`,
    /// ascending; the first entry is always `i`.
    pub columns: Vec<Vec<usize>>,
}

impl GfSpec {
    pub fn m(&self) -> usize {
        self.p.m
    }

    /// For each out-of-field `k >= m`, the outputs receiving `s_k`.
    pub fn assignment_table(&self) -> Vec<(usize, BTreeSet<usize>)> {
        let m = self.m();
        (m..=2 * m - 2)
            .map(|k| {
                let outs = (0..m).filter(|&i| self.columns[i].contains(&k)).collect();
                (k, outs)
            })
            .collect()
    }

    pub fn product_set(&self, k: usize) -> Polynomial {
        product_set(k, &self.a, &self.b)
    }
}

/// Builds the specification over caller-supplied operand variables.
pub fn build_spec_over(p: &IrreduciblePoly, a: &[VarId], b: &[VarId]) -> GfSpec {
    let m = p.m;
    assert!(a.len() == m && b.len() == m, "operands must have {m} bits");
    let table = reduction_table(p);
    let mut columns = vec![Vec::new(); m];
    for (k, outs) in table.iter().enumerate() {
        for &i in outs {
            columns[i].push(k);
        }
    }
    let outputs = columns
        .iter()
        .map(|ks| {
            let mut z = Polynomial::zero();
            for &k in ks {
                z += &product_set(k, a, b);
            }
            z
        })
        .collect();
    GfSpec {
        p: p.clone(),
        a: a.to_vec(),
        b: b.to_vec(),
        outputs,
        columns,
    }
}

/// Builds the specification over fresh operands named `a0..`, `b0..`.
pub fn build_spec(p: &IrreduciblePoly) -> (GfSpec, VarTable) {
    let mut names = VarTable::new();
    let a: Vec<VarId> = (0..p.m).map(|i| names.intern(&format!("a{i}"))).collect();
    let b: Vec<VarId> = (0..p.m).map(|i| names.intern(&format!("b{i}"))).collect();
    (build_spec_over(p, &a, &b), names)
}

/// Two-input XORs spent on the reduction: per output column, the number of
/// product sets in the column minus one.
pub fn xor_cost(p: &IrreduciblePoly) -> usize {
    let mut count = vec![0usize; p.m];
    for outs in reduction_table(p) {
        for i in outs {
            count[i] += 1;
        }
    }
    count.iter().map(|c| c - 1).sum()
}
