//! Pseudo-Boolean polynomials over GF(2).
//!
//! Every variable is Boolean, so `x*x = x` is applied when a [`Monomial`] is
//! built, and every coefficient lives in GF(2), so a [`Polynomial`] is just a
//! set of monomials: adding a monomial that is already present removes it.
//! Integer coefficients never need to be stored.

mod expr;
mod gate_model;
mod var;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;
use thiserror::Error;

pub use expr::{Expression, SubstitutionIndex};
pub use gate_model::gate_polynomial;
pub use var::{VarId, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot substitute {0}: the replacement contains the variable itself")]
    CyclicSubstitution(VarId),
    #[error("no value assigned to variable {0}")]
    UnboundVariable(VarId),
    #[error("unsupported gate type `{0}`")]
    UnsupportedGate(String),
    #[error("gate {gate} takes {expected} input(s), got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

/// A product of distinct Boolean variables. The empty product is the
/// constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: SmallVec<[VarId; 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        let mut vars = SmallVec::new();
        vars.push(v);
        Self { vars }
    }

    pub fn new(vars: impl IntoIterator<Item = VarId>) -> Self {
        let mut vars: SmallVec<[VarId; 4]> = vars.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        Self { vars }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.vars.binary_search(&v).is_ok()
    }

    /// This monomial with `v` removed (unchanged if `v` is absent).
    pub fn without(&self, v: VarId) -> Self {
        let vars = self.vars.iter().copied().filter(|&u| u != v).collect();
        Self { vars }
    }

    /// Product of two monomials: union of the variable sets.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.vars, &other.vars);
        let mut vars = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    vars.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    vars.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    vars.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        vars.extend_from_slice(&a[i..]);
        vars.extend_from_slice(&b[j..]);
        Monomial { vars }
    }

    fn map_vars(&self, f: &impl Fn(VarId) -> VarId) -> Monomial {
        Monomial::new(self.vars.iter().map(|&v| f(v)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.vars.cmp(&other.vars))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A GF(2) polynomial in Boolean variables. The empty set is 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: FxHashSet<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(Monomial::one())
    }

    pub fn constant(bit: bool) -> Self {
        if bit {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn var(v: VarId) -> Self {
        Self::from_monomial(Monomial::var(v))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = FxHashSet::default();
        terms.insert(m);
        Self { terms }
    }

    /// Sums the monomials mod 2, so repeated monomials cancel pairwise.
    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Self::zero();
        for m in ms {
            p.toggle(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.iter().any(|m| m.contains(v))
    }

    /// Unordered iteration over the monomials.
    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    /// Monomials ordered by degree, then by variable ids.
    pub fn sorted_terms(&self) -> Vec<&Monomial> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_unstable();
        v
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.iter().flat_map(|m| m.vars().iter().copied()).collect()
    }

    /// Adds one monomial mod 2. Returns true if it is now present.
    pub fn toggle(&mut self, m: Monomial) -> bool {
        if self.terms.remove(&m) {
            false
        } else {
            self.terms.insert(m);
            true
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += other;
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for x in &self.terms {
            for y in &other.terms {
                out.toggle(x.mul(y));
            }
        }
        out
    }

    /// Replaces every occurrence of `v` by `g`.
    pub fn substitute(&self, v: VarId, g: &Polynomial) -> Result<Polynomial, PolyError> {
        let mut e = Expression::from_polynomial(self.clone());
        e.substitute(v, g)?;
        Ok(e.into_polynomial())
    }

    /// Evaluates under a Boolean assignment.
    pub fn evaluate(&self, assignment: &FxHashMap<VarId, bool>) -> Result<bool, PolyError> {
        self.evaluate_with(|v| assignment.get(&v).copied())
    }

    pub fn evaluate_with(&self, value: impl Fn(VarId) -> Option<bool>) -> Result<bool, PolyError> {
        let word = self.evaluate_words(|v| value(v).map(|b| if b { !0 } else { 0 }))?;
        Ok(word & 1 == 1)
    }

    /// Evaluates 64 assignments at once; bit `k` of each input word is the
    /// value of that variable in assignment `k`.
    pub fn evaluate_words(&self, value: impl Fn(VarId) -> Option<u64>) -> Result<u64, PolyError> {
        let mut acc = 0u64;
        for m in &self.terms {
            let mut prod = !0u64;
            for &v in m.vars() {
                prod &= value(v).ok_or(PolyError::UnboundVariable(v))?;
            }
            acc ^= prod;
        }
        Ok(acc)
    }

    /// Renames variables. Monomials that collide after renaming cancel.
    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Polynomial {
        Polynomial::from_monomials(self.terms.iter().map(|m| m.map_vars(&f)))
    }

    pub fn display<'a>(&'a self, names: &'a VarTable) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Canonical text form: terms joined by `+`, variables by `*`, terms
    /// ordered by degree, then lexicographically by variable names.
    pub fn to_text(&self, names: &VarTable) -> String {
        self.display(names).to_string()
    }

    /// Parses the canonical text form, interning unseen names into `names`.
    pub fn parse(text: &str, names: &mut VarTable) -> Result<Polynomial, PolyError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        if text == "0" {
            return Ok(Polynomial::zero());
        }
        let mut p = Polynomial::zero();
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(PolyError::Parse(format!("empty term in `{text}`")));
            }
            if term == "1" {
                p.toggle(Monomial::one());
                continue;
            }
            let mut vars = Vec::new();
            for factor in term.split('*') {
                let factor = factor.trim();
                if factor.is_empty() || factor.contains(char::is_whitespace) {
                    return Err(PolyError::Parse(format!("bad factor in term `{term}`")));
                }
                if factor == "1" {
                    continue;
                }
                vars.push(names.intern(factor));
            }
            p.toggle(Monomial::new(vars));
        }
        Ok(p)
    }
}

impl From<Monomial> for Polynomial {
    fn from(m: Monomial) -> Self {
        Polynomial::from_monomial(m)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for m in &rhs.terms {
            self.toggle(m.clone());
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a VarTable,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let name = |v: VarId| -> String {
            self.names
                .try_name(v)
                .map(str::to_owned)
                .unwrap_or_else(|| v.to_string())
        };
        let mut terms: Vec<Vec<String>> = self
            .poly
            .terms
            .iter()
            .map(|m| {
                let mut ns: Vec<String> = m.vars().iter().map(|&v| name(v)).collect();
                ns.sort();
                ns
            })
            .collect();
        terms.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.is_empty() {
                f.write_str("1")?;
            } else {
                f.write_str(&t.join("*"))?;
            }
        }
        Ok(())
    }
}
