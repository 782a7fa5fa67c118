use rustc_hash::{FxHashMap, FxHashSet};

use super::{Monomial, PolyError, Polynomial, VarId};

/// For every variable, the monomials of an expression that contain it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstitutionIndex {
    occurrences: FxHashMap<VarId, FxHashSet<Monomial>>,
}

impl SubstitutionIndex {
    /// Builds the index from scratch.
    pub fn build<'a>(terms: impl IntoIterator<Item = &'a Monomial>) -> Self {
        let mut idx = Self::default();
        for m in terms {
            idx.insert(m);
        }
        idx
    }

    pub fn occurrences(&self, v: VarId) -> Option<&FxHashSet<Monomial>> {
        self.occurrences.get(&v)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.occurrences.keys().copied()
    }

    fn insert(&mut self, m: &Monomial) {
        for &v in m.vars() {
            self.occurrences.entry(v).or_default().insert(m.clone());
        }
    }

    fn remove(&mut self, m: &Monomial, skip: Option<VarId>) {
        for &v in m.vars() {
            if Some(v) == skip {
                continue;
            }
            if let Some(set) = self.occurrences.get_mut(&v) {
                set.remove(m);
                if set.is_empty() {
                    self.occurrences.remove(&v);
                }
            }
        }
    }
}

/// Working form of a polynomial during backward rewriting: the term set
/// plus a [`SubstitutionIndex`], so that replacing a variable only touches
/// the monomials that contain it.
#[derive(Clone, Debug, Default)]
pub struct Expression {
    terms: FxHashSet<Monomial>,
    index: SubstitutionIndex,
}

impl Expression {
    pub fn from_polynomial(p: Polynomial) -> Self {
        let index = SubstitutionIndex::build(p.terms.iter());
        Self {
            terms: p.terms,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.index.occurrences.contains_key(&v)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.index.vars()
    }

    pub fn index(&self) -> &SubstitutionIndex {
        &self.index
    }

    /// True if the index agrees with a full rebuild from the terms.
    pub fn index_is_consistent(&self) -> bool {
        SubstitutionIndex::build(self.terms.iter()) == self.index
    }

    pub fn toggle(&mut self, m: Monomial) {
        if self.terms.remove(&m) {
            self.index.remove(&m, None);
        } else {
            self.index.insert(&m);
            self.terms.insert(m);
        }
    }

    /// Replaces `v` by `g` in place and returns how many monomials were
    /// rewritten.
    pub fn substitute(&mut self, v: VarId, g: &Polynomial) -> Result<usize, PolyError> {
        if g.terms().any(|m| m.contains(v)) {
            return Err(PolyError::CyclicSubstitution(v));
        }
        let Some(affected) = self.index.occurrences.remove(&v) else {
            return Ok(0);
        };
        for m in &affected {
            self.terms.remove(m);
            self.index.remove(m, Some(v));
        }
        // Products below never contain `v`, so they cannot collide with the
        // monomials just removed.
        let n = affected.len();
        for m in affected {
            let rest = m.without(v);
            for t in g.terms() {
                self.toggle(rest.mul(t));
            }
        }
        Ok(n)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.clone(),
        }
    }

    pub fn into_polynomial(self) -> Polynomial {
        Polynomial { terms: self.terms }
    }
}

impl From<Polynomial> for Expression {
    fn from(p: Polynomial) -> Self {
        Expression::from_polynomial(p)
    }
}

impl From<Expression> for Polynomial {
    fn from(e: Expression) -> Self {
        e.into_polynomial()
    }
}
