use log::warn;

use super::IrreduciblePoly;

/// A named catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NamedPoly {
    pub name: &'static str,
    /// Full exponent list, descending.
    pub exponents: &'static [usize],
    /// The entry returned for its degree when no name is given.
    pub default: bool,
}

impl NamedPoly {
    pub fn degree(&self) -> usize {
        self.exponents[0]
    }

    pub fn poly(&self) -> IrreduciblePoly {
        IrreduciblePoly::from_exponents(self.exponents).expect("catalog entry is well formed")
    }
}

const fn entry(name: &'static str, exponents: &'static [usize], default: bool) -> NamedPoly {
    NamedPoly {
        name,
        exponents,
        default,
    }
}

// Every entry is checked for irreducibility by the test suite.
static CATALOG: &[NamedPoly] = &[
    entry("trinomial-1", &[1, 0], true),
    entry("trinomial-1", &[2, 1, 0], true),
    entry("trinomial-1", &[3, 1, 0], true),
    entry("trinomial-2", &[3, 2, 0], false),
    entry("p2", &[4, 1, 0], true),
    entry("p1", &[4, 3, 0], false),
    entry("trinomial-2", &[5, 2, 0], true),
    entry("trinomial-3", &[5, 3, 0], false),
    entry("pentanomial-4", &[5, 4, 3, 2, 0], false),
    entry("trinomial-1", &[6, 1, 0], true),
    entry("trinomial-5", &[6, 5, 0], false),
    entry("pentanomial-4", &[6, 4, 3, 1, 0], false),
    entry("trinomial-1", &[7, 1, 0], true),
    entry("trinomial-3", &[7, 3, 0], false),
    entry("pentanomial-4-3-1", &[8, 4, 3, 1, 0], true),
    entry("pentanomial-4-3-2", &[8, 4, 3, 2, 0], false),
    entry("pentanomial-5-3-1", &[16, 5, 3, 1, 0], true),
    entry("pentanomial-5-3-2", &[16, 5, 3, 2, 0], false),
    entry("pentanomial-7-3-2", &[32, 7, 3, 2, 0], true),
    entry("pentanomial-22-2-1", &[32, 22, 2, 1, 0], false),
    entry("pentanomial-21-19-4", &[64, 21, 19, 4, 0], true),
    entry("pentanomial-4-3-1", &[64, 4, 3, 1, 0], false),
    entry("pentanomial-7-2-1", &[128, 7, 2, 1, 0], true),
    entry("pentanomial-80-47-9", &[163, 80, 47, 9, 0], true),
    entry("nist-b163", &[163, 7, 6, 3, 0], false),
    entry("trinomial-74", &[233, 74, 0], true),
    entry("trinomial-159", &[233, 159, 0], false),
    entry("nist-b283", &[283, 12, 7, 5, 0], true),
    entry("trinomial-87", &[409, 87, 0], true),
    entry("nist-b571", &[571, 10, 5, 2, 0], true),
];

/// All catalog entries, ascending by degree.
pub fn nist_polynomials() -> &'static [NamedPoly] {
    CATALOG
}

/// Catalog lookup by degree and optional entry name. Unlisted degrees
/// return `None`.
pub fn lookup(m: usize, name: Option<&str>) -> Option<IrreduciblePoly> {
    CATALOG
        .iter()
        .find(|e| e.degree() == m && name.map_or(e.default, |n| e.name == n))
        .map(NamedPoly::poly)
}

/// Warns when `p` is not a catalog entry, since irreducibility of
/// user-supplied polynomials is never checked.
pub fn warn_if_uncataloged(p: &IrreduciblePoly) {
    let exps = p.exponents();
    if !CATALOG.iter().any(|e| e.exponents == exps.as_slice()) {
        warn!("P(x) = {p} is not in the catalog; irreducibility is assumed, not verified");
    }
}
