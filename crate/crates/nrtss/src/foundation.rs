//! Sorted atoms, finite permutations and finitely supported renamings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Name of an atom sort, e.g. `ch`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSort(Arc<str>);

impl AtomSort {
    pub fn new(name: &str) -> Self {
        AtomSort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for AtomSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for AtomSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The sort used when an atom is written as a bare letter.
pub const DEFAULT_ATOM_SORT: &str = "ch";

/// An atom: a sort together with an index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    sort: AtomSort,
    index: u32,
}

impl Atom {
    pub fn new(sort: AtomSort, index: u32) -> Self {
        Atom { sort, index }
    }

    /// Atom of the default sort `ch`.
    pub fn ch(index: u32) -> Self {
        Atom::new(AtomSort::new(DEFAULT_ATOM_SORT), index)
    }

    pub fn sort(&self) -> &AtomSort {
        &self.sort
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Atoms of sort `ch` with index below 26 print as letters `a`..`z`.
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sort.name() == DEFAULT_ATOM_SORT && self.index < 26 {
            write!(f, "{}", (b'a' + self.index as u8) as char)
        } else {
            write!(f, "{}:{}", self.sort, self.index)
        }
    }
}

/// Smallest-index atom of `sort` not in `avoid`.
pub fn fresh_atom(sort: &AtomSort, avoid: &BTreeSet<Atom>) -> Atom {
    let mut i = 0;
    loop {
        let a = Atom::new(sort.clone(), i);
        if !avoid.contains(&a) {
            return a;
        }
        i += 1;
    }
}

/// The `n` smallest-index atoms of `sort` not in `avoid`.
pub fn fresh_atoms(sort: &AtomSort, avoid: &BTreeSet<Atom>, n: usize) -> Vec<Atom> {
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while out.len() < n {
        let a = Atom::new(sort.clone(), i);
        if !avoid.contains(&a) {
            out.push(a);
        }
        i += 1;
    }
    out
}

fn check_sort(a: &Atom, b: &Atom) -> Result<()> {
    if a.sort != b.sort {
        return Err(Error::SortMismatch(format!(
            "atoms {a} and {b} have different sorts"
        )));
    }
    Ok(())
}

/// A sort-preserving bijection on atoms that moves finitely many atoms.
///
/// Only non-identity entries are stored; the inverse is kept alongside.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Permutation {
    fwd: BTreeMap<Atom, Atom>,
    inv: BTreeMap<Atom, Atom>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// The transposition `(a b)`.
    pub fn swap(a: &Atom, b: &Atom) -> Result<Self> {
        check_sort(a, b)?;
        let mut p = Self::identity();
        if a != b {
            p.fwd.insert(a.clone(), b.clone());
            p.fwd.insert(b.clone(), a.clone());
            p.inv = p.fwd.clone();
        }
        Ok(p)
    }

    /// Builds a permutation from `(x, π x)` pairs. Fails unless the pairs
    /// describe a sort-preserving bijection on their atoms.
    pub fn from_pairs<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<Self> {
        let mut fwd = BTreeMap::new();
        let mut inv = BTreeMap::new();
        for (x, y) in pairs {
            check_sort(&x, &y)?;
            if let Some(old) = fwd.insert(x.clone(), y.clone()) {
                if old != y {
                    return Err(Error::NotAPermutation(format!("{x} mapped twice")));
                }
            }
            if let Some(old) = inv.insert(y.clone(), x.clone()) {
                if old != x {
                    return Err(Error::NotAPermutation(format!("{y} hit twice")));
                }
            }
        }
        let dom: BTreeSet<&Atom> = fwd.keys().collect();
        let img: BTreeSet<&Atom> = inv.keys().collect();
        if dom != img {
            return Err(Error::NotAPermutation("domain and image differ".into()));
        }
        fwd.retain(|k, v| k != v);
        inv.retain(|k, v| k != v);
        Ok(Permutation { fwd, inv })
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        self.fwd.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn apply_inv(&self, a: &Atom) -> Atom {
        self.inv.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn inverse(&self) -> Self {
        Permutation {
            fwd: self.inv.clone(),
            inv: self.fwd.clone(),
        }
    }

    /// Diagrammatic composition: `(self.then(q))(a) = q(self(a))`.
    pub fn then(&self, q: &Permutation) -> Self {
        let atoms: BTreeSet<Atom> = self.support().union(&q.support()).cloned().collect();
        let pairs = atoms.into_iter().map(|a| {
            let b = q.apply(&self.apply(&a));
            (a, b)
        });
        Permutation::from_pairs(pairs).expect("composition of permutations")
    }

    pub fn is_identity(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        self.fwd.keys().cloned().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.fwd.iter()
    }

    pub fn act_set(&self, s: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        s.iter().map(|a| self.apply(a)).collect()
    }

    pub fn to_renaming(&self) -> Renaming {
        Renaming {
            map: self.fwd.clone(),
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Cycle notation, `id` for the identity.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        let mut seen = BTreeSet::new();
        for start in self.fwd.keys() {
            if seen.contains(start) {
                continue;
            }
            write!(f, "(")?;
            let mut cur = start.clone();
            let mut first = true;
            loop {
                seen.insert(cur.clone());
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{cur}")?;
                cur = self.apply(&cur);
                if &cur == start {
                    break;
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A sort-preserving map on atoms, identity outside a finite set. Need not
/// be injective.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Renaming {
    map: BTreeMap<Atom, Atom>,
}

impl Renaming {
    pub fn identity() -> Self {
        Self::default()
    }

    /// `[b/a]`: sends `a` to `b`, fixes everything else.
    pub fn replace(a: &Atom, b: &Atom) -> Result<Self> {
        Self::from_pairs([(a.clone(), b.clone())])
    }

    /// Builds a renaming from `(x, ρ x)` pairs; identity pairs are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, y) in pairs {
            check_sort(&x, &y)?;
            if let Some(old) = map.get(&x) {
                if old != &y {
                    return Err(Error::NotAFunction(format!(
                        "{x} sent to both {old} and {y}"
                    )));
                }
            }
            map.insert(x, y);
        }
        map.retain(|k, v| k != v);
        Ok(Renaming { map })
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        self.map.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    /// Diagrammatic composition: `(self.then(r))(a) = r(self(a))`.
    pub fn then(&self, r: &Renaming) -> Self {
        let atoms: BTreeSet<Atom> = self.map.keys().chain(r.map.keys()).cloned().collect();
        let mut map = BTreeMap::new();
        for a in atoms {
            let b = r.apply(&self.apply(&a));
            if a != b {
                map.insert(a, b);
            }
        }
        Renaming { map }
    }

    /// Conjugation `π·ρ = π⁻¹;ρ;π`, i.e. `a ↦ π(ρ(π⁻¹ a))`.
    pub fn conj(&self, p: &Permutation) -> Self {
        let map = self
            .map
            .iter()
            .map(|(k, v)| (p.apply(k), p.apply(v)))
            .collect();
        Renaming { map }
    }

    /// `{a, ρa | ρa ≠ a}`.
    pub fn support(&self) -> BTreeSet<Atom> {
        self.map
            .iter()
            .flat_map(|(k, v)| [k.clone(), v.clone()])
            .collect()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Atom> {
        self.map.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.map.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Returns the permutation this renaming equals, if it is one.
    pub fn as_permutation(&self) -> Option<Permutation> {
        Permutation::from_pairs(self.map.iter().map(|(k, v)| (k.clone(), v.clone()))).ok()
    }
}

impl fmt::Debug for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Prints in the textual term syntax, `{a->b,c->d,}`.
impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in &self.map {
            write!(f, "{k}->{v},")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Atom {
        Atom::ch(0)
    }
    fn b() -> Atom {
        Atom::ch(1)
    }
    fn c() -> Atom {
        Atom::ch(2)
    }

    #[test]
    fn swap_applies_both_ways() {
        let p = Permutation::swap(&a(), &b()).unwrap();
        assert_eq!(p.apply(&a()), b());
        assert_eq!(p.apply(&b()), a());
        assert_eq!(p.apply(&c()), c());
        assert_eq!(p.inverse(), p);
    }

    #[test]
    fn swap_rejects_cross_sort() {
        let x = Atom::new(AtomSort::new("other"), 0);
        assert!(matches!(
            Permutation::swap(&a(), &x),
            Err(Error::SortMismatch(_))
        ));
    }

    #[test]
    fn from_pairs_rejects_non_bijection() {
        assert!(Permutation::from_pairs([(a(), b())]).is_err());
        assert!(Permutation::from_pairs([(a(), b()), (c(), b())]).is_err());
        let p = Permutation::from_pairs([(a(), b()), (b(), c()), (c(), a())]).unwrap();
        assert_eq!(p.apply_inv(&b()), a());
        assert_eq!(p.to_string(), "(a b c)");
    }

    #[test]
    fn renaming_composition_is_diagrammatic() {
        let r1 = Renaming::replace(&a(), &b()).unwrap();
        let r2 = Renaming::replace(&b(), &c()).unwrap();
        let r = r1.then(&r2);
        assert_eq!(r.apply(&a()), c());
        assert_eq!(r.apply(&b()), c());
        assert_eq!(r2.then(&r1).apply(&a()), b());
    }

    #[test]
    fn renaming_support() {
        let r = Renaming::replace(&a(), &b()).unwrap();
        assert_eq!(r.support(), [a(), b()].into_iter().collect());
        assert!(Renaming::replace(&a(), &a()).unwrap().is_identity());
    }

    #[test]
    fn conjugation() {
        // (a b)·[c/a] = [c/b]
        let p = Permutation::swap(&a(), &b()).unwrap();
        let r = Renaming::replace(&a(), &c()).unwrap();
        assert_eq!(r.conj(&p), Renaming::replace(&b(), &c()).unwrap());
    }

    #[test]
    fn fresh_atom_is_least_missing() {
        let s: BTreeSet<Atom> = [a(), c()].into_iter().collect();
        assert_eq!(fresh_atom(a().sort(), &s), b());
        assert_eq!(fresh_atoms(a().sort(), &s, 2), vec![b(), Atom::ch(3)]);
    }

    #[test]
    fn display() {
        assert_eq!(a().to_string(), "a");
        assert_eq!(Atom::ch(30).to_string(), "ch:30");
        assert_eq!(Renaming::replace(&a(), &b()).unwrap().to_string(), "{a->b,}");
    }
}
