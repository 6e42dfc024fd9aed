//! Freshness environments: simplification to normal form, consistency,
//! entailment and ground satisfaction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::foundation::{Atom, Permutation, Renaming};
use crate::nominal::interpret;
use crate::terms::{Kind, RawTerm, Substitution};

/// `a ≉ t`: atom `a` is fresh for term `t`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreshAssertion {
    pub atom: Atom,
    pub term: RawTerm,
}

impl FreshAssertion {
    pub fn new(atom: Atom, term: RawTerm) -> Self {
        FreshAssertion { atom, term }
    }

    /// Reduced shapes: `a≉a`, `a≉x` and `a≉x[ρ]`.
    pub fn is_reduced(&self) -> bool {
        match self.term.kind() {
            Kind::Atom(b) => b == &self.atom,
            Kind::Var(_) => true,
            Kind::Moderated(t, _) => matches!(t.kind(), Kind::Var(_)),
            _ => false,
        }
    }

    pub fn is_inconsistent(&self) -> bool {
        matches!(self.term.kind(), Kind::Atom(b) if b == &self.atom)
    }

    pub fn substitute(&self, phi: &Substitution) -> FreshAssertion {
        FreshAssertion::new(self.atom.clone(), self.term.substitute(phi))
    }

    /// One rewrite step. `None` when the assertion is already reduced.
    pub fn step(&self) -> Option<Vec<FreshAssertion>> {
        let a = &self.atom;
        let mk = |t: RawTerm| FreshAssertion::new(a.clone(), t);
        match self.term.kind() {
            Kind::Var(_) => None,
            Kind::Atom(b) => (a != b).then(Vec::new),
            Kind::Abs(b, t) => Some(if a == b { Vec::new() } else { vec![mk(t.clone())] }),
            Kind::Tuple(ts) => Some(ts.iter().cloned().map(mk).collect()),
            Kind::App(_, t) => Some(vec![mk(t.clone())]),
            Kind::Moderated(t, r) => match t.kind() {
                Kind::Var(_) => None,
                Kind::Atom(b) => Some(vec![mk(RawTerm::atom(r.apply(b)))]),
                Kind::Moderated(t1, r1) => {
                    Some(vec![mk(RawTerm::moderated(t1.clone(), r1.then(r)))])
                }
                Kind::Abs(b, t1) => Some(vec![mk(RawTerm::abs(
                    r.apply(b),
                    RawTerm::moderated(t1.clone(), r.clone()),
                ))]),
                Kind::Tuple(ts) => Some(
                    ts.iter()
                        .map(|ti| mk(RawTerm::moderated(ti.clone(), r.clone())))
                        .collect(),
                ),
                Kind::App(_, t1) => Some(vec![mk(RawTerm::moderated(t1.clone(), r.clone()))]),
            },
        }
    }

    /// `a ≉ x[ι]` for `a ≉ x`; other assertions unchanged.
    fn widened(&self) -> FreshAssertion {
        match self.term.kind() {
            Kind::Var(_) => FreshAssertion::new(
                self.atom.clone(),
                RawTerm::moderated(self.term.clone(), Renaming::identity()),
            ),
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for FreshAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FreshAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} # {}", self.atom, self.term)
    }
}

/// A finite set of freshness assertions.
#[derive(Clone, Default)]
pub struct FreshnessEnv {
    set: BTreeSet<FreshAssertion>,
    nf: OnceLock<Arc<FreshnessEnv>>,
}

impl PartialEq for FreshnessEnv {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set
    }
}

impl Eq for FreshnessEnv {}

impl std::hash::Hash for FreshnessEnv {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.set.hash(state)
    }
}

impl FromIterator<FreshAssertion> for FreshnessEnv {
    fn from_iter<I: IntoIterator<Item = FreshAssertion>>(iter: I) -> Self {
        FreshnessEnv {
            set: iter.into_iter().collect(),
            nf: OnceLock::new(),
        }
    }
}

impl FreshnessEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FreshAssertion> {
        self.set.iter()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn contains(&self, a: &FreshAssertion) -> bool {
        self.set.contains(a)
    }

    pub fn union(&self, other: &FreshnessEnv) -> FreshnessEnv {
        self.set.iter().chain(other.set.iter()).cloned().collect()
    }

    pub fn with(&self, a: FreshAssertion) -> FreshnessEnv {
        self.set.iter().cloned().chain([a]).collect()
    }

    pub fn substitute(&self, phi: &Substitution) -> FreshnessEnv {
        self.set.iter().map(|a| a.substitute(phi)).collect()
    }

    /// Total size of the terms, used to bound rewriting.
    pub fn size(&self) -> usize {
        self.set.iter().map(|a| a.term.size() + 1).sum()
    }

    pub fn is_normal(&self) -> bool {
        self.set.iter().all(|a| a.is_reduced())
    }

    /// The normal form, cached on this value.
    pub fn normal_form(&self) -> Arc<FreshnessEnv> {
        self.nf
            .get_or_init(|| Arc::new(simplify_with(self, |n| n - 1).0))
            .clone()
    }
}

impl fmt::Debug for FreshnessEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FreshnessEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.set.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {a}")?;
        }
        write!(f, " }}")
    }
}

/// Rewrites to normal form. `pick(n)` chooses which of the `n` pending
/// assertions to rewrite next. Returns the normal form and the number of
/// rewrite steps taken.
pub fn simplify_with<F: FnMut(usize) -> usize>(
    env: &FreshnessEnv,
    mut pick: F,
) -> (FreshnessEnv, usize) {
    let mut pending: Vec<FreshAssertion> = env.set.iter().cloned().collect();
    let mut done = BTreeSet::new();
    let mut steps = 0;
    while !pending.is_empty() {
        let i = pick(pending.len()).min(pending.len() - 1);
        let a = pending.swap_remove(i);
        match a.step() {
            None => {
                done.insert(a);
            }
            Some(next) => {
                steps += 1;
                pending.extend(next);
            }
        }
    }
    (
        FreshnessEnv {
            set: done,
            nf: OnceLock::new(),
        },
        steps,
    )
}

pub fn simplify(env: &FreshnessEnv) -> FreshnessEnv {
    (*env.normal_form()).clone()
}

pub fn is_consistent(env: &FreshnessEnv) -> bool {
    !env.normal_form().iter().any(|a| a.is_inconsistent())
}

/// Replaces each `a≉x` of a normal form by `a≉x[ι]`.
pub fn widen(env: &FreshnessEnv) -> Result<FreshnessEnv> {
    if let Some(a) = env.iter().find(|a| !a.is_reduced()) {
        return Err(Error::NotNormal(a.to_string()));
    }
    Ok(env.iter().map(|a| a.widened()).collect())
}

/// A permutation `π` with `π a1 = a2` and `ρ1;π = ρ2`, if one exists.
pub fn find_mediator(a1: &Atom, r1: &Renaming, a2: &Atom, r2: &Renaming) -> Option<Permutation> {
    let s: BTreeSet<Atom> = r1.support().union(&r2.support()).cloned().collect();
    let mut pairs: Vec<(Atom, Atom)> = s.iter().map(|b| (r1.apply(b), r2.apply(b))).collect();
    pairs.push((a1.clone(), a2.clone()));
    let mut fwd: BTreeMap<Atom, Atom> = BTreeMap::new();
    let mut bwd: BTreeMap<Atom, Atom> = BTreeMap::new();
    for (x, y) in pairs {
        if x.sort() != y.sort() {
            return None;
        }
        // π is the identity outside S, in both directions
        if (!s.contains(&x) || !s.contains(&y)) && x != y {
            return None;
        }
        if fwd.get(&x).is_some_and(|y0| y0 != &y) || bwd.get(&y).is_some_and(|x0| x0 != &x) {
            return None;
        }
        fwd.insert(x.clone(), y.clone());
        bwd.insert(y, x);
    }
    // pair the unconstrained atoms of S with the unused images, sort by sort
    let free_dom: Vec<&Atom> = s.iter().filter(|a| !fwd.contains_key(*a)).collect();
    let mut free_img: Vec<&Atom> = s.iter().filter(|a| !bwd.contains_key(*a)).collect();
    let mut extra = Vec::new();
    for x in free_dom {
        let j = free_img.iter().position(|y| y.sort() == x.sort())?;
        let y = free_img.remove(j);
        extra.push((x.clone(), y.clone()));
    }
    let p = Permutation::from_pairs(fwd.into_iter().chain(extra)).ok()?;
    let ok = p.apply(a1) == *a2 && s.iter().all(|b| p.apply(&r1.apply(b)) == r2.apply(b));
    ok.then_some(p)
}

/// `env1 ⊢ env2`.
pub fn entails(env1: &FreshnessEnv, env2: &FreshnessEnv) -> bool {
    entails_witness(env1, env2).is_some()
}

/// Like [`entails`], returning for each assertion of the widened normal form
/// of `env2` the assertion of `env1` and the mediator that discharge it.
pub fn entails_witness(
    env1: &FreshnessEnv,
    env2: &FreshnessEnv,
) -> Option<Vec<(FreshAssertion, FreshAssertion, Permutation)>> {
    if !is_consistent(env1) {
        return Some(Vec::new());
    }
    let nf2 = env2.normal_form();
    if nf2.iter().any(|a| a.is_inconsistent()) {
        return None;
    }
    let w1 = widen(&env1.normal_form()).expect("normal form");
    let w2 = widen(&nf2).expect("normal form");
    let mut out = Vec::new();
    for goal in w2.iter() {
        let Kind::Moderated(x, r1) = goal.term.kind() else {
            unreachable!("consistent widened normal forms are moderated variables")
        };
        let found = w1.iter().find_map(|hyp| {
            let Kind::Moderated(x2, r2) = hyp.term.kind() else {
                return None;
            };
            if x2 != x {
                return None;
            }
            find_mediator(&goal.atom, r1, &hyp.atom, r2).map(|p| (hyp.clone(), p))
        })?;
        out.push((goal.clone(), found.0, found.1));
    }
    Some(out)
}

/// Whether `a` is fresh for the nominal term denoted by ground `t`.
pub fn holds_ground(a: &Atom, t: &RawTerm) -> Result<bool> {
    Ok(interpret(t)?.is_fresh(a))
}

/// Whether `φ(env)` holds; `φ` must close every term of `env`.
pub fn env_holds(env: &FreshnessEnv, phi: &Substitution) -> Result<bool> {
    for a in env.iter() {
        if !holds_ground(&a.atom, &a.term.substitute(phi))? {
            return Ok(false);
        }
    }
    Ok(true)
}
