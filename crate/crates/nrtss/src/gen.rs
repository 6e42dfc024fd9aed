//! Term enumeration, seeded random generation and a brute-force
//! entailment oracle, used by the property tests, the acceptance suite and
//! the CLI self-test.
//!
//! Depth counts constructor nodes: a constructor whose arguments contain no
//! term of a base sort (such as `null` or `out(a, b, -)` without its
//! continuation) sits at depth 1.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::foundation::{Atom, Renaming};
use crate::freshness::{FreshAssertion, FreshnessEnv};
use crate::nominal::{interpret, NominalTerm};
use crate::terms::{Kind, RawTerm, Signature, Sort, Substitution, Variable};

fn has_base(s: &Sort) -> bool {
    match s {
        Sort::Base(_) => true,
        Sort::Atom(_) => false,
        Sort::Abs(_, b) => has_base(b),
        Sort::Product(ps) => ps.iter().any(has_base),
    }
}

/// Every ground term of `sort` up to `depth` over `atoms`, as nominal terms
/// (so alpha-equivalent terms appear once), sorted.
pub fn enumerate_terms(sig: &Signature, sort: &Sort, atoms: &[Atom], depth: usize) -> Vec<NominalTerm> {
    let mut memo = HashMap::new();
    let mut v: Vec<NominalTerm> = enum_sort(sig, sort, atoms, depth, &mut memo).into_iter().collect();
    v.sort();
    v
}

fn enum_sort(
    sig: &Signature,
    sort: &Sort,
    atoms: &[Atom],
    depth: usize,
    memo: &mut HashMap<(Sort, usize), BTreeSet<NominalTerm>>,
) -> BTreeSet<NominalTerm> {
    if let Some(r) = memo.get(&(sort.clone(), depth)) {
        return r.clone();
    }
    let out: BTreeSet<NominalTerm> = match sort {
        Sort::Atom(s) => atoms
            .iter()
            .filter(|a| a.sort() == s)
            .map(|a| NominalTerm::atom(a.clone()))
            .collect(),
        Sort::Abs(s, body) => {
            let bodies = enum_sort(sig, body, atoms, depth, memo);
            let mut out = BTreeSet::new();
            for a in atoms.iter().filter(|a| a.sort() == s) {
                for b in &bodies {
                    out.insert(NominalTerm::abstraction(a, b));
                }
            }
            out
        }
        Sort::Product(ps) => {
            let mut acc: Vec<Vec<NominalTerm>> = vec![Vec::new()];
            for p in ps.iter() {
                let xs = enum_sort(sig, p, atoms, depth, memo);
                let mut next = Vec::new();
                for prefix in &acc {
                    for x in &xs {
                        let mut v = prefix.clone();
                        v.push(x.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            acc.into_iter().map(NominalTerm::tuple).collect()
        }
        Sort::Base(b) => {
            let mut out = BTreeSet::new();
            if depth > 0 {
                for (f, ty) in sig.constructors_of(b) {
                    for a in enum_sort(sig, &ty.arg, atoms, depth - 1, memo) {
                        out.insert(NominalTerm::app(f, sort.clone(), a));
                    }
                }
            }
            out
        }
    };
    memo.insert((sort.clone(), depth), out.clone());
    out
}

/// A random ground term of `sort` of depth at most `depth` (at least 1 for
/// base sorts).
pub fn random_term<R: Rng>(rng: &mut R, sig: &Signature, sort: &Sort, atoms: &[Atom], depth: usize) -> RawTerm {
    match sort {
        Sort::Atom(s) => {
            let cands: Vec<&Atom> = atoms.iter().filter(|a| a.sort() == s).collect();
            RawTerm::atom((*cands.choose(rng).expect("an atom of every sort")).clone())
        }
        Sort::Abs(s, body) => {
            let cands: Vec<&Atom> = atoms.iter().filter(|a| a.sort() == s).collect();
            let a = (*cands.choose(rng).expect("an atom of every sort")).clone();
            RawTerm::abs(a, random_term(rng, sig, body, atoms, depth))
        }
        Sort::Product(ps) => RawTerm::tuple(ps.iter().map(|p| random_term(rng, sig, p, atoms, depth)).collect()),
        Sort::Base(b) => {
            let all: Vec<(&str, &Sort)> = sig.constructors_of(b).map(|(f, ty)| (f, &ty.arg)).collect();
            let leaves: Vec<(&str, &Sort)> = all.iter().copied().filter(|(_, s)| !has_base(s)).collect();
            let pool = if depth <= 1 && !leaves.is_empty() { &leaves } else { &all };
            let (f, arg) = *pool.choose(rng).expect("a constructor of every base sort");
            RawTerm::app_unchecked(f, sort.clone(), random_term(rng, sig, arg, atoms, depth.saturating_sub(1)))
        }
    }
}

/// A random state for a rule set, as a nominal term.
pub fn random_state<R: Rng>(rng: &mut R, sig: &Signature, sort: &Sort, atoms: &[Atom], depth: usize) -> NominalTerm {
    interpret(&random_term(rng, sig, sort, atoms, depth)).expect("generated terms are ground")
}

/// Signature used for freshness-logic experiments: atom sort `ch`, base
/// sort `t`, with `k : unit → t`, `h : ch → t`, `f : t × t → t` and
/// `g : [ch]t → t`.
pub fn freshness_signature() -> Signature {
    let mut sig = Signature::new();
    sig.add_atom_sort("ch").expect("fresh signature");
    sig.add_base_sort("t").expect("fresh signature");
    let t = Sort::base("t");
    let ch = Sort::atom("ch");
    sig.add_fun("k", Sort::unit(), "t").expect("fresh signature");
    sig.add_fun("h", ch.clone(), "t").expect("fresh signature");
    sig.add_fun("f", Sort::product(vec![t.clone(), t.clone()]), "t").expect("fresh signature");
    sig.add_fun("g", Sort::abs(&crate::foundation::AtomSort::new("ch"), t), "t").expect("fresh signature");
    sig
}

/// Shape limits for random environments.
#[derive(Clone, Debug)]
pub struct EnvShape {
    pub max_assertions: usize,
    pub depth: usize,
    pub atoms: Vec<Atom>,
    pub vars: Vec<Variable>,
}

impl EnvShape {
    /// `n_atoms` channel atoms and `n_vars` variables of sort `t`.
    pub fn new(max_assertions: usize, depth: usize, n_atoms: u32, n_vars: usize) -> Self {
        EnvShape {
            max_assertions,
            depth,
            atoms: (0..n_atoms).map(Atom::ch).collect(),
            vars: (0..n_vars)
                .map(|i| Variable::new(&format!("x{}", i + 1), Sort::base("t")))
                .collect(),
        }
    }
}

fn random_renaming<R: Rng>(rng: &mut R, atoms: &[Atom]) -> Renaming {
    let n = rng.gen_range(0..=2);
    let mut m = BTreeMap::new();
    for _ in 0..n {
        let a = atoms.choose(rng).expect("atoms").clone();
        let b = atoms.choose(rng).expect("atoms").clone();
        m.insert(a, b);
    }
    Renaming::from_pairs(m).expect("same sort")
}

/// A random term of sort `t` over the freshness signature, with variables
/// and moderations.
pub fn random_open_term<R: Rng>(rng: &mut R, shape: &EnvShape, depth: usize) -> RawTerm {
    let t = Sort::base("t");
    let atom = |rng: &mut R| RawTerm::atom(shape.atoms.choose(rng).expect("atoms").clone());
    let leaf = |rng: &mut R| -> RawTerm {
        match rng.gen_range(0..4) {
            0 => RawTerm::app_unchecked("k", t.clone(), RawTerm::unit()),
            1 => RawTerm::app_unchecked("h", t.clone(), atom(rng)),
            2 if !shape.vars.is_empty() => RawTerm::var(shape.vars.choose(rng).expect("vars").clone()),
            _ if !shape.vars.is_empty() => RawTerm::moderated(
                RawTerm::var(shape.vars.choose(rng).expect("vars").clone()),
                random_renaming(rng, &shape.atoms),
            ),
            _ => RawTerm::app_unchecked("k", t.clone(), RawTerm::unit()),
        }
    };
    if depth <= 1 {
        return leaf(rng);
    }
    match rng.gen_range(0..5) {
        0 => leaf(rng),
        1 => RawTerm::app_unchecked(
            "f",
            t.clone(),
            RawTerm::tuple(vec![random_open_term(rng, shape, depth - 1), random_open_term(rng, shape, depth - 1)]),
        ),
        2 => {
            let a = shape.atoms.choose(rng).expect("atoms").clone();
            RawTerm::app_unchecked("g", t.clone(), RawTerm::abs(a, random_open_term(rng, shape, depth - 1)))
        }
        3 => RawTerm::moderated(random_open_term(rng, shape, depth - 1), random_renaming(rng, &shape.atoms)),
        _ => RawTerm::app_unchecked("h", t.clone(), atom(rng)),
    }
}

/// A random environment: each assertion constrains a term of sort `t`, an
/// atom, or a pair or abstraction built from one.
pub fn random_env<R: Rng>(rng: &mut R, shape: &EnvShape) -> FreshnessEnv {
    let n = rng.gen_range(0..=shape.max_assertions);
    let mut out = Vec::new();
    for _ in 0..n {
        let a = shape.atoms.choose(rng).expect("atoms").clone();
        let d = rng.gen_range(1..=shape.depth.max(1));
        let t = random_open_term(rng, shape, d);
        let term = match rng.gen_range(0..6) {
            0 => RawTerm::atom(shape.atoms.choose(rng).expect("atoms").clone()),
            1 => RawTerm::tuple(vec![RawTerm::atom(shape.atoms.choose(rng).expect("atoms").clone()), t]),
            2 => RawTerm::abs(shape.atoms.choose(rng).expect("atoms").clone(), t),
            _ => t,
        };
        out.push(FreshAssertion::new(a, term));
    }
    out.into_iter().collect()
}

/// An environment built by weakening assertions of `env`, so that it is
/// often, but not always, entailed by it: `a≉s` becomes `a≉f(s, u)`,
/// `a≉g([c]s)`, `a≉g([a]u)`, `a≉(c, s)` or `a≉s` under a renaming.
pub fn random_consequence<R: Rng>(rng: &mut R, shape: &EnvShape, env: &FreshnessEnv) -> FreshnessEnv {
    let base: Vec<&FreshAssertion> = env.iter().collect();
    if base.is_empty() {
        return random_env(rng, shape);
    }
    let t = Sort::base("t");
    let n = rng.gen_range(1..=3);
    let mut out = Vec::new();
    for _ in 0..n {
        let a = (*base.choose(rng).expect("nonempty")).clone();
        let c = shape.atoms.choose(rng).expect("atoms").clone();
        let as_t = |s: RawTerm| -> RawTerm {
            if s.sort() == &t {
                s
            } else {
                RawTerm::app_unchecked("k", t.clone(), RawTerm::unit())
            }
        };
        let u = random_open_term(rng, shape, 2);
        let term = match rng.gen_range(0..6) {
            0 => RawTerm::app_unchecked("f", t.clone(), RawTerm::tuple(vec![as_t(a.term.clone()), u])),
            1 => RawTerm::app_unchecked("g", t.clone(), RawTerm::abs(c, as_t(a.term.clone()))),
            2 => RawTerm::app_unchecked("g", t.clone(), RawTerm::abs(a.atom.clone(), u)),
            3 => RawTerm::tuple(vec![RawTerm::atom(c), a.term.clone()]),
            4 => RawTerm::moderated(as_t(a.term.clone()), random_renaming(rng, &shape.atoms)),
            _ => a.term.clone(),
        };
        out.push(FreshAssertion::new(a.atom, term));
    }
    out.into_iter().collect()
}

/// Brute-force entailment: searches the ground substitutions mapping each
/// variable to one of `grounds` for one under which `env1` holds and `env2`
/// fails.
pub struct EntailmentOracle {
    vars: Vec<Variable>,
    grounds: Vec<RawTerm>,
    cache: HashMap<FreshAssertion, Vec<bool>>,
}

impl EntailmentOracle {
    /// Ground instances are the terms of sort `t` of depth at most `depth`
    /// over the shape's atoms.
    pub fn new(shape: &EnvShape, depth: usize) -> Self {
        let sig = freshness_signature();
        let grounds = enumerate_terms(&sig, &Sort::base("t"), &shape.atoms, depth)
            .into_iter()
            .map(|n| n.representative_avoiding(&BTreeSet::new()))
            .collect();
        EntailmentOracle {
            vars: shape.vars.clone(),
            grounds,
            cache: HashMap::new(),
        }
    }

    pub fn instances(&self) -> usize {
        self.grounds.len().pow(self.vars.len() as u32)
    }

    fn substitution(&self, mut k: usize) -> Substitution {
        let mut phi = Substitution::new();
        for v in &self.vars {
            let i = k % self.grounds.len();
            k /= self.grounds.len();
            phi.insert(v.clone(), self.grounds[i].clone()).expect("sorted instance");
        }
        phi
    }

    /// Truth of `a` under every instance, indexed like [`Self::substitution`].
    fn table(&mut self, a: &FreshAssertion) -> &Vec<bool> {
        if !self.cache.contains_key(a) {
            let used = a.term.vars();
            let n = self.instances();
            let mut out = vec![false; n];
            // evaluate once per assignment of the variables that occur
            let mut seen: HashMap<Vec<usize>, bool> = HashMap::new();
            for (k, slot) in out.iter_mut().enumerate() {
                let mut key = Vec::new();
                let mut kk = k;
                for v in &self.vars {
                    let i = kk % self.grounds.len();
                    kk /= self.grounds.len();
                    if used.contains(v) {
                        key.push(i);
                    }
                }
                *slot = match seen.get(&key) {
                    Some(b) => *b,
                    None => {
                        let phi = self.substitution(k);
                        let t = a.term.substitute(&phi);
                        let b = interpret(&t).map(|n| n.is_fresh(&a.atom)).unwrap_or(false);
                        seen.insert(key, b);
                        b
                    }
                };
            }
            self.cache.insert(a.clone(), out);
        }
        &self.cache[a]
    }

    fn holds(&mut self, env: &FreshnessEnv) -> Vec<bool> {
        let mut acc = vec![true; self.instances()];
        for a in env.iter() {
            let t = self.table(a);
            for (x, y) in acc.iter_mut().zip(t) {
                *x &= *y;
            }
        }
        acc
    }

    /// A ground substitution satisfying `env1` but not `env2`, if any.
    pub fn counterexample(&mut self, env1: &FreshnessEnv, env2: &FreshnessEnv) -> Option<Substitution> {
        let h1 = self.holds(env1);
        let h2 = self.holds(env2);
        let k = h1.iter().zip(&h2).position(|(a, b)| *a && !*b)?;
        Some(self.substitution(k))
    }
}

/// Whether every assertion of a normal form has a reduced shape.
pub fn reduced_shapes(env: &FreshnessEnv) -> bool {
    env.iter().all(|a| {
        a.is_reduced()
            && match a.term.kind() {
                Kind::Atom(b) => b == &a.atom,
                _ => true,
            }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_counts() {
        let n = calculi::early_pi();
        let atoms = [Atom::ch(0)];
        // depth 1: null
        assert_eq!(enumerate_terms(&n.signature, &n.state_sort, &atoms, 1).len(), 1);
        // depth 2 over one atom: null, tau, rep, new, sum, par, in(a,[a]null), out(a,a,null)
        assert_eq!(enumerate_terms(&n.signature, &n.state_sort, &atoms, 2).len(), 8);
    }

    #[test]
    fn alpha_variants_enumerate_once() {
        let n = calculi::early_pi();
        let atoms = [Atom::ch(0), Atom::ch(1)];
        let ts = enumerate_terms(&n.signature, &n.state_sort, &atoms, 2);
        let news: Vec<_> = ts.iter().filter(|t| t.as_app().is_some_and(|(f, _)| f == "new")).collect();
        assert_eq!(news.len(), 1);
    }

    #[test]
    fn random_terms_respect_depth() {
        let n = calculi::late_pi();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let atoms = [Atom::ch(0), Atom::ch(1)];
        for _ in 0..50 {
            let t = random_term(&mut rng, &n.signature, &n.state_sort, &atoms, 3);
            n.signature.check_term(&t).unwrap();
            assert!(t.is_ground());
        }
    }

    #[test]
    fn oracle_finds_counterexample() {
        let shape = EnvShape::new(3, 2, 2, 1);
        let mut o = EntailmentOracle::new(&shape, 2);
        let x = RawTerm::var(shape.vars[0].clone());
        let a = Atom::ch(0);
        let e1: FreshnessEnv = FreshnessEnv::new();
        let e2: FreshnessEnv = [FreshAssertion::new(a.clone(), x.clone())].into_iter().collect();
        assert!(o.counterexample(&e1, &e2).is_some());
        assert!(o.counterexample(&e2, &e2).is_none());
    }
}
