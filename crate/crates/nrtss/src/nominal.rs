//! Nominal terms: ground terms up to alpha-equivalence, with moderations
//! discharged.
//!
//! A nominal term is stored as a canonical raw representative. The binder of
//! each abstraction is the least atom of its sort outside the support of the
//! abstraction, so alpha-equivalent terms have identical representatives and
//! equality is structural.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::foundation::{fresh_atom, Atom, Permutation};
use crate::terms::{Kind, RawTerm, Sort};

#[derive(Clone)]
pub struct NominalTerm {
    tree: RawTerm,
    supp: Arc<BTreeSet<Atom>>,
    hint: Option<RawTerm>,
}

impl PartialEq for NominalTerm {
    fn eq(&self, other: &Self) -> bool {
        self.tree == other.tree
    }
}

impl Eq for NominalTerm {}

impl Hash for NominalTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tree.hash(state)
    }
}

impl PartialOrd for NominalTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NominalTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tree.cmp(&other.tree)
    }
}

/// Support of a moderation-free ground raw term up to alpha-equivalence.
fn nsupp(t: &RawTerm) -> Arc<BTreeSet<Atom>> {
    t.nsupp_slot()
        .get_or_init(|| {
            Arc::new(match t.kind() {
                Kind::Var(_) => BTreeSet::new(),
                Kind::Atom(a) => [a.clone()].into_iter().collect(),
                Kind::Moderated(..) => unreachable!("moderations are discharged before canonicalising"),
                Kind::Abs(a, s) => {
                    let mut out = (*nsupp(s)).clone();
                    out.remove(a);
                    out
                }
                Kind::App(_, s) => return nsupp(s),
                Kind::Tuple(ts) => {
                    let mut out = BTreeSet::new();
                    for s in ts {
                        out.extend(nsupp(s).iter().cloned());
                    }
                    out
                }
            })
        })
        .clone()
}

/// Whether every binder of a moderation-free term is the least atom fresh
/// for its abstraction.
fn is_canonical(t: &RawTerm) -> bool {
    *t.canonical_slot().get_or_init(|| match t.kind() {
        Kind::Var(_) | Kind::Atom(_) => true,
        Kind::Moderated(..) => false,
        Kind::Abs(a, s) => *a == fresh_atom(a.sort(), &nsupp(t)) && is_canonical(s),
        Kind::App(_, s) => is_canonical(s),
        Kind::Tuple(ts) => ts.iter().all(is_canonical),
    })
}

/// Canonical representative of `π·t`.
fn canon(t: &RawTerm, p: &Permutation) -> RawTerm {
    if is_canonical(t) && (p.is_identity() || nsupp(t).iter().all(|a| p.apply(a) == *a)) {
        return t.clone();
    }
    match t.kind() {
        Kind::Var(_) => t.clone(),
        Kind::Atom(a) => RawTerm::atom(p.apply(a)),
        Kind::Moderated(..) => unreachable!("moderations are discharged before canonicalising"),
        Kind::Abs(a, body) => {
            let mut free = (*nsupp(body)).clone();
            free.remove(a);
            let free = p.act_set(&free);
            let c = fresh_atom(a.sort(), &free);
            let pa = p.apply(a);
            let p2 = p.then(&Permutation::swap(&pa, &c).expect("same sort"));
            RawTerm::abs(c, canon(body, &p2))
        }
        Kind::App(f, s) => RawTerm::app_unchecked(f, t.sort().clone(), canon(s, p)),
        Kind::Tuple(ts) => RawTerm::tuple(ts.iter().map(|s| canon(s, p)).collect()),
    }
}

/// Pushes every moderation through with the syntactic renaming action.
fn discharge(t: &RawTerm) -> RawTerm {
    if !t.has_moderation() {
        return t.clone();
    }
    match t.kind() {
        Kind::Var(_) | Kind::Atom(_) => t.clone(),
        Kind::Moderated(s, r) => discharge(&s.ren_act(r)),
        Kind::Abs(a, s) => RawTerm::abs(a.clone(), discharge(s)),
        Kind::App(f, s) => RawTerm::app_unchecked(f, t.sort().clone(), discharge(s)),
        Kind::Tuple(ts) => RawTerm::tuple(ts.iter().map(discharge).collect()),
    }
}

/// The nominal term denoted by a ground raw term.
pub fn interpret(t: &RawTerm) -> Result<NominalTerm> {
    if !t.is_ground() {
        return Err(Error::NotGround(t.to_string()));
    }
    let d = discharge(t);
    let mut n = NominalTerm::from_tree(canon(&d, &Permutation::identity()));
    n.hint = Some(d);
    Ok(n)
}

impl NominalTerm {
    fn from_tree(tree: RawTerm) -> Self {
        let supp = nsupp(&tree);
        NominalTerm {
            tree,
            supp,
            hint: None,
        }
    }

    /// The canonical raw representative.
    pub fn raw(&self) -> &RawTerm {
        &self.tree
    }

    pub fn sort(&self) -> &Sort {
        self.tree.sort()
    }

    pub fn kind(&self) -> &Kind {
        self.tree.kind()
    }

    pub fn support(&self) -> &BTreeSet<Atom> {
        &self.supp
    }

    pub fn is_fresh(&self, a: &Atom) -> bool {
        !self.supp.contains(a)
    }

    pub fn atom(a: Atom) -> Self {
        Self::from_tree(RawTerm::atom(a))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        self.tree.as_atom()
    }

    pub fn perm(&self, p: &Permutation) -> NominalTerm {
        if p.is_identity() {
            return self.clone();
        }
        let mut n = Self::from_tree(canon(&self.tree, p));
        n.hint = self.hint.as_ref().map(|h| h.perm_act(p));
        n
    }

    pub fn tuple(parts: Vec<NominalTerm>) -> NominalTerm {
        // subterms of canonical trees are canonical, and so are tuples of them
        Self::from_tree(RawTerm::tuple(parts.into_iter().map(|p| p.tree).collect()))
    }

    /// `f(t)` with an explicit result sort.
    pub fn app(f: &str, result: Sort, t: NominalTerm) -> NominalTerm {
        Self::from_tree(RawTerm::app_unchecked(f, result, t.tree))
    }

    /// `⟨a⟩t`.
    pub fn abstraction(a: &Atom, t: &NominalTerm) -> NominalTerm {
        Self::from_tree(canon(
            &RawTerm::abs(a.clone(), t.tree.clone()),
            &Permutation::identity(),
        ))
    }

    /// Components of a tuple.
    pub fn components(&self) -> Option<Vec<NominalTerm>> {
        match self.tree.kind() {
            Kind::Tuple(ts) => Some(ts.iter().cloned().map(Self::from_tree).collect()),
            _ => None,
        }
    }

    /// Head symbol and argument of an application.
    pub fn as_app(&self) -> Option<(&str, NominalTerm)> {
        let (f, t) = self.tree.as_app()?;
        Some((f, Self::from_tree(t.clone())))
    }

    /// Head symbol and arguments, flattening a tuple argument.
    pub fn app_args(&self) -> Option<(&str, Vec<NominalTerm>)> {
        let (f, args) = self.tree.app_args()?;
        Some((f, args.into_iter().cloned().map(Self::from_tree).collect()))
    }

    /// Binder and body of the canonical representative of an abstraction.
    pub fn as_abs(&self) -> Option<(&Atom, NominalTerm)> {
        match self.tree.kind() {
            Kind::Abs(a, s) => Some((a, Self::from_tree(s.clone()))),
            _ => None,
        }
    }

    /// Concretion `⟨a⟩s @ b`, defined when `b` is fresh for the abstraction
    /// (or is its own binder). Yields `(b a)·s`.
    pub fn concrete(&self, b: &Atom) -> Result<NominalTerm> {
        let Kind::Abs(a, s) = self.tree.kind() else {
            return Err(Error::IllSorted(format!("concretion of non-abstraction {self}")));
        };
        if a.sort() != b.sort() {
            return Err(Error::SortMismatch(format!("concretion of {self} at {b}")));
        }
        if b != a && self.supp.contains(b) {
            return Err(Error::UnsoundConcretion(format!("{b} is not fresh for {self}")));
        }
        let p = Permutation::swap(a, b).expect("same sort");
        Ok(Self::from_tree(canon(s, &p)))
    }

    /// A raw representative whose binders are pairwise distinct and avoid
    /// both `avoid` and the free atoms of the term.
    pub fn representative_avoiding(&self, avoid: &BTreeSet<Atom>) -> RawTerm {
        let mut used: BTreeSet<Atom> = avoid.union(&self.supp).cloned().collect();
        fn go(t: &RawTerm, p: &Permutation, used: &mut BTreeSet<Atom>) -> RawTerm {
            match t.kind() {
                Kind::Var(_) => t.clone(),
                Kind::Atom(a) => RawTerm::atom(p.apply(a)),
                Kind::Moderated(..) => unreachable!(),
                Kind::Abs(a, body) => {
                    let e = fresh_atom(a.sort(), used);
                    used.insert(e.clone());
                    let pa = p.apply(a);
                    let p2 = p.then(&Permutation::swap(&pa, &e).expect("same sort"));
                    RawTerm::abs(e, go(body, &p2, used))
                }
                Kind::App(f, s) => RawTerm::app_unchecked(f, t.sort().clone(), go(s, p, used)),
                Kind::Tuple(ts) => RawTerm::tuple(ts.iter().map(|s| go(s, p, used)).collect()),
            }
        }
        go(&self.tree, &Permutation::identity(), &mut used)
    }

    /// A representative for display: the binders the term was written with,
    /// when known, otherwise pairwise distinct binders.
    pub fn display_alpha(&self) -> String {
        match &self.hint {
            Some(h) => h.to_string(),
            None => self.representative_avoiding(&BTreeSet::new()).to_string(),
        }
    }
}

impl fmt::Debug for NominalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.tree, f)
    }
}

impl fmt::Display for NominalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.tree, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::Renaming;
    use crate::terms::Variable;

    fn a() -> Atom {
        Atom::ch(0)
    }
    fn b() -> Atom {
        Atom::ch(1)
    }
    fn c() -> Atom {
        Atom::ch(2)
    }
    fn at(x: Atom) -> RawTerm {
        RawTerm::atom(x)
    }

    #[test]
    fn alpha_equivalent_terms_are_equal() {
        let t1 = RawTerm::abs(a(), RawTerm::tuple(vec![at(a()), at(c())]));
        let t2 = RawTerm::abs(b(), RawTerm::tuple(vec![at(b()), at(c())]));
        assert_eq!(interpret(&t1).unwrap(), interpret(&t2).unwrap());
        let t3 = RawTerm::abs(a(), RawTerm::tuple(vec![at(c()), at(c())]));
        assert_ne!(interpret(&t1).unwrap(), interpret(&t3).unwrap());
    }

    #[test]
    fn nested_binders_canonicalise() {
        // [a][b](a,b) and [b][a](b,a)
        let t1 = RawTerm::abs(a(), RawTerm::abs(b(), RawTerm::tuple(vec![at(a()), at(b())])));
        let t2 = RawTerm::abs(b(), RawTerm::abs(a(), RawTerm::tuple(vec![at(b()), at(a())])));
        let t3 = RawTerm::abs(a(), RawTerm::abs(b(), RawTerm::tuple(vec![at(b()), at(a())])));
        assert_eq!(interpret(&t1).unwrap(), interpret(&t2).unwrap());
        assert_ne!(interpret(&t1).unwrap(), interpret(&t3).unwrap());
    }

    #[test]
    fn support_excludes_bound() {
        let t = RawTerm::abs(a(), RawTerm::tuple(vec![at(a()), at(b())]));
        let n = interpret(&t).unwrap();
        assert_eq!(n.support(), &[b()].into_iter().collect());
        assert!(n.is_fresh(&a()));
    }

    #[test]
    fn moderation_is_discharged_syntactically() {
        let r = Renaming::replace(&b(), &c()).unwrap();
        let t = RawTerm::moderated(RawTerm::tuple(vec![at(a()), at(b())]), r);
        let n = interpret(&t).unwrap();
        assert_eq!(n, interpret(&RawTerm::tuple(vec![at(a()), at(c())])).unwrap());
        // binders are renamed too, so [b]b with b->c is [c]c
        let r = Renaming::replace(&b(), &c()).unwrap();
        let t = RawTerm::moderated(RawTerm::abs(b(), at(b())), r);
        assert_eq!(
            interpret(&t).unwrap(),
            interpret(&RawTerm::abs(a(), at(a()))).unwrap()
        );
    }

    #[test]
    fn interpret_rejects_open_terms() {
        let x = RawTerm::var(Variable::new("x", Sort::atom("ch")));
        assert!(matches!(interpret(&x), Err(Error::NotGround(_))));
    }

    #[test]
    fn concretion() {
        let t = interpret(&RawTerm::abs(a(), RawTerm::tuple(vec![at(a()), at(b())]))).unwrap();
        let want = interpret(&RawTerm::tuple(vec![at(c()), at(b())])).unwrap();
        assert_eq!(t.concrete(&c()).unwrap(), want);
        assert!(matches!(t.concrete(&b()), Err(Error::UnsoundConcretion(_))));
    }

    #[test]
    fn perm_commutes_with_interpret() {
        let t = RawTerm::abs(b(), RawTerm::tuple(vec![at(a()), at(b()), at(c())]));
        let p = Permutation::swap(&a(), &c()).unwrap();
        assert_eq!(interpret(&t).unwrap().perm(&p), interpret(&t.perm_act(&p)).unwrap());
    }

    #[test]
    fn representative_avoids() {
        let t = interpret(&RawTerm::abs(a(), RawTerm::tuple(vec![at(a()), at(b())]))).unwrap();
        let avoid: BTreeSet<Atom> = [a(), c()].into_iter().collect();
        let r = t.representative_avoiding(&avoid);
        assert_eq!(r, RawTerm::abs(Atom::ch(3), RawTerm::tuple(vec![at(Atom::ch(3)), at(b())])));
        assert_eq!(interpret(&r).unwrap(), t);
    }
}
