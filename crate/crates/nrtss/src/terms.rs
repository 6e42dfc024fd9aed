//! Nominal signatures, sorts, raw terms and substitutions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::foundation::{Atom, AtomSort, Permutation, Renaming};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Base(Arc<str>),
    Atom(AtomSort),
    Abs(AtomSort, Arc<Sort>),
    Product(Arc<[Sort]>),
}

impl Sort {
    pub fn base(name: &str) -> Sort {
        Sort::Base(Arc::from(name))
    }

    pub fn atom(name: &str) -> Sort {
        Sort::Atom(AtomSort::new(name))
    }

    pub fn abs(a: &AtomSort, body: Sort) -> Sort {
        Sort::Abs(a.clone(), Arc::new(body))
    }

    pub fn product(parts: Vec<Sort>) -> Sort {
        Sort::Product(Arc::from(parts))
    }

    pub fn unit() -> Sort {
        Sort::product(Vec::new())
    }

    pub fn as_base(&self) -> Option<&str> {
        match self {
            Sort::Base(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Base(b) => write!(f, "{b}"),
            Sort::Atom(a) => write!(f, "{a}"),
            Sort::Abs(a, body) => write!(f, "[{a}]{body}"),
            Sort::Product(ps) if ps.is_empty() => write!(f, "unit"),
            Sort::Product(ps) => {
                write!(f, "(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunType {
    pub arg: Sort,
    pub result: Arc<str>,
}

/// Base sorts, atom sorts and typed function symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    base_sorts: BTreeSet<Arc<str>>,
    atom_sorts: BTreeSet<AtomSort>,
    funs: BTreeMap<Arc<str>, FunType>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_base_sort(&mut self, name: &str) -> Result<()> {
        if self.atom_sorts.contains(&AtomSort::new(name)) || !self.base_sorts.insert(Arc::from(name)) {
            return Err(Error::Other(format!("sort {name} declared twice")));
        }
        Ok(())
    }

    pub fn add_atom_sort(&mut self, name: &str) -> Result<()> {
        if self.base_sorts.contains(name) || !self.atom_sorts.insert(AtomSort::new(name)) {
            return Err(Error::Other(format!("sort {name} declared twice")));
        }
        Ok(())
    }

    pub fn add_fun(&mut self, name: &str, arg: Sort, result: &str) -> Result<()> {
        self.check_sort(&arg)?;
        if !self.base_sorts.contains(result) {
            return Err(Error::IllSorted(format!(
                "result of {name} must be a declared base sort, got {result}"
            )));
        }
        if self.funs.contains_key(name) {
            return Err(Error::Other(format!("function symbol {name} declared twice")));
        }
        self.funs.insert(
            Arc::from(name),
            FunType {
                arg,
                result: Arc::from(result),
            },
        );
        Ok(())
    }

    pub fn fun(&self, name: &str) -> Option<&FunType> {
        self.funs.get(name)
    }

    pub fn funs(&self) -> impl Iterator<Item = (&str, &FunType)> {
        self.funs.iter().map(|(k, v)| (&**k, v))
    }

    /// Function symbols whose result is `base`.
    pub fn constructors_of<'a>(&'a self, base: &'a str) -> impl Iterator<Item = (&'a str, &'a FunType)> + 'a {
        self.funs().filter(move |(_, t)| &*t.result == base)
    }

    pub fn base_sorts(&self) -> impl Iterator<Item = &str> {
        self.base_sorts.iter().map(|s| &**s)
    }

    pub fn atom_sorts(&self) -> impl Iterator<Item = &AtomSort> {
        self.atom_sorts.iter()
    }

    pub fn has_base_sort(&self, name: &str) -> bool {
        self.base_sorts.contains(name)
    }

    pub fn has_atom_sort(&self, name: &str) -> bool {
        self.atom_sorts.contains(&AtomSort::new(name))
    }

    pub fn check_sort(&self, s: &Sort) -> Result<()> {
        match s {
            Sort::Base(b) if self.base_sorts.contains(b) => Ok(()),
            Sort::Atom(a) if self.atom_sorts.contains(a) => Ok(()),
            Sort::Abs(a, body) if self.atom_sorts.contains(a) => self.check_sort(body),
            Sort::Product(ps) => ps.iter().try_for_each(|p| self.check_sort(p)),
            _ => Err(Error::IllSorted(format!("undeclared sort in {s}"))),
        }
    }

    /// Well-sorted application `f(t)`.
    pub fn app(&self, f: &str, t: RawTerm) -> Result<RawTerm> {
        let ty = self
            .fun(f)
            .ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
        if t.sort() != &ty.arg {
            return Err(Error::IllSorted(format!(
                "{f} expects {}, got {} of sort {}",
                ty.arg,
                t,
                t.sort()
            )));
        }
        Ok(RawTerm::app_unchecked(f, Sort::Base(ty.result.clone()), t))
    }

    /// `f(t1, ..., tn)`, wrapping the arguments in a tuple unless exactly one
    /// argument of the right sort is given.
    pub fn apply(&self, f: &str, args: Vec<RawTerm>) -> Result<RawTerm> {
        let ty = self
            .fun(f)
            .ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
        if args.len() == 1 && args[0].sort() == &ty.arg {
            return self.app(f, args.into_iter().next().unwrap());
        }
        self.app(f, RawTerm::tuple(args))
    }

    /// Checks well-sortedness of every node of `t` against this signature.
    pub fn check_term(&self, t: &RawTerm) -> Result<()> {
        self.check_sort(t.sort())?;
        match t.kind() {
            Kind::Var(_) | Kind::Atom(_) => Ok(()),
            Kind::Moderated(s, _) => self.check_term(s),
            Kind::Abs(_, s) | Kind::App(_, s) => {
                if let Kind::App(f, _) = t.kind() {
                    let ty = self.fun(f).ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
                    if s.sort() != &ty.arg || t.sort().as_base() != Some(&*ty.result) {
                        return Err(Error::IllSorted(format!("{t}")));
                    }
                }
                self.check_term(s)
            }
            Kind::Tuple(ts) => ts.iter().try_for_each(|s| self.check_term(s)),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl Variable {
    pub fn new(name: &str, sort: Sort) -> Self {
        Variable {
            name: Arc::from(name),
            sort,
        }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}:{}", self.name, self.sort)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Var(Variable),
    Atom(Atom),
    Moderated(RawTerm, Renaming),
    Abs(Atom, RawTerm),
    Tuple(Vec<RawTerm>),
    App(Arc<str>, RawTerm),
}

struct Node {
    kind: Kind,
    sort: Sort,
    /// Free atoms up to alpha-equivalence, filled in on demand.
    nsupp: OnceLock<Arc<BTreeSet<Atom>>>,
    /// Whether the node is the canonical representative of its class.
    canonical: OnceLock<bool>,
    moderated: OnceLock<bool>,
}

/// A raw term. Cheap to clone; nodes are shared.
#[derive(Clone)]
pub struct RawTerm(Arc<Node>);

impl PartialEq for RawTerm {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.sort == other.0.sort && self.0.kind == other.0.kind)
    }
}

impl Eq for RawTerm {}

impl PartialOrd for RawTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RawTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind).then_with(|| self.0.sort.cmp(&other.0.sort))
    }
}

impl Hash for RawTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state);
        self.0.sort.hash(state);
    }
}

impl RawTerm {
    fn mk(kind: Kind, sort: Sort) -> Self {
        RawTerm(Arc::new(Node {
            kind,
            sort,
            nsupp: OnceLock::new(),
            canonical: OnceLock::new(),
            moderated: OnceLock::new(),
        }))
    }

    /// Cache slot for the support computed by the nominal layer.
    pub(crate) fn nsupp_slot(&self) -> &OnceLock<Arc<BTreeSet<Atom>>> {
        &self.0.nsupp
    }

    pub(crate) fn canonical_slot(&self) -> &OnceLock<bool> {
        &self.0.canonical
    }

    pub fn var(v: Variable) -> Self {
        let sort = v.sort.clone();
        Self::mk(Kind::Var(v), sort)
    }

    pub fn atom(a: Atom) -> Self {
        let sort = Sort::Atom(a.sort().clone());
        Self::mk(Kind::Atom(a), sort)
    }

    pub fn moderated(t: RawTerm, r: Renaming) -> Self {
        let sort = t.sort().clone();
        Self::mk(Kind::Moderated(t, r), sort)
    }

    pub fn abs(a: Atom, t: RawTerm) -> Self {
        let sort = Sort::abs(a.sort(), t.sort().clone());
        Self::mk(Kind::Abs(a, t), sort)
    }

    pub fn tuple(ts: Vec<RawTerm>) -> Self {
        let sort = Sort::product(ts.iter().map(|t| t.sort().clone()).collect());
        Self::mk(Kind::Tuple(ts), sort)
    }

    pub fn unit() -> Self {
        Self::tuple(Vec::new())
    }

    /// Application node with an explicit result sort; no signature check.
    pub fn app_unchecked(f: &str, result: Sort, t: RawTerm) -> Self {
        Self::mk(Kind::App(Arc::from(f), t), result)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn sort(&self) -> &Sort {
        &self.0.sort
    }

    fn with_kind(&self, kind: Kind) -> Self {
        Self::mk(kind, self.sort().clone())
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self.kind() {
            Kind::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self.kind() {
            Kind::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Head symbol and argument of an application.
    pub fn as_app(&self) -> Option<(&str, &RawTerm)> {
        match self.kind() {
            Kind::App(f, t) => Some((f, t)),
            _ => None,
        }
    }

    /// Arguments of an application, flattening a tuple argument.
    pub fn app_args(&self) -> Option<(&str, Vec<&RawTerm>)> {
        let (f, t) = self.as_app()?;
        match t.kind() {
            Kind::Tuple(ts) => Some((f, ts.iter().collect())),
            _ => Some((f, vec![t])),
        }
    }

    /// Number of nodes; moderation nodes do not count.
    pub fn size(&self) -> usize {
        match self.kind() {
            Kind::Var(_) | Kind::Atom(_) => 1,
            Kind::Moderated(t, _) => t.size(),
            Kind::Abs(_, t) | Kind::App(_, t) => 1 + t.size(),
            Kind::Tuple(ts) => 1 + ts.iter().map(|t| t.size()).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self.kind() {
            Kind::Var(_) => false,
            Kind::Atom(_) => true,
            Kind::Moderated(t, _) | Kind::Abs(_, t) | Kind::App(_, t) => t.is_ground(),
            Kind::Tuple(ts) => ts.iter().all(|t| t.is_ground()),
        }
    }

    pub fn has_moderation(&self) -> bool {
        *self.0.moderated.get_or_init(|| match self.kind() {
            Kind::Var(_) | Kind::Atom(_) => false,
            Kind::Moderated(..) => true,
            Kind::Abs(_, t) | Kind::App(_, t) => t.has_moderation(),
            Kind::Tuple(ts) => ts.iter().any(|t| t.has_moderation()),
        })
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self.kind() {
            Kind::Var(v) => {
                out.insert(v.clone());
            }
            Kind::Atom(_) => {}
            Kind::Moderated(t, _) | Kind::Abs(_, t) | Kind::App(_, t) => t.collect_vars(out),
            Kind::Tuple(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Every atom occurring anywhere, including binders and renamings.
    pub fn support(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut BTreeSet<Atom>) {
        match self.kind() {
            Kind::Var(_) => {}
            Kind::Atom(a) => {
                out.insert(a.clone());
            }
            Kind::Moderated(t, r) => {
                t.collect_support(out);
                out.extend(r.support());
            }
            Kind::Abs(a, t) => {
                out.insert(a.clone());
                t.collect_support(out);
            }
            Kind::App(_, t) => t.collect_support(out),
            Kind::Tuple(ts) => ts.iter().for_each(|t| t.collect_support(out)),
        }
    }

    /// Free atoms; moderations are pushed through first.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        match self.kind() {
            Kind::Var(_) => BTreeSet::new(),
            Kind::Atom(a) => [a.clone()].into_iter().collect(),
            Kind::Moderated(t, r) => t.ren_act(r).free_atoms(),
            Kind::Abs(a, t) => {
                let mut s = t.free_atoms();
                s.remove(a);
                s
            }
            Kind::App(_, t) => t.free_atoms(),
            Kind::Tuple(ts) => ts.iter().flat_map(|t| t.free_atoms()).collect(),
        }
    }

    /// Permutation action: variables are fixed, moderations are conjugated.
    pub fn perm_act(&self, p: &Permutation) -> RawTerm {
        if p.is_identity() {
            return self.clone();
        }
        match self.kind() {
            Kind::Var(_) => self.clone(),
            Kind::Atom(a) => RawTerm::atom(p.apply(a)),
            Kind::Moderated(t, r) => RawTerm::moderated(t.perm_act(p), r.conj(p)),
            Kind::Abs(a, t) => RawTerm::abs(p.apply(a), t.perm_act(p)),
            Kind::App(f, t) => self.with_kind(Kind::App(f.clone(), t.perm_act(p))),
            Kind::Tuple(ts) => RawTerm::tuple(ts.iter().map(|t| t.perm_act(p)).collect()),
        }
    }

    /// Syntactic renaming action. Not capture-avoiding: binders are renamed
    /// too, and `t[ρ1]` renamed by `ρ2` becomes `t[ρ1;ρ2]`.
    pub fn ren_act(&self, r: &Renaming) -> RawTerm {
        if r.is_identity() {
            // x[ι] = x and t[ρ][ι] = t[ρ;ι] = t[ρ]
            return self.clone();
        }
        match self.kind() {
            Kind::Var(_) => self.clone(),
            Kind::Atom(a) => RawTerm::atom(r.apply(a)),
            Kind::Moderated(t, r1) => RawTerm::moderated(t.clone(), r1.then(r)),
            Kind::Abs(a, t) => RawTerm::abs(r.apply(a), t.ren_act(r)),
            Kind::App(f, t) => self.with_kind(Kind::App(f.clone(), t.ren_act(r))),
            Kind::Tuple(ts) => RawTerm::tuple(ts.iter().map(|t| t.ren_act(r)).collect()),
        }
    }

    /// Replaces atoms everywhere (atoms, binders and renaming entries) by
    /// their image under `m`. Used to instantiate rule schemas, whose atoms
    /// stand for metavariables. Fails if a renaming stops being a function.
    pub fn instantiate_atoms(&self, m: &BTreeMap<Atom, Atom>) -> Result<RawTerm> {
        let f = |a: &Atom| m.get(a).cloned().unwrap_or_else(|| a.clone());
        Ok(match self.kind() {
            Kind::Var(_) => self.clone(),
            Kind::Atom(a) => RawTerm::atom(f(a)),
            Kind::Moderated(t, r) => {
                let r2 = Renaming::from_pairs(r.entries().map(|(k, v)| (f(k), f(v))))?;
                RawTerm::moderated(t.instantiate_atoms(m)?, r2)
            }
            Kind::Abs(a, t) => RawTerm::abs(f(a), t.instantiate_atoms(m)?),
            Kind::App(g, t) => self.with_kind(Kind::App(g.clone(), t.instantiate_atoms(m)?)),
            Kind::Tuple(ts) => RawTerm::tuple(
                ts.iter()
                    .map(|t| t.instantiate_atoms(m))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn substitute(&self, phi: &Substitution) -> RawTerm {
        match self.kind() {
            Kind::Var(v) => phi.get(v).cloned().unwrap_or_else(|| self.clone()),
            Kind::Atom(_) => self.clone(),
            Kind::Moderated(t, r) => RawTerm::moderated(t.substitute(phi), r.clone()),
            Kind::Abs(a, t) => RawTerm::abs(a.clone(), t.substitute(phi)),
            Kind::App(f, t) => self.with_kind(Kind::App(f.clone(), t.substitute(phi))),
            Kind::Tuple(ts) => RawTerm::tuple(ts.iter().map(|t| t.substitute(phi)).collect()),
        }
    }

    /// Head function symbols occurring in the term.
    pub fn fun_symbols(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        fn go(t: &RawTerm, out: &mut BTreeSet<Arc<str>>) {
            match t.kind() {
                Kind::Var(_) | Kind::Atom(_) => {}
                Kind::Moderated(s, _) | Kind::Abs(_, s) => go(s, out),
                Kind::App(f, s) => {
                    out.insert(f.clone());
                    go(s, out)
                }
                Kind::Tuple(ts) => ts.iter().for_each(|s| go(s, out)),
            }
        }
        go(self, &mut out);
        out
    }
}

impl RawTerm {
    /// Prints like `Display`, naming atoms and variables with the given
    /// functions.
    pub fn display_with(&self, atom: &dyn Fn(&Atom) -> String, var: &dyn Fn(&Variable) -> String) -> String {
        let go = |t: &RawTerm| t.display_with(atom, var);
        match self.kind() {
            Kind::Var(v) => var(v),
            Kind::Atom(a) => atom(a),
            Kind::Moderated(t, r) => {
                let entries: String = r.entries().map(|(k, v)| format!("{}->{},", atom(k), atom(v))).collect();
                format!("(@ {} {{{entries}}})", go(t))
            }
            Kind::Abs(a, t) => format!("([{}] {})", atom(a), go(t)),
            Kind::Tuple(ts) => {
                let mut s = String::from("(tuple");
                for t in ts {
                    s.push(' ');
                    s.push_str(&go(t));
                }
                s.push(')');
                s
            }
            Kind::App(g, t) => match t.kind() {
                Kind::Tuple(ts) if ts.len() != 1 => {
                    let mut s = format!("({g}");
                    for t in ts {
                        s.push(' ');
                        s.push_str(&go(t));
                    }
                    s.push(')');
                    s
                }
                _ => format!("({g} {})", go(t)),
            },
        }
    }
}

impl fmt::Debug for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// S-expression syntax accepted by [`crate::syntax::parse_term`].
impl fmt::Display for RawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Var(v) => write!(f, "{v}"),
            Kind::Atom(a) => write!(f, "{a}"),
            Kind::Moderated(t, r) => write!(f, "(@ {t} {r})"),
            Kind::Abs(a, t) => write!(f, "([{a}] {t})"),
            Kind::Tuple(ts) => {
                write!(f, "(tuple")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Kind::App(g, t) => match t.kind() {
                Kind::Tuple(ts) if ts.len() != 1 => {
                    write!(f, "({g}")?;
                    for t in ts {
                        write!(f, " {t}")?;
                    }
                    write!(f, ")")
                }
                _ => write!(f, "({g} {t})"),
            },
        }
    }
}

/// A sort-preserving finite map from variables to raw terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Substitution {
    map: BTreeMap<Variable, RawTerm>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Variable, RawTerm)>>(pairs: I) -> Result<Self> {
        let mut s = Self::new();
        for (v, t) in pairs {
            s.insert(v, t)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, v: Variable, t: RawTerm) -> Result<()> {
        if &v.sort != t.sort() {
            return Err(Error::SortMismatch(format!(
                "{v} cannot be bound to {t} of sort {}",
                t.sort()
            )));
        }
        if t.as_var() == Some(&v) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
        Ok(())
    }

    pub fn get(&self, v: &Variable) -> Option<&RawTerm> {
        self.map.get(v)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.map.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Variable, &RawTerm)> {
        self.map.iter()
    }

    pub fn is_ground(&self) -> bool {
        self.map.values().all(|t| t.is_ground())
    }

    /// `(self ∘ g)(x) = self̄(g(x))`.
    pub fn compose(&self, g: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        let vars: BTreeSet<&Variable> = self.map.keys().chain(g.map.keys()).collect();
        for v in vars {
            let t = match g.get(v) {
                Some(t) => t.substitute(self),
                None => RawTerm::var(v.clone()).substitute(self),
            };
            out.insert(v.clone(), t).expect("sorts preserved");
        }
        out
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(v, t)| format!("{v} := {t}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
