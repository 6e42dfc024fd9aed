//! Translations between plain residuals `(ℓ, p′)` and abstraction residuals
//! `[a](ℓ, p′)` on finite transition sets, and round-trip checks.
//!
//! Transition sets are finite quotients of infinite relations: only atoms of
//! an [`AtomPool`] are used when choosing representatives of bound names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::engine::{format_residual, AtomPool, Transition};
use crate::error::{Error, Result};
use crate::formats::BnSpec;
use crate::foundation::fresh_atom;
use crate::nominal::NominalTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Style {
    Plain,
    Abstraction,
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Plain => "plain",
            Style::Abstraction => "abstraction",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSet {
    pub style: Style,
    pub transitions: BTreeSet<Transition>,
}

impl TransitionSet {
    pub fn new(style: Style, transitions: impl IntoIterator<Item = Transition>) -> Result<Self> {
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        for t in &transitions {
            if residual_style(&t.residual) != Some(style) {
                return Err(Error::Other(format!("residual {} is not {style}", t.residual)));
            }
        }
        Ok(TransitionSet { style, transitions })
    }

    pub fn empty(style: Style) -> Self {
        TransitionSet {
            style,
            transitions: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

fn residual_style(r: &NominalTerm) -> Option<Style> {
    match r.as_abs() {
        Some((_, body)) => (body.components()?.len() == 2).then_some(Style::Abstraction),
        None => (r.components()?.len() == 2).then_some(Style::Plain),
    }
}

fn split_plain(r: &NominalTerm) -> Result<(NominalTerm, NominalTerm)> {
    match r.components() {
        Some(cs) if cs.len() == 2 => Ok((cs[0].clone(), cs[1].clone())),
        _ => Err(Error::Other(format!("{r} is not an (action, state) pair"))),
    }
}

fn require(ts: &TransitionSet, style: Style) -> Result<()> {
    if ts.style != style {
        return Err(Error::Other(format!("expected a {style} transition set, got {}", ts.style)));
    }
    Ok(())
}

/// `TransAbs`: `p → (ℓ, p′)` becomes `p → [a](ℓ, p′)` where `bn(ℓ) = {a}`,
/// or `a` is fresh for `(ℓ, p′)` when `bn(ℓ) = ∅`.
pub fn trans_abs(ts: &TransitionSet, bn: &BnSpec) -> Result<TransitionSet> {
    require(ts, Style::Plain)?;
    let mut out = BTreeSet::new();
    for t in &ts.transitions {
        let (l, _) = split_plain(&t.residual)?;
        let names = bn.bn(&l);
        if names.len() > 1 {
            return Err(Error::Other(format!("{l} binds {} names; at most one is supported", names.len())));
        }
        let a = match names.into_iter().next() {
            Some(a) => a,
            None => {
                let sort = bound_sort(bn, &l).unwrap_or_else(crate::syntax::default_atom_sort);
                fresh_atom(&sort, t.residual.support())
            }
        };
        out.insert(Transition::new(t.source.clone(), NominalTerm::abstraction(&a, &t.residual)));
    }
    Ok(TransitionSet {
        style: Style::Abstraction,
        transitions: out,
    })
}

/// Sort of the binding position of an action head, when it has one.
fn bound_sort(bn: &BnSpec, l: &NominalTerm) -> Option<crate::foundation::AtomSort> {
    let (f, args) = l.app_args()?;
    let i = *bn.positions(f)?.iter().next()?;
    Some(args.get(i - 1)?.as_atom()?.sort().clone())
}

/// `Trans`: each `p → [a](ℓ, p′)` with `a ∈ supp(ℓ)` yields `p → (ℓ, p′)@b`
/// for every pool atom `b` fresh for the abstraction; otherwise the single
/// concretion at a fresh atom. Also returns the binding positions observed,
/// that is, where the bound name occurs in `ℓ`.
pub fn trans_conc(ts: &TransitionSet, pool: &AtomPool) -> Result<(TransitionSet, BnSpec)> {
    require(ts, Style::Abstraction)?;
    let mut out = BTreeSet::new();
    let mut observed: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for t in &ts.transitions {
        let (a, body) = t.residual.as_abs().expect("abstraction style");
        let (l, _) = split_plain(&body)?;
        if l.is_fresh(a) {
            let c = fresh_atom(a.sort(), t.residual.support());
            out.insert(Transition::new(t.source.clone(), t.residual.concrete(&c)?));
            continue;
        }
        if let Some((f, args)) = l.app_args() {
            let e = observed.entry(f.to_string()).or_default();
            for (i, x) in args.iter().enumerate() {
                if x.as_atom() == Some(a) && !e.contains(&(i + 1)) {
                    e.push(i + 1);
                }
            }
        }
        for b in pool.atoms() {
            if b.sort() == a.sort() && t.residual.is_fresh(b) {
                out.insert(Transition::new(t.source.clone(), t.residual.concrete(b)?));
            }
        }
    }
    Ok((
        TransitionSet {
            style: Style::Plain,
            transitions: out,
        },
        BnSpec::new(observed),
    ))
}

/// Closes a plain set under renaming the bound name of a residual to any
/// pool atom fresh for it.
pub fn alpha_close(ts: &TransitionSet, bn: &BnSpec, pool: &AtomPool) -> Result<TransitionSet> {
    require(ts, Style::Plain)?;
    let mut out = BTreeSet::new();
    for t in &ts.transitions {
        out.extend(alpha_variants(t, bn, pool)?);
    }
    Ok(TransitionSet {
        style: Style::Plain,
        transitions: out,
    })
}

/// `t` and every variant obtained by renaming its bound names to pool atoms
/// fresh for the residual with those names abstracted.
pub fn alpha_variants(t: &Transition, bn: &BnSpec, pool: &AtomPool) -> Result<BTreeSet<Transition>> {
    let (l, _) = split_plain(&t.residual)?;
    let mut out: BTreeSet<Transition> = [t.clone()].into_iter().collect();
    for a in bn.bn(&l) {
        let abs = NominalTerm::abstraction(&a, &t.residual);
        for b in pool.atoms() {
            if b.sort() == a.sort() && abs.is_fresh(b) {
                out.insert(Transition::new(t.source.clone(), abs.concrete(b)?));
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing a transition set with its round trip.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundTrip {
    /// In the input but not in the round trip.
    pub missing: Vec<Transition>,
    /// In the round trip but not in the input.
    pub extra: Vec<Transition>,
    /// Abstraction transitions `[a](ℓ, p′)` with `a # ℓ` but not `a # p′`.
    pub witnesses: Vec<Transition>,
}

impl RoundTrip {
    pub fn equal(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }

    fn diff(before: &TransitionSet, after: &TransitionSet) -> Self {
        RoundTrip {
            missing: before.transitions.difference(&after.transitions).cloned().collect(),
            extra: after.transitions.difference(&before.transitions).cloned().collect(),
            witnesses: Vec::new(),
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let show = |t: &Transition| format!("{} --> {}", t.source, format_residual(&t.residual));
        for t in &self.witnesses {
            out.push(format!("ba-violation {}", show(t)));
        }
        for t in &self.missing {
            out.push(format!("missing {}", show(t)));
        }
        for t in &self.extra {
            out.push(format!("extra {}", show(t)));
        }
        out
    }
}

/// `Trans(TransAbs(T, bn))` against the pool closure of `T`.
pub fn roundtrip_plain(ts: &TransitionSet, bn: &BnSpec, pool: &AtomPool) -> Result<RoundTrip> {
    let closed = alpha_close(ts, bn, pool)?;
    let (back, _) = trans_conc(&trans_abs(&closed, bn)?, pool)?;
    Ok(RoundTrip::diff(&closed, &back))
}

/// Transitions `[a](ℓ, p′)` with `a # ℓ` whose target mentions `a`.
pub fn ba_witnesses(ts: &TransitionSet) -> Result<Vec<Transition>> {
    require(ts, Style::Abstraction)?;
    let mut out = Vec::new();
    for t in &ts.transitions {
        let (a, body) = t.residual.as_abs().expect("abstraction style");
        let (l, p) = split_plain(&body)?;
        if l.is_fresh(a) && !p.is_fresh(a) {
            out.push(t.clone());
        }
    }
    Ok(out)
}

/// `TransAbs(Trans(T))` against `T`, using the binding positions observed by
/// `Trans`. Transitions violating the BA condition are reported as
/// witnesses.
pub fn roundtrip_abs(ts: &TransitionSet, pool: &AtomPool) -> Result<RoundTrip> {
    let (plain, bn) = trans_conc(ts, pool)?;
    let back = trans_abs(&plain, &bn)?;
    let mut r = RoundTrip::diff(ts, &back);
    r.witnesses = ba_witnesses(ts)?;
    Ok(r)
}

/// Keeps the transitions whose atoms all lie in the pool.
pub fn restrict(ts: &TransitionSet, pool: &AtomPool) -> TransitionSet {
    TransitionSet {
        style: ts.style,
        transitions: ts
            .transitions
            .iter()
            .filter(|t| pool.contains_all(&t.support()))
            .cloned()
            .collect(),
    }
}

/// Whether every abstraction transition has a concretion at a pool atom.
pub fn representable(ts: &TransitionSet, pool: &AtomPool) -> bool {
    ts.transitions.iter().all(|t| match t.residual.as_abs() {
        Some((a, _)) => pool
            .atoms()
            .iter()
            .any(|b| b.sort() == a.sort() && t.residual.is_fresh(b)),
        None => true,
    })
}
