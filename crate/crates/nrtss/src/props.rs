//! Properties of derived transition sets: equivariance, alpha-conversion of
//! residuals, the binding condition of abstraction residuals, and the
//! translation round trips. Each check returns its counterexamples.

use std::collections::BTreeSet;

use crate::engine::{format_residual, AtomPool, Engine, Transition};
use crate::error::Result;
use crate::formats::BnSpec;
use crate::nominal::NominalTerm;
use crate::translate::{alpha_variants, ba_witnesses, roundtrip_abs, roundtrip_plain, trans_abs, Style, TransitionSet};

fn show(t: &Transition) -> String {
    format!("{} --> {}", t.source, format_residual(&t.residual))
}

/// The transitions of `state` with atoms in `pool`.
pub fn derived_set(engine: &mut Engine<'_>, state: &NominalTerm, pool: &AtomPool, fuel: usize) -> Result<TransitionSet> {
    let style = if engine.nrtss().is_abstraction() { Style::Abstraction } else { Style::Plain };
    let d = engine.derive(state, pool, fuel)?;
    TransitionSet::new(style, d.set())
}

/// For every transposition `π` of pool atoms, the transitions of `π·p` are
/// exactly `π` applied to those of `p`.
pub fn check_equivariance(engine: &mut Engine<'_>, state: &NominalTerm, pool: &AtomPool, fuel: usize) -> Result<Vec<String>> {
    let base = derived_set(engine, state, pool, fuel)?;
    let mut out = Vec::new();
    for pi in pool.transpositions() {
        let moved: BTreeSet<Transition> = base.transitions.iter().map(|t| t.perm(&pi)).collect();
        let other = derived_set(engine, &state.perm(&pi), pool, fuel)?;
        for t in moved.symmetric_difference(&other.transitions) {
            let side = if other.transitions.contains(t) { "unmatched" } else { "missing" };
            out.push(format!("{pi}: {side} {}", show(t)));
        }
    }
    Ok(out)
}

/// Every pool alpha-variant of a residual with a bound name is derived too.
pub fn check_alpha_residuals(ts: &TransitionSet, bn: &BnSpec, pool: &AtomPool) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for t in &ts.transitions {
        for v in alpha_variants(t, bn, pool)? {
            if !ts.transitions.contains(&v) {
                out.push(format!("{} has no variant {}", show(t), format_residual(&v.residual)));
            }
        }
    }
    Ok(out)
}

/// `[a](ℓ, p′)` with `a # ℓ` has `a # p′`.
pub fn check_binding_condition(ts: &TransitionSet) -> Result<Vec<String>> {
    Ok(ba_witnesses(ts)?.iter().map(show).collect())
}

/// Differences between a derived set and its round trip.
pub fn check_roundtrip(ts: &TransitionSet, bn: Option<&BnSpec>, pool: &AtomPool) -> Result<Vec<String>> {
    let r = match (ts.style, bn) {
        (Style::Plain, Some(bn)) => roundtrip_plain(ts, bn, pool)?,
        (Style::Plain, None) => roundtrip_plain(ts, &BnSpec::default(), pool)?,
        (Style::Abstraction, _) => roundtrip_abs(ts, pool)?,
    };
    Ok(r.lines())
}

/// `TransAbs` of the plain set against the abstraction set of the same state.
pub fn check_translation(plain: &TransitionSet, bn: &BnSpec, abs: &TransitionSet) -> Result<Vec<String>> {
    let translated = trans_abs(plain, bn)?;
    let mut out = Vec::new();
    for t in translated.transitions.difference(&abs.transitions) {
        out.push(format!("only translated: {}", show(t)));
    }
    for t in abs.transitions.difference(&translated.transitions) {
        out.push(format!("only derived: {}", show(t)));
    }
    Ok(out)
}
