//! The machine-readable output. Field order is fixed; see docs/transitions.md.

use nrtss::engine::{format_residual, AtomPool, Derivation, ProofTree, Transition};
use nrtss::formats::Report;
use nrtss::nrtss::Nrtss;
use nrtss::selftest::Outcome;
use nrtss::syntax::parse_term;
use nrtss::translate::{Style, TransitionSet};
use nrtss::{interpret, Atom, Error, NominalTerm, RawTerm, Result};
use serde_json::{json, Map, Value};

fn atoms(pool: &AtomPool) -> Value {
    pool.atoms().iter().map(|a| Value::from(a.to_string())).collect()
}

/// Binder, action and target of a residual.
fn split(r: &NominalTerm) -> (Option<Atom>, Option<NominalTerm>, Option<NominalTerm>) {
    let (binder, body) = match r.as_abs() {
        Some((a, b)) => (Some(a.clone()), b),
        None => (None, r.clone()),
    };
    match body.components() {
        Some(cs) if cs.len() == 2 => (binder, Some(cs[0].clone()), Some(cs[1].clone())),
        _ => (binder, None, None),
    }
}

pub fn transition(t: &Transition, proof: Option<&ProofTree>) -> Value {
    let (binder, action, target) = split(&t.residual);
    let mut m = Map::new();
    m.insert("source".into(), t.source.to_string().into());
    let style = if t.residual.as_abs().is_some() { Style::Abstraction } else { Style::Plain };
    m.insert("style".into(), style.to_string().into());
    m.insert("binder".into(), binder.map(|a| a.to_string()).into());
    m.insert("action".into(), action.map(|a| a.to_string()).into());
    m.insert("target".into(), target.map(|a| a.to_string()).into());
    m.insert("residual".into(), format_residual(&t.residual).into());
    if let Some(pt) = proof {
        m.insert("proof".into(), proof_tree(pt));
    }
    Value::Object(m)
}

pub fn proof_tree(pt: &ProofTree) -> Value {
    let mut atoms = Map::new();
    for (n, a) in &pt.atoms {
        atoms.insert(n.clone(), a.to_string().into());
    }
    let mut subst = Map::new();
    for (v, t) in &pt.subst {
        subst.insert(v.name.to_string(), t.to_string().into());
    }
    let discharged: Vec<Value> = pt
        .discharged
        .iter()
        .map(|a| {
            let t = interpret(&a.term).map(|t| t.to_string()).unwrap_or_else(|_| a.term.to_string());
            Value::from(format!("{} # {t}", a.atom))
        })
        .collect();
    json!({
        "rule": pt.rule,
        "atoms": atoms,
        "subst": subst,
        "discharged": discharged,
        "children": pt.children.iter().map(proof_tree).collect::<Vec<_>>(),
    })
}

pub fn derivation(n: &Nrtss, p: &NominalTerm, pool: &AtomPool, fuel: usize, d: &Derivation, proofs: bool) -> Value {
    let style = if n.is_abstraction() { Style::Abstraction } else { Style::Plain };
    json!({
        "source": p.to_string(),
        "style": style.to_string(),
        "pool": atoms(pool),
        "fuel": fuel,
        "incomplete": d.incomplete,
        "transitions": d.transitions.iter().map(|(t, pt)| transition(t, proofs.then_some(pt))).collect::<Vec<_>>(),
    })
}

pub fn transition_set(ts: &TransitionSet) -> Value {
    json!({
        "style": ts.style.to_string(),
        "transitions": ts.transitions.iter().map(|t| transition(t, None)).collect::<Vec<_>>(),
    })
}

pub fn trace(
    n: &Nrtss,
    pool: &AtomPool,
    fuel: usize,
    states: &[NominalTerm],
    edges: &[(usize, String, usize)],
    truncated: bool,
    incomplete: bool,
) -> Value {
    let style = if n.is_abstraction() { Style::Abstraction } else { Style::Plain };
    json!({
        "style": style.to_string(),
        "pool": atoms(pool),
        "fuel": fuel,
        "states": states.iter().map(|s| Value::from(s.to_string())).collect::<Vec<_>>(),
        "edges": edges.iter().map(|(i, l, j)| json!({"from": i, "label": l, "to": j})).collect::<Vec<_>>(),
        "truncated": truncated,
        "incomplete": incomplete,
    })
}

pub fn report(calculus: &str, r: &Report) -> Value {
    json!({
        "calculus": calculus,
        "format": r.format,
        "passed": r.passed(),
        "obligations": r.obligations.iter().map(|o| json!({
            "rule": o.rule,
            "case": o.case,
            "atom": o.atom,
            "ob": o.kind.to_string(),
            "pass": o.pass,
            "lhs": o.lhs,
            "rhs": o.rhs,
        })).collect::<Vec<_>>(),
    })
}

pub fn selftest(seed: u64, outcomes: &[Outcome]) -> Value {
    json!({
        "seed": seed,
        "passed": outcomes.iter().all(|o| o.passed()),
        "suites": outcomes.iter().map(|o| json!({
            "suite": o.suite,
            "passed": o.passed(),
            "summary": o.summary,
            "counterexamples": o.counterexamples,
        })).collect::<Vec<_>>(),
    })
}

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v str> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Other(format!("transition record without string field {key}")))
}

/// Reads transition records, either a list or an object with a
/// `transitions` list. `source`, `action` and `target` are required;
/// `binder` is required for abstraction residuals.
pub fn read_transitions(n: &Nrtss, style: Style, text: &str) -> Result<TransitionSet> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Other(format!("transition file: {e}")))?;
    let records = match &v {
        Value::Array(rs) => rs,
        Value::Object(m) => m
            .get("transitions")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Other("transition file has no transitions list".into()))?,
        _ => return Err(Error::Other("transition file is neither a list nor an object".into())),
    };
    let mut out = Vec::new();
    for r in records {
        let source = interpret(&parse_term(&n.signature, field(r, "source")?, Some(&n.state_sort))?)?;
        let action = parse_term(&n.signature, field(r, "action")?, Some(&n.action_sort))?;
        let target = parse_term(&n.signature, field(r, "target")?, Some(&n.state_sort))?;
        let body = RawTerm::tuple(vec![action, target]);
        let residual = match style {
            Style::Plain => body,
            Style::Abstraction => RawTerm::abs(Atom::parse(field(r, "binder")?)?, body),
        };
        out.push(Transition::new(source, interpret(&residual)?));
    }
    TransitionSet::new(style, out)
}
