//! The four pi-calculus rule sets shipped with the crate, with their
//! binding-names specifications, inert terms and stratifications.
//!
//! The late rules follow a variant of the late semantics in which the
//! input rule requires the bound name to differ from the channel, so
//! `in(a, [a]p)` has no `binA(a, a)` transition and a name received over
//! the channel with the same name is still substituted correctly.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formats::{BnSpec, Measure, StratMode, StratSpec};
use crate::foundation::{fresh_atom, Atom};
use crate::nominal::NominalTerm;
use crate::nrtss::{parse_ruleset, Nrtss};
use crate::terms::{Kind, RawTerm, Sort};

pub const EARLY_SRC: &str = include_str!("../fixtures/early.nrtss");
pub const LATE_SRC: &str = include_str!("../fixtures/late.nrtss");
pub const EARLY_ABS_SRC: &str = include_str!("../fixtures/early-abs.nrtss");
pub const LATE_ABS_SRC: &str = include_str!("../fixtures/late-abs.nrtss");

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 4] = ["early", "late", "early-abs", "late-abs"];

pub fn early_pi() -> Nrtss {
    parse_ruleset(EARLY_SRC).expect("bundled early rules")
}

pub fn late_pi() -> Nrtss {
    parse_ruleset(LATE_SRC).expect("bundled late rules")
}

pub fn early_abs_pi() -> Nrtss {
    parse_ruleset(EARLY_ABS_SRC).expect("bundled early-abs rules")
}

pub fn late_abs_pi() -> Nrtss {
    parse_ruleset(LATE_ABS_SRC).expect("bundled late-abs rules")
}

pub fn by_name(name: &str) -> Result<Nrtss> {
    match name {
        "early" => Ok(early_pi()),
        "late" => Ok(late_pi()),
        "early-abs" => Ok(early_abs_pi()),
        "late-abs" => Ok(late_abs_pi()),
        other => Err(Error::Other(format!("unknown calculus `{other}`"))),
    }
}

/// A rule set with the data the format checkers need.
#[derive(Clone, Debug)]
pub struct CalculusBundle {
    pub name: &'static str,
    pub nrtss: Nrtss,
    /// Present for plain residuals.
    pub bn: Option<BnSpec>,
    pub strat: StratSpec,
    /// Ground terms substituted for variables a rule drops.
    pub inert: BTreeMap<Sort, RawTerm>,
}

impl CalculusBundle {
    pub fn strat_mode(&self) -> StratMode {
        match &self.bn {
            Some(bn) => StratMode::Plain(bn.clone()),
            None => StratMode::Abstraction,
        }
    }
}

fn shapes(sources: &[&str], actions: &[&str]) -> BTreeSet<(Option<String>, String)> {
    sources
        .iter()
        .flat_map(|s| actions.iter().map(move |a| (Some(s.to_string()), a.to_string())))
        .collect()
}

fn inert(n: &Nrtss) -> BTreeMap<Sort, RawTerm> {
    let null = n.signature.apply("null", vec![]).expect("null in the signature");
    [(n.state_sort.clone(), null)].into_iter().collect()
}

pub fn bundle(name: &str) -> Result<CalculusBundle> {
    let nrtss = by_name(name)?;
    let inert = inert(&nrtss);
    let ops = ["par", "sum", "rep", "new"];
    Ok(match name {
        "early" => {
            let mut d = shapes(&ops, &["outA", "boutA"]);
            d.extend(shapes(&["out"], &["outA"]));
            CalculusBundle {
                name: "early",
                bn: Some(BnSpec::new([("boutA", vec![2])])),
                strat: StratSpec {
                    defined_shapes: d,
                    measure: Some(strat_measure_early as Measure),
                },
                inert,
                nrtss,
            }
        }
        "late" => {
            let mut d = shapes(&ops, &["outA", "boutA", "binA"]);
            d.extend(shapes(&["out"], &["outA"]));
            d.extend(shapes(&["in"], &["binA"]));
            CalculusBundle {
                name: "late",
                bn: Some(BnSpec::new([("boutA", vec![2]), ("binA", vec![2])])),
                strat: StratSpec {
                    defined_shapes: d,
                    measure: Some(strat_measure_late as Measure),
                },
                inert,
                nrtss,
            }
        }
        "early-abs" => {
            let mut d = shapes(&ops, &["inA", "outA", "tauA"]);
            d.extend(shapes(&["in"], &["inA"]));
            d.extend(shapes(&["out"], &["outA"]));
            d.extend(shapes(&["tau"], &["tauA"]));
            CalculusBundle {
                name: "early-abs",
                bn: None,
                strat: StratSpec {
                    defined_shapes: d,
                    measure: Some(strat_measure_early_abs as Measure),
                },
                inert,
                nrtss,
            }
        }
        "late-abs" => {
            let mut d = shapes(&ops, &["outA", "tauA"]);
            d.extend(shapes(&["out"], &["outA"]));
            d.extend(shapes(&["tau"], &["tauA"]));
            CalculusBundle {
                name: "late-abs",
                bn: None,
                strat: StratSpec {
                    defined_shapes: d,
                    measure: Some(strat_measure_late_abs as Measure),
                },
                inert,
                nrtss,
            }
        }
        other => return Err(Error::Other(format!("unknown calculus `{other}`"))),
    })
}

fn max_def<I: IntoIterator<Item = Option<usize>>>(xs: I) -> Option<usize> {
    xs.into_iter().flatten().max()
}

fn succ(x: Option<usize>) -> Option<usize> {
    x.map(|v| v + 1)
}

/// Head and atom arguments of a ground action.
fn action(l: &NominalTerm) -> Option<(String, Vec<Atom>)> {
    let (f, args) = l.app_args()?;
    let atoms = args.iter().map(|a| a.as_atom().cloned()).collect::<Option<Vec<_>>>()?;
    Some((f.to_string(), atoms))
}

fn mk_action(like: &NominalTerm, head: &str, args: &[Atom]) -> NominalTerm {
    NominalTerm::app(
        head,
        like.sort().clone(),
        NominalTerm::tuple(args.iter().cloned().map(NominalTerm::atom).collect()),
    )
}

/// Concretes an abstraction at an atom fresh for it and for `avoid`.
fn open_fresh(abs: &NominalTerm, avoid: &NominalTerm) -> Option<NominalTerm> {
    let (a, _) = abs.as_abs()?;
    let mut used = abs.support().clone();
    used.extend(avoid.support().iter().cloned());
    let c = fresh_atom(a.sort(), &used);
    abs.concrete(&c).ok()
}

fn plain_measure(p: &NominalTerm, l: &NominalTerm, late: bool) -> Option<usize> {
    let (h, args) = action(l)?;
    if !(h == "outA" || h == "boutA" || (late && h == "binA")) {
        return None;
    }
    let (f, ps) = p.app_args()?;
    match f {
        "out" => (h == "outA" && ps[0].as_atom() == Some(&args[0]) && ps[1].as_atom() == Some(&args[1])).then_some(0),
        "in" if late => {
            // in(a, [b]q) at binA(a, b): b must be usable as the binder
            let ok = h == "binA" && ps[0].as_atom() == Some(&args[0]) && ps[1].concrete(&args[1]).is_ok();
            ok.then_some(0)
        }
        "par" | "sum" => succ(max_def([plain_measure(&ps[0], l, late), plain_measure(&ps[1], l, late)])),
        "rep" => succ(plain_measure(&ps[0], l, late)),
        "new" => {
            // new([c]q) with c # ℓ; and, at boutA(a, b), new([b]q) against outA(a, b)
            let general = open_fresh(&ps[0], l).and_then(|q| succ(plain_measure(&q, l, late)));
            let opened = if h == "boutA" {
                ps[0]
                    .concrete(&args[1])
                    .ok()
                    .and_then(|q| succ(plain_measure(&q, &mk_action(l, "outA", &args), late)))
            } else {
                None
            };
            max_def([general, opened])
        }
        _ => None,
    }
}

pub fn strat_measure_early(p: &NominalTerm, l: &NominalTerm) -> Option<usize> {
    plain_measure(p, l, false)
}

pub fn strat_measure_late(p: &NominalTerm, l: &NominalTerm) -> Option<usize> {
    plain_measure(p, l, true)
}

/// `[c]h(a, b)` with `c` fresh.
fn abs_action(like: &NominalTerm, head: &str, args: &[Atom]) -> NominalTerm {
    let l = mk_action(like, head, args);
    let (c, _) = like.as_abs().expect("abstraction");
    let c = fresh_atom(c.sort(), l.support());
    NominalTerm::abstraction(&c, &l)
}

/// Largest order among the output/input pairs a communication of `p` with
/// `q` could use. Channel and object range over the atoms of `p` and `q`
/// and two fresh atoms, which covers every case up to permutation.
fn comm_pairs(p: &NominalTerm, q: &NominalTerm, like: &NominalTerm, early: bool) -> Option<usize> {
    let (c, _) = like.as_abs()?;
    let mut atoms: BTreeSet<Atom> = p.support().union(q.support()).cloned().collect();
    let f1 = fresh_atom(c.sort(), &atoms);
    atoms.insert(f1);
    let f2 = fresh_atom(c.sort(), &atoms);
    atoms.insert(f2);
    let mut best = None;
    for a in &atoms {
        for b in &atoms {
            let out = abs_action(like, "outA", &[a.clone(), b.clone()]);
            let inp = abs_action(like, "inA", &[a.clone(), b.clone()]);
            best = max_def([
                best,
                abs_measure(p, &out, early),
                abs_measure(q, &inp, early),
                abs_measure(q, &out, early),
                abs_measure(p, &inp, early),
            ]);
        }
    }
    best
}

fn abs_measure(p: &NominalTerm, al: &NominalTerm, early: bool) -> Option<usize> {
    let (d, body) = al.as_abs()?;
    if !body.is_fresh(d) {
        return None;
    }
    let (h, args) = action(&body)?;
    let heads: &[&str] = if early { &["inA", "outA", "tauA"] } else { &["outA", "tauA"] };
    if !heads.contains(&h.as_str()) {
        return None;
    }
    let (f, ps) = p.app_args()?;
    match f {
        "in" if early => (h == "inA" && ps[0].as_atom() == Some(&args[0])).then_some(0),
        "out" => (h == "outA" && ps[0].as_atom() == Some(&args[0]) && ps[1].as_atom() == Some(&args[1])).then_some(0),
        "tau" => (h == "tauA").then_some(0),
        "par" => succ(max_def([
            abs_measure(&ps[0], al, early),
            abs_measure(&ps[1], al, early),
            comm_pairs(&ps[0], &ps[1], al, early),
        ])),
        "sum" => succ(max_def([abs_measure(&ps[0], al, early), abs_measure(&ps[1], al, early)])),
        "rep" => succ(max_def([abs_measure(&ps[0], al, early), comm_pairs(&ps[0], &ps[0], al, early)])),
        "new" => open_fresh(&ps[0], al).and_then(|q| succ(abs_measure(&q, al, early))),
        _ => None,
    }
}

pub fn strat_measure_early_abs(p: &NominalTerm, al: &NominalTerm) -> Option<usize> {
    abs_measure(p, al, true)
}

pub fn strat_measure_late_abs(p: &NominalTerm, al: &NominalTerm) -> Option<usize> {
    abs_measure(p, al, false)
}

/// The abstraction counterpart of a plain calculus and back.
pub fn counterpart(name: &str) -> Option<&'static str> {
    match name {
        "early" => Some("early-abs"),
        "late" => Some("late-abs"),
        "early-abs" => Some("early"),
        "late-abs" => Some("late"),
        _ => None,
    }
}

/// Whether some replicated body offers a choice. From such processes the
/// plain rule sets derive residuals that are not closed under renaming
/// their bound name: the discarded summand stays behind in the replicated
/// copy and may capture it. Abstraction residuals are unaffected.
pub fn replicates_choice(t: &RawTerm) -> bool {
    match t.kind() {
        Kind::App(f, s) if &**f == "rep" => s.fun_symbols().iter().any(|g| &**g == "sum") || replicates_choice(s),
        Kind::App(_, s) | Kind::Moderated(s, _) | Kind::Abs(_, s) => replicates_choice(s),
        Kind::Tuple(ts) => ts.iter().any(replicates_choice),
        Kind::Var(_) | Kind::Atom(_) => false,
    }
}
