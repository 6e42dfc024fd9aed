//! Matching of ground states against rule sources, bounded derivation of
//! transitions with proof trees, and proof checking.
//!
//! Infinite branching over atoms is cut down to a finite universe. The
//! visible pool holds the atoms of the query plus a few fresh ones; inside a
//! derivation every node may also use a small reserve of atoms fresh for
//! everything visible at that node, so that premisses can pick fresh binders.
//! Only transitions whose atoms lie in the pool are reported.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::foundation::{fresh_atoms, Atom, AtomSort, Permutation};
use crate::freshness::FreshAssertion;
use crate::nominal::{interpret, NominalTerm};
use crate::nrtss::{Nrtss, RuleSchema};
use crate::terms::{Kind, RawTerm, Signature, Substitution, Variable};

pub const DEFAULT_FRESH_SLACK: usize = 2;
pub const DEFAULT_FUEL: usize = 16;
/// Extra fresh atoms per sort available to each node of a derivation.
pub const DEFAULT_RESERVE: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: NominalTerm,
    pub residual: NominalTerm,
}

impl Transition {
    pub fn new(source: NominalTerm, residual: NominalTerm) -> Self {
        Transition { source, residual }
    }

    pub fn perm(&self, p: &Permutation) -> Transition {
        Transition::new(self.source.perm(p), self.residual.perm(p))
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        self.source.support().union(self.residual.support()).cloned().collect()
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --> {}", self.source, self.residual)
    }
}

/// Renders an action as `head(a,b)`, or just `head` without arguments.
pub fn format_action(t: &NominalTerm) -> String {
    match t.app_args() {
        Some((h, args)) if args.is_empty() => h.to_string(),
        Some((h, args)) => {
            let parts: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            format!("{h}({})", parts.join(","))
        }
        None => t.to_string(),
    }
}

/// Renders a residual as `action / target`, prefixed with `[a] ` for
/// abstraction residuals.
pub fn format_residual(r: &NominalTerm) -> String {
    if let Some((a, body)) = r.as_abs() {
        return format!("[{a}] {}", format_residual(&body));
    }
    match r.components() {
        Some(cs) if cs.len() == 2 => format!("{} / {}", format_action(&cs[0]), cs[1]),
        _ => r.to_string(),
    }
}

/// Metavariable assignment built while matching a rule.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    /// Placeholder atom of a metavariable to its value.
    pub atoms: BTreeMap<Atom, Atom>,
    pub vars: BTreeMap<Variable, NominalTerm>,
}

impl Assignment {
    fn atom_values(&self) -> BTreeSet<Atom> {
        self.atoms.values().cloned().collect()
    }

    /// `φ(t)` as a nominal term. Values are inserted through raw
    /// representatives whose binders avoid every assigned atom, so no
    /// binder or renaming of the pattern can capture them.
    pub fn ground_raw(&self, t: &RawTerm) -> Result<RawTerm> {
        let raw = t.instantiate_atoms(&self.atoms)?;
        let avoid = self.atom_values();
        let mut phi = Substitution::new();
        for v in raw.vars() {
            let val = self
                .vars
                .get(&v)
                .ok_or_else(|| Error::NotGround(format!("{v} is unassigned")))?;
            phi.insert(v, val.representative_avoiding(&avoid))?;
        }
        Ok(raw.substitute(&phi))
    }

    pub fn ground(&self, t: &RawTerm) -> Result<NominalTerm> {
        interpret(&self.ground_raw(t)?)
    }
}

/// The visible atoms of a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPool {
    atoms: BTreeSet<Atom>,
    pub fresh_slack: usize,
}

impl AtomPool {
    /// `supp(state)` plus `fresh_slack` fresh atoms of every atom sort.
    pub fn for_state(sig: &Signature, state: &NominalTerm, fresh_slack: usize) -> Self {
        Self::around(sig, state.support().iter().cloned(), fresh_slack)
    }

    /// The given atoms plus `fresh_slack` fresh atoms of every atom sort.
    pub fn around(sig: &Signature, atoms: impl IntoIterator<Item = Atom>, fresh_slack: usize) -> Self {
        let mut set: BTreeSet<Atom> = atoms.into_iter().collect();
        let base = set.clone();
        for s in sig.atom_sorts() {
            set.extend(fresh_atoms(s, &base, fresh_slack));
        }
        AtomPool {
            atoms: set,
            fresh_slack,
        }
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn contains_all(&self, s: &BTreeSet<Atom>) -> bool {
        s.is_subset(&self.atoms)
    }

    /// All transpositions of two pool atoms of the same sort.
    pub fn transpositions(&self) -> Vec<Permutation> {
        let v: Vec<&Atom> = self.atoms.iter().collect();
        let mut out = Vec::new();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                if a.sort() == b.sort() {
                    out.push(Permutation::swap(a, b).expect("same sort"));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub root: Transition,
    pub rule: String,
    /// Atom metavariables by name, in declaration order.
    pub atoms: Vec<(String, Atom)>,
    /// Values of term variables and action metavariables.
    pub subst: Vec<(Variable, NominalTerm)>,
    /// Ground instances of the rule's freshness assertions.
    pub discharged: Vec<FreshAssertion>,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    /// Rule ids in preorder.
    pub fn rule_ids(&self) -> Vec<&str> {
        let mut out = vec![self.rule.as_str()];
        for c in &self.children {
            out.extend(c.rule_ids());
        }
        out
    }

    /// Nested rule ids, e.g. `Open(Out)`.
    pub fn shape(&self) -> String {
        if self.children.is_empty() {
            return self.rule.clone();
        }
        let kids: Vec<String> = self.children.iter().map(|c| c.shape()).collect();
        format!("{}({})", self.rule, kids.join(", "))
    }

    /// Every node, preorder.
    pub fn nodes(&self) -> Vec<&ProofTree> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    fn assignment(&self, rule: &RuleSchema) -> Option<Assignment> {
        let mut s = Assignment::default();
        for (name, a) in &self.atoms {
            s.atoms.insert(rule.atom_param(name)?.clone(), a.clone());
        }
        for (v, t) in &self.subst {
            s.vars.insert(v.clone(), t.clone());
        }
        Some(s)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s, 0);
        s
    }

    fn render_into(&self, s: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let atoms: Vec<String> = self.atoms.iter().map(|(n, a)| format!("{n}={a}")).collect();
        let _ = write!(
            s,
            "{pad}{} [{}]  {} --> {}",
            self.rule,
            atoms.join(" "),
            self.root.source,
            format_residual(&self.root.residual)
        );
        if !self.discharged.is_empty() {
            let fs: Vec<String> = self
                .discharged
                .iter()
                .map(|a| format!("{} # {}", a.atom, interpret(&a.term).map(|t| t.to_string()).unwrap_or_default()))
                .collect();
            let _ = write!(s, "  with {}", fs.join(", "));
        }
        s.push('\n');
        for c in &self.children {
            c.render_into(s, depth + 1);
        }
    }
}

/// Transitions of a state with one proof tree each.
#[derive(Clone, Debug, Default)]
pub struct Derivation {
    pub transitions: BTreeMap<Transition, ProofTree>,
    /// Set when the fuel ran out somewhere, so the set may be incomplete.
    pub incomplete: bool,
}

impl Derivation {
    pub fn set(&self) -> BTreeSet<Transition> {
        self.transitions.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

type Key = (NominalTerm, BTreeSet<Atom>, usize);

/// Derivation engine with a memo table; reuse it for repeated queries on
/// one rule set.
pub struct Engine<'a> {
    n: &'a Nrtss,
    pub reserve: usize,
    memo: HashMap<Key, Rc<Derivation>>,
}

impl<'a> Engine<'a> {
    pub fn new(n: &'a Nrtss) -> Self {
        Engine {
            n,
            reserve: DEFAULT_RESERVE,
            memo: HashMap::new(),
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn nrtss(&self) -> &Nrtss {
        self.n
    }

    /// Transitions of `state` whose atoms lie in the pool, with derivation
    /// depth at most `fuel`.
    pub fn derive(&mut self, state: &NominalTerm, pool: &AtomPool, fuel: usize) -> Result<Derivation> {
        if state.sort() != &self.n.state_sort {
            return Err(Error::SortMismatch(format!(
                "{state} is not of the state sort {}",
                self.n.state_sort
            )));
        }
        let mut visible = pool.atoms().clone();
        visible.extend(state.support().iter().cloned());
        let d = self.node(state, visible, fuel)?;
        let transitions = d
            .transitions
            .iter()
            .filter(|(t, _)| pool.contains_all(&t.support()))
            .map(|(t, p)| (t.clone(), p.clone()))
            .collect();
        Ok(Derivation {
            transitions,
            incomplete: d.incomplete,
        })
    }

    fn universe(&self, visible: &BTreeSet<Atom>) -> BTreeMap<AtomSort, Vec<Atom>> {
        let mut u: BTreeMap<AtomSort, Vec<Atom>> = BTreeMap::new();
        for s in self.n.signature.atom_sorts() {
            let mut atoms: Vec<Atom> = visible.iter().filter(|a| a.sort() == s).cloned().collect();
            atoms.extend(fresh_atoms(s, visible, self.reserve));
            atoms.sort();
            u.insert(s.clone(), atoms);
        }
        u
    }

    fn node(&mut self, state: &NominalTerm, visible: BTreeSet<Atom>, fuel: usize) -> Result<Rc<Derivation>> {
        let key = (state.clone(), visible, fuel);
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let visible = &key.1;
        let mut out = Derivation::default();
        if fuel == 0 {
            out.incomplete = true;
        } else {
            let u = self.universe(visible);
            let n = self.n;
            for rule in &n.rules {
                self.apply_rule(rule, state, visible, &u, fuel, &mut out)?;
            }
        }
        let d = Rc::new(out);
        self.memo.insert(key, d.clone());
        Ok(d)
    }

    fn apply_rule(
        &mut self,
        rule: &RuleSchema,
        state: &NominalTerm,
        visible: &BTreeSet<Atom>,
        u: &BTreeMap<AtomSort, Vec<Atom>>,
        fuel: usize,
        out: &mut Derivation,
    ) -> Result<()> {
        let mut partial: Vec<(Assignment, Vec<ProofTree>)> = Vec::new();
        let mut ms = Vec::new();
        match_term(&rule.source, state, Assignment::default(), u, &mut ms);
        for m in dedup(ms) {
            partial.push((m, Vec::new()));
        }
        for prem in &rule.premises {
            let mut next: BTreeMap<Assignment, Vec<ProofTree>> = BTreeMap::new();
            for (sigma, kids) in &partial {
                for s1 in enumerate_atoms(&prem.source.support(), sigma, u) {
                    let child = s1.ground(&prem.source)?;
                    let mut v2 = visible.clone();
                    v2.extend(child.support().iter().cloned());
                    let d = self.node(&child, v2, fuel - 1)?;
                    out.incomplete |= d.incomplete;
                    for (tr, pt) in &d.transitions {
                        let mut ms = Vec::new();
                        match_term(&prem.target, &tr.residual, s1.clone(), u, &mut ms);
                        for m in ms {
                            if let Some(m) = bind_actions(rule, m) {
                                next.entry(m).or_insert_with(|| {
                                    let mut k = kids.clone();
                                    k.push(pt.clone());
                                    k
                                });
                            }
                        }
                    }
                }
            }
            partial = next.into_iter().collect();
            if partial.is_empty() {
                return Ok(());
            }
        }
        for (sigma, kids) in partial {
            if rule.action_params.iter().any(|p| !sigma.vars.contains_key(&p.var)) {
                continue;
            }
            for (s, discharged) in close_env(rule, &sigma, u)? {
                let residual = s.ground(&rule.target)?;
                let tr = Transition::new(state.clone(), residual);
                if out.transitions.contains_key(&tr) {
                    continue;
                }
                let pt = ProofTree {
                    root: tr.clone(),
                    rule: rule.id.clone(),
                    atoms: rule
                        .atom_params
                        .iter()
                        .filter_map(|(n, p)| s.atoms.get(p).map(|a| (n.clone(), a.clone())))
                        .collect(),
                    subst: s.vars.iter().map(|(v, t)| (v.clone(), t.clone())).collect(),
                    discharged,
                    children: kids.clone(),
                };
                out.transitions.insert(tr, pt);
            }
        }
        Ok(())
    }
}

/// Convenience wrapper around [`Engine::derive`].
pub fn derive(n: &Nrtss, state: &NominalTerm, pool: &AtomPool, fuel: usize) -> Result<Derivation> {
    Engine::new(n).derive(state, pool, fuel)
}

/// Extensions of `sigma` to the remaining metavariables of the target and
/// environment under which every freshness assertion holds, with the
/// ground assertions. Assertions are grounded as soon as their terms are
/// determined, so failing branches are cut early.
fn close_env(
    rule: &RuleSchema,
    sigma: &Assignment,
    u: &BTreeMap<AtomSort, Vec<Atom>>,
) -> Result<Vec<(Assignment, Vec<FreshAssertion>)>> {
    let mut rest: BTreeSet<Atom> = rule.target.support();
    for a in rule.env.iter() {
        rest.insert(a.atom.clone());
        rest.extend(a.term.support());
    }
    let order: Vec<Atom> = rest.into_iter().filter(|a| !sigma.atoms.contains_key(a)).collect();
    let env: Vec<(&FreshAssertion, BTreeSet<Atom>)> = rule.env.iter().map(|a| (a, a.term.support())).collect();
    let mut grounded = vec![None; env.len()];
    let mut out = Vec::new();
    close_step(&env, &order, 0, sigma.clone(), &mut grounded, u, &mut out)?;
    Ok(out)
}

fn close_step(
    env: &[(&FreshAssertion, BTreeSet<Atom>)],
    order: &[Atom],
    i: usize,
    s: Assignment,
    grounded: &mut Vec<Option<(RawTerm, NominalTerm)>>,
    u: &BTreeMap<AtomSort, Vec<Atom>>,
    out: &mut Vec<(Assignment, Vec<FreshAssertion>)>,
) -> Result<()> {
    let mut fresh_here = Vec::new();
    let mut ok = true;
    for (j, (a, deps)) in env.iter().enumerate() {
        if grounded[j].is_none() && deps.iter().all(|d| s.atoms.contains_key(d)) {
            let raw = s.ground_raw(&a.term)?;
            let nt = interpret(&raw)?;
            grounded[j] = Some((raw, nt));
            fresh_here.push(j);
        }
        if let (Some((_, nt)), Some(x)) = (&grounded[j], s.atoms.get(&a.atom)) {
            if !nt.is_fresh(x) {
                ok = false;
                break;
            }
        }
    }
    if ok {
        if i == order.len() {
            let discharged = env
                .iter()
                .zip(grounded.iter())
                .map(|((a, _), g)| FreshAssertion::new(s.atoms[&a.atom].clone(), g.as_ref().expect("grounded").0.clone()))
                .collect();
            out.push((s, discharged));
        } else {
            let a = &order[i];
            for c in u.get(a.sort()).map(Vec::as_slice).unwrap_or(&[]) {
                let mut s2 = s.clone();
                s2.atoms.insert(a.clone(), c.clone());
                close_step(env, order, i + 1, s2, grounded, u, out)?;
            }
        }
    }
    for j in fresh_here {
        grounded[j] = None;
    }
    Ok(())
}

fn dedup(v: Vec<Assignment>) -> BTreeSet<Assignment> {
    v.into_iter().collect()
}

/// Extensions of `sigma` giving every unassigned placeholder in `atoms` a
/// value from the universe.
fn enumerate_atoms(
    atoms: &BTreeSet<Atom>,
    sigma: &Assignment,
    u: &BTreeMap<AtomSort, Vec<Atom>>,
) -> Vec<Assignment> {
    let mut out = vec![sigma.clone()];
    for a in atoms {
        if sigma.atoms.contains_key(a) {
            continue;
        }
        let choices = u.get(a.sort()).map(Vec::as_slice).unwrap_or(&[]);
        out = out
            .into_iter()
            .flat_map(|s| {
                choices.iter().map(move |c| {
                    let mut s2 = s.clone();
                    s2.atoms.insert(a.clone(), c.clone());
                    s2
                })
            })
            .collect();
    }
    out
}

/// Checks head constraints of bound action metavariables and binds their
/// argument metavariables.
fn bind_actions(rule: &RuleSchema, mut s: Assignment) -> Option<Assignment> {
    for p in &rule.action_params {
        let Some(t) = s.vars.get(&p.var) else { continue };
        let (head, args) = t.app_args()?;
        if !p.admits(head) {
            return None;
        }
        if let Some(want) = &p.args {
            if want.len() != args.len() {
                return None;
            }
            let args: Vec<Atom> = args.iter().map(|a| a.as_atom().cloned()).collect::<Option<_>>()?;
            for (m, a) in want.iter().zip(args) {
                match s.atoms.get(m) {
                    Some(b) if *b != a => return None,
                    Some(_) => {}
                    None => {
                        s.atoms.insert(m.clone(), a);
                    }
                }
            }
        }
    }
    Some(s)
}

fn match_term(
    pat: &RawTerm,
    t: &NominalTerm,
    s: Assignment,
    u: &BTreeMap<AtomSort, Vec<Atom>>,
    out: &mut Vec<Assignment>,
) {
    if pat.sort() != t.sort() {
        return;
    }
    match pat.kind() {
        Kind::Var(v) => match s.vars.get(v) {
            Some(old) if old != t => {}
            Some(_) => out.push(s),
            None => {
                let mut s = s;
                s.vars.insert(v.clone(), t.clone());
                out.push(s);
            }
        },
        Kind::Atom(a) => {
            let Some(b) = t.as_atom() else { return };
            match s.atoms.get(a) {
                Some(old) if old != b => {}
                Some(_) => out.push(s),
                None => {
                    let mut s = s;
                    s.atoms.insert(a.clone(), b.clone());
                    out.push(s);
                }
            }
        }
        Kind::Moderated(..) => {}
        Kind::Abs(a, body) => {
            let Some((c, _)) = t.as_abs() else { return };
            let cands: Vec<Atom> = match s.atoms.get(a) {
                Some(x) => vec![x.clone()],
                None => {
                    let mut v: Vec<Atom> = u.get(a.sort()).cloned().unwrap_or_default();
                    if !v.contains(c) {
                        v.push(c.clone());
                    }
                    v
                }
            };
            for x in cands {
                if x != *c && !t.is_fresh(&x) {
                    continue;
                }
                let Ok(inner) = t.concrete(&x) else { continue };
                let mut s2 = s.clone();
                s2.atoms.insert(a.clone(), x);
                match_term(body, &inner, s2, u, out);
            }
        }
        Kind::Tuple(ps) => {
            let Some(cs) = t.components() else { return };
            if cs.len() != ps.len() {
                return;
            }
            let mut acc = vec![s];
            for (p, c) in ps.iter().zip(&cs) {
                let mut next = Vec::new();
                for s in acc {
                    match_term(p, c, s, u, &mut next);
                }
                acc = next;
            }
            out.extend(acc);
        }
        Kind::App(f, p) => {
            let Some((g, arg)) = t.as_app() else { return };
            if **f == *g {
                match_term(p, &arg, s, u, out);
            }
        }
    }
}

/// Matches a moderation-free pattern against a ground state, binding
/// abstraction metavariables at pool atoms.
pub fn match_state(pattern: &RawTerm, state: &NominalTerm, pool: &AtomPool) -> Result<Vec<Assignment>> {
    if pattern.has_moderation() {
        return Err(Error::Other("patterns must be moderation-free".into()));
    }
    let mut u: BTreeMap<AtomSort, Vec<Atom>> = BTreeMap::new();
    for a in pool.atoms() {
        u.entry(a.sort().clone()).or_default().push(a.clone());
    }
    let mut out = Vec::new();
    match_term(pattern, state, Assignment::default(), &u, &mut out);
    Ok(dedup(out).into_iter().collect())
}

/// Revalidates every node of a proof tree against the rule set.
pub fn check_proof(n: &Nrtss, pt: &ProofTree) -> bool {
    check_node(n, pt).unwrap_or(false)
}

fn check_node(n: &Nrtss, pt: &ProofTree) -> Result<bool> {
    let Some(rule) = n.rule(&pt.rule) else {
        return Ok(false);
    };
    let Some(s) = pt.assignment(rule) else {
        return Ok(false);
    };
    for (v, t) in &s.vars {
        if &v.sort != t.sort() {
            return Ok(false);
        }
    }
    if bind_actions(rule, s.clone()).as_ref() != Some(&s) {
        return Ok(false);
    }
    if s.ground(&rule.source)? != pt.root.source || s.ground(&rule.target)? != pt.root.residual {
        return Ok(false);
    }
    if rule.premises.len() != pt.children.len() {
        return Ok(false);
    }
    for (p, c) in rule.premises.iter().zip(&pt.children) {
        if s.ground(&p.source)? != c.root.source || s.ground(&p.target)? != c.root.residual {
            return Ok(false);
        }
    }
    for a in rule.env.iter() {
        let Some(atom) = s.atoms.get(&a.atom) else {
            return Ok(false);
        };
        if !s.ground(&a.term)?.is_fresh(atom) {
            return Ok(false);
        }
    }
    for c in &pt.children {
        if !check_node(n, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}
