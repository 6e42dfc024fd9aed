//! Rule schemas and rule sets, with a text format.
//!
//! Atom metavariables of a schema are stored as placeholder atoms of their
//! sort (the i-th declared metavariable of a sort is index i), so a schema's
//! terms are also its instance with pairwise distinct atoms. Action
//! metavariables are variables of the action sort with head constraints.
//! The grammar of the text format is in `docs/rule-spec.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::foundation::{Atom, AtomSort};
use crate::freshness::{FreshAssertion, FreshnessEnv};
use crate::syntax::{perr, Ast, Elab, Parser, Pos, Resolved, Tok};
use crate::terms::{Kind, RawTerm, Signature, Sort, Substitution, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub source: RawTerm,
    pub target: RawTerm,
}

/// A metavariable ranging over ground actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionParam {
    pub var: Variable,
    /// Allowed head symbols; `None` allows every constructor of the sort.
    pub allowed: Option<BTreeSet<String>>,
    pub forbidden: BTreeSet<String>,
    /// Atom metavariables the action's arguments must equal, if given.
    pub args: Option<Vec<Atom>>,
}

impl ActionParam {
    pub fn name(&self) -> &str {
        &self.var.name
    }

    pub fn admits(&self, head: &str) -> bool {
        !self.forbidden.contains(head)
            && self.allowed.as_ref().map_or(true, |a| a.contains(head))
    }

    /// Heads this parameter may take, given all constructors of its sort.
    pub fn heads<'a>(&'a self, sig: &'a Signature) -> Vec<&'a str> {
        let base = self.var.sort.as_base().unwrap_or_default();
        sig.constructors_of(base)
            .map(|(f, _)| f)
            .filter(|f| self.admits(f))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSchema {
    pub id: String,
    /// Metavariable names with their placeholder atoms, in declaration order.
    pub atom_params: Vec<(String, Atom)>,
    pub action_params: Vec<ActionParam>,
    pub premises: Vec<Premise>,
    pub env: FreshnessEnv,
    pub source: RawTerm,
    pub target: RawTerm,
}

/// A rule with its metavariables fixed; term variables remain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub premises: Vec<Premise>,
    pub env: FreshnessEnv,
    pub source: RawTerm,
    pub target: RawTerm,
}

impl RuleInstance {
    pub fn substitute(&self, phi: &Substitution) -> RuleInstance {
        RuleInstance {
            premises: self
                .premises
                .iter()
                .map(|p| Premise {
                    source: p.source.substitute(phi),
                    target: p.target.substitute(phi),
                })
                .collect(),
            env: self.env.substitute(phi),
            source: self.source.substitute(phi),
            target: self.target.substitute(phi),
        }
    }
}

impl RuleSchema {
    pub fn atom_param(&self, name: &str) -> Option<&Atom> {
        self.atom_params.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    pub fn atom_name(&self, a: &Atom) -> Option<&str> {
        self.atom_params
            .iter()
            .find(|(_, b)| b == a)
            .map(|(n, _)| n.as_str())
    }

    pub fn action_param(&self, v: &Variable) -> Option<&ActionParam> {
        self.action_params.iter().find(|p| &p.var == v)
    }

    fn all_terms(&self) -> Vec<&RawTerm> {
        let mut ts = vec![&self.source, &self.target];
        for p in &self.premises {
            ts.push(&p.source);
            ts.push(&p.target);
        }
        ts.extend(self.env.iter().map(|a| &a.term));
        ts
    }

    /// Term variables, excluding action metavariables.
    pub fn term_vars(&self) -> BTreeSet<Variable> {
        self.all_terms()
            .into_iter()
            .flat_map(|t| t.vars())
            .filter(|v| self.action_param(v).is_none())
            .collect()
    }

    /// Fixes the metavariables. Atom metavariables missing from `atoms` and
    /// action metavariables missing from `actions` are left in place.
    pub fn instantiate(
        &self,
        atoms: &BTreeMap<Atom, Atom>,
        actions: &BTreeMap<Variable, RawTerm>,
    ) -> Result<RuleInstance> {
        let mut phi = Substitution::new();
        for (v, t) in actions {
            phi.insert(v.clone(), t.clone())?;
        }
        let inst = |t: &RawTerm| -> Result<RawTerm> { Ok(t.instantiate_atoms(atoms)?.substitute(&phi)) };
        let mut premises = Vec::new();
        for p in &self.premises {
            premises.push(Premise {
                source: inst(&p.source)?,
                target: inst(&p.target)?,
            });
        }
        let mut env = Vec::new();
        for a in self.env.iter() {
            let atom = atoms.get(&a.atom).cloned().unwrap_or_else(|| a.atom.clone());
            env.push(FreshAssertion::new(atom, inst(&a.term)?));
        }
        Ok(RuleInstance {
            premises,
            env: env.into_iter().collect(),
            source: inst(&self.source)?,
            target: inst(&self.target)?,
        })
    }

    /// Renders a term of this rule with metavariable names.
    pub fn render(&self, t: &RawTerm) -> String {
        t.display_with(
            &|a| self.atom_name(a).map(str::to_string).unwrap_or_else(|| a.to_string()),
            &|v| {
                if self.action_param(v).is_some() {
                    v.name.to_string()
                } else {
                    v.to_string()
                }
            },
        )
    }

    pub fn render_assertion(&self, a: &FreshAssertion) -> String {
        let atom = self.atom_name(&a.atom).map(str::to_string).unwrap_or_else(|| a.atom.to_string());
        format!("{atom} # {}", self.render(&a.term))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("rule {}", self.id);
        let mut by_sort: BTreeMap<&AtomSort, Vec<&str>> = BTreeMap::new();
        for (n, a) in &self.atom_params {
            by_sort.entry(a.sort()).or_default().push(n);
        }
        for (sort, names) in by_sort {
            let _ = write!(s, " forall {} : {sort}", names.join(" "));
        }
        for p in &self.action_params {
            let _ = write!(s, " forall {}", p.name());
            if let Some(args) = &p.args {
                let names: Vec<String> = args
                    .iter()
                    .map(|a| self.atom_name(a).unwrap_or("?").to_string())
                    .collect();
                let _ = write!(s, "({})", names.join(" "));
            }
            s.push_str(" : action");
            if let Some(al) = &p.allowed {
                let _ = write!(s, " in {{{}}}", al.iter().cloned().collect::<Vec<_>>().join(", "));
            }
            if !p.forbidden.is_empty() {
                let _ = write!(
                    s,
                    " \\ {{{}}}",
                    p.forbidden.iter().cloned().collect::<Vec<_>>().join(", ")
                );
            }
        }
        s.push_str(" {\n");
        for p in &self.premises {
            let _ = writeln!(s, "  premise {} -> {};", self.render(&p.source), self.render(&p.target));
        }
        for a in self.env.iter() {
            let _ = writeln!(s, "  fresh {};", self.render_assertion(a));
        }
        let _ = writeln!(s, "  conclusion {} -> {};", self.render(&self.source), self.render(&self.target));
        s.push_str("}\n");
        s
    }
}

/// A rule set over a signature, with its state, residual and action sorts
/// and the binding positions of action symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nrtss {
    pub signature: Signature,
    pub state_sort: Sort,
    pub residual_sort: Sort,
    pub action_sort: Sort,
    /// Action head to 1-based argument positions whose atoms are bound.
    pub binding: BTreeMap<String, BTreeSet<usize>>,
    pub rules: Vec<RuleSchema>,
}

impl Nrtss {
    pub fn rule(&self, id: &str) -> Option<&RuleSchema> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Whether residuals are abstractions `[a](ℓ, t)`.
    pub fn is_abstraction(&self) -> bool {
        matches!(self.residual_sort, Sort::Abs(..))
    }

    /// The atom sort bound in abstraction residuals.
    pub fn residual_binder_sort(&self) -> Option<&AtomSort> {
        match &self.residual_sort {
            Sort::Abs(a, _) => Some(a),
            _ => None,
        }
    }

    /// Bound atoms of a ground action, by the binding declarations.
    pub fn bound_names(&self, action: &RawTerm) -> BTreeSet<Atom> {
        let Some((f, args)) = action.app_args() else {
            return BTreeSet::new();
        };
        let Some(pos) = self.binding.get(f) else {
            return BTreeSet::new();
        };
        pos.iter()
            .filter_map(|i| args.get(i - 1).and_then(|t| t.as_atom().cloned()))
            .collect()
    }

    /// Structural checks on every rule; see [`validate_rule`].
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for r in &self.rules {
            if !ids.insert(&r.id) {
                return Err(Error::InvalidRule {
                    rule: r.id.clone(),
                    msg: "duplicate rule id".into(),
                });
            }
            validate_rule(self, r)?;
        }
        for (f, pos) in &self.binding {
            let ty = self
                .signature
                .fun(f)
                .ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
            let n = match &ty.arg {
                Sort::Product(ps) => ps.len(),
                _ => 1,
            };
            if pos.iter().any(|&p| p == 0 || p > n) {
                return Err(Error::Other(format!("binding position out of range for {f}")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let sig = &self.signature;
        let mut s = String::from("signature {\n");
        let atoms: Vec<&str> = sig.atom_sorts().map(|a| a.name()).collect();
        let _ = writeln!(s, "  atom {};", atoms.join(" "));
        let bases: Vec<&str> = sig.base_sorts().collect();
        let _ = writeln!(s, "  base {};", bases.join(" "));
        for (f, ty) in sig.funs() {
            let arg = match &ty.arg {
                Sort::Product(ps) if ps.len() > 1 => ps
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" * "),
                other => other.to_string(),
            };
            let _ = writeln!(s, "  fun {f} : {arg} -> {};", ty.result);
        }
        let _ = writeln!(s, "  state {};", self.state_sort);
        let _ = writeln!(s, "  residual {};", self.residual_sort);
        let _ = writeln!(s, "  action {};", self.action_sort);
        for (f, pos) in &self.binding {
            let ps: Vec<String> = pos.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(s, "  binding {f} {};", ps.join(" "));
        }
        s.push_str("}\n");
        for r in &self.rules {
            s.push('\n');
            s.push_str(&r.to_text());
        }
        s
    }
}

fn invalid(r: &RuleSchema, msg: impl Into<String>) -> Error {
    Error::InvalidRule {
        rule: r.id.clone(),
        msg: msg.into(),
    }
}

fn var_occurrences(t: &RawTerm, out: &mut BTreeMap<Variable, usize>) {
    match t.kind() {
        Kind::Var(v) => *out.entry(v.clone()).or_default() += 1,
        Kind::Atom(_) => {}
        Kind::Moderated(s, _) | Kind::Abs(_, s) | Kind::App(_, s) => var_occurrences(s, out),
        Kind::Tuple(ts) => ts.iter().for_each(|s| var_occurrences(s, out)),
    }
}

/// Checks a rule against the rule set's sorts. Sources and premise targets
/// must be moderation-free; the conclusion source must be linear; every
/// atom must be a metavariable; variables of premise sources, targets and
/// the environment must be bound by the source or an earlier premise.
pub fn validate_rule(n: &Nrtss, r: &RuleSchema) -> Result<()> {
    let sig = &n.signature;
    let params: BTreeSet<&Atom> = r.atom_params.iter().map(|(_, a)| a).collect();
    if params.len() != r.atom_params.len() {
        return Err(invalid(r, "metavariables share a placeholder atom"));
    }
    for t in r.all_terms() {
        sig.check_term(t).map_err(|e| invalid(r, e.to_string()))?;
        if let Some(a) = t.support().into_iter().find(|a| !params.contains(a)) {
            return Err(Error::ConcreteAtomInRule {
                rule: r.id.clone(),
                atom: a.to_string(),
            });
        }
    }
    for a in r.env.iter() {
        if !params.contains(&a.atom) {
            return Err(Error::ConcreteAtomInRule {
                rule: r.id.clone(),
                atom: a.atom.to_string(),
            });
        }
    }
    for p in &r.action_params {
        if p.var.sort != n.action_sort {
            return Err(invalid(r, format!("action metavariable {} has sort {}", p.name(), p.var.sort)));
        }
        if p.heads(sig).is_empty() {
            return Err(invalid(r, format!("action metavariable {} admits no head", p.name())));
        }
        if let Some(args) = &p.args {
            for h in p.heads(sig) {
                let ty = sig.fun(h).expect("constructor");
                let ok = match &ty.arg {
                    Sort::Product(ps) => {
                        ps.len() == args.len()
                            && ps.iter().zip(args).all(|(s, a)| s == &Sort::Atom(a.sort().clone()))
                    }
                    s => args.len() == 1 && s == &Sort::Atom(args[0].sort().clone()),
                };
                if !ok {
                    return Err(invalid(r, format!("{h} does not fit the arguments of {}", p.name())));
                }
            }
        }
    }
    if r.source.sort() != &n.state_sort || r.target.sort() != &n.residual_sort {
        return Err(invalid(r, "conclusion must relate a state to a residual"));
    }
    let mut counts = BTreeMap::new();
    var_occurrences(&r.source, &mut counts);
    if let Some((v, _)) = counts.iter().find(|(_, c)| **c > 1) {
        return Err(invalid(r, format!("source is not linear in {v}")));
    }
    if r.source.has_moderation() {
        return Err(invalid(r, "source contains a moderated term"));
    }
    if r.source.vars().iter().any(|v| r.action_param(v).is_some()) {
        return Err(invalid(r, "action metavariable in the source"));
    }
    let mut bound: BTreeSet<Variable> = r.source.vars();
    bound.extend(r.action_params.iter().map(|p| p.var.clone()));
    for p in &r.premises {
        if p.source.sort() != &n.state_sort || p.target.sort() != &n.residual_sort {
            return Err(invalid(r, "premise must relate a state to a residual"));
        }
        if p.source.has_moderation() || p.target.has_moderation() {
            return Err(invalid(r, "premise contains a moderated term"));
        }
        if let Some(v) = p.source.vars().into_iter().find(|v| !bound.contains(v)) {
            return Err(invalid(r, format!("premise source variable {v} is not bound")));
        }
        bound.extend(p.target.vars());
    }
    for t in std::iter::once(&r.target).chain(r.env.iter().map(|a| &a.term)) {
        if let Some(v) = t.vars().into_iter().find(|v| !bound.contains(v)) {
            return Err(invalid(r, format!("variable {v} is not bound by the source or a premise")));
        }
    }
    Ok(())
}

/// Parses a rule set: one `signature { .. }` block followed by rules.
pub fn parse_ruleset(src: &str) -> Result<Nrtss> {
    let empty = Signature::new();
    let mut p = Parser::new(&empty, src)?;
    p.keyword("signature")?;
    p.expect(Tok::LBrace)?;
    let mut sig = Signature::new();
    let mut state = None;
    let mut residual = None;
    let mut action = None;
    let mut binding: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    while !p.eat(&Tok::RBrace) {
        let (kw, kp) = p.ident()?;
        match kw.as_str() {
            "atom" | "base" => {
                while let Some(Tok::Ident(_)) = p.peek() {
                    let (name, np) = p.ident()?;
                    let r = if kw == "atom" {
                        sig.add_atom_sort(&name)
                    } else {
                        sig.add_base_sort(&name)
                    };
                    r.map_err(|e| perr(np, e.to_string()))?;
                }
            }
            "fun" => {
                let (name, np) = p.ident()?;
                p.expect(Tok::Colon)?;
                let mut q = p.with_sig(&sig);
                let arg = q.sort()?;
                q.expect(Tok::Arrow)?;
                let (res, _) = q.ident()?;
                p = q.with_sig(&empty);
                sig.add_fun(&name, arg, &res).map_err(|e| perr(np, e.to_string()))?;
            }
            "state" | "residual" | "action" => {
                let mut q = p.with_sig(&sig);
                let s = q.sort()?;
                p = q.with_sig(&empty);
                match kw.as_str() {
                    "state" => state = Some(s),
                    "residual" => residual = Some(s),
                    _ => action = Some(s),
                }
            }
            "binding" => {
                let (f, _) = p.ident()?;
                let set = binding.entry(f).or_default();
                while let Some(Tok::Num(n)) = p.peek() {
                    set.insert(*n as usize);
                    p.next()?;
                }
            }
            other => return Err(perr(kp, format!("unknown signature item `{other}`"))),
        }
        p.expect(Tok::Semi)?;
    }
    let need = |s: Option<Sort>, what: &str| {
        s.ok_or_else(|| Error::Other(format!("signature does not declare the {what} sort")))
    };
    let state_sort = need(state, "state")?;
    let residual_sort = need(residual, "residual")?;
    let action_sort = need(action, "action")?;
    let mut p = p.with_sig(&sig);
    let mut rules = Vec::new();
    while !p.at_end() {
        rules.push(parse_rule(&mut p, &state_sort, &residual_sort, &action_sort)?);
    }
    let n = Nrtss {
        signature: sig.clone(),
        state_sort,
        residual_sort,
        action_sort,
        binding,
        rules,
    };
    n.validate()?;
    Ok(n)
}

struct RawRule {
    premises: Vec<(Ast, Ast)>,
    env: Vec<(Ast, Ast)>,
    conclusion: Option<(Ast, Ast)>,
}

fn parse_rule(
    p: &mut Parser<'_>,
    state_sort: &Sort,
    residual_sort: &Sort,
    action_sort: &Sort,
) -> Result<RuleSchema> {
    p.keyword("rule")?;
    let (id, _) = p.ident()?;
    let sig = p.sig;
    let mut atom_params: Vec<(String, Atom)> = Vec::new();
    let mut per_sort: BTreeMap<AtomSort, u32> = BTreeMap::new();
    let mut action_decls: Vec<(String, Option<Vec<(String, Pos)>>, Sort, Option<BTreeSet<String>>, BTreeSet<String>)> =
        Vec::new();
    while p.peek_keyword("forall") {
        p.next()?;
        let mut names = Vec::new();
        let mut args = None;
        while let Some(Tok::Ident(_)) = p.peek() {
            names.push(p.ident()?);
            if p.peek() == Some(&Tok::LParen) {
                p.next()?;
                let mut a = Vec::new();
                while let Some(Tok::Ident(_)) = p.peek() {
                    a.push(p.ident()?);
                }
                p.expect(Tok::RParen)?;
                args = Some(a);
            }
        }
        p.expect(Tok::Colon)?;
        if p.peek_keyword("action") {
            p.next()?;
            let sort = action_sort.clone();
            let mut allowed = None;
            let mut forbidden = BTreeSet::new();
            loop {
                if p.peek_keyword("in") {
                    p.next()?;
                    allowed = Some(head_set(p)?);
                } else if p.eat(&Tok::Backslash) {
                    forbidden.extend(head_set(p)?);
                } else {
                    break;
                }
            }
            for (n, _) in &names {
                action_decls.push((n.clone(), args.clone(), sort.clone(), allowed.clone(), forbidden.clone()));
            }
        } else {
            let (sort, sp) = p.ident()?;
            if !sig.has_atom_sort(&sort) {
                return Err(perr(sp, format!("{sort} is not an atom sort")));
            }
            if args.is_some() {
                return Err(perr(sp, "only action metavariables take arguments"));
            }
            let sort = AtomSort::new(&sort);
            for (n, np) in names {
                if atom_params.iter().any(|(m, _)| m == &n) {
                    return Err(perr(np, format!("metavariable {n} declared twice")));
                }
                let i = per_sort.entry(sort.clone()).or_default();
                atom_params.push((n, Atom::new(sort.clone(), *i)));
                *i += 1;
            }
        }
        p.eat(&Tok::Semi);
    }
    let mut action_params = Vec::new();
    for (name, args, sort, allowed, forbidden) in action_decls {
        let args = match args {
            None => None,
            Some(a) => Some(
                a.into_iter()
                    .map(|(n, np)| {
                        atom_params
                            .iter()
                            .find(|(m, _)| *m == n)
                            .map(|(_, a)| a.clone())
                            .ok_or_else(|| perr(np, format!("undeclared metavariable {n}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        action_params.push(ActionParam {
            var: Variable::new(&name, sort),
            allowed,
            forbidden,
            args,
        });
    }
    p.expect(Tok::LBrace)?;
    let mut raw = RawRule {
        premises: Vec::new(),
        env: Vec::new(),
        conclusion: None,
    };
    while !p.eat(&Tok::RBrace) {
        let (kw, kp) = p.ident()?;
        match kw.as_str() {
            "premise" | "conclusion" => {
                let s = p.ast()?;
                p.expect(Tok::Arrow)?;
                let t = p.ast()?;
                if kw == "premise" {
                    raw.premises.push((s, t));
                } else if raw.conclusion.replace((s, t)).is_some() {
                    return Err(perr(kp, "rule has two conclusions"));
                }
            }
            "fresh" => {
                let a = p.ast()?;
                p.expect(Tok::Hash)?;
                let t = p.ast()?;
                raw.env.push((a, t));
            }
            other => return Err(perr(kp, format!("unknown rule item `{other}`"))),
        }
        p.expect(Tok::Semi)?;
    }
    let (src, tgt) = raw
        .conclusion
        .take()
        .ok_or_else(|| Error::InvalidRule { rule: id.clone(), msg: "missing conclusion".into() })?;

    let atoms = atom_params.clone();
    let actions: Vec<Variable> = action_params.iter().map(|a| a.var.clone()).collect();
    let resolve = move |name: &str, pos: Pos| -> Result<Resolved> {
        if let Some((_, a)) = atoms.iter().find(|(n, _)| n == name) {
            return Ok(Resolved::Atom(a.clone()));
        }
        if let Some(v) = actions.iter().find(|v| &*v.name == name) {
            return Ok(Resolved::Var(v.clone()));
        }
        Err(perr(pos, format!("undeclared metavariable {name}")))
    };
    let mut e = Elab {
        sig,
        resolve: &resolve,
        no_literals: Some(id.clone()),
        vars: BTreeMap::new(),
    };
    // elaborate in an order that lets variable sorts flow from the source
    let source = e.term(&src, Some(state_sort))?;
    let mut premises = Vec::new();
    for (s, t) in &raw.premises {
        let s = e.term(s, Some(state_sort))?;
        premises.push((s, t));
    }
    let target = e.term(&tgt, Some(residual_sort))?;
    let premises = premises
        .into_iter()
        .map(|(s, t)| Ok(Premise { source: s, target: e.term(t, Some(residual_sort))? }))
        .collect::<Result<Vec<_>>>()?;
    let mut env = Vec::new();
    for (a, t) in &raw.env {
        let a = match e.term(a, None)?.as_atom() {
            Some(a) => a.clone(),
            None => return Err(perr(p.pos(), "freshness assertion needs an atom metavariable")),
        };
        env.push(FreshAssertion::new(a, e.term(t, None)?));
    }
    for v in e.vars.keys() {
        if action_params.iter().any(|a| &*a.var.name == v.as_str()) {
            return Err(Error::InvalidRule {
                rule: id.clone(),
                msg: format!("variable ${v} clashes with an action metavariable"),
            });
        }
    }
    Ok(RuleSchema {
        id,
        atom_params,
        action_params,
        premises,
        env: env.into_iter().collect(),
        source,
        target,
    })
}

fn head_set(p: &mut Parser<'_>) -> Result<BTreeSet<String>> {
    p.expect(Tok::LBrace)?;
    let mut out = BTreeSet::new();
    while !p.eat(&Tok::RBrace) {
        let (h, hp) = p.ident()?;
        if p.sig.fun(&h).is_none() {
            return Err(perr(hp, format!("unknown action symbol {h}")));
        }
        out.insert(h);
        p.eat(&Tok::Comma);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
signature {
  atom ch;
  base pr ac;
  fun null : unit -> pr;
  fun tau : pr -> pr;
  fun new : [ch]pr -> pr;
  fun out : ch * ch * pr -> pr;
  fun tauA : unit -> ac;
  fun outA : ch * ch -> ac;
  fun boutA : ch * ch -> ac;
  state pr;
  residual ac * pr;
  action ac;
  binding boutA 2;
}

rule Tau {
  conclusion (tau $x:pr) -> (tuple (tauA) $x);
}

rule Res forall b : ch forall L : action {
  premise $x:pr -> (tuple L $y:pr);
  fresh b # L;
  conclusion (new ([b] $x)) -> (tuple L (new ([b] $y)));
}
"#;

    #[test]
    fn parses_small_ruleset() {
        let n = parse_ruleset(SMALL).unwrap();
        assert_eq!(n.rules.len(), 2);
        let res = n.rule("Res").unwrap();
        assert_eq!(res.atom_params, vec![("b".to_string(), Atom::ch(0))]);
        assert_eq!(res.action_params.len(), 1);
        assert_eq!(res.env.len(), 1);
        assert!(!n.is_abstraction());
    }

    #[test]
    fn text_round_trip() {
        let n = parse_ruleset(SMALL).unwrap();
        let again = parse_ruleset(&n.to_text()).unwrap();
        assert_eq!(again, n);
    }

    #[test]
    fn rejects_concrete_atom() {
        let src = SMALL.replace("fresh b # L;", "fresh b # ch:0;");
        assert!(matches!(
            parse_ruleset(&src),
            Err(Error::ConcreteAtomInRule { rule, atom }) if rule == "Res" && atom == "ch:0"
        ));
    }

    #[test]
    fn rejects_non_linear_source() {
        let src = SMALL.replace("(new ([b] $x)) ->", "(new ([b] (tau $x))) ->");
        assert!(parse_ruleset(&src).is_ok());
        let src = SMALL.replace(
            "conclusion (tau $x:pr) -> (tuple (tauA) $x);",
            "conclusion (out b b $x:pr) -> (tuple (tauA) $x);",
        );
        assert!(parse_ruleset(&src).is_err());
    }

    #[test]
    fn rejects_unbound_target_variable() {
        let src = SMALL.replace("(tuple (tauA) $x)", "(tuple (tauA) $z:pr)");
        assert!(matches!(parse_ruleset(&src), Err(Error::InvalidRule { .. })));
    }

    #[test]
    fn instantiate_maps_renamings() {
        let n = parse_ruleset(SMALL).unwrap();
        let res = n.rule("Res").unwrap();
        let m: BTreeMap<Atom, Atom> = [(Atom::ch(0), Atom::ch(5))].into_iter().collect();
        let i = res.instantiate(&m, &BTreeMap::new()).unwrap();
        assert_eq!(i.source.to_string(), "(new ([f] $x:pr))");
    }

    #[test]
    fn bound_names() {
        let n = parse_ruleset(SMALL).unwrap();
        let t = crate::syntax::parse_term(&n.signature, "(boutA a b)", None).unwrap();
        assert_eq!(n.bound_names(&t), [Atom::ch(1)].into_iter().collect());
    }
}
