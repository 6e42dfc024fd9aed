//! Text syntax for sorts, terms and freshness environments.
//!
//! ```text
//! term     := var | atom | "(@ " term " " renaming ")" | "([" atom "] " term ")"
//!           | "(tuple" {" " term} ")" | "(" funid {" " term} ")"
//! var      := "$" name [":" sort]
//! atom     := sort ":" index | letter        (letters a..z are ch:0..ch:25)
//! renaming := "{" {atom "->" atom ","} "}"
//! env      := "{" [assertion {"," assertion}] "}"      assertion := atom "#" term
//! ```
//!
//! `(f t1 .. tn)` applies `f` to the tuple of its arguments unless a single
//! argument already has the argument sort of `f`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::foundation::{Atom, AtomSort, Renaming, DEFAULT_ATOM_SORT};
use crate::freshness::{FreshAssertion, FreshnessEnv};
use crate::terms::{RawTerm, Signature, Sort, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Arrow,
    Hash,
    At,
    Star,
    Backslash,
    Dollar(String),
    Ident(String),
    Num(u32),
}

pub(crate) fn perr(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, col };
        let mut adv = 1;
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = match ch {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '#' => Tok::Hash,
            '@' => Tok::At,
            '*' => Tok::Star,
            '\\' => Tok::Backslash,
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Tok::Arrow
            }
            '$' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(perr(pos, "expected variable name after $"));
                }
                adv = j - i;
                Tok::Dollar(chars[i + 1..j].iter().collect())
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                adv = j - i;
                let s: String = chars[i..j].iter().collect();
                Tok::Num(s.parse().map_err(|_| perr(pos, "number too large"))?)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                    j += 1;
                }
                adv = j - i;
                Tok::Ident(chars[i..j].iter().collect())
            }
            c => return Err(perr(pos, format!("unexpected character {c:?}"))),
        };
        out.push((tok, pos));
        i += adv;
        col += adv;
    }
    Ok(out)
}

/// Unelaborated term syntax.
#[derive(Clone, Debug)]
pub(crate) enum Ast {
    Ident(String, Pos),
    AtomLit(String, u32, Pos),
    Var(String, Option<Sort>, Pos),
    Mod(Box<Ast>, Vec<(Ast, Ast)>, Pos),
    Abs(Box<Ast>, Box<Ast>, Pos),
    Tuple(Vec<Ast>, Pos),
    App(String, Vec<Ast>, Pos),
}

impl Ast {
    fn pos(&self) -> Pos {
        match self {
            Ast::Ident(_, p)
            | Ast::AtomLit(_, _, p)
            | Ast::Var(_, _, p)
            | Ast::Mod(_, _, p)
            | Ast::Abs(_, _, p)
            | Ast::Tuple(_, p)
            | Ast::App(_, _, p) => *p,
        }
    }
}

pub(crate) struct Parser<'s> {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    pub sig: &'s Signature,
}

impl<'s> Parser<'s> {
    pub fn new(sig: &'s Signature, src: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            i: 0,
            sig,
        })
    }

    pub fn with_sig<'t>(self, sig: &'t Signature) -> Parser<'t> {
        Parser {
            toks: self.toks,
            i: self.i,
            sig,
        }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.0)
    }

    pub fn pos(&self) -> Pos {
        self.toks
            .get(self.i)
            .or_else(|| self.toks.last())
            .map(|t| t.1)
            .unwrap_or(Pos { line: 1, col: 1 })
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub fn next(&mut self) -> Result<(Tok, Pos)> {
        let t = self
            .toks
            .get(self.i)
            .cloned()
            .ok_or_else(|| perr(self.pos(), "unexpected end of input"))?;
        self.i += 1;
        Ok(t)
    }

    pub fn expect(&mut self, want: Tok) -> Result<Pos> {
        let (t, p) = self.next()?;
        if t != want {
            return Err(perr(p, format!("expected {want:?}, found {t:?}")));
        }
        Ok(p)
    }

    pub fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub fn ident(&mut self) -> Result<(String, Pos)> {
        match self.next()? {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(perr(p, format!("expected identifier, found {t:?}"))),
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<Pos> {
        let (s, p) = self.ident()?;
        if s != kw {
            return Err(perr(p, format!("expected `{kw}`, found `{s}`")));
        }
        Ok(p)
    }

    pub fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    /// `sort1 {"*" sort1}`; a single factor is returned as is.
    pub fn sort(&mut self) -> Result<Sort> {
        let first = self.sort_atomic()?;
        if self.peek() != Some(&Tok::Star) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&Tok::Star) {
            parts.push(self.sort_atomic()?);
        }
        Ok(Sort::product(parts))
    }

    pub fn sort_atomic(&mut self) -> Result<Sort> {
        let (t, p) = self.next()?;
        match t {
            Tok::Ident(s) if s == "unit" => Ok(Sort::unit()),
            Tok::Ident(s) => {
                if self.sig.has_base_sort(&s) {
                    Ok(Sort::base(&s))
                } else if self.sig.has_atom_sort(&s) {
                    Ok(Sort::atom(&s))
                } else {
                    Err(perr(p, format!("unknown sort {s}")))
                }
            }
            Tok::LBrack => {
                let (a, ap) = self.ident()?;
                if !self.sig.has_atom_sort(&a) {
                    return Err(perr(ap, format!("{a} is not an atom sort")));
                }
                self.expect(Tok::RBrack)?;
                let body = self.sort_atomic()?;
                Ok(Sort::abs(&AtomSort::new(&a), body))
            }
            Tok::LParen => {
                if self.eat(&Tok::RParen) {
                    return Ok(Sort::unit());
                }
                let s = self.sort()?;
                self.expect(Tok::RParen)?;
                Ok(s)
            }
            t => Err(perr(p, format!("expected sort, found {t:?}"))),
        }
    }

    pub fn ast(&mut self) -> Result<Ast> {
        let (t, p) = self.next()?;
        match t {
            Tok::Dollar(name) => {
                let sort = if self.peek() == Some(&Tok::Colon) {
                    self.i += 1;
                    Some(self.sort_atomic()?)
                } else {
                    None
                };
                Ok(Ast::Var(name, sort, p))
            }
            Tok::Ident(s) => {
                if self.peek() == Some(&Tok::Colon) {
                    if let Some(Tok::Num(n)) = self.peek_at(1) {
                        let n = *n;
                        self.i += 2;
                        return Ok(Ast::AtomLit(s, n, p));
                    }
                }
                Ok(Ast::Ident(s, p))
            }
            Tok::LParen => match self.next()? {
                (Tok::At, _) => {
                    let t = self.ast()?;
                    let r = self.renaming_ast()?;
                    self.expect(Tok::RParen)?;
                    Ok(Ast::Mod(Box::new(t), r, p))
                }
                (Tok::LBrack, _) => {
                    let a = self.ast()?;
                    self.expect(Tok::RBrack)?;
                    let body = self.ast()?;
                    self.expect(Tok::RParen)?;
                    Ok(Ast::Abs(Box::new(a), Box::new(body), p))
                }
                (Tok::Ident(f), _) => {
                    let mut args = Vec::new();
                    while self.peek() != Some(&Tok::RParen) {
                        args.push(self.ast()?);
                    }
                    self.expect(Tok::RParen)?;
                    if f == "tuple" {
                        Ok(Ast::Tuple(args, p))
                    } else {
                        Ok(Ast::App(f, args, p))
                    }
                }
                (t, q) => Err(perr(q, format!("unexpected {t:?} after `(`"))),
            },
            t => Err(perr(p, format!("expected term, found {t:?}"))),
        }
    }

    fn renaming_ast(&mut self) -> Result<Vec<(Ast, Ast)>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let k = self.ast()?;
            self.expect(Tok::Arrow)?;
            let v = self.ast()?;
            out.push((k, v));
            if !self.eat(&Tok::Comma) && self.peek() != Some(&Tok::RBrace) {
                return Err(perr(self.pos(), "expected `,` or `}` in renaming"));
            }
        }
        Ok(out)
    }
}

/// What an identifier in term position denotes.
pub(crate) enum Resolved {
    Atom(Atom),
    Var(Variable),
}

/// Turns syntax into well-sorted raw terms.
pub(crate) struct Elab<'a> {
    pub sig: &'a Signature,
    pub resolve: &'a dyn Fn(&str, Pos) -> Result<Resolved>,
    /// `Some(rule)` forbids atom literals, naming the rule in the error.
    pub no_literals: Option<String>,
    pub vars: BTreeMap<String, Sort>,
}

impl<'a> Elab<'a> {
    fn check(&self, t: RawTerm, expected: Option<&Sort>, pos: Pos) -> Result<RawTerm> {
        match expected {
            Some(s) if s != t.sort() => Err(perr(
                pos,
                format!("ill-sorted: {t} has sort {}, expected {s}", t.sort()),
            )),
            _ => Ok(t),
        }
    }

    fn atom(&mut self, ast: &Ast) -> Result<Atom> {
        let t = self.term(ast, None)?;
        t.as_atom()
            .cloned()
            .ok_or_else(|| perr(ast.pos(), format!("expected an atom, found {t}")))
    }

    pub fn term(&mut self, ast: &Ast, expected: Option<&Sort>) -> Result<RawTerm> {
        match ast {
            Ast::Ident(name, p) => {
                let t = match (self.resolve)(name, *p)? {
                    Resolved::Atom(a) => {
                        if !self.sig.has_atom_sort(a.sort().name()) {
                            return Err(perr(*p, format!("undeclared atom sort {}", a.sort())));
                        }
                        RawTerm::atom(a)
                    }
                    Resolved::Var(v) => RawTerm::var(v),
                };
                self.check(t, expected, *p)
            }
            Ast::AtomLit(sort, idx, p) => {
                if let Some(rule) = &self.no_literals {
                    return Err(Error::ConcreteAtomInRule {
                        rule: rule.clone(),
                        atom: format!("{sort}:{idx}"),
                    });
                }
                if !self.sig.has_atom_sort(sort) {
                    return Err(perr(*p, format!("unknown atom sort {sort}")));
                }
                let t = RawTerm::atom(Atom::new(AtomSort::new(sort), *idx));
                self.check(t, expected, *p)
            }
            Ast::Var(name, ann, p) => {
                let sort = match (ann, self.vars.get(name), expected) {
                    (Some(s), _, _) => s.clone(),
                    (None, Some(s), _) => s.clone(),
                    (None, None, Some(s)) => s.clone(),
                    (None, None, None) => {
                        return Err(perr(*p, format!("cannot infer the sort of ${name}")))
                    }
                };
                if let Some(prev) = self.vars.get(name) {
                    if prev != &sort {
                        return Err(perr(*p, format!("${name} used at sorts {prev} and {sort}")));
                    }
                }
                self.vars.insert(name.clone(), sort.clone());
                self.check(RawTerm::var(Variable::new(name, sort)), expected, *p)
            }
            Ast::Mod(t, pairs, p) => {
                let t = self.term(t, expected)?;
                let mut ps = Vec::new();
                for (k, v) in pairs {
                    ps.push((self.atom(k)?, self.atom(v)?));
                }
                let r = Renaming::from_pairs(ps).map_err(|e| perr(*p, e.to_string()))?;
                Ok(RawTerm::moderated(t, r))
            }
            Ast::Abs(a, body, p) => {
                let a = self.atom(a)?;
                let body_sort = match expected {
                    Some(Sort::Abs(s, b)) => {
                        if s != a.sort() {
                            return Err(perr(*p, format!("binder {a} has the wrong sort")));
                        }
                        Some((**b).clone())
                    }
                    Some(s) => return Err(perr(*p, format!("abstraction where {s} expected"))),
                    None => None,
                };
                let body = self.term(body, body_sort.as_ref())?;
                Ok(RawTerm::abs(a, body))
            }
            Ast::Tuple(ts, p) => {
                let parts = match expected {
                    Some(Sort::Product(ss)) if ss.len() == ts.len() => {
                        ts.iter().zip(ss.iter()).map(|(t, s)| self.term(t, Some(s))).collect::<Result<Vec<_>>>()?
                    }
                    Some(s) => return Err(perr(*p, format!("tuple of {} where {s} expected", ts.len()))),
                    None => ts.iter().map(|t| self.term(t, None)).collect::<Result<Vec<_>>>()?,
                };
                Ok(RawTerm::tuple(parts))
            }
            Ast::App(f, args, p) => {
                let ty = self
                    .sig
                    .fun(f)
                    .ok_or_else(|| perr(*p, format!("unknown function symbol {f}")))?
                    .clone();
                let arg = match (&ty.arg, args.len()) {
                    (Sort::Product(ss), n) if n != 1 => {
                        if ss.len() != n {
                            return Err(perr(*p, format!("{f} expects {} arguments, got {n}", ss.len())));
                        }
                        let parts = args
                            .iter()
                            .zip(ss.iter())
                            .map(|(t, s)| self.term(t, Some(s)))
                            .collect::<Result<Vec<_>>>()?;
                        RawTerm::tuple(parts)
                    }
                    (Sort::Product(ss), 1) if ss.len() == 1 => {
                        let t = self.term(&args[0], None)?;
                        if t.sort() == &ty.arg {
                            t
                        } else {
                            let t = self.check(t, Some(&ss[0]), args[0].pos())?;
                            RawTerm::tuple(vec![t])
                        }
                    }
                    (s, 1) => self.term(&args[0], Some(s))?,
                    (s, n) => {
                        return Err(perr(*p, format!("{f} expects one argument of sort {s}, got {n}")))
                    }
                };
                let t = RawTerm::app_unchecked(f, Sort::Base(ty.result.clone()), arg);
                self.check(t, expected, *p)
            }
        }
    }
}

/// Letters `a`..`z` name atoms `ch:0`..`ch:25`.
pub(crate) fn letter_atom(name: &str, pos: Pos) -> Result<Resolved> {
    let mut cs = name.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => {
            Ok(Resolved::Atom(Atom::ch(c as u32 - 'a' as u32)))
        }
        _ => Err(perr(pos, format!("unknown name {name}; atoms are letters a..z or sort:index"))),
    }
}

fn finish(p: &Parser<'_>) -> Result<()> {
    if !p.at_end() {
        return Err(perr(p.pos(), "trailing input"));
    }
    Ok(())
}

/// Parses a term. `expected` guides sort inference for unannotated
/// variables and is checked against the result.
pub fn parse_term(sig: &Signature, src: &str, expected: Option<&Sort>) -> Result<RawTerm> {
    let mut p = Parser::new(sig, src)?;
    let ast = p.ast()?;
    finish(&p)?;
    let mut e = Elab {
        sig,
        resolve: &letter_atom,
        no_literals: None,
        vars: BTreeMap::new(),
    };
    e.term(&ast, expected)
}

pub fn parse_sort(sig: &Signature, src: &str) -> Result<Sort> {
    let mut p = Parser::new(sig, src)?;
    let s = p.sort()?;
    finish(&p)?;
    Ok(s)
}

/// Parses `{ a # t, b # u }`. Variable sorts are shared across assertions.
pub fn parse_env(sig: &Signature, src: &str) -> Result<FreshnessEnv> {
    let mut p = Parser::new(sig, src)?;
    let mut e = Elab {
        sig,
        resolve: &letter_atom,
        no_literals: None,
        vars: BTreeMap::new(),
    };
    let mut out = Vec::new();
    p.expect(Tok::LBrace)?;
    while !p.eat(&Tok::RBrace) {
        let a = p.ast()?;
        let a = e.atom(&a)?;
        p.expect(Tok::Hash)?;
        let t = p.ast()?;
        out.push(FreshAssertion::new(a, e.term(&t, None)?));
        if !p.eat(&Tok::Comma) && p.peek() != Some(&Tok::RBrace) {
            return Err(perr(p.pos(), "expected `,` or `}`"));
        }
    }
    finish(&p)?;
    Ok(out.into_iter().collect())
}

/// The default atom sort name, for callers building signatures.
pub fn default_atom_sort() -> AtomSort {
    AtomSort::new(DEFAULT_ATOM_SORT)
}

impl Atom {
    /// Parses `ch:3` or a letter `a`..`z`.
    pub fn parse(src: &str) -> Result<Atom> {
        let toks = tokenize(src)?;
        match toks.as_slice() {
            [(Tok::Ident(s), p)] => match letter_atom(s, *p)? {
                Resolved::Atom(a) => Ok(a),
                Resolved::Var(_) => unreachable!(),
            },
            [(Tok::Ident(s), _), (Tok::Colon, _), (Tok::Num(n), _)] => {
                Ok(Atom::new(AtomSort::new(s), *n))
            }
            _ => Err(perr(Pos { line: 1, col: 1 }, format!("not an atom: {src}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_atom_sort("ch").unwrap();
        s.add_base_sort("pr").unwrap();
        s.add_fun("null", Sort::unit(), "pr").unwrap();
        s.add_fun("tau", Sort::base("pr"), "pr").unwrap();
        s.add_fun(
            "out",
            Sort::product(vec![Sort::atom("ch"), Sort::atom("ch"), Sort::base("pr")]),
            "pr",
        )
        .unwrap();
        s.add_fun("new", Sort::abs(&AtomSort::new("ch"), Sort::base("pr")), "pr")
            .unwrap();
        s
    }

    #[test]
    fn parses_and_prints_round_trip() {
        let s = sig();
        for src in [
            "(new ([b] (out a b (null))))",
            "(@ $x:pr {a->b,})",
            "(tuple a ch:40 (tau (null)))",
            "([a] (tuple a b))",
        ] {
            let t = parse_term(&s, src, None).unwrap();
            assert_eq!(t.to_string(), src);
            assert_eq!(parse_term(&s, &t.to_string(), None).unwrap(), t);
        }
    }

    #[test]
    fn infers_variable_sort_from_context() {
        let s = sig();
        let t = parse_term(&s, "(tau $x)", None).unwrap();
        assert_eq!(t.to_string(), "(tau $x:pr)");
        assert!(parse_term(&s, "$x", None).is_err());
    }

    #[test]
    fn rejects_ill_sorted() {
        let s = sig();
        assert!(matches!(parse_term(&s, "(tau a)", None), Err(Error::Parse { .. })));
        assert!(parse_term(&s, "(out a b)", None).is_err());
        assert!(parse_term(&s, "(nope)", None).is_err());
    }

    #[test]
    fn parses_env() {
        let s = sig();
        let e = parse_env(&s, "{ a # (tau $x:pr), b # $x }").unwrap();
        assert_eq!(e.len(), 2);
        assert!(parse_env(&s, "{}").unwrap().is_empty());
    }

    #[test]
    fn parses_atoms() {
        assert_eq!(Atom::parse("c").unwrap(), Atom::ch(2));
        assert_eq!(Atom::parse("ch:7").unwrap(), Atom::ch(7));
        assert!(Atom::parse("ab").is_err());
    }
}
