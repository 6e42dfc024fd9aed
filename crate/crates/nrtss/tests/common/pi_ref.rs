//! Brute-force reference for the early pi-calculus rules, written directly
//! over named processes. Shares no code with the library: its own parser,
//! its own alpha-equivalence (de Bruijn keys) and its own substitution.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum P {
    Null,
    Tau(Box<P>),
    In(u32, u32, Box<P>),
    Out(u32, u32, Box<P>),
    Par(Box<P>, Box<P>),
    Sum(Box<P>, Box<P>),
    Rep(Box<P>),
    New(u32, Box<P>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Act {
    Tau,
    In(u32, u32),
    Out(u32, u32),
    Bout(u32, u32),
}

impl Act {
    fn names(&self) -> Vec<u32> {
        match *self {
            Act::Tau => vec![],
            Act::In(a, b) | Act::Out(a, b) | Act::Bout(a, b) => vec![a, b],
        }
    }
}

fn name(tok: &str) -> u32 {
    let c = tok.chars().next().expect("name");
    assert!(tok.len() == 1 && c.is_ascii_lowercase(), "bad name {tok}");
    c as u32 - 'a' as u32
}

pub fn parse(src: &str) -> P {
    let spaced = src.replace('(', " ( ").replace(')', " ) ").replace('[', " [ ").replace(']', " ] ");
    let toks: Vec<&str> = spaced.split_whitespace().collect();
    let mut i = 0;
    let p = parse_p(&toks, &mut i);
    assert_eq!(i, toks.len(), "trailing input in {src}");
    p
}

fn expect(toks: &[&str], i: &mut usize, t: &str) {
    assert_eq!(toks[*i], t);
    *i += 1;
}

fn parse_binder(toks: &[&str], i: &mut usize) -> (u32, P) {
    expect(toks, i, "(");
    expect(toks, i, "[");
    let x = name(toks[*i]);
    *i += 1;
    expect(toks, i, "]");
    let p = parse_p(toks, i);
    expect(toks, i, ")");
    (x, p)
}

fn parse_p(toks: &[&str], i: &mut usize) -> P {
    expect(toks, i, "(");
    let head = toks[*i];
    *i += 1;
    let p = match head {
        "null" => P::Null,
        "tau" => P::Tau(Box::new(parse_p(toks, i))),
        "in" => {
            let a = name(toks[*i]);
            *i += 1;
            let (x, p) = parse_binder(toks, i);
            P::In(a, x, Box::new(p))
        }
        "out" => {
            let a = name(toks[*i]);
            let b = name(toks[*i + 1]);
            *i += 2;
            P::Out(a, b, Box::new(parse_p(toks, i)))
        }
        "par" | "sum" => {
            let l = Box::new(parse_p(toks, i));
            let r = Box::new(parse_p(toks, i));
            if head == "par" {
                P::Par(l, r)
            } else {
                P::Sum(l, r)
            }
        }
        "rep" => P::Rep(Box::new(parse_p(toks, i))),
        "new" => {
            let (x, p) = parse_binder(toks, i);
            P::New(x, Box::new(p))
        }
        other => panic!("unknown constructor {other}"),
    };
    expect(toks, i, ")");
    p
}

pub fn free_names(p: &P) -> BTreeSet<u32> {
    let mut s = BTreeSet::new();
    fn go(p: &P, bound: &mut Vec<u32>, s: &mut BTreeSet<u32>) {
        let free = |n: u32, bound: &Vec<u32>, s: &mut BTreeSet<u32>| {
            if !bound.contains(&n) {
                s.insert(n);
            }
        };
        match p {
            P::Null => {}
            P::Tau(q) | P::Rep(q) => go(q, bound, s),
            P::Out(a, b, q) => {
                free(*a, bound, s);
                free(*b, bound, s);
                go(q, bound, s);
            }
            P::In(a, x, q) => {
                free(*a, bound, s);
                bound.push(*x);
                go(q, bound, s);
                bound.pop();
            }
            P::New(x, q) => {
                bound.push(*x);
                go(q, bound, s);
                bound.pop();
            }
            P::Par(l, r) | P::Sum(l, r) => {
                go(l, bound, s);
                go(r, bound, s);
            }
        }
    }
    go(p, &mut Vec::new(), &mut s);
    s
}

fn all_names(p: &P, s: &mut BTreeSet<u32>) {
    match p {
        P::Null => {}
        P::Tau(q) | P::Rep(q) => all_names(q, s),
        P::Out(a, b, q) => {
            s.insert(*a);
            s.insert(*b);
            all_names(q, s);
        }
        P::In(a, x, q) => {
            s.insert(*a);
            s.insert(*x);
            all_names(q, s);
        }
        P::New(x, q) => {
            s.insert(*x);
            all_names(q, s);
        }
        P::Par(l, r) | P::Sum(l, r) => {
            all_names(l, s);
            all_names(r, s);
        }
    }
}

/// `p{c/x}`, renaming binders that would capture `c`.
pub fn subst(p: &P, x: u32, c: u32) -> P {
    let r = |n: u32| if n == x { c } else { n };
    match p {
        P::Null => P::Null,
        P::Tau(q) => P::Tau(Box::new(subst(q, x, c))),
        P::Rep(q) => P::Rep(Box::new(subst(q, x, c))),
        P::Out(a, b, q) => P::Out(r(*a), r(*b), Box::new(subst(q, x, c))),
        P::Par(l, q) => P::Par(Box::new(subst(l, x, c)), Box::new(subst(q, x, c))),
        P::Sum(l, q) => P::Sum(Box::new(subst(l, x, c)), Box::new(subst(q, x, c))),
        P::In(a, y, q) => {
            let (y2, q2) = under_binder(*y, q, x, c);
            P::In(r(*a), y2, Box::new(q2))
        }
        P::New(y, q) => {
            let (y2, q2) = under_binder(*y, q, x, c);
            P::New(y2, Box::new(q2))
        }
    }
}

fn under_binder(y: u32, body: &P, x: u32, c: u32) -> (u32, P) {
    if y == x {
        return (y, body.clone());
    }
    if y != c {
        return (y, subst(body, x, c));
    }
    let mut used = BTreeSet::new();
    all_names(body, &mut used);
    used.extend([x, c, y]);
    let z = (0..).find(|n| !used.contains(n)).expect("a fresh name");
    (z, subst(&subst(body, y, z), x, c))
}

/// Alpha-invariant key.
pub fn key(p: &P) -> String {
    fn nm(n: u32, env: &[u32]) -> String {
        match env.iter().rev().position(|&b| b == n) {
            Some(i) => format!("#{i}"),
            None => format!("{}", n),
        }
    }
    fn go(p: &P, env: &mut Vec<u32>) -> String {
        match p {
            P::Null => "0".into(),
            P::Tau(q) => format!("t.{}", go(q, env)),
            P::Rep(q) => format!("!({})", go(q, env)),
            P::Out(a, b, q) => format!("o{},{}.{}", nm(*a, env), nm(*b, env), go(q, env)),
            P::In(a, x, q) => {
                let a = nm(*a, env);
                env.push(*x);
                let s = format!("i{a}.{}", go(q, env));
                env.pop();
                s
            }
            P::New(x, q) => {
                env.push(*x);
                let s = format!("v.{}", go(q, env));
                env.pop();
                s
            }
            P::Par(l, r) => format!("({}|{})", go(l, env), go(r, env)),
            P::Sum(l, r) => format!("({}+{})", go(l, env), go(r, env)),
        }
    }
    go(p, &mut Vec::new())
}

type Steps = BTreeMap<(Act, String), P>;

fn add(out: &mut Steps, a: Act, p: P) {
    out.entry((a, key(&p))).or_insert(p);
}

fn bx(p: P) -> Box<P> {
    Box::new(p)
}

/// Transitions of `p` whose names lie in `universe`.
pub fn steps(p: &P, universe: &[u32]) -> Steps {
    let mut out = Steps::new();
    let inside = |a: &Act, q: &P| a.names().iter().chain(free_names(q).iter()).all(|n| universe.contains(n));
    match p {
        P::Null => {}
        P::Tau(q) => add(&mut out, Act::Tau, (**q).clone()),
        P::Out(a, b, q) => add(&mut out, Act::Out(*a, *b), (**q).clone()),
        P::In(a, x, q) => {
            for &c in universe {
                add(&mut out, Act::In(*a, c), subst(q, *x, c));
            }
        }
        P::Sum(l, r) => {
            out.extend(steps(l, universe));
            for (k, v) in steps(r, universe) {
                out.entry(k).or_insert(v);
            }
        }
        P::Par(l, r) => {
            let sl = steps(l, universe);
            let sr = steps(r, universe);
            let (fl, fr) = (free_names(l), free_names(r));
            for ((a, _), l2) in &sl {
                match a {
                    Act::Bout(_, b) if fr.contains(b) => {}
                    _ => add(&mut out, *a, P::Par(bx(l2.clone()), r.clone())),
                }
            }
            for ((a, _), r2) in &sr {
                match a {
                    Act::Bout(_, b) if fl.contains(b) => {}
                    _ => add(&mut out, *a, P::Par(l.clone(), bx(r2.clone()))),
                }
            }
            for ((a1, _), p1) in &sl {
                for ((a2, _), p2) in &sr {
                    match (*a1, *a2) {
                        (Act::Out(a, b), Act::In(c, d)) | (Act::In(a, b), Act::Out(c, d)) if (a, b) == (c, d) => {
                            add(&mut out, Act::Tau, P::Par(bx(p1.clone()), bx(p2.clone())))
                        }
                        (Act::Bout(a, b), Act::In(c, d)) if (a, b) == (c, d) && !fr.contains(&b) => {
                            add(&mut out, Act::Tau, P::New(b, bx(P::Par(bx(p1.clone()), bx(p2.clone())))))
                        }
                        (Act::In(a, b), Act::Bout(c, d)) if (a, b) == (c, d) && !fl.contains(&b) => {
                            add(&mut out, Act::Tau, P::New(b, bx(P::Par(bx(p1.clone()), bx(p2.clone())))))
                        }
                        _ => {}
                    }
                }
            }
        }
        P::Rep(q) => {
            let s = steps(q, universe);
            let fq = free_names(q);
            for ((a, _), q2) in &s {
                add(&mut out, *a, P::Par(bx(q2.clone()), bx(p.clone())));
            }
            for ((a1, _), p1) in &s {
                for ((a2, _), p2) in &s {
                    match (*a1, *a2) {
                        (Act::Out(a, b), Act::In(c, d)) if (a, b) == (c, d) => add(
                            &mut out,
                            Act::Tau,
                            P::Par(bx(P::Par(bx(p1.clone()), bx(p2.clone()))), bx(p.clone())),
                        ),
                        (Act::Bout(a, b), Act::In(c, d)) if (a, b) == (c, d) && !fq.contains(&b) => add(
                            &mut out,
                            Act::Tau,
                            P::Par(bx(P::New(b, bx(P::Par(bx(p1.clone()), bx(p2.clone()))))), bx(p.clone())),
                        ),
                        _ => {}
                    }
                }
            }
        }
        P::New(x, q) => {
            let fp = free_names(p);
            for &c in universe {
                if fp.contains(&c) {
                    continue;
                }
                let body = subst(q, *x, c);
                for ((a, _), q2) in steps(&body, universe) {
                    if let Act::Out(ch, ob) = a {
                        if ob == c && ch != c {
                            add(&mut out, Act::Bout(ch, c), q2.clone());
                        }
                    }
                    if !a.names().contains(&c) {
                        add(&mut out, a, P::New(c, bx(q2)));
                    }
                }
            }
        }
    }
    out.retain(|(a, _), q| inside(a, q));
    out
}

/// Transitions of `src` with names among its free names and `slack` fresh
/// ones; `extra` more names are available inside derivations.
pub fn transitions(src: &str, slack: usize, extra: usize) -> Steps {
    let p = parse(src);
    let fp = free_names(&p);
    let fresh: Vec<u32> = (0..).filter(|n| !fp.contains(n)).take(slack + extra).collect();
    let pool: Vec<u32> = fp.iter().copied().chain(fresh[..slack].iter().copied()).collect();
    let universe: Vec<u32> = fp.iter().copied().chain(fresh.iter().copied()).collect();
    let mut s = steps(&p, &universe);
    s.retain(|(a, _), q| a.names().iter().chain(free_names(q).iter()).all(|n| pool.contains(n)));
    s
}

pub fn count(src: &str) -> usize {
    transitions(src, 2, 3).len()
}
