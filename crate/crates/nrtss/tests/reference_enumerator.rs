mod common;

use std::collections::BTreeSet;

use common::pi_ref::{self, Act};
use nrtss::calculi::early_pi;
use nrtss::engine::{derive, AtomPool, DEFAULT_FRESH_SLACK, DEFAULT_FUEL};
use nrtss::syntax::parse_term;
use nrtss::{interpret, NominalTerm};
use proptest::prelude::*;

fn letter(t: &NominalTerm) -> u32 {
    let s = t.to_string();
    s.chars().next().unwrap() as u32 - 'a' as u32
}

/// The engine's transitions in the reference's terms.
fn engine_steps(src: &str) -> BTreeSet<(Act, String)> {
    let n = early_pi();
    let p = interpret(&parse_term(&n.signature, src, Some(&n.state_sort)).unwrap()).unwrap();
    let pool = AtomPool::for_state(&n.signature, &p, DEFAULT_FRESH_SLACK);
    let d = derive(&n, &p, &pool, DEFAULT_FUEL).unwrap();
    assert!(!d.incomplete, "fuel ran out on {src}");
    d.set()
        .iter()
        .map(|t| {
            let cs = t.residual.components().unwrap();
            let (h, args) = cs[0].app_args().unwrap();
            let act = match (h, args.as_slice()) {
                ("tauA", []) => Act::Tau,
                ("inA", [a, b]) => Act::In(letter(a), letter(b)),
                ("outA", [a, b]) => Act::Out(letter(a), letter(b)),
                ("boutA", [a, b]) => Act::Bout(letter(a), letter(b)),
                other => panic!("unexpected action {other:?}"),
            };
            (act, pi_ref::key(&pi_ref::parse(&cs[1].to_string())))
        })
        .collect()
}

fn reference_steps(src: &str) -> BTreeSet<(Act, String)> {
    pi_ref::transitions(src, DEFAULT_FRESH_SLACK, 3).into_keys().collect()
}

const SMALL: [&str; 11] = [
    "(par (tau (null)) (tau (null)))",
    "(out a b (null))",
    "(in a ([b] (null)))",
    "(new ([b] (out a b (null))))",
    "(par (out a b (null)) (in a ([c] (out c c (null)))))",
    "(new ([b] (par (out a b (null)) (in a ([c] (out c c (null)))))))",
    "(rep (tau (null)))",
    "(sum (tau (null)) (par (new ([b] (out a b (null)))) (out c c (null))))",
    "(par (new ([b] (out a b (null)))) (in a ([c] (out c a (null)))))",
    "(new ([b] (in b ([c] (null)))))",
    "(rep (par (out a b (null)) (in a ([c] (null)))))",
];

#[test]
fn small_processes_match_the_reference() {
    for src in SMALL {
        assert_eq!(engine_steps(src), reference_steps(src), "{src}");
    }
}

#[test]
fn reference_sees_capture_free_substitution() {
    // receiving b under a binder named b renames the binder
    let p = pi_ref::parse("(in a ([c] (new ([b] (out c b (null))))))");
    let q = match &p {
        pi_ref::P::In(_, x, body) => pi_ref::subst(body, *x, 1),
        _ => unreachable!(),
    };
    assert_eq!(pi_ref::free_names(&q), [1].into_iter().collect());
}

fn name() -> impl Strategy<Value = char> {
    prop::sample::select(vec!['a', 'b', 'c'])
}

fn process() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("(null)".to_string())];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| format!("(tau {p})")),
            (name(), name(), inner.clone()).prop_map(|(a, b, p)| format!("(out {a} {b} {p})")),
            (name(), name(), inner.clone()).prop_map(|(a, x, p)| format!("(in {a} ([{x}] {p}))")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("(par {p} {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("(sum {p} {q})")),
            (name(), inner.clone()).prop_map(|(x, p)| format!("(new ([{x}] {p}))")),
            inner.prop_map(|p| format!("(rep {p})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_processes_match_the_reference(src in process()) {
        prop_assert_eq!(engine_steps(&src), reference_steps(&src), "{}", src);
    }
}
