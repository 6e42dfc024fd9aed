mod common;

use common::strategies::*;
use nrtss::calculi::{bundle, NAMES};
use nrtss::engine::{derive, AtomPool, Engine, DEFAULT_FRESH_SLACK, DEFAULT_FUEL};
use nrtss::props::{check_alpha_residuals, check_binding_condition, check_equivariance, derived_set};
use nrtss::syntax::parse_term;
use nrtss::{interpret, NominalTerm};
use proptest::prelude::*;

fn state(name: &str, src: &str) -> NominalTerm {
    let b = bundle(name).unwrap();
    interpret(&parse_term(&b.nrtss.signature, src, Some(&b.nrtss.state_sort)).unwrap()).unwrap()
}

fn alpha_failures(name: &str, p: &NominalTerm) -> Vec<String> {
    let b = bundle(name).unwrap();
    let pool = AtomPool::for_state(&b.nrtss.signature, p, DEFAULT_FRESH_SLACK);
    let ts = derived_set(&mut Engine::new(&b.nrtss), p, &pool, DEFAULT_FUEL).unwrap();
    match &b.bn {
        Some(bn) => check_alpha_residuals(&ts, bn, &pool).unwrap(),
        None => check_binding_condition(&ts).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transitions_are_equivariant(p in process(4)) {
        for name in NAMES {
            let b = bundle(name).unwrap();
            let pool = AtomPool::for_state(&b.nrtss.signature, &p, DEFAULT_FRESH_SLACK);
            let bad = check_equivariance(&mut Engine::new(&b.nrtss), &p, &pool, DEFAULT_FUEL).unwrap();
            prop_assert!(bad.is_empty(), "{name} {p}: {bad:?}");
        }
    }

    // Replicated choice is excluded; see replicated_choice_breaks_alpha_conversion.
    #[test]
    fn residuals_are_closed_under_alpha(p in tame_process(5)) {
        for name in NAMES {
            let bad = alpha_failures(name, &p);
            prop_assert!(bad.is_empty(), "{name} {p}: {bad:?}");
        }
    }

    // Early inputs receive names from outside, so only the late variant.
    #[test]
    fn late_abstraction_residuals_never_grow_the_support(p in process(5)) {
        for name in ["late-abs"] {
            let b = bundle(name).unwrap();
            let pool = AtomPool::for_state(&b.nrtss.signature, &p, DEFAULT_FRESH_SLACK);
            for t in derive(&b.nrtss, &p, &pool, DEFAULT_FUEL).unwrap().set() {
                prop_assert!(t.residual.support().is_subset(p.support()), "{name}: {p} --> {}", t.residual);
            }
        }
    }

    // The dropped summand may be replaced by the inert process.
    #[test]
    fn dropped_summand_is_irrelevant(p in process(4), q in process(4)) {
        for name in NAMES {
            let b = bundle(name).unwrap();
            let sig = &b.nrtss.signature;
            let pr = b.nrtss.state_sort.clone();
            let sum = |x: &NominalTerm, y: &NominalTerm| NominalTerm::app("sum", pr.clone(), NominalTerm::tuple(vec![x.clone(), y.clone()]));
            let null = NominalTerm::app("null", pr.clone(), NominalTerm::tuple(vec![]));
            let full = sum(&p, &q);
            let pool = AtomPool::for_state(sig, &full, DEFAULT_FRESH_SLACK);
            let residuals = |s: &NominalTerm| -> std::collections::BTreeSet<NominalTerm> {
                derive(&b.nrtss, s, &pool, DEFAULT_FUEL).unwrap().set().into_iter().map(|t| t.residual).collect()
            };
            let own = residuals(&p);
            prop_assert_eq!(&residuals(&sum(&p, &null)), &own);
            prop_assert!(own.is_subset(&residuals(&full)));
        }
    }

    #[test]
    fn memoisation_is_invisible(p in process(4), q in process(4)) {
        for name in NAMES {
            let b = bundle(name).unwrap();
            let mut e = Engine::new(&b.nrtss);
            for s in [&p, &q, &p] {
                let pool = AtomPool::for_state(&b.nrtss.signature, s, DEFAULT_FRESH_SLACK);
                let warm = e.derive(s, &pool, DEFAULT_FUEL).unwrap().set();
                let cold = derive(&b.nrtss, s, &pool, DEFAULT_FUEL).unwrap().set();
                prop_assert_eq!(warm, cold);
            }
        }
    }
}

#[test]
fn replicated_choice_breaks_alpha_conversion() {
    // The discarded summand survives in the replicated copy, where it can
    // capture the bound name of the residual. Abstraction residuals keep
    // the name bound, so those calculi are unaffected.
    let late = state("late", "(rep (sum (in a ([b] (null))) (out b b (null))))");
    assert!(!alpha_failures("late", &late).is_empty());
    assert!(alpha_failures("late-abs", &late).is_empty());
    let early = state("early", "(rep (sum (new ([b] (out a b (null)))) (out c c (null))))");
    let bad = alpha_failures("early", &early);
    assert!(!bad.is_empty());
    assert!(alpha_failures("early-abs", &early).is_empty());
}
