mod common;

use common::strategies::*;
use nrtss::calculi::{bundle, NAMES};
use nrtss::engine::{AtomPool, Engine, DEFAULT_FRESH_SLACK, DEFAULT_FUEL};
use nrtss::formats::{test_stratification_on, BnSpec};
use nrtss::props::derived_set;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn measures_stratify_derivations(ps in prop::collection::vec(process(4), 4)) {
        for name in NAMES {
            let b = bundle(name).unwrap();
            let r = test_stratification_on(&b.nrtss, &b.strat_mode(), &b.strat, &ps, DEFAULT_FRESH_SLACK).unwrap();
            prop_assert!(r.violations.is_empty(), "{name}: {:?}", r.violations);
        }
    }
}

#[test]
fn binding_specs_match_the_rule_sets() {
    for name in NAMES {
        let b = bundle(name).unwrap();
        match &b.bn {
            Some(bn) => assert_eq!(bn, &BnSpec::from_nrtss(&b.nrtss)),
            None => assert!(b.nrtss.is_abstraction()),
        }
    }
}

#[test]
fn bound_output_may_reuse_a_name_of_a_discarded_summand() {
    // c occurs only in the summand that is dropped, so it is fresh for the
    // residual and the variant is an ordinary alpha-variant of it.
    let b = bundle("early").unwrap();
    let src = "(sum (new ([a] (out b a (null)))) (in c ([a] (null))))";
    let p = nrtss::interpret(&nrtss::syntax::parse_term(&b.nrtss.signature, src, Some(&b.nrtss.state_sort)).unwrap()).unwrap();
    let pool = AtomPool::for_state(&b.nrtss.signature, &p, DEFAULT_FRESH_SLACK);
    let ts = derived_set(&mut Engine::new(&b.nrtss), &p, &pool, DEFAULT_FUEL).unwrap();
    let shown: Vec<String> = ts.transitions.iter().map(|t| nrtss::engine::format_residual(&t.residual)).collect();
    assert!(shown.iter().any(|s| s == "boutA(b,c) / (null)"), "{shown:?}");
}
