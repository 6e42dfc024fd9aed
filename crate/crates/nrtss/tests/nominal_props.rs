mod common;

use common::strategies::*;
use nrtss::{interpret, RawTerm};
use proptest::prelude::*;

proptest! {
    #[test]
    fn interpretation_is_equivariant(t in ground_term(), p in permutation()) {
        prop_assert_eq!(interpret(&t.perm_act(&p)).unwrap(), interpret(&t).unwrap().perm(&p));
    }

    #[test]
    fn permutation_moderation_acts_as_the_permutation(t in ground_term(), p in permutation()) {
        let m = RawTerm::moderated(t.clone(), p.to_renaming());
        prop_assert_eq!(interpret(&m).unwrap(), interpret(&t).unwrap().perm(&p));
    }

    #[test]
    fn support_is_equivariant(t in ground_term(), p in permutation()) {
        let n = interpret(&t).unwrap();
        prop_assert_eq!(n.perm(&p).support().clone(), p.act_set(n.support()));
    }

    #[test]
    fn freshness_is_equivariant(t in ground_term(), p in permutation(), a in atom()) {
        let n = interpret(&t).unwrap();
        prop_assert_eq!(n.is_fresh(&a), n.perm(&p).is_fresh(&p.apply(&a)));
    }

    #[test]
    fn abstraction_removes_its_binder(t in ground_term(), a in atom()) {
        let s = interpret(&t).unwrap();
        let abs = interpret(&RawTerm::abs(a.clone(), t)).unwrap();
        let mut expect = s.support().clone();
        expect.remove(&a);
        prop_assert_eq!(abs.support(), &expect);
    }

    #[test]
    fn concretion_inverts_abstraction(t in ground_term(), a in atom(), b in atom()) {
        let s = interpret(&t).unwrap();
        let abs = interpret(&RawTerm::abs(a.clone(), t)).unwrap();
        prop_assert_eq!(abs.concrete(&a).unwrap(), s.clone());
        if abs.is_fresh(&b) {
            let swap = nrtss::Permutation::swap(&a, &b).unwrap();
            prop_assert_eq!(abs.concrete(&b).unwrap(), s.perm(&swap));
        } else {
            prop_assert!(b == a || abs.concrete(&b).is_err());
        }
    }

    #[test]
    fn abstractions_agree_iff_alpha_equivalent(t in ground_term(), u in ground_term(), a in atom(), b in atom()) {
        let x = interpret(&RawTerm::abs(a.clone(), t.clone())).unwrap();
        let y = interpret(&RawTerm::abs(b.clone(), u.clone())).unwrap();
        let (s, v) = (interpret(&t).unwrap(), interpret(&u).unwrap());
        let alpha = if a == b {
            s == v
        } else {
            v.is_fresh(&a) && s.perm(&nrtss::Permutation::swap(&a, &b).unwrap()) == v
        };
        prop_assert_eq!(x == y, alpha);
    }

    #[test]
    fn representatives_denote_the_term(t in ground_term()) {
        let n = interpret(&t).unwrap();
        let r = n.representative_avoiding(&std::collections::BTreeSet::new());
        prop_assert_eq!(interpret(&r).unwrap(), n);
    }
}
