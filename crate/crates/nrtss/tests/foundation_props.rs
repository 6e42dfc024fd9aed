mod common;

use common::strategies::*;
use nrtss::{Permutation, Renaming};
use proptest::prelude::*;

proptest! {
    #[test]
    fn composition_is_associative(p in permutation(), q in permutation(), r in permutation()) {
        let lhs = p.then(&q).then(&r);
        let rhs = p.then(&q.then(&r));
        for a in pool() {
            prop_assert_eq!(lhs.apply(&a), rhs.apply(&a));
        }
    }

    #[test]
    fn identity_is_neutral(p in permutation()) {
        let id = Permutation::identity();
        for a in pool() {
            prop_assert_eq!(p.then(&id).apply(&a), p.apply(&a));
            prop_assert_eq!(id.then(&p).apply(&a), p.apply(&a));
        }
    }

    #[test]
    fn inverse_cancels(p in permutation()) {
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert!(p.inverse().then(&p).is_identity());
        for a in pool() {
            prop_assert_eq!(p.apply_inv(&p.apply(&a)), a);
        }
    }

    #[test]
    fn renaming_composition_is_a_monoid(r1 in renaming(), r2 in renaming(), r3 in renaming()) {
        prop_assert_eq!(r1.then(&r2).then(&r3), r1.then(&r2.then(&r3)));
        prop_assert_eq!(r1.then(&Renaming::identity()), r1.clone());
        prop_assert_eq!(Renaming::identity().then(&r1), r1);
    }

    #[test]
    fn renaming_support_is_equivariant(p in permutation(), r in renaming()) {
        prop_assert_eq!(r.conj(&p).support(), p.act_set(&r.support()));
    }

    #[test]
    fn conjugation_is_pointwise(p in permutation(), r in renaming()) {
        let c = r.conj(&p);
        for a in pool() {
            prop_assert_eq!(c.apply(&a), p.apply(&r.apply(&p.apply_inv(&a))));
        }
    }

    #[test]
    fn permutations_embed_as_renamings(p in permutation()) {
        let r = p.to_renaming();
        for a in pool() {
            prop_assert_eq!(r.apply(&a), p.apply(&a));
        }
        prop_assert_eq!(r.as_permutation(), Some(p));
    }
}
