mod common;

use common::strategies::*;
use nrtss::Substitution;
use proptest::prelude::*;

fn moved(phi: &Substitution, p: &nrtss::Permutation) -> Substitution {
    Substitution::from_pairs(phi.entries().map(|(v, t)| (v.clone(), t.perm_act(p)))).unwrap()
}

proptest! {
    #[test]
    fn free_atoms_are_in_the_support(t in open_term()) {
        prop_assert!(t.free_atoms().is_subset(&t.support()));
    }

    #[test]
    fn support_is_equivariant(t in open_term(), p in permutation()) {
        prop_assert_eq!(t.perm_act(&p).support(), p.act_set(&t.support()));
        prop_assert_eq!(t.perm_act(&p).free_atoms(), p.act_set(&t.free_atoms()));
    }

    #[test]
    fn permutation_commutes_with_renaming(t in open_term(), p in permutation(), r in renaming()) {
        prop_assert_eq!(t.ren_act(&r).perm_act(&p), t.perm_act(&p).ren_act(&r.conj(&p)));
    }

    #[test]
    fn renaming_preserves_size(t in open_term(), r in renaming()) {
        prop_assert_eq!(t.ren_act(&r).size(), t.size());
    }

    #[test]
    fn permutation_then_inverse_is_identity(t in open_term(), p in permutation()) {
        prop_assert_eq!(t.perm_act(&p).perm_act(&p.inverse()), t);
    }

    #[test]
    fn substitution_is_equivariant(t in open_term(), phi in substitution(), p in permutation()) {
        prop_assert_eq!(t.substitute(&phi).perm_act(&p), t.perm_act(&p).substitute(&moved(&phi, &p)));
    }

    #[test]
    fn substitution_composes(t in open_term(), f in substitution(), g in substitution()) {
        prop_assert_eq!(t.substitute(&f.compose(&g)), t.substitute(&g).substitute(&f));
    }

    #[test]
    fn ground_substitution_closes(t in open_term(), phi in ground_substitution()) {
        prop_assert!(t.substitute(&phi).is_ground());
    }
}
