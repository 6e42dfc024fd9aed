//! Shared proptest strategies over a six-atom pool.

#![allow(dead_code)]

use nrtss::gen::{random_env, random_open_term, random_state, EnvShape};
use nrtss::{Atom, FreshnessEnv, NominalTerm, Permutation, RawTerm, Renaming, Substitution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const POOL: u32 = 6;

pub fn pool() -> Vec<Atom> {
    (0..POOL).map(Atom::ch).collect()
}

pub fn atom() -> impl Strategy<Value = Atom> {
    (0..POOL).prop_map(Atom::ch)
}

pub fn permutation() -> impl Strategy<Value = Permutation> {
    Just(pool())
        .prop_shuffle()
        .prop_map(|img| Permutation::from_pairs(pool().into_iter().zip(img)).unwrap())
}

pub fn renaming() -> impl Strategy<Value = Renaming> {
    prop::collection::btree_map(atom(), atom(), 0..4).prop_map(|m| Renaming::from_pairs(m).unwrap())
}

pub fn shape() -> EnvShape {
    EnvShape::new(6, 4, POOL, 3)
}

/// Open terms of sort `t` with variables and moderations.
pub fn open_term() -> impl Strategy<Value = RawTerm> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, d)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_open_term(&mut rng, &shape(), d)
    })
}

/// Ground terms of sort `t`.
pub fn ground_term() -> impl Strategy<Value = RawTerm> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, d)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = EnvShape::new(6, 4, POOL, 0);
        random_open_term(&mut rng, &shape, d)
    })
}

pub fn env() -> impl Strategy<Value = FreshnessEnv> {
    any::<u64>().prop_map(|seed| random_env(&mut ChaCha8Rng::seed_from_u64(seed), &shape()))
}

/// Substitutions sending each variable of [`shape`] to an open term.
pub fn substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(open_term(), 3).prop_map(|ts| {
        Substitution::from_pairs(shape().vars.into_iter().zip(ts)).unwrap()
    })
}

/// Ground substitutions over the variables of [`shape`].
pub fn ground_substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(ground_term(), 3).prop_map(|ts| {
        Substitution::from_pairs(shape().vars.into_iter().zip(ts)).unwrap()
    })
}

/// Random processes of depth at most `depth` over the atoms `a`, `b`, `c`.
pub fn process(depth: usize) -> impl Strategy<Value = NominalTerm> {
    (any::<u64>(), 1..=depth).prop_map(|(seed, d)| {
        let b = nrtss::calculi::bundle("early").unwrap();
        let atoms: Vec<Atom> = (0..3).map(Atom::ch).collect();
        random_state(&mut ChaCha8Rng::seed_from_u64(seed), &b.nrtss.signature, &b.nrtss.state_sort, &atoms, d)
    })
}

/// Processes without replicated choice.
pub fn tame_process(depth: usize) -> impl Strategy<Value = NominalTerm> {
    process(depth).prop_filter("replicated choice", |p| !nrtss::calculi::replicates_choice(p.raw()))
}
