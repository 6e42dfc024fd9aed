//! Nominal residual transition system specifications.
//!
//! Terms over a nominal signature, a freshness logic with a sound
//! entailment check, rule schemas, syntactic rule-format checkers and a
//! bounded derivation engine with proof trees.

pub mod calculi;
pub mod engine;
pub mod error;
pub mod formats;
pub mod foundation;
pub mod gen;
pub mod freshness;
pub mod nominal;
pub mod nrtss;
pub mod props;
pub mod selftest;
pub mod syntax;
pub mod terms;
pub mod translate;

pub use error::{Error, Result};
pub use foundation::{Atom, AtomSort, Permutation, Renaming};
pub use freshness::{FreshAssertion, FreshnessEnv};
pub use nominal::{interpret, NominalTerm};
pub use terms::{RawTerm, Signature, Sort, Substitution, Variable};
