pub mod pi_ref;
pub mod strategies;
