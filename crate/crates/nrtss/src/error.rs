use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("not a function: {0}")]
    NotAFunction(String),
    #[error("ill-sorted term: {0}")]
    IllSorted(String),
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("term is not ground: {0}")]
    NotGround(String),
    #[error("unsound concretion: {0}")]
    UnsoundConcretion(String),
    #[error("environment is not in normal form: {0}")]
    NotNormal(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("concrete atom {atom} in rule {rule}")]
    ConcreteAtomInRule { rule: String, atom: String },
    #[error("invalid rule {rule}: {msg}")]
    InvalidRule { rule: String, msg: String },
    #[error("invalid proof: {0}")]
    InvalidProof(String),
    #[error("translation failed: {0}")]
    Translation(String),
    #[error("{0}")]
    Other(String),
}
