use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("sandpile has {got} entries, graph has {expected} non-sink vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("sandpile is unstable at non-sink vertex {0}")]
    Unstable(usize),

    #[error("sandpile is not recurrent")]
    NotRecurrent,

    #[error("vertex index {0} is out of range or is the sink")]
    InvalidVertex(usize),

    #[error("state space of {states} stable sandpiles exceeds the limit of {limit}")]
    LimitExceeded { states: u128, limit: u64 },

    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("matrix is singular")]
    Singular,

    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),

    #[error("degree {degree} out of range for {vars} variables")]
    DegreeOutOfRange { vars: usize, degree: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("not a parking function")]
    NotParking,

    #[error("principal avalanche has size zero")]
    EmptyAvalanche,

    #[error("invalid rooted tree: {0}")]
    InvalidTree(String),

    #[error("not a tree avalanche polynomial: {reason} (component `{component}`)")]
    NotTreePolynomial { reason: &'static str, component: String },

    #[error("closed form inconsistency: {0}")]
    Formula(String),
}

pub type Result<T> = core::result::Result<T, Error>;
