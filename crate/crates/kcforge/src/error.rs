use crate::var::VarId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("universes differ; align operand domains before combining")]
    UniverseMismatch,

    #[error("variable {0} is not in the universe")]
    VarNotInUniverse(VarId),

    #[error("{what}: {vars} variables exceed the brute-force guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        vars: usize,
        guard: usize,
    },

    #[error("{what}: candidate count {count} exceeds the resource cap of {cap}")]
    ResourceExhausted {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("term assigns both polarities to variable {0}")]
    InconsistentTerm(VarId),

    #[error("DNF is ambiguous: terms {term_a} and {term_b} are simultaneously satisfiable")]
    AmbiguousDnf { term_a: usize, term_b: usize },

    #[error("field elements have different extension degrees ({0} vs {1})")]
    DegreeMismatch(u8, u8),

    #[error("extension degree {0} is outside the irreducible-polynomial table (1..=16)")]
    DegreeOutOfRange(u8),

    #[error("slot index {0} is outside the padded slot range 1..={1}")]
    SlotOutOfRange(usize, usize),

    #[error("variable {0} already occurs in the v-tree")]
    VarCollision(VarId),

    #[error("v-tree leaves do not match the expected universe")]
    VtreeMismatch,

    #[error("partition is not balanced: min side {min_side} < |Z|/3 with |Z| = {total}")]
    Unbalanced { min_side: usize, total: usize },

    #[error("permutation does not place a copy of source variable {var} on side {side}")]
    LandingConditionUnsatisfied { var: usize, side: u8 },

    #[error("operands are managed by different v-trees")]
    ManagerMismatch,

    #[error("not a valid PSDD: {0}")]
    InvalidPsdd(String),

    #[error("arithmetic circuit has a negative constant at node {0}")]
    NotMonotone(usize),

    #[error(
        "flipping negative constants changes the computed function \
         (witness assignment rank {witness_rank}); input is outside the \
         preconditions for sign normalization"
    )]
    SignNormalizeChanged { witness_rank: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
