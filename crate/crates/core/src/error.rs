use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("zero exponent at byte {pos}")]
    ZeroExponent { pos: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid slope ({mu}, {lambda}): {reason}")]
    InvalidSlope { mu: i64, lambda: i64, reason: String },

    #[error("invariant variant unavailable: {0}")]
    VariantUnavailable(String),

    #[error("framing transform does not apply: {0}")]
    PatternMismatch(String),

    #[error("framing transform is not invertible over the integers: {0}")]
    NotInvertible(String),

    #[error("cover is disconnected; orbits {orbits:?}")]
    Disconnected { orbits: Vec<Vec<usize>> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("guard violated for case {case}: {reason}")]
    GuardViolation { case: String, reason: String },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("search exhausted at degree cap {cap}: {what}")]
    SearchExhausted { cap: usize, what: String },

    #[error("no case applies: {0:?}")]
    NoCaseApplies(Vec<String>),

    #[error("relator acts nontrivially on cosets: {0}")]
    RelatorNontrivial(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("integer overflow in fixed-width arithmetic")]
    Overflow,
}
