use thiserror::Error;

use crate::tower::FieldTag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q = {q} is not admissible: {reason}")]
    InadmissibleQ { q: u64, reason: &'static str },
    #[error("{0} is not a generator of the multiplicative group")]
    NotAGenerator(String),
    #[error("zero has no discrete logarithm or character value")]
    ZeroResidue,
    #[error("field tags differ: {0} vs {1}")]
    TagMismatch(FieldTag, FieldTag),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: value only known to be O(π^{0})")]
    PrecisionExhausted(i64),
    #[error("valuation of the zero element")]
    ZeroElement,
    #[error("element does not descend to F: {0}")]
    NotInBaseField(String),
    #[error("σ^{0} is not an automorphism of F")]
    GaloisOnBase(i64),
    #[error("membership violated: {0}")]
    Membership(String),
    #[error("outside the verification window: {0}")]
    Window(String),
    #[error("double coset classification failed: {0}")]
    Classification(String),
    #[error("coset transversal invalid: {0}")]
    Transversal(String),
    #[error("{0} and {1} do not commute in W")]
    NonCommuting(String, String),
    #[error("elements carry different cocycles")]
    CocycleMismatch,
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),
    #[error("inconsistent group action: {0}")]
    ActionInconsistent(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
