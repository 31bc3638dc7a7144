use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("D = {0} is below 2")]
    TooSmall(i64),
    #[error("D is not squarefree: {0}^2 divides it")]
    NotSquarefree(i64),
    #[error("elements belong to different rings (D = {left} vs D = {right})")]
    ContextMismatch { left: i64, right: i64 },
    #[error("the dyadic criterion needs at least 5 squares, got r = {0}")]
    RTooSmall(u32),
    #[error("the zero element has no valuation")]
    ZeroElement,
    #[error("element {0} is not totally nonnegative")]
    NotTotallyNonneg(String),
    #[error("element {0} is not totally positive")]
    NotTotallyPositive(String),
    #[error("2 is unramified for D = {0}")]
    NotRamified(i64),
    #[error("m = {0} is not odd")]
    NotOdd(u64),
    #[error("modulus m = {0} must exceed 1")]
    BadModulus(u64),
    #[error("operation is only defined for D in {{2, 3}}, got D = {0}")]
    WrongField(i64),
    #[error("coordinates of {0} are too large for the search kernel")]
    TooLarge(String),
    #[error("terms do not square-sum to the target {0}")]
    InvalidDecomposition(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("element is written over sqrt{found} but the ring has D = {expected}")]
    BasisMismatch { expected: i64, found: i64 },
    #[error("{0} is not an algebraic integer of the ring")]
    NotIntegral(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
