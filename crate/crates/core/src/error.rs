use thiserror::Error;

use crate::qset::QInterval;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no point strictly between the given endpoints")]
    EmptyGap,
    #[error("interval is empty")]
    EmptyInterval,
    #[error("endpoint types differ: no order-isomorphism between {0} and {1}")]
    TypeMismatch(String, String),
    #[error("map is not a bijection of Q")]
    NotBijective,
    #[error("invalid endomorphism: {0}")]
    InvalidEndo(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("closed gap {0}")]
    ClosedGap(Box<QInterval>),
    #[error("set is empty")]
    EmptySet,
    #[error("map is not idempotent")]
    NotIdempotent,
    #[error("point is not in the image")]
    NotInImage,
    #[error("point is the maximum of the image")]
    MaxElement,
    #[error("bad gamma: {0}")]
    BadGamma(String),
    #[error("image is finite")]
    FiniteImage,
    #[error("image is infinite")]
    InfiniteImage,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("bad split: {0}")]
    BadSplit(String),
    #[error("chain size {0} exceeds the supported bound {1}")]
    TooLarge(usize, usize),
    #[error("map is not an automorphism")]
    NotAutomorphism,
    #[error("fixed set of an interval-isomorphism piece is not computable")]
    IsoFixedSetUnsupported,
    #[error("maps do not commute")]
    NotCommuting,
    #[error("commutation could not be decided")]
    CommutationUndecided,
    #[error("invalid element code: {0}")]
    InvalidCode(String),
    #[error("elements are not in increasing order")]
    NotOrdered,
}

pub type Result<T> = std::result::Result<T, Error>;
