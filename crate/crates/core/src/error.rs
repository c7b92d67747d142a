use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid letter distribution: {0}")]
    InvalidDistribution(&'static str),
    #[error("letter {letter} outside alphabet 1..={m}")]
    LetterOutOfRange { letter: u32, m: usize },
    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("permutation length must be at least 1")]
    EmptyPermutation,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("block width {v} does not divide length {n}")]
    BlockWidth { v: usize, n: usize },
    #[error("breakpoints are not an optimal decomposition: {0}")]
    InvalidBreakpoints(&'static str),
    #[error("coordinate {index} out of range for concatenated word of length {len}")]
    CoordinateOutOfRange { index: usize, len: usize },
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(&'static str),
    #[error("parameter out of domain: {0}")]
    Domain(&'static str),
    #[error("zero variance")]
    ZeroVariance,
    #[error("Painleve II integration blew up at x = {x}")]
    OdeBlowup { x: f64 },
}
