//! Pseudorandomness: ℓ-wise independent hashing, small-bias spaces and the
//! sparse sample distribution used by the outer Hamming test.

pub mod biased;
pub mod codec;
pub mod hash;
pub mod lfsr;
pub mod yao;

use thiserror::Error;

use crate::bits::SourceExhausted;

pub use biased::{BiasedCursor, BiasedSeed, Direction};
pub use hash::HashFamilySeed;
pub use yao::{YaoSampleSeed, YaoWalker, DEFAULT_DELTA1, DEFAULT_DELTA2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrgError {
    #[error("hash range {0} is not a power of two")]
    RangeNotPowerOfTwo(u64),
    #[error("independence parameter must be at least 1")]
    ZeroIndependence,
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("index {index} outside hash domain of size {domain}")]
    IndexOutOfDomain { index: u64, domain: u64 },
    #[error("index {index} outside output of length {len}")]
    IndexOutOfRange { index: u64, len: u64 },
    #[error("bias must lie in (0, 1), got {0}")]
    BadBias(f64),
    #[error("small-bias seed would need {0} bits per element; at most 256 are supported")]
    SeedTooWide(u64),
    #[error("seed element does not fit the field width")]
    SeedOutOfField,
    #[error("block lengths do not match the sample length")]
    BlockLengthMismatch,
    #[error(transparent)]
    Exhausted(#[from] SourceExhausted),
    #[error("malformed seed encoding: {0}")]
    Malformed(&'static str),
}
