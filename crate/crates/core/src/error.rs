// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("search exhausted: no {what} found within {bound} candidates")]
    SearchExhausted { what: &'static str, bound: usize },

    #[error("value has no inverse modulo q")]
    ZeroInverse,

    /// A group element reduced to zero modulo q where an inverse exponent was required.
    #[error("degenerate exponent: element is congruent to 0 modulo q")]
    DegenerateExponent,

    #[error("decrypted share is not canonical (>= q)")]
    NonCanonicalShare,

    #[error("byte string has length {found}, expected {expected}")]
    InvalidLength { expected: usize, found: usize },

    #[error("duplicate share index {0}")]
    DuplicateIndex(u64),

    #[error("share index {0} out of range")]
    IndexOutOfRange(u64),

    #[error("insufficient valid shares: needed {needed}, got {valid}")]
    InsufficientValidShares { needed: usize, valid: usize },

    #[error("value is not an element of the order-q subgroup")]
    NotInGroup,

    #[error("scalar out of range [0, q)")]
    ScalarOutOfRange,

    #[error("protocol step `{step}` not allowed in phase {phase}")]
    OutOfPhase { step: &'static str, phase: String },

    #[error("malformed transcript: {0}")]
    Transcript(String),

    #[error("invalid scenario config: {0}")]
    Config(String),
}
