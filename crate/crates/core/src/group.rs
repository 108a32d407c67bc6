// SPDX-License-Identifier: Apache-2.0

//! The prime-order subgroup G_q of Z_p^* and its exponent field Z_q.
//!
//! Every exponent is reduced modulo q before use; all bases are in G_q so this
//! does not change any result. Where the protocols put a group element in
//! exponent position, the element's integer value is reduced into Z_q
//! (see [`GroupParams::masked_inverse_exp`]).

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{self, hex_biguint};
use crate::error::{Error, Result};
use crate::ops;
use crate::primality::is_probable_prime;
use crate::shamir::uniform_below;

/// Upper bound on candidates tried by each stage of [`GroupParams::generate`].
pub const SEARCH_BOUND: usize = 10_000;

pub const MIN_Q_BITS: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupParams {
    #[serde(with = "hex_biguint")]
    pub p: BigUint,
    #[serde(with = "hex_biguint")]
    pub q: BigUint,
    #[serde(with = "hex_biguint")]
    pub g: BigUint,
    /// Width of the canonical element encoding, `ceil(bitlen(p) / 8)`.
    pub byte_len: usize,
}

/// First failed invariant reported by [`GroupParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamViolation {
    PNotPrime,
    QNotPrime,
    QDoesNotDivide,
    GeneratorIsIdentity,
    GeneratorOutOfRange,
    GeneratorWrongOrder,
    ByteLenMismatch,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamViolation::PNotPrime => "p not prime",
            ParamViolation::QNotPrime => "q not prime",
            ParamViolation::QDoesNotDivide => "q does not divide p-1",
            ParamViolation::GeneratorIsIdentity => "generator is identity",
            ParamViolation::GeneratorOutOfRange => "generator out of range (1, p)",
            ParamViolation::GeneratorWrongOrder => "generator order is not q",
            ParamViolation::ByteLenMismatch => "byte_len does not match p",
        })
    }
}

impl std::error::Error for ParamViolation {}

/// An element of G_q, stored as its residue in [1, p-1].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(#[serde(with = "hex_biguint")] BigUint);

impl GroupElement {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    pub fn to_hex(&self) -> String {
        encoding::biguint_to_hex(&self.0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An exponent in [0, q-1].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scalar(#[serde(with = "hex_biguint")] BigUint);

impl Scalar {
    pub fn new(value: BigUint, q: &BigUint) -> Result<Scalar> {
        if &value < q {
            Ok(Scalar(value))
        } else {
            Err(Error::ScalarOutOfRange)
        }
    }

    /// Reduces any integer into Z_q.
    pub fn reduce(value: &BigUint, q: &BigUint) -> Scalar {
        Scalar(value.mod_floor(q))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_hex(&self) -> String {
        encoding::biguint_to_hex(&self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl GroupParams {
    /// Builds parameters without validating them; `byte_len` is derived from `p`.
    pub fn new(p: BigUint, q: BigUint, g: BigUint) -> GroupParams {
        let byte_len = (p.bits() as usize).div_ceil(8);
        GroupParams { p, q, g, byte_len }
    }

    /// p = 23, q = 11, g = 2. Small enough to enumerate, used throughout the tests.
    pub fn toy() -> GroupParams {
        GroupParams::new(23u32.into(), 11u32.into(), 2u32.into())
    }

    /// Deterministic parameter search: a random `q_bits`-bit prime q, then the
    /// first prime of the form p = r*q + 1 over even r = 2, 4, ..., then
    /// g = h^((p-1)/q) for h = 2, 3, ... until g != 1.
    pub fn generate(q_bits: u64, seed: u64) -> Result<GroupParams> {
        if q_bits < MIN_Q_BITS {
            return Err(Error::InvalidParameter(format!("q_bits must be at least {MIN_Q_BITS}, got {q_bits}")));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let top = BigUint::one() << (q_bits - 1);

        let q = (0..SEARCH_BOUND)
            .map(|_| (uniform_below(&top, &mut rng) | &top) | BigUint::one())
            .find(is_probable_prime)
            .ok_or(Error::SearchExhausted { what: "prime q", bound: SEARCH_BOUND })?;

        let p = (1..=SEARCH_BOUND as u64)
            .map(|step| &q * (2 * step) + 1u32)
            .find(is_probable_prime)
            .ok_or(Error::SearchExhausted { what: "prime p = r*q + 1", bound: SEARCH_BOUND })?;

        let cofactor = (&p - 1u32) / &q;
        let g = (2..SEARCH_BOUND as u64 + 2)
            .map(|h| BigUint::from(h).modpow(&cofactor, &p))
            .find(|g| !g.is_one())
            .ok_or(Error::SearchExhausted { what: "generator", bound: SEARCH_BOUND })?;

        Ok(GroupParams::new(p, q, g))
    }

    /// Structural checks only; hardness of the discrete log is not checkable.
    /// Since q is prime and g != 1, `g^q = 1` pins the order of g to exactly q.
    pub fn validate(&self) -> std::result::Result<(), ParamViolation> {
        let one = BigUint::one();
        if !is_probable_prime(&self.p) {
            return Err(ParamViolation::PNotPrime);
        }
        if !is_probable_prime(&self.q) {
            return Err(ParamViolation::QNotPrime);
        }
        if !(&self.p - &one).mod_floor(&self.q).is_zero() {
            return Err(ParamViolation::QDoesNotDivide);
        }
        if self.g.is_one() {
            return Err(ParamViolation::GeneratorIsIdentity);
        }
        if self.g.is_zero() || self.g >= self.p {
            return Err(ParamViolation::GeneratorOutOfRange);
        }
        if !self.g.modpow(&self.q, &self.p).is_one() {
            return Err(ParamViolation::GeneratorWrongOrder);
        }
        if self.byte_len != (self.p.bits() as usize).div_ceil(8) {
            return Err(ParamViolation::ByteLenMismatch);
        }
        Ok(())
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement(self.g.clone())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(BigUint::one())
    }

    pub fn is_member(&self, value: &BigUint) -> bool {
        !value.is_zero() && value < &self.p && value.modpow(&self.q, &self.p).is_one()
    }

    /// Checked conversion into G_q.
    pub fn element(&self, value: BigUint) -> Result<GroupElement> {
        if self.is_member(&value) {
            Ok(GroupElement(value))
        } else {
            Err(Error::NotInGroup)
        }
    }

    pub fn scalar(&self, value: BigUint) -> Result<Scalar> {
        Scalar::new(value, &self.q)
    }

    pub fn reduce(&self, value: &BigUint) -> Scalar {
        Scalar::reduce(value, &self.q)
    }

    /// Uniform in [0, q-1].
    pub fn random_scalar<R: RngCore>(&self, rng: &mut R) -> Scalar {
        Scalar(uniform_below(&self.q, rng))
    }

    /// Uniform in [1, q-1].
    pub fn random_nonzero_scalar<R: RngCore>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random_scalar(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// `base^exp mod p` by square-and-multiply, with `exp` reduced mod q first.
    pub fn mod_exp(&self, base: &GroupElement, exp: &BigUint) -> GroupElement {
        ops::record_exp();
        let e = exp.mod_floor(&self.q);
        GroupElement(base.0.modpow(&e, &self.p))
    }

    pub fn g_pow(&self, exp: &BigUint) -> GroupElement {
        self.mod_exp(&self.generator(), exp)
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement((&a.0 * &b.0).mod_floor(&self.p))
    }

    pub fn inv_mod_q(&self, x: &BigUint) -> Result<Scalar> {
        ops::record_inv();
        let r = x.mod_floor(&self.q);
        if r.is_zero() {
            return Err(Error::ZeroInverse);
        }
        r.modinv(&self.q).map(Scalar).ok_or(Error::ZeroInverse)
    }

    /// `g^((h mod q)^-1 mod q)`: the group element `h` is read as an integer,
    /// reduced into Z_q, inverted there, and used as an exponent of g.
    ///
    /// `h` is taken as a bare integer because arbitrators apply this to XOR
    /// results that need not be group elements.
    pub fn masked_inverse_exp(&self, h: &BigUint) -> Result<GroupElement> {
        let inv = self.inv_mod_q(h).map_err(|_| Error::DegenerateExponent)?;
        Ok(self.g_pow(inv.value()))
    }

    /// Canonical fixed-width encoding of an integer below 2^(8 * byte_len).
    pub fn encode(&self, value: &BigUint) -> Result<Vec<u8>> {
        encoding::to_fixed_bytes(value, self.byte_len)
    }
}
