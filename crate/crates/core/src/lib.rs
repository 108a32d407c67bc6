// SPDX-License-Identifier: Apache-2.0

//! Publicly verifiable secret sharing over a prime-order subgroup of Z_p*,
//! with XOR-masked share delivery, an arbitrated dispute protocol, a
//! membership proof and a deterministic adversary simulator.

pub mod encoding;
pub mod error;
pub mod fixture;
pub mod group;
pub mod ops;
pub mod primality;
pub mod protocols;
pub mod pvss;
pub mod shamir;
pub mod sim;

pub use error::{Error, Result};
pub use fixture::Fixture;
pub use group::{GroupElement, GroupParams, ParamViolation, Scalar};
pub use ops::OpCounts;
pub use pvss::{
    deal, decrypt_share, reconstruct, verify_bulletin, verify_share, BulletinBoard, DealOutput, EncryptedShare,
    KeyPair, Reconstruction,
};
pub use shamir::{interpolate_secret, lagrange_weights, IndexedShare, SharePolynomial};
