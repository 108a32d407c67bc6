// SPDX-License-Identifier: Apache-2.0

//! Dealing, share encryption, public verification and reconstruction.
//!
//! A share s_i travels as `E_i = s_i XOR (g^{a_i})^{s_i}`; the holder of a_i
//! rebuilds the same mask as `(g^{s_i})^{a_i}` from the public share image.
//! Both XOR operands are encoded at the width of p so the mask is never
//! truncated.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::encoding::{self, hex_bytes};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::ops;
use crate::shamir::{interpolate_secret, IndexedShare, SharePolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPair {
    pub sk: Scalar,
    pub pk: GroupElement,
}

impl KeyPair {
    /// sk uniform in [1, q-1].
    pub fn generate<R: RngCore>(params: &GroupParams, rng: &mut R) -> KeyPair {
        let sk = params.random_nonzero_scalar(rng);
        let pk = params.g_pow(sk.value());
        KeyPair { sk, pk }
    }

    pub fn from_secret(params: &GroupParams, sk: Scalar) -> Result<KeyPair> {
        if sk.is_zero() {
            return Err(Error::InvalidParameter("private key must be non-zero".into()));
        }
        let pk = params.g_pow(sk.value());
        Ok(KeyPair { sk, pk })
    }
}

/// Fixed-width XOR-masked value. Encrypted shares, the dispute's lambda and
/// reconstruction submissions all use this one representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EncryptedShare(#[serde(with = "hex_bytes")] Vec<u8>);

impl EncryptedShare {
    pub fn from_bytes(bytes: Vec<u8>) -> EncryptedShare {
        EncryptedShare(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    /// XORs the mask back out and decodes the result as a big-endian integer.
    pub fn unmask(&self, mask: &BigUint) -> Result<BigUint> {
        ops::record_xor();
        let m = encoding::to_fixed_bytes(mask, self.0.len())?;
        let plain: Vec<u8> = self.0.iter().zip(&m).map(|(a, b)| a ^ b).collect();
        Ok(encoding::from_bytes(&plain))
    }

    fn check_width(&self, byte_len: usize) -> Result<()> {
        if self.0.len() == byte_len {
            Ok(())
        } else {
            Err(Error::InvalidLength { expected: byte_len, found: self.0.len() })
        }
    }
}

/// Both operands encoded big-endian at `byte_len` bytes, XORed bytewise.
pub fn xor_mask(value: &BigUint, mask: &BigUint, byte_len: usize) -> Result<EncryptedShare> {
    ops::record_xor();
    let v = encoding::to_fixed_bytes(value, byte_len)?;
    let m = encoding::to_fixed_bytes(mask, byte_len)?;
    Ok(EncryptedShare(v.iter().zip(&m).map(|(a, b)| a ^ b).collect()))
}

/// Dealer-side mask `pk^s`.
pub fn dealer_mask(params: &GroupParams, pk: &GroupElement, share: &Scalar) -> GroupElement {
    params.mod_exp(pk, share.value())
}

/// Holder-side mask `(g^s)^sk`; equal to [`dealer_mask`] by Diffie-Hellman symmetry.
pub fn holder_mask(params: &GroupParams, share_image: &GroupElement, sk: &Scalar) -> GroupElement {
    params.mod_exp(share_image, sk.value())
}

/// Everything the dealer publishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DealOutput {
    /// C_j = g^{F_j}, j = 0..k-1.
    pub commitments: Vec<GroupElement>,
    /// g^{s_i} for i = 0..n; entry 0 is the image of the secret.
    pub share_images: Vec<GroupElement>,
    /// E_i for i = 1..n. There is no E_0.
    pub encrypted_shares: BTreeMap<u64, EncryptedShare>,
}

fn check_deal_ranges(params: &GroupParams, k: usize, n: u64, pubkeys: &BTreeMap<u64, GroupElement>) -> Result<()> {
    if k == 0 || k as u64 > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if BigUint::from(n) >= params.q {
        return Err(Error::InvalidParameter(format!("n = {n} must be below q")));
    }
    if let Some(missing) = (1..=n).find(|i| !pubkeys.contains_key(i)) {
        return Err(Error::InvalidParameter(format!("no public key for participant {missing}")));
    }
    Ok(())
}

/// Samples a fresh polynomial for `secret` and deals it to participants `1..=n`.
/// The polynomial is returned so the dealer can answer disputes later.
pub fn deal<R: RngCore>(
    params: &GroupParams,
    secret: &Scalar,
    k: usize,
    n: u64,
    pubkeys: &BTreeMap<u64, GroupElement>,
    rng: &mut R,
) -> Result<(SharePolynomial, DealOutput)> {
    check_deal_ranges(params, k, n, pubkeys)?;
    let poly = SharePolynomial::sample(secret.clone(), k, &params.q, rng)?;
    let out = deal_with_polynomial(params, &poly, n, pubkeys)?;
    Ok((poly, out))
}

/// Deals a given polynomial: k + (n + 1) + n exponentiations and n XORs.
pub fn deal_with_polynomial(
    params: &GroupParams,
    poly: &SharePolynomial,
    n: u64,
    pubkeys: &BTreeMap<u64, GroupElement>,
) -> Result<DealOutput> {
    check_deal_ranges(params, poly.threshold(), n, pubkeys)?;
    let commitments = poly.coeffs().iter().map(|c| params.g_pow(c.value())).collect();
    let shares: Vec<IndexedShare> = (0..=n).map(|i| poly.eval(i, &params.q)).collect();
    let share_images = shares.iter().map(|s| params.g_pow(s.share.value())).collect();
    let encrypted_shares = shares[1..]
        .iter()
        .map(|s| {
            let mask = dealer_mask(params, &pubkeys[&s.index], &s.share);
            Ok((s.index, xor_mask(s.share.value(), mask.value(), params.byte_len)?))
        })
        .collect::<Result<_>>()?;
    Ok(DealOutput { commitments, share_images, encrypted_shares })
}

/// prod_j C_j^{i^j}; the j = 0 factor is C_0 itself, so k - 1 exponentiations.
pub fn expected_share_image(params: &GroupParams, commitments: &[GroupElement], i: u64) -> GroupElement {
    let Some((first, rest)) = commitments.split_first() else {
        return params.identity();
    };
    let x = BigUint::from(i);
    let mut power = BigUint::from(1u32);
    rest.iter().fold(first.clone(), |acc, c| {
        power = (&power * &x) % &params.q;
        params.mul(&acc, &params.mod_exp(c, &power))
    })
}

/// Rebuilds s_i from E_i. A decoded value >= q is refused rather than reduced.
pub fn decrypt_share(
    params: &GroupParams,
    encrypted: &EncryptedShare,
    sk: &Scalar,
    share_image: &GroupElement,
) -> Result<Scalar> {
    encrypted.check_width(params.byte_len)?;
    let mask = holder_mask(params, share_image, sk);
    let value = encrypted.unmask(mask.value())?;
    params.scalar(value).map_err(|_| Error::NonCanonicalShare)
}

/// `g^share == prod_j C_j^{i^j}`. A `false` is grounds for a complaint.
pub fn verify_share(params: &GroupParams, share: &Scalar, commitments: &[GroupElement], i: u64) -> bool {
    params.g_pow(share.value()) == expected_share_image(params, commitments, i)
}

/// Reconstruction-phase submission: the share masked under the reconstructor's key.
pub fn encrypt_for_submission(
    params: &GroupParams,
    share: &IndexedShare,
    reconstructor_pk: &GroupElement,
) -> Result<EncryptedShare> {
    let mask = dealer_mask(params, reconstructor_pk, &share.share);
    xor_mask(share.share.value(), mask.value(), params.byte_len)
}

/// The public record every party and outside auditor reads from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "BoardWire", try_from = "BoardWire")]
pub struct BulletinBoard {
    pub params: GroupParams,
    pub k: usize,
    pub n: u64,
    pub deal: DealOutput,
    pub pubkeys: BTreeMap<u64, GroupElement>,
}

#[derive(Serialize, Deserialize)]
struct BoardWire {
    params: GroupParams,
    k: usize,
    n: u64,
    commitments: Vec<GroupElement>,
    share_images: Vec<GroupElement>,
    encrypted_shares: BTreeMap<u64, EncryptedShare>,
    pubkeys: BTreeMap<u64, GroupElement>,
}

impl From<BulletinBoard> for BoardWire {
    fn from(b: BulletinBoard) -> BoardWire {
        BoardWire {
            params: b.params,
            k: b.k,
            n: b.n,
            commitments: b.deal.commitments,
            share_images: b.deal.share_images,
            encrypted_shares: b.deal.encrypted_shares,
            pubkeys: b.pubkeys,
        }
    }
}

impl TryFrom<BoardWire> for BulletinBoard {
    type Error = Error;

    fn try_from(w: BoardWire) -> Result<BulletinBoard> {
        let board = BulletinBoard {
            params: w.params,
            k: w.k,
            n: w.n,
            deal: DealOutput {
                commitments: w.commitments,
                share_images: w.share_images,
                encrypted_shares: w.encrypted_shares,
            },
            pubkeys: w.pubkeys,
        };
        board.check_structure()?;
        Ok(board)
    }
}

impl BulletinBoard {
    /// Shape and membership checks: counts, key coverage, widths, and that every
    /// published value is an element of G_q.
    pub fn check_structure(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.deal.commitments.len() != self.k {
            return bad(format!("{} commitments for k = {}", self.deal.commitments.len(), self.k));
        }
        if self.deal.share_images.len() as u64 != self.n + 1 {
            return bad(format!("{} share images for n = {}", self.deal.share_images.len(), self.n));
        }
        let expected: Vec<u64> = (1..=self.n).collect();
        if !self.pubkeys.keys().copied().eq(expected.iter().copied()) {
            return bad("public keys must cover exactly 1..=n".into());
        }
        if !self.deal.encrypted_shares.keys().copied().eq(expected.iter().copied()) {
            return bad("encrypted shares must cover exactly 1..=n".into());
        }
        for e in self.deal.encrypted_shares.values() {
            e.check_width(self.params.byte_len)?;
        }
        let members = self.deal.commitments.iter().chain(&self.deal.share_images).chain(self.pubkeys.values());
        for v in members {
            if !self.params.is_member(v.value()) {
                return Err(Error::NotInGroup);
            }
        }
        Ok(())
    }

    pub fn share_image(&self, i: u64) -> Option<&GroupElement> {
        self.deal.share_images.get(i as usize)
    }

    pub fn pubkey(&self, i: u64) -> Option<&GroupElement> {
        self.pubkeys.get(&i)
    }

    /// Image recomputed from the commitments, as an arbiter or verifier would.
    pub fn expected_image(&self, i: u64) -> GroupElement {
        expected_share_image(&self.params, &self.deal.commitments, i)
    }
}

/// Public audit: every published g^{s_i}, i = 0..n, must equal prod_j C_j^{i^j}.
/// Returns the inconsistent indices on failure.
pub fn verify_bulletin(board: &BulletinBoard) -> std::result::Result<(), Vec<u64>> {
    let bad: Vec<u64> = (0..=board.n).filter(|&i| board.share_image(i) != Some(&board.expected_image(i))).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub secret: Scalar,
    /// Indices whose shares were interpolated, in submission order.
    pub used: Vec<u64>,
    /// Submissions that failed decryption or verification.
    pub rejected: Vec<u64>,
}

/// Decrypts each submission with the reconstructor's key against the board's
/// share image, keeps the ones that verify, and interpolates the first k.
pub fn reconstruct(
    submissions: &[(u64, EncryptedShare)],
    reconstructor_sk: &Scalar,
    board: &BulletinBoard,
) -> Result<Reconstruction> {
    let params = &board.params;
    let mut seen = std::collections::BTreeSet::new();
    for (i, _) in submissions {
        if !seen.insert(*i) {
            return Err(Error::DuplicateIndex(*i));
        }
    }

    let mut valid = Vec::new();
    let mut rejected = Vec::new();
    for (i, e) in submissions {
        let ok = match board.share_image(*i).filter(|_| *i >= 1) {
            Some(image) => decrypt_share(params, e, reconstructor_sk, image)
                .ok()
                .filter(|s| verify_share(params, s, &board.deal.commitments, *i)),
            None => None,
        };
        match ok {
            Some(share) if valid.len() < board.k => valid.push(IndexedShare { index: *i, share }),
            Some(_) => {}
            None => rejected.push(*i),
        }
    }
    if valid.len() < board.k {
        return Err(Error::InsufficientValidShares { needed: board.k, valid: valid.len() });
    }
    let secret = interpolate_secret(&valid, &params.q)?;
    Ok(Reconstruction { secret, used: valid.iter().map(|s| s.index).collect(), rejected })
}
