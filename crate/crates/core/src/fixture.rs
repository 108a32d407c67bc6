// SPDX-License-Identifier: Apache-2.0

//! A fully dealt instance with every party's private state in one place.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::group::{GroupParams, Scalar};
use crate::pvss::{deal_with_polynomial, BulletinBoard, KeyPair};
use crate::shamir::{IndexedShare, SharePolynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub params: GroupParams,
    pub poly: SharePolynomial,
    pub keys: BTreeMap<u64, KeyPair>,
    pub board: BulletinBoard,
}

impl Fixture {
    /// Honest deal of `poly` to participants holding `keys` (indices 1..=n).
    pub fn new(params: GroupParams, poly: SharePolynomial, keys: BTreeMap<u64, KeyPair>) -> Result<Fixture> {
        let n = keys.len() as u64;
        let pubkeys: BTreeMap<u64, _> = keys.iter().map(|(i, kp)| (*i, kp.pk.clone())).collect();
        let deal = deal_with_polynomial(&params, &poly, n, &pubkeys)?;
        let board = BulletinBoard { params: params.clone(), k: poly.threshold(), n, deal, pubkeys };
        Ok(Fixture { params, poly, keys, board })
    }

    /// p = 23, q = 11, g = 2, F(x) = 7 + 3x, private keys a = (4, 7, 2).
    pub fn toy() -> Fixture {
        Self::from_small(GroupParams::toy(), &[7, 3], &[4, 7, 2]).expect("toy fixture is valid")
    }

    /// Convenience constructor from small integers.
    pub fn from_small(params: GroupParams, coeffs: &[u64], secret_keys: &[u64]) -> Result<Fixture> {
        let coeffs = coeffs.iter().map(|&c| params.scalar(c.into())).collect::<Result<Vec<_>>>()?;
        let poly = SharePolynomial::new(coeffs)?;
        let keys = secret_keys
            .iter()
            .zip(1u64..)
            .map(|(&a, i)| Ok((i, KeyPair::from_secret(&params, params.scalar(a.into())?)?)))
            .collect::<Result<_>>()?;
        Fixture::new(params, poly, keys)
    }

    pub fn share(&self, i: u64) -> IndexedShare {
        self.poly.eval(i, &self.params.q)
    }

    pub fn secret(&self) -> &Scalar {
        self.poly.secret()
    }

    pub fn key(&self, i: u64) -> &KeyPair {
        &self.keys[&i]
    }
}
