// SPDX-License-Identifier: Apache-2.0

//! Threshold sharing over Z_q: polynomial sampling, Horner evaluation and
//! Lagrange interpolation at zero.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Scalar;

/// Uniform integer in [0, bound) by rejection sampling on `bitlen(bound)` bits.
///
/// Panics if `bound` is zero.
pub fn uniform_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "uniform_below: empty range");
    let bits = bound.bits() as usize;
    let nbytes = bits.div_ceil(8);
    let excess = nbytes * 8 - bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xff >> excess;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// F(x) = F_0 + F_1 x + ... + F_{k-1} x^{k-1}; `coeffs[0]` is the secret.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharePolynomial {
    coeffs: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedShare {
    pub index: u64,
    pub share: Scalar,
}

impl SharePolynomial {
    pub fn new(coeffs: Vec<Scalar>) -> Result<SharePolynomial> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("polynomial needs at least one coefficient".into()));
        }
        Ok(SharePolynomial { coeffs })
    }

    /// Secret as the constant term, the other `k - 1` coefficients uniform in Z_q.
    pub fn sample<R: RngCore>(secret: Scalar, k: usize, q: &BigUint, rng: &mut R) -> Result<SharePolynomial> {
        if k == 0 || BigUint::from(k) > *q {
            return Err(Error::InvalidParameter(format!("threshold k = {k} outside [1, q]")));
        }
        if secret.value() >= q {
            return Err(Error::ScalarOutOfRange);
        }
        let mut coeffs = Vec::with_capacity(k);
        coeffs.push(secret);
        for _ in 1..k {
            coeffs.push(Scalar::new(uniform_below(q, rng), q)?);
        }
        Ok(SharePolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn secret(&self) -> &Scalar {
        &self.coeffs[0]
    }

    /// s_i = F(i) mod q. `i = 0` yields the secret.
    pub fn eval(&self, i: u64, q: &BigUint) -> IndexedShare {
        let x = BigUint::from(i);
        let acc = self.coeffs.iter().rev().fold(BigUint::zero(), |acc, c| (acc * &x + c.value()).mod_floor(q));
        IndexedShare { index: i, share: Scalar::reduce(&acc, q) }
    }
}

/// Lagrange coefficients at x = 0: w_i = prod_{j != i} j / (j - i) mod q.
pub fn lagrange_weights(indices: &[u64], q: &BigUint) -> Result<Vec<Scalar>> {
    let mut seen = BTreeSet::new();
    for &i in indices {
        if i == 0 || BigUint::from(i) >= *q {
            return Err(Error::IndexOutOfRange(i));
        }
        if !seen.insert(i) {
            return Err(Error::DuplicateIndex(i));
        }
    }

    let qm = |v: BigUint| v.mod_floor(q);
    indices
        .iter()
        .map(|&i| {
            let xi = BigUint::from(i);
            let (num, den) =
                indices.iter().filter(|&&j| j != i).fold((BigUint::one(), BigUint::one()), |(num, den), &j| {
                    let xj = BigUint::from(j);
                    // j - i taken mod q
                    let diff = qm(&xj + q - &xi);
                    (qm(num * &xj), qm(den * diff))
                });
            let inv = den.modinv(q).ok_or(Error::ZeroInverse)?;
            Ok(Scalar::reduce(&(num * inv), q))
        })
        .collect()
}

/// s = sum w_i s_i mod q over the given shares.
pub fn interpolate_secret(shares: &[IndexedShare], q: &BigUint) -> Result<Scalar> {
    let indices: Vec<u64> = shares.iter().map(|s| s.index).collect();
    let weights = lagrange_weights(&indices, q)?;
    let sum = shares
        .iter()
        .zip(&weights)
        .fold(BigUint::zero(), |acc, (s, w)| (acc + s.share.value() * w.value()).mod_floor(q));
    Ok(Scalar::reduce(&sum, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn q11() -> BigUint {
        BigUint::from(11u32)
    }

    fn sc(v: u64) -> Scalar {
        Scalar::new(v.into(), &q11()).unwrap()
    }

    fn poly(c: &[u64]) -> SharePolynomial {
        SharePolynomial::new(c.iter().map(|&v| sc(v)).collect()).unwrap()
    }

    fn share(index: u64, v: u64) -> IndexedShare {
        IndexedShare { index, share: sc(v) }
    }

    #[test]
    fn eval_examples() {
        let f = poly(&[7, 3]);
        assert_eq!(f.eval(1, &q11()).share, sc(10));
        assert_eq!(f.eval(0, &q11()).share, sc(7));
        assert_eq!(f.eval(2, &q11()).share, sc(2));
    }

    #[test]
    fn weights_examples() {
        assert_eq!(lagrange_weights(&[1, 2], &q11()).unwrap(), vec![sc(2), sc(10)]);
        assert_eq!(lagrange_weights(&[2, 3], &q11()).unwrap(), vec![sc(3), sc(9)]);
        assert_eq!(lagrange_weights(&[5], &q11()).unwrap(), vec![sc(1)]);
    }

    #[test]
    fn weights_errors() {
        assert_eq!(lagrange_weights(&[1, 1], &q11()), Err(Error::DuplicateIndex(1)));
        assert_eq!(lagrange_weights(&[0, 1], &q11()), Err(Error::IndexOutOfRange(0)));
        assert_eq!(lagrange_weights(&[1, 11], &q11()), Err(Error::IndexOutOfRange(11)));
    }

    #[test]
    fn interpolate_examples() {
        assert_eq!(interpolate_secret(&[share(1, 10), share(2, 2)], &q11()).unwrap(), sc(7));
        assert_eq!(interpolate_secret(&[share(2, 2), share(3, 5)], &q11()).unwrap(), sc(7));
        assert_eq!(interpolate_secret(&[share(4, 9)], &q11()).unwrap(), sc(9));
    }

    #[test]
    fn sample_constant_and_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let f = SharePolynomial::sample(sc(7), 1, &q11(), &mut rng).unwrap();
        assert_eq!(f.coeffs(), &[sc(7)]);
        let f = SharePolynomial::sample(sc(7), 2, &q11(), &mut rng).unwrap();
        assert_eq!(f.coeffs()[0], sc(7));
        assert!(f.coeffs()[1].value() < &q11());
        assert!(SharePolynomial::sample(sc(7), 0, &q11(), &mut rng).is_err());
        assert!(SharePolynomial::sample(sc(7), 12, &q11(), &mut rng).is_err());
    }

    #[test]
    fn sample_is_deterministic_per_seed() {
        let a = SharePolynomial::sample(sc(3), 4, &q11(), &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = SharePolynomial::sample(sc(3), 4, &q11(), &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coefficient_distribution_is_uniform() {
        // 10,000 seeds, each bucket expected 10000/11 with binomial sigma.
        let trials = 10_000u64;
        let mut counts = [0u64; 11];
        for seed in 0..trials {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let f = SharePolynomial::sample(sc(0), 2, &q11(), &mut rng).unwrap();
            let v: u64 = f.coeffs()[1].value().try_into().unwrap();
            counts[v as usize] += 1;
        }
        let p = 1.0 / 11.0;
        let mean = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            assert!(((c as f64) - mean).abs() < 5.0 * sigma, "value {v}: {c}");
        }
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
        // 10 degrees of freedom; 0.999 quantile is 29.59
        assert!(chi2 < 29.59, "chi2 = {chi2}");
    }

    #[test]
    fn exhaustive_round_trip_small() {
        let q = q11();
        // every polynomial of degree < k for k <= 2, every k-subset of 1..=5
        for k in 1..=2usize {
            let total = 11u64.pow(k as u32);
            for code in 0..total {
                let coeffs: Vec<u64> = (0..k).map(|j| (code / 11u64.pow(j as u32)) % 11).collect();
                let f = poly(&coeffs);
                for subset in subsets(5, k) {
                    let shares: Vec<_> = subset.iter().map(|&i| f.eval(i, &q)).collect();
                    assert_eq!(interpolate_secret(&shares, &q).unwrap(), *f.secret());
                }
            }
        }
    }

    #[test]
    fn k_minus_one_shares_reveal_nothing() {
        // For any single share at k = 2, every candidate secret has a consistent line.
        let q = q11();
        for i in 1..=5u64 {
            for s_i in 0..11u64 {
                for sigma in 0..11u64 {
                    let found = (0..11u64).any(|c| poly(&[sigma, c]).eval(i, &q).share == sc(s_i));
                    assert!(found, "i={i} s_i={s_i} sigma={sigma}");
                }
            }
        }
    }

    pub(crate) fn subsets(n: u64, k: usize) -> Vec<Vec<u64>> {
        fn go(start: u64, n: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..=n {
                cur.push(i);
                go(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(1, n, k, &mut Vec::new(), &mut out);
        out
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn any_k_subset_reconstructs(seed in any::<u64>(), secret in 0u64..11, k in 1usize..=3, extra in 0u64..=2) {
                let q = q11();
                let n = k as u64 + extra;
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let f = SharePolynomial::sample(sc(secret), k, &q, &mut rng).unwrap();
                for subset in subsets(n, k) {
                    let shares: Vec<_> = subset.iter().map(|&i| f.eval(i, &q)).collect();
                    prop_assert_eq!(interpolate_secret(&shares, &q).unwrap(), sc(secret));
                }
            }
        }
    }
}
