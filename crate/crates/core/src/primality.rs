// SPDX-License-Identifier: Apache-2.0

//! Miller-Rabin probabilistic primality testing.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::shamir::uniform_below;

/// 40 rounds bound the false-positive probability by 4^-40 = 2^-80.
pub const MR_ROUNDS: usize = 40;

const SMALL_PRIMES: [u32; 25] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// Primality with the default round count and a fixed witness stream, so the
/// answer for a given `n` never changes between runs.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_9e1e_c7ed);
    is_probable_prime_with(n, MR_ROUNDS, &mut rng)
}

pub fn is_probable_prime_with<R: RngCore>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    if let Some(small) = n.to_u32() {
        if small < 2 {
            return false;
        }
        if SMALL_PRIMES.contains(&small) {
            return true;
        }
    }
    for &sp in &SMALL_PRIMES {
        if (n % sp).is_zero() {
            return false;
        }
    }

    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    // Witnesses in [2, n-2].
    let span = n - 3u32;
    'witness: for _ in 0..rounds {
        let a = uniform_below(&span, rng) + 2u32;
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x).mod_floor(n);
            if x == n_minus_1 {
                continue 'witness;
            }
            if x == one {
                return false;
            }
        }
        return false;
    }
    true
}
