// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference arithmetic on machine integers. Shares no code with
//! the library: powers by repeated multiplication, inverses by search.

#![allow(dead_code)]

pub fn pow(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    for _ in 0..exp {
        acc = acc * (base % m) % m;
    }
    acc
}

pub fn inverse(x: u64, m: u64) -> Option<u64> {
    (1..m).find(|&y| x % m * y % m == 1)
}

pub struct Toy {
    pub p: u64,
    pub q: u64,
    pub g: u64,
    pub poly: Vec<u64>,
    pub sks: Vec<u64>,
}

impl Toy {
    pub fn fixture() -> Toy {
        Toy { p: 23, q: 11, g: 2, poly: vec![7, 3], sks: vec![4, 7, 2] }
    }

    pub fn gp(&self, e: u64) -> u64 {
        pow(self.g, e, self.p)
    }

    pub fn share(&self, i: u64) -> u64 {
        let mut s = 0;
        let mut x = 1;
        for c in &self.poly {
            s = (s + c * x) % self.q;
            x = x * i % self.q;
        }
        s
    }

    pub fn commitments(&self) -> Vec<u64> {
        self.poly.iter().map(|&c| self.gp(c)).collect()
    }

    /// g^{s_i} for i = 0..n.
    pub fn images(&self) -> Vec<u64> {
        (0..=self.sks.len() as u64).map(|i| self.gp(self.share(i))).collect()
    }

    pub fn pk(&self, i: u64) -> u64 {
        self.gp(self.sks[i as usize - 1])
    }

    /// s_i XOR pk_i^{s_i}; p < 256 so one byte.
    pub fn encrypted(&self, i: u64) -> u8 {
        let s = self.share(i);
        (s ^ pow(self.pk(i), s, self.p)) as u8
    }

    /// g^{(h mod q)^-1}.
    pub fn masked_inverse_exp(&self, h: u64) -> Option<u64> {
        inverse(h % self.q, self.q).map(|e| self.gp(e))
    }

    pub fn dispute_masked(&self, i: u64) -> Option<u64> {
        self.masked_inverse_exp(pow(self.pk(i), self.share(i), self.p))
    }

    pub fn membership_response(&self, share: u64, a: u64) -> Option<u64> {
        self.masked_inverse_exp(pow(self.gp(a), share, self.p))
    }

    /// Lagrange interpolation at zero over the given (index, share) pairs.
    pub fn interpolate(&self, points: &[(u64, u64)]) -> u64 {
        let q = self.q;
        let mut acc = 0;
        for &(i, s) in points {
            let mut w = 1;
            for &(j, _) in points {
                if j != i {
                    let den = (j + q - i % q) % q;
                    w = w * j % q * inverse(den, q).expect("distinct indices") % q;
                }
            }
            acc = (acc + w * s) % q;
        }
        acc
    }
}
