// SPDX-License-Identifier: Apache-2.0

//! Adversary behaviours the simulator can inject.

use std::fmt;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::encoding::hex_biguint;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::pvss::{xor_mask, EncryptedShare};
use crate::shamir::uniform_below;

/// Largest q for which `exhaust_all` substitutions are allowed.
pub const EXHAUST_MAX_Q: u64 = 64;

/// How a cheating party picks the wrong value it uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    /// One fixed value (hex).
    Fixed(#[serde(with = "hex_biguint")] BigUint),
    /// One value drawn from the scenario RNG.
    Random,
    /// Every admissible value, one sub-run each. Only for q <= 64.
    ExhaustAll,
}

impl Substitution {
    /// Concrete values in `[low, q)` other than `honest`.
    pub fn values<R: RngCore>(
        &self,
        params: &GroupParams,
        low: u64,
        honest: &BigUint,
        rng: &mut R,
    ) -> Result<Vec<BigUint>> {
        let q = &params.q;
        let low = BigUint::from(low);
        let admissible = |v: &BigUint| v >= &low && v < q && v != honest;
        match self {
            Substitution::Fixed(v) if admissible(v) => Ok(vec![v.clone()]),
            Substitution::Fixed(v) => {
                Err(Error::Config(format!("substitution {v} must lie in [{low}, q) and differ from the honest value")))
            }
            Substitution::Random => {
                if q - &low < BigUint::from(2u8) {
                    return Err(Error::Config("no admissible substitution value".into()));
                }
                loop {
                    let v = &low + uniform_below(&(q - &low), rng);
                    if admissible(&v) {
                        return Ok(vec![v]);
                    }
                }
            }
            Substitution::ExhaustAll => {
                if q > &BigUint::from(EXHAUST_MAX_Q) {
                    return Err(Error::Config(format!("exhaust_all needs q <= {EXHAUST_MAX_Q}")));
                }
                let mut out = Vec::new();
                let mut v = low;
                while &v < q {
                    if &v != honest {
                        out.push(v.clone());
                    }
                    v += 1u8;
                }
                Ok(out)
            }
        }
    }
}

/// One of the seven ways a dealer can form a wrong lambda out of the share
/// s, the public key pk = g^a and substitutes s', pk' = g^{a'}.
///
/// | form | lambda         |
/// |------|----------------|
/// | 1    | s' ^ pk^s      |
/// | 2    | s ^ pk^s'      |
/// | 3    | s' ^ pk^s'     |
/// | 4    | s ^ pk'^s      |
/// | 5    | s' ^ pk'^s     |
/// | 6    | s ^ pk'^s'     |
/// | 7    | s' ^ pk'^s'    |
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct LambdaForm(u8);

impl LambdaForm {
    pub const ALL: [LambdaForm; 7] =
        [LambdaForm(1), LambdaForm(2), LambdaForm(3), LambdaForm(4), LambdaForm(5), LambdaForm(6), LambdaForm(7)];

    pub fn new(form: u8) -> Result<LambdaForm> {
        if (1..=7).contains(&form) {
            Ok(LambdaForm(form))
        } else {
            Err(Error::Config(format!("lambda form must be 1..=7, got {form}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// s' replaces s as the XORed plaintext.
    pub fn wrong_plaintext(self) -> bool {
        matches!(self.0, 1 | 3 | 5 | 7)
    }

    /// s' replaces s as the mask exponent.
    pub fn wrong_exponent(self) -> bool {
        matches!(self.0, 2 | 3 | 6 | 7)
    }

    /// pk' replaces pk as the mask base.
    pub fn wrong_key(self) -> bool {
        self.0 >= 4
    }

    pub fn needs_share_substitute(self) -> bool {
        self.wrong_plaintext() || self.wrong_exponent()
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            1 => "s'^pk^s",
            2 => "s^pk^s'",
            3 => "s'^pk^s'",
            4 => "s^pk'^s",
            5 => "s'^pk'^s",
            6 => "s^pk'^s'",
            _ => "s'^pk'^s'",
        }
    }

    /// Builds the corrupted lambda. `s_alt` is ignored unless the form uses
    /// it, likewise `pk_alt`.
    pub fn lambda(
        self,
        params: &GroupParams,
        s: &Scalar,
        pk: &GroupElement,
        s_alt: Option<&Scalar>,
        pk_alt: Option<&GroupElement>,
    ) -> Result<EncryptedShare> {
        let missing = |what| Error::Config(format!("lambda form {} needs {what}", self.0));
        let s_alt = if self.needs_share_substitute() { Some(s_alt.ok_or(missing("s'"))?) } else { None };
        let pk_alt = if self.wrong_key() { Some(pk_alt.ok_or(missing("pk'"))?) } else { None };
        let plain = if self.wrong_plaintext() { s_alt.unwrap() } else { s };
        let exp = if self.wrong_exponent() { s_alt.unwrap() } else { s };
        let base = pk_alt.unwrap_or(pk);
        let mask = params.mod_exp(base, exp.value());
        xor_mask(plain.value(), mask.value(), params.byte_len)
    }
}

impl TryFrom<u8> for LambdaForm {
    type Error = Error;

    fn try_from(v: u8) -> Result<LambdaForm> {
        LambdaForm::new(v)
    }
}

impl From<LambdaForm> for u8 {
    fn from(f: LambdaForm) -> u8 {
        f.0
    }
}

impl fmt::Display for LambdaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda{} ({})", self.0, self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Dealer,
    Participant,
    Outsider,
    Honest,
}

/// A configured deviation. The role is implied by the variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum AdversaryStrategy {
    Honest,
    /// The dealer deals s' to `target` consistently: E = s' ^ pk^s', and
    /// answers the dispute as if s' were the share.
    DealerInvalidShare {
        target: u64,
        substitution: Substitution,
    },
    /// The dealer deals and defends one of the seven corrupted lambdas.
    /// `share_substitution` picks s', `key_substitution` picks the private
    /// key a' behind pk' = g^{a'}.
    DealerLambdaVariant {
        target: u64,
        form: LambdaForm,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        share_substitution: Option<Substitution>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        key_substitution: Option<Substitution>,
    },
    /// The participant receives a valid share but complains with a forged
    /// alpha at step 4.
    ParticipantFakeAlpha {
        target: u64,
        substitution: Substitution,
    },
    /// The participant publishes a wrong step-2 value, forcing the key-reveal branch.
    ParticipantFalseComplaint {
        target: u64,
    },
    /// Someone without the share tries the membership proof for `claimed_index`.
    OutsiderImpostor {
        claimed_index: u64,
        substitution: Substitution,
    },
}

impl AdversaryStrategy {
    pub fn role(&self) -> Role {
        match self {
            AdversaryStrategy::Honest => Role::Honest,
            AdversaryStrategy::DealerInvalidShare { .. } | AdversaryStrategy::DealerLambdaVariant { .. } => {
                Role::Dealer
            }
            AdversaryStrategy::ParticipantFakeAlpha { .. } | AdversaryStrategy::ParticipantFalseComplaint { .. } => {
                Role::Participant
            }
            AdversaryStrategy::OutsiderImpostor { .. } => Role::Outsider,
        }
    }

    /// Participant index the strategy acts on.
    pub fn target(&self) -> Option<u64> {
        match self {
            AdversaryStrategy::Honest => None,
            AdversaryStrategy::DealerInvalidShare { target, .. }
            | AdversaryStrategy::DealerLambdaVariant { target, .. }
            | AdversaryStrategy::ParticipantFakeAlpha { target, .. }
            | AdversaryStrategy::ParticipantFalseComplaint { target } => Some(*target),
            AdversaryStrategy::OutsiderImpostor { claimed_index, .. } => Some(*claimed_index),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AdversaryStrategy::Honest => "honest".into(),
            AdversaryStrategy::DealerInvalidShare { .. } => "dealer_invalid_share".into(),
            AdversaryStrategy::DealerLambdaVariant { form, .. } => format!("dealer_lambda_variant_{}", form.number()),
            AdversaryStrategy::ParticipantFakeAlpha { .. } => "participant_fake_alpha".into(),
            AdversaryStrategy::ParticipantFalseComplaint { .. } => "participant_false_complaint".into(),
            AdversaryStrategy::OutsiderImpostor { .. } => "outsider_impostor".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sc(v: u64) -> Scalar {
        GroupParams::toy().scalar(v.into()).unwrap()
    }

    fn el(v: u64) -> GroupElement {
        GroupParams::toy().element(v.into()).unwrap()
    }

    #[test]
    fn seven_forms_with_distinct_shapes() {
        let shapes: Vec<_> =
            LambdaForm::ALL.iter().map(|f| (f.wrong_plaintext(), f.wrong_exponent(), f.wrong_key())).collect();
        let mut uniq = shapes.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 7);
        assert!(!shapes.contains(&(false, false, false)));
        assert!(LambdaForm::new(0).is_err());
        assert!(LambdaForm::new(8).is_err());
    }

    #[test]
    fn lambda_forms_on_toy_fixture() {
        let p = GroupParams::toy();
        let (s, pk) = (sc(10), el(16));
        // s' = 6: 6 ^ 16^10 = 6 ^ 13 = 11
        let l1 = LambdaForm(1).lambda(&p, &s, &pk, Some(&sc(6)), None).unwrap();
        assert_eq!(l1.as_bytes(), &[0x0b]);
        // 16^6 = 4, 10 ^ 4 = 14
        let l2 = LambdaForm(2).lambda(&p, &s, &pk, Some(&sc(6)), None).unwrap();
        assert_eq!(l2.as_bytes(), &[0x0e]);
        // pk' = 4: 4^10 = 6, 10 ^ 6 = 12
        let l4 = LambdaForm(4).lambda(&p, &s, &pk, None, Some(&el(4))).unwrap();
        assert_eq!(l4.as_bytes(), &[0x0c]);
        assert!(LambdaForm(7).lambda(&p, &s, &pk, Some(&sc(6)), None).is_err());
    }

    #[test]
    fn substitution_values() {
        let p = GroupParams::toy();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        let all = Substitution::ExhaustAll.values(&p, 0, &10u8.into(), &mut rng).unwrap();
        assert_eq!(all.len(), 10);
        assert!(!all.contains(&10u8.into()));
        let keys = Substitution::ExhaustAll.values(&p, 1, &4u8.into(), &mut rng).unwrap();
        assert_eq!(keys.len(), 9);
        for _ in 0..100 {
            let v = Substitution::Random.values(&p, 0, &3u8.into(), &mut rng).unwrap();
            assert!(v[0] != 3u8.into() && v[0] < 11u8.into());
        }
        assert!(Substitution::Fixed(3u8.into()).values(&p, 0, &3u8.into(), &mut rng).is_err());
        assert!(Substitution::Fixed(11u8.into()).values(&p, 0, &3u8.into(), &mut rng).is_err());
        let big = GroupParams::generate(16, 1).unwrap();
        assert!(Substitution::ExhaustAll.values(&big, 0, &3u8.into(), &mut rng).is_err());
    }

    #[test]
    fn strategy_json_round_trip() {
        let s = AdversaryStrategy::DealerLambdaVariant {
            target: 1,
            form: LambdaForm(1),
            share_substitution: Some(Substitution::Fixed(6u8.into())),
            key_substitution: None,
        };
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "strategy": "dealer_lambda_variant",
                "target": 1,
                "form": 1,
                "share_substitution": {"fixed": "06"}
            })
        );
        assert_eq!(serde_json::from_value::<AdversaryStrategy>(json).unwrap(), s);
        let bad = serde_json::json!({"strategy": "dealer_lambda_variant", "target": 1, "form": 9});
        assert!(serde_json::from_value::<AdversaryStrategy>(bad).is_err());
        assert_eq!(s.role(), Role::Dealer);
    }
}
