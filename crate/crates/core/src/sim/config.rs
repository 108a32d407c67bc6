// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::strategy::{AdversaryStrategy, Role};
use crate::encoding::hex_biguint;
use crate::error::{Error, Result};
use crate::group::GroupParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ParamsSource {
    /// p = 23, q = 11, g = 2.
    FixedToy,
    Fixed {
        #[serde(with = "hex_biguint")]
        p: BigUint,
        #[serde(with = "hex_biguint")]
        q: BigUint,
        #[serde(with = "hex_biguint")]
        g: BigUint,
    },
    /// Generated from the scenario seed.
    Generated { q_bits: u64 },
}

impl ParamsSource {
    pub fn resolve(&self, seed: u64) -> Result<GroupParams> {
        let params = match self {
            ParamsSource::FixedToy => GroupParams::toy(),
            ParamsSource::Fixed { p, q, g } => GroupParams::new(p.clone(), q.clone(), g.clone()),
            ParamsSource::Generated { q_bits } => GroupParams::generate(*q_bits, seed)?,
        };
        params.validate().map_err(|v| Error::Config(format!("invalid group parameters: {v}")))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecretSource {
    Explicit(#[serde(with = "hex_biguint")] BigUint),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioPhase {
    Deal,
    Verify,
    Dispute,
    Membership,
    Reconstruct,
}

impl ScenarioPhase {
    pub const ALL: [ScenarioPhase; 5] = [
        ScenarioPhase::Deal,
        ScenarioPhase::Verify,
        ScenarioPhase::Dispute,
        ScenarioPhase::Membership,
        ScenarioPhase::Reconstruct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioPhase::Deal => "deal",
            ScenarioPhase::Verify => "verify",
            ScenarioPhase::Dispute => "dispute",
            ScenarioPhase::Membership => "membership",
            ScenarioPhase::Reconstruct => "reconstruct",
        }
    }

    fn requires(self) -> &'static [ScenarioPhase] {
        match self {
            ScenarioPhase::Deal => &[],
            ScenarioPhase::Verify | ScenarioPhase::Membership | ScenarioPhase::Reconstruct => &[ScenarioPhase::Deal],
            ScenarioPhase::Dispute => &[ScenarioPhase::Deal, ScenarioPhase::Verify],
        }
    }
}

fn all_phases() -> BTreeSet<ScenarioPhase> {
    ScenarioPhase::ALL.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub params: ParamsSource,
    pub k: usize,
    pub n: u64,
    pub secret: SecretSource,
    pub seed: u64,
    #[serde(default)]
    pub strategies: Vec<AdversaryStrategy>,
    /// Phases run in their fixed order regardless of how they are listed.
    #[serde(default = "all_phases")]
    pub phases: BTreeSet<ScenarioPhase>,
}

impl ScenarioConfig {
    /// Toy parameters, no adversaries, every phase.
    pub fn honest_toy(k: usize, n: u64, secret: u64, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            params: ParamsSource::FixedToy,
            k,
            n,
            secret: SecretSource::Explicit(secret.into()),
            seed,
            strategies: Vec::new(),
            phases: all_phases(),
        }
    }

    pub fn runs(&self, phase: ScenarioPhase) -> bool {
        self.phases.contains(&phase)
    }

    /// Checks that do not depend on the group.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.k == 0 || self.k as u64 > self.n {
            return bad(format!("need 1 <= k <= n, got k = {}, n = {}", self.k, self.n));
        }
        for phase in &self.phases {
            if let Some(missing) = phase.requires().iter().find(|r| !self.phases.contains(r)) {
                return bad(format!("phase {} requires phase {}", phase.name(), missing.name()));
            }
        }
        let dealers = self.strategies.iter().filter(|s| s.role() == Role::Dealer).count();
        if dealers > 1 {
            return bad(format!("at most one dealer strategy allowed, got {dealers}"));
        }
        let mut targets = BTreeSet::new();
        for s in &self.strategies {
            let Some(t) = s.target() else { continue };
            if t == 0 || t > self.n {
                return bad(format!("{} targets index {t}, outside 1..={}", s.label(), self.n));
            }
            if s.role() != Role::Outsider && !targets.insert(t) {
                return bad(format!("index {t} is targeted by more than one dealer or participant strategy"));
            }
            if let AdversaryStrategy::DealerLambdaVariant { form, share_substitution, key_substitution, .. } = s {
                if form.needs_share_substitute() != share_substitution.is_some() {
                    return bad(format!("{form} takes a share substitution iff it uses s'"));
                }
                if form.wrong_key() != key_substitution.is_some() {
                    return bad(format!("{form} takes a key substitution iff it uses pk'"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::strategy::{LambdaForm, Substitution};

    #[test]
    fn json_shape() {
        let json = serde_json::json!({
            "params": {"source": "fixed_toy"},
            "k": 2,
            "n": 3,
            "secret": {"explicit": "07"},
            "seed": 1,
            "strategies": [
                {"strategy": "participant_fake_alpha", "target": 2, "substitution": "exhaust_all"}
            ]
        });
        let c: ScenarioConfig = serde_json::from_value(json).unwrap();
        assert_eq!(c.phases.len(), 5);
        assert_eq!(c.secret, SecretSource::Explicit(7u8.into()));
        c.validate().unwrap();

        let g: ParamsSource = serde_json::from_value(serde_json::json!({"source": "generated", "q_bits": 32})).unwrap();
        assert_eq!(g, ParamsSource::Generated { q_bits: 32 });
        assert_eq!(serde_json::to_value(SecretSource::Random).unwrap(), serde_json::json!("random"));
    }

    #[test]
    fn validation_rules() {
        let base = ScenarioConfig::honest_toy(2, 3, 7, 1);
        base.validate().unwrap();

        let mut c = base.clone();
        c.k = 4;
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.phases = [ScenarioPhase::Deal, ScenarioPhase::Dispute].into_iter().collect();
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.phases.clear();
        c.validate().unwrap();

        let dealer = |t| AdversaryStrategy::DealerInvalidShare { target: t, substitution: Substitution::Random };
        let mut c = base.clone();
        c.strategies = vec![dealer(1), dealer(2)];
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.strategies = vec![dealer(1), AdversaryStrategy::ParticipantFalseComplaint { target: 1 }];
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.strategies = vec![dealer(4)];
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.strategies = vec![AdversaryStrategy::DealerLambdaVariant {
            target: 1,
            form: LambdaForm::new(4).unwrap(),
            share_substitution: Some(Substitution::Random),
            key_substitution: Some(Substitution::Random),
        }];
        assert!(c.validate().is_err());
    }

    #[test]
    fn params_sources_resolve() {
        assert_eq!(ParamsSource::FixedToy.resolve(0).unwrap(), GroupParams::toy());
        let bad = ParamsSource::Fixed { p: 23u8.into(), q: 11u8.into(), g: 5u8.into() };
        assert!(matches!(bad.resolve(0), Err(Error::Config(_))));
        let a = ParamsSource::Generated { q_bits: 24 }.resolve(5).unwrap();
        let b = ParamsSource::Generated { q_bits: 24 }.resolve(5).unwrap();
        assert_eq!(a, b);
    }
}
