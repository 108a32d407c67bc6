// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ScenarioConfig, ScenarioPhase};
use crate::encoding::{self, hex_biguint};
use crate::error::Result;
use crate::group::GroupParams;
use crate::ops::OpCounts;
use crate::protocols::{MembershipVerdict, MessageKind, Transcript, Verdict};
use crate::pvss::BulletinBoard;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cheater {
    None,
    Dealer,
    Participant,
}

impl Cheater {
    pub fn ruled(verdict: Verdict) -> Cheater {
        match verdict {
            Verdict::DealerLied => Cheater::Dealer,
            Verdict::ParticipantLied => Cheater::Participant,
            Verdict::Resolved | Verdict::Unresolvable => Cheater::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub index: u64,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisputeRecord {
    pub index: u64,
    pub strategy: String,
    /// The substituted value(s) this sub-run used, e.g. `s'=06`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitution: Option<String>,
    pub expected_cheater: Cheater,
    pub verdict: Verdict,
    pub ruled_cheater: Cheater,
    pub transcript: Transcript<Verdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prover {
    Holder,
    Impostor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipRecord {
    pub index: u64,
    pub prover: Prover,
    /// Share the impostor tried; absent for the real holder.
    #[serde(skip_serializing_if = "Option::is_none", default, with = "opt_hex")]
    pub claimed_share: Option<BigUint>,
    pub expected: MembershipVerdict,
    pub verdict: MembershipVerdict,
    pub transcript: Transcript<MembershipVerdict>,
}

mod opt_hex {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => hex_biguint::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigUint>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| encoding::biguint_from_hex(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionRecord {
    #[serde(skip_serializing_if = "Option::is_none", default, with = "opt_hex")]
    pub secret: Option<BigUint>,
    #[serde(with = "hex_biguint")]
    pub true_secret: BigUint,
    pub matches: bool,
    pub used: Vec<u64>,
    pub rejected: Vec<u64>,
    /// Submissions made with a deliberately wrong share.
    pub corrupted: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub disputes: usize,
    /// Ruled cheater equals the configured one.
    pub correct: usize,
    /// Someone was ruled a liar who did not lie.
    pub false_accusations: usize,
    /// A cheater went unnamed in a non-degenerate run.
    pub missed: usize,
    pub degenerate: usize,
    pub impostors_accepted: usize,
    pub holders_rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateEvent {
    pub phase: ScenarioPhase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    pub cause: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub params: GroupParams,
    /// SHA-256 of the canonical JSON of the bulletin board, absent if nothing was dealt.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bulletin_consistent: Option<bool>,
    pub verifications: Vec<VerificationRecord>,
    pub disputes: Vec<DisputeRecord>,
    pub membership: Vec<MembershipRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<ReconstructionRecord>,
    pub detection: DetectionSummary,
    /// Keyed by phase name, plus `audit` for the public bulletin check.
    pub op_counts: BTreeMap<String, OpCounts>,
    pub degenerate_events: Vec<DegenerateEvent>,
    pub secrecy_violations: Vec<String>,
}

impl ScenarioReport {
    pub fn to_json(&self) -> Result<String> {
        encoding::to_canonical_json(self).map_err(|e| crate::error::Error::Transcript(e.to_string()))
    }

    /// Every launched dispute named the right party or was flagged degenerate,
    /// and every membership attempt came out as expected.
    pub fn all_detected(&self) -> bool {
        let d = &self.detection;
        d.false_accusations == 0 && d.missed == 0 && d.impostors_accepted == 0 && d.holders_rejected == 0
    }
}

pub fn fixture_hash(board: &BulletinBoard) -> Result<String> {
    let json = encoding::to_canonical_json(board).map_err(|e| crate::error::Error::Transcript(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(json.as_bytes())))
}

/// Structural stand-in for secrecy: the only messages whose payload is a
/// share-typed plaintext (alpha) must not carry `true_share`, and a private
/// key may appear only after the arbiter demanded a key reveal.
pub fn secrecy_findings<V: Clone>(transcript: &Transcript<V>, true_share: &BigUint, context: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut reveal_demanded = false;
    for e in transcript.entries() {
        if e.kind == MessageKind::MaskCheck && e.message == "key_reveal_required" {
            reveal_demanded = true;
        }
        if e.kind.carries_share_plaintext() {
            if let Ok(v) = encoding::biguint_from_hex(&e.message) {
                if &v == true_share {
                    out.push(format!("{context}: step {} exposes the share in plaintext", e.step));
                }
            }
        }
        if e.kind.is_key_reveal() && !reveal_demanded {
            out.push(format!("{context}: step {} reveals a private key without a mismatch", e.step));
        }
    }
    out
}

/// Fixed-width cost table, one row per phase.
pub fn op_count_report(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:>8} {:>8} {:>8}", "phase", "exp", "inv", "xor");
    let mut total = OpCounts::default();
    let audit = "audit".to_string();
    let names = ScenarioPhase::ALL.iter().map(|p| p.name().to_string()).chain(std::iter::once(audit));
    for name in names {
        let c = report.op_counts.get(&name).copied().unwrap_or_default();
        total += c;
        let _ = writeln!(out, "{:<12} {:>8} {:>8} {:>8}", name, c.exponentiations, c.inversions, c.xors);
    }
    let _ = writeln!(out, "{:<12} {:>8} {:>8} {:>8}", "total", total.exponentiations, total.inversions, total.xors);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Actor;

    #[test]
    fn secrecy_findings_flag_plaintext_and_early_key() {
        let mut t: Transcript<Verdict> = Transcript::default();
        t.push(4, Actor::Participant, MessageKind::Alpha, "06");
        assert!(secrecy_findings(&t, &10u8.into(), "x").is_empty());
        t.push(4, Actor::Participant, MessageKind::Alpha, "0a");
        assert_eq!(secrecy_findings(&t, &10u8.into(), "x").len(), 1);

        let mut t: Transcript<Verdict> = Transcript::default();
        t.push(2, Actor::Participant, MessageKind::PrivateKey, "04");
        assert_eq!(secrecy_findings(&t, &10u8.into(), "x").len(), 1);
        let mut t: Transcript<Verdict> = Transcript::default();
        t.push(2, Actor::Arbiter, MessageKind::MaskCheck, "key_reveal_required");
        t.push(2, Actor::Participant, MessageKind::PrivateKey, "04");
        assert!(secrecy_findings(&t, &10u8.into(), "x").is_empty());
    }

    #[test]
    fn cheater_from_verdict() {
        assert_eq!(Cheater::ruled(Verdict::DealerLied), Cheater::Dealer);
        assert_eq!(Cheater::ruled(Verdict::ParticipantLied), Cheater::Participant);
        assert_eq!(Cheater::ruled(Verdict::Resolved), Cheater::None);
        assert_eq!(Cheater::ruled(Verdict::Unresolvable), Cheater::None);
    }
}
