// SPDX-License-Identifier: Apache-2.0

//! Exhaustive adversary tables for small groups: every corrupted lambda the
//! dealer can build, every fake alpha a participant can send, every wrong
//! share an impostor can try.

use num_bigint::BigUint;
use serde::Serialize;

use super::strategy::{LambdaForm, EXHAUST_MAX_Q};
use crate::encoding::hex_biguint;
use crate::error::{Error, Result};
use crate::fixture::Fixture;
use crate::group::Scalar;
use crate::protocols::{
    dealer_publish_masked, run_dispute, run_membership, DealerScript, MembershipChallenge, MembershipVerdict,
    ParticipantResponder, ParticipantScript, Verdict,
};
use crate::pvss::EncryptedShare;

fn small_q(fx: &Fixture) -> Result<u64> {
    match u64::try_from(&fx.params.q) {
        Ok(q) if q <= EXHAUST_MAX_Q => Ok(q),
        _ => Err(Error::InvalidParameter(format!("exhaustive tables need q <= {EXHAUST_MAX_Q}"))),
    }
}

fn check_index(fx: &Fixture, index: u64) -> Result<()> {
    if fx.keys.contains_key(&index) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(index))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaRow {
    /// 0 marks the honest control row.
    pub form: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub share_substitute: Option<Scalar>,
    /// The private key a' behind pk' = g^{a'}.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_substitute: Option<Scalar>,
    pub lambda: EncryptedShare,
    pub verdict: Verdict,
    /// Why the row says nothing about detection, if it doesn't.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaMatrix {
    pub index: u64,
    pub rows: Vec<LambdaRow>,
}

impl LambdaMatrix {
    pub fn control(&self) -> Option<&LambdaRow> {
        self.rows.iter().find(|r| r.form == 0)
    }

    pub fn variant_rows(&self) -> impl Iterator<Item = &LambdaRow> {
        self.rows.iter().filter(|r| r.form != 0)
    }

    pub fn degenerate_rows(&self) -> usize {
        self.variant_rows().filter(|r| r.degenerate.is_some()).count()
    }

    /// Non-degenerate variant rows not ruled `DealerLied`.
    pub fn failures(&self) -> Vec<&LambdaRow> {
        self.variant_rows().filter(|r| r.degenerate.is_none() && r.verdict != Verdict::DealerLied).collect()
    }
}

/// Runs a full dispute over `index` for every lambda form and every
/// substitute: all s' != s, and all a' in [1, q-1] other than a_i. The
/// dealer publishes the honest step-2 value and the corrupted lambda; the
/// participant plays honestly. A row whose lambda equals the honest one is
/// degenerate: it gives the participant nothing to dispute.
pub fn enumerate_lambda_matrix(fx: &Fixture, index: u64) -> Result<LambdaMatrix> {
    let q = small_q(fx)?;
    check_index(fx, index)?;
    let params = &fx.params;
    let s = fx.share(index).share;
    let key = fx.key(index);
    let honest = DealerScript::honest(params, &s, &key.pk);
    let honest_lambda = honest.lambda.clone()?;
    let participant = ParticipantScript::honest(params, &key.sk, &fx.board.expected_image(index));

    let run = |form: u8, s_alt: Option<Scalar>, a_alt: Option<Scalar>, lambda: EncryptedShare| -> Result<LambdaRow> {
        let dealer = DealerScript { masked: dealer_publish_masked(params, &key.pk, &s), lambda: Ok(lambda.clone()) };
        let d = run_dispute(&fx.board, index, &dealer, &participant)?;
        let verdict = d.verdict().expect("dispute closes");
        let degenerate = if form != 0 && lambda == honest_lambda {
            Some("lambda collision: corrupted lambda equals the honest one".to_string())
        } else if verdict == Verdict::Unresolvable {
            Some("degenerate exponent".to_string())
        } else {
            None
        };
        Ok(LambdaRow { form, share_substitute: s_alt, key_substitute: a_alt, lambda, verdict, degenerate })
    };

    let mut rows = vec![run(0, None, None, honest_lambda.clone())?];
    let share_alts: Vec<Scalar> =
        (0..q).filter(|&v| BigUint::from(v) != *s.value()).map(|v| params.reduce(&v.into())).collect();
    let key_alts: Vec<Scalar> =
        (1..q).filter(|&v| BigUint::from(v) != *key.sk.value()).map(|v| params.reduce(&v.into())).collect();

    for form in LambdaForm::ALL {
        let shares: Vec<Option<&Scalar>> =
            if form.needs_share_substitute() { share_alts.iter().map(Some).collect() } else { vec![None] };
        let keys: Vec<Option<&Scalar>> =
            if form.wrong_key() { key_alts.iter().map(Some).collect() } else { vec![None] };
        for s_alt in &shares {
            for a_alt in &keys {
                let pk_alt = a_alt.map(|a| params.g_pow(a.value()));
                let lambda = form.lambda(params, &s, &key.pk, *s_alt, pk_alt.as_ref())?;
                rows.push(run(form.number(), s_alt.cloned(), a_alt.cloned(), lambda)?);
            }
        }
    }
    Ok(LambdaMatrix { index, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaRow {
    #[serde(with = "hex_biguint")]
    pub alpha: BigUint,
    pub verdict: Verdict,
    pub expected: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaMatrix {
    pub index: u64,
    pub rows: Vec<AlphaRow>,
}

impl AlphaMatrix {
    pub fn mismatches(&self) -> Vec<&AlphaRow> {
        self.rows.iter().filter(|r| r.verdict != r.expected).collect()
    }
}

/// Honest dealer, participant answering step 4 with every alpha' in [0, q).
/// Expected: `Resolved` for the true share (a vacuous complaint), otherwise
/// `ParticipantLied`.
pub fn enumerate_alpha_matrix(fx: &Fixture, index: u64) -> Result<AlphaMatrix> {
    let q = small_q(fx)?;
    check_index(fx, index)?;
    let params = &fx.params;
    let s = fx.share(index).share;
    let key = fx.key(index);
    let dealer = DealerScript::honest(params, &s, &key.pk);
    let mut rows = Vec::new();
    for a in 0..q {
        let alpha = BigUint::from(a);
        let mut participant = ParticipantScript::honest(params, &key.sk, &fx.board.expected_image(index));
        participant.responder = ParticipantResponder::FakeAlpha(alpha.clone());
        let d = run_dispute(&fx.board, index, &dealer, &participant)?;
        let expected = if &alpha == s.value() { Verdict::Resolved } else { Verdict::ParticipantLied };
        rows.push(AlphaRow { alpha, verdict: d.verdict().expect("dispute closes"), expected });
    }
    Ok(AlphaMatrix { index, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipRow {
    pub share: Scalar,
    pub challenge: Scalar,
    pub verdict: MembershipVerdict,
    pub expected: MembershipVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipMatrix {
    pub index: u64,
    pub rows: Vec<MembershipRow>,
}

impl MembershipMatrix {
    pub fn mismatches(&self) -> Vec<&MembershipRow> {
        self.rows.iter().filter(|r| r.verdict != MembershipVerdict::Unresolvable && r.verdict != r.expected).collect()
    }

    pub fn degenerate_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == MembershipVerdict::Unresolvable).count()
    }
}

/// Every claimed share in [0, q) against every challenge in [1, q).
/// Only the true share should be accepted.
pub fn enumerate_membership_matrix(fx: &Fixture, index: u64) -> Result<MembershipMatrix> {
    let q = small_q(fx)?;
    check_index(fx, index)?;
    let params = &fx.params;
    let s = fx.share(index).share;
    let mut rows = Vec::new();
    for v in 0..q {
        let share = params.reduce(&v.into());
        let expected = if share == s { MembershipVerdict::Accept } else { MembershipVerdict::Reject };
        for a in 1..q {
            let challenge = params.reduce(&a.into());
            let c = MembershipChallenge::from_secret(params, challenge.clone())?;
            let session = run_membership(&fx.board, index, c, &share)?;
            let verdict = session.verdict().expect("session decides");
            rows.push(MembershipRow { share: share.clone(), challenge, verdict, expected });
        }
    }
    Ok(MembershipMatrix { index, rows })
}
