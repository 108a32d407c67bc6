// SPDX-License-Identifier: Apache-2.0

//! Dispute arbitration between the dealer D, a complaining participant P and
//! an arbiter R.
//!
//! 1. P's registered public key is restated.
//! 2. D and P independently publish `g^{[(g^{a_i})^{s_i}]^-1}`. On mismatch P
//!    reveals a_i and R recomputes the value to see who lied.
//! 3. D publishes `lambda = s_i XOR (g^{a_i})^{s_i}`.
//! 4. P unmasks lambda; if the result is the share it acknowledges and the
//!    dispute ends, otherwise it sends the unmasked value alpha to R.
//! 5. R checks alpha is not the share and that `g^{1/(lambda XOR alpha)}`
//!    matches the step-2 value. If it does, D lied, else P lied.
//!
//! Values unmasked from lambda are only accepted as shares when they are
//! canonical (below q), matching [`crate::pvss::decrypt_share`].

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::transcript::{Actor, Item, MessageKind, Transcript};
use crate::encoding;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::pvss::{dealer_mask, holder_mask, xor_mask, BulletinBoard, EncryptedShare};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DealerLied,
    ParticipantLied,
    /// No one is accused: P acknowledged the share, or the complaint was vacuous.
    Resolved,
    /// An inverse exponent the arbiter needed does not exist.
    Unresolvable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::DealerLied => "dealer_lied",
            Verdict::ParticipantLied => "participant_lied",
            Verdict::Resolved => "resolved",
            Verdict::Unresolvable => "unresolvable",
        }
    }

    pub fn accuses(self) -> bool {
        matches!(self, Verdict::DealerLied | Verdict::ParticipantLied)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Init,
    MaskedPublished,
    KeyRevealBranch,
    LambdaPublished,
    Responded,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskCheck {
    Proceed,
    KeyRevealRequired,
}

impl MaskCheck {
    fn keyword(self) -> &'static str {
        match self {
            MaskCheck::Proceed => "proceed",
            MaskCheck::KeyRevealRequired => "key_reveal_required",
        }
    }
}

/// P's step-4 message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    Accept,
    Alpha(BigUint),
}

/// Step-2 value computed by the dealer: `masked_inverse_exp(pk_i^{s_i})`.
pub fn dealer_publish_masked(params: &GroupParams, pk: &GroupElement, share: &Scalar) -> Result<GroupElement> {
    let h = dealer_mask(params, pk, share);
    params.masked_inverse_exp(h.value())
}

/// Step-2 value computed by the participant: `masked_inverse_exp((g^{s_i})^{a_i})`.
pub fn participant_publish_masked(
    params: &GroupParams,
    sk: &Scalar,
    share_image: &GroupElement,
) -> Result<GroupElement> {
    let h = holder_mask(params, share_image, sk);
    params.masked_inverse_exp(h.value())
}

pub fn check_masked(dealer: &GroupElement, participant: &GroupElement) -> MaskCheck {
    if dealer == participant {
        MaskCheck::Proceed
    } else {
        MaskCheck::KeyRevealRequired
    }
}

/// Key-reveal branch of step 2. R first checks the revealed key against the
/// registration, then recomputes the step-2 value and blames whichever party
/// published something else (the dealer is checked first).
pub fn key_reveal_adjudicate(
    params: &GroupParams,
    revealed_sk: &Scalar,
    registered_pk: &GroupElement,
    share_image: &GroupElement,
    dealer_masked: &GroupElement,
    participant_masked: &GroupElement,
) -> Result<Verdict> {
    if &params.g_pow(revealed_sk.value()) != registered_pk {
        return Ok(Verdict::ParticipantLied);
    }
    let m = participant_publish_masked(params, revealed_sk, share_image)?;
    Ok(if dealer_masked != &m {
        Verdict::DealerLied
    } else if participant_masked != &m {
        Verdict::ParticipantLied
    } else {
        Verdict::Resolved
    })
}

/// Step 3: `s XOR pk^s`. Equal to the dealt E_i for an honest dealer.
pub fn dealer_lambda(params: &GroupParams, share: &Scalar, pk: &GroupElement) -> Result<EncryptedShare> {
    let mask = dealer_mask(params, pk, share);
    xor_mask(share.value(), mask.value(), params.byte_len)
}

/// True when `alpha` is a canonical share whose image is the published one.
fn is_share(params: &GroupParams, alpha: &BigUint, share_image: &GroupElement) -> bool {
    alpha < &params.q && &params.g_pow(alpha) == share_image
}

/// Step 4 as an honest participant plays it.
pub fn participant_respond(
    params: &GroupParams,
    lambda: &EncryptedShare,
    sk: &Scalar,
    share_image: &GroupElement,
) -> Result<Response> {
    let mask = holder_mask(params, share_image, sk);
    let alpha = lambda.unmask(mask.value())?;
    Ok(if is_share(params, &alpha, share_image) { Response::Accept } else { Response::Alpha(alpha) })
}

/// Step 5.
///
/// A vacuous complaint (alpha is the share) is `Resolved`. Otherwise
/// `t = lambda XOR alpha` is the mask P claims to have used, and D is blamed
/// iff `g^{t^-1}` equals the agreed step-2 value. A `t` congruent to zero
/// mod q cannot be the agreed mask, whose inverse existed at step 2, so that
/// case blames P; so does an alpha wider than lambda.
pub fn adjudicate(
    params: &GroupParams,
    lambda: &EncryptedShare,
    alpha: &BigUint,
    masked: &GroupElement,
    share_image: &GroupElement,
) -> Verdict {
    if is_share(params, alpha, share_image) {
        return Verdict::Resolved;
    }
    let Ok(t) = lambda.unmask(alpha) else {
        return Verdict::ParticipantLied;
    };
    match params.masked_inverse_exp(&t) {
        Ok(m) if &m == masked => Verdict::DealerLied,
        _ => Verdict::ParticipantLied,
    }
}

/// Snapshot of a dispute. Each optional field is set once, in phase order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisputeState {
    phase: Phase,
    index: u64,
    dealer_masked: Option<GroupElement>,
    participant_masked: Option<GroupElement>,
    lambda: Option<EncryptedShare>,
    response: Option<Response>,
    verdict: Option<Verdict>,
}

impl DisputeState {
    pub fn phase(&self) -> Phase {
        self.phase
    }
    pub fn index(&self) -> u64 {
        self.index
    }
    pub fn dealer_masked(&self) -> Option<&GroupElement> {
        self.dealer_masked.as_ref()
    }
    pub fn participant_masked(&self) -> Option<&GroupElement> {
        self.participant_masked.as_ref()
    }
    pub fn lambda(&self) -> Option<&EncryptedShare> {
        self.lambda.as_ref()
    }
    pub fn response(&self) -> Option<&Response> {
        self.response.as_ref()
    }
    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }
}

/// One dispute over participant `index`, driven step by step. Out-of-order
/// calls fail with [`Error::OutOfPhase`] and leave the state untouched.
#[derive(Debug, Clone)]
pub struct Dispute<'b> {
    board: &'b BulletinBoard,
    image: GroupElement,
    state: DisputeState,
    transcript: Transcript<Verdict>,
}

impl<'b> Dispute<'b> {
    /// Step 1: P's public key is restated from the board.
    pub fn open(board: &'b BulletinBoard, index: u64) -> Result<Dispute<'b>> {
        let pk = board.pubkey(index).ok_or(Error::IndexOutOfRange(index))?;
        let mut transcript = Transcript::default();
        transcript.push(1, Actor::Participant, MessageKind::PublicKey, pk.to_hex());
        Ok(Dispute {
            board,
            image: board.expected_image(index),
            state: DisputeState {
                phase: Phase::Init,
                index,
                dealer_masked: None,
                participant_masked: None,
                lambda: None,
                response: None,
                verdict: None,
            },
            transcript,
        })
    }

    pub fn state(&self) -> &DisputeState {
        &self.state
    }

    pub fn phase(&self) -> Phase {
        self.state.phase
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.state.verdict
    }

    pub fn transcript(&self) -> &Transcript<Verdict> {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript<Verdict> {
        self.transcript
    }

    /// The share image R and P use, recomputed from the commitments.
    pub fn share_image(&self) -> &GroupElement {
        &self.image
    }

    fn expect(&self, step: &'static str, ok: bool) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfPhase { step, phase: format!("{:?}", self.state.phase) })
        }
    }

    fn close(&mut self, verdict: Verdict) -> Verdict {
        self.state.verdict = Some(verdict);
        self.state.phase = Phase::Closed;
        self.transcript.close(verdict);
        verdict
    }

    fn step_of(&self) -> u8 {
        match self.state.phase {
            Phase::Init | Phase::MaskedPublished | Phase::KeyRevealBranch => 2,
            Phase::LambdaPublished => 4,
            Phase::Responded | Phase::Closed => 5,
        }
    }

    /// Step 2: both values arrive, R compares them.
    pub fn publish_masked(&mut self, dealer: GroupElement, participant: GroupElement) -> Result<MaskCheck> {
        self.expect("publish_masked", self.state.phase == Phase::Init)?;
        let check = check_masked(&dealer, &participant);
        self.transcript.push(2, Actor::Dealer, MessageKind::Masked, dealer.to_hex());
        self.transcript.push(2, Actor::Participant, MessageKind::Masked, participant.to_hex());
        self.transcript.push(2, Actor::Arbiter, MessageKind::MaskCheck, check.keyword());
        self.state.dealer_masked = Some(dealer);
        self.state.participant_masked = Some(participant);
        self.state.phase = Phase::MaskedPublished;
        Ok(check)
    }

    /// A party could not compute its message because an inverse exponent does
    /// not exist. Closes the dispute as [`Verdict::Unresolvable`].
    pub fn abort_degenerate(&mut self, actor: Actor) -> Result<Verdict> {
        self.expect("abort_degenerate", self.state.phase != Phase::Closed)?;
        let step = self.step_of();
        self.transcript.push(step, actor, MessageKind::Degenerate, "degenerate");
        Ok(self.close(Verdict::Unresolvable))
    }

    fn masks_agree(&self) -> bool {
        self.state.dealer_masked.is_some() && self.state.dealer_masked == self.state.participant_masked
    }

    /// Key-reveal branch: P hands a_i to R, who rules immediately.
    pub fn reveal_key(&mut self, sk: &Scalar) -> Result<Verdict> {
        self.expect("reveal_key", self.state.phase == Phase::MaskedPublished && !self.masks_agree())?;
        self.state.phase = Phase::KeyRevealBranch;
        self.transcript.push(2, Actor::Participant, MessageKind::PrivateKey, sk.to_hex());
        let (Some(d), Some(p)) = (&self.state.dealer_masked, &self.state.participant_masked) else {
            unreachable!("masked values are set before MaskedPublished");
        };
        let registered = &self.board.pubkeys[&self.state.index];
        let verdict = key_reveal_adjudicate(&self.board.params, sk, registered, &self.image, d, p)
            .unwrap_or(Verdict::Unresolvable);
        Ok(self.close(verdict))
    }

    /// Step 3.
    pub fn publish_lambda(&mut self, lambda: EncryptedShare) -> Result<()> {
        self.expect("publish_lambda", self.state.phase == Phase::MaskedPublished && self.masks_agree())?;
        self.transcript.push(3, Actor::Dealer, MessageKind::Lambda, lambda.to_hex());
        self.state.lambda = Some(lambda);
        self.state.phase = Phase::LambdaPublished;
        Ok(())
    }

    /// Step 4. An acknowledgment closes the dispute as `Resolved`.
    pub fn respond(&mut self, response: Response) -> Result<Option<Verdict>> {
        self.expect("respond", self.state.phase == Phase::LambdaPublished)?;
        match &response {
            Response::Accept => self.transcript.push(4, Actor::Participant, MessageKind::Accept, "accept"),
            Response::Alpha(a) => {
                self.transcript.push(4, Actor::Participant, MessageKind::Alpha, encoding::biguint_to_hex(a))
            }
        }
        let accepted = response == Response::Accept;
        self.state.response = Some(response);
        self.state.phase = Phase::Responded;
        Ok(accepted.then(|| self.close(Verdict::Resolved)))
    }

    /// Step 5.
    pub fn adjudicate(&mut self) -> Result<Verdict> {
        let alpha = match (&self.state.phase, &self.state.response) {
            (Phase::Responded, Some(Response::Alpha(a))) => a.clone(),
            _ => return Err(Error::OutOfPhase { step: "adjudicate", phase: format!("{:?}", self.state.phase) }),
        };
        let (Some(lambda), Some(masked)) = (&self.state.lambda, &self.state.dealer_masked) else {
            unreachable!("lambda and masked value precede Responded");
        };
        let verdict = adjudicate(&self.board.params, lambda, &alpha, masked, &self.image);
        Ok(self.close(verdict))
    }
}

/// What the dealer sends, fixed in advance. Errors stand for a value the
/// dealer cannot compute.
#[derive(Debug, Clone)]
pub struct DealerScript {
    pub masked: Result<GroupElement>,
    pub lambda: Result<EncryptedShare>,
}

impl DealerScript {
    pub fn honest(params: &GroupParams, share: &Scalar, pk: &GroupElement) -> DealerScript {
        DealerScript { masked: dealer_publish_masked(params, pk, share), lambda: dealer_lambda(params, share, pk) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParticipantResponder {
    /// Unmask lambda and answer truthfully.
    Honest,
    /// Always send this alpha, whatever lambda unmasks to.
    FakeAlpha(BigUint),
}

#[derive(Debug, Clone)]
pub struct ParticipantScript {
    pub sk: Scalar,
    pub masked: Result<GroupElement>,
    pub responder: ParticipantResponder,
}

impl ParticipantScript {
    pub fn honest(params: &GroupParams, sk: &Scalar, share_image: &GroupElement) -> ParticipantScript {
        ParticipantScript {
            sk: sk.clone(),
            masked: participant_publish_masked(params, sk, share_image),
            responder: ParticipantResponder::Honest,
        }
    }
}

/// Runs a complete dispute over `index` with the given scripts.
pub fn run_dispute<'b>(
    board: &'b BulletinBoard,
    index: u64,
    dealer: &DealerScript,
    participant: &ParticipantScript,
) -> Result<Dispute<'b>> {
    let mut d = Dispute::open(board, index)?;
    let (dm, pm) = match (&dealer.masked, &participant.masked) {
        (Ok(dm), Ok(pm)) => (dm.clone(), pm.clone()),
        (Err(Error::DegenerateExponent), _) => {
            d.abort_degenerate(Actor::Dealer)?;
            return Ok(d);
        }
        (_, Err(Error::DegenerateExponent)) => {
            d.abort_degenerate(Actor::Participant)?;
            return Ok(d);
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.clone()),
    };
    if d.publish_masked(dm, pm)? == MaskCheck::KeyRevealRequired {
        d.reveal_key(&participant.sk)?;
        return Ok(d);
    }
    d.publish_lambda(dealer.lambda.clone()?)?;
    let response = match &participant.responder {
        ParticipantResponder::Honest => {
            let lambda = d.state.lambda.as_ref().expect("lambda just published");
            participant_respond(&board.params, lambda, &participant.sk, &d.image)?
        }
        ParticipantResponder::FakeAlpha(a) => Response::Alpha(a.clone()),
    };
    if d.respond(response)?.is_none() {
        d.adjudicate()?;
    }
    Ok(d)
}

/// Result of re-running a recorded transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub index: u64,
    pub derived: Verdict,
    pub recorded: Option<Verdict>,
    /// The re-derived transcript is identical to the input, entry for entry.
    pub identical: bool,
}

impl Replay {
    pub fn matches(&self) -> bool {
        self.identical && self.recorded == Some(self.derived)
    }
}

/// Feeds the party messages of a recorded transcript back through a fresh
/// [`Dispute`] and re-derives the arbiter's messages and verdict.
pub fn replay_dispute(board: &BulletinBoard, transcript: &Transcript<Verdict>) -> Result<Replay> {
    let bad = |m: &str| Error::Transcript(m.to_string());
    let params = &board.params;
    let mut entries = transcript.entries();

    let first = entries.next().ok_or_else(|| bad("empty transcript"))?;
    if first.kind != MessageKind::PublicKey {
        return Err(bad("transcript must open with the participant's public key"));
    }
    let pk = encoding::biguint_from_hex(&first.message)?;
    let index = board
        .pubkeys
        .iter()
        .find(|(_, v)| v.value() == &pk)
        .map(|(i, _)| *i)
        .ok_or_else(|| bad("public key is not registered on the board"))?;

    let element = |hex: &str| -> Result<GroupElement> { params.element(encoding::biguint_from_hex(hex)?) };
    let mut d = Dispute::open(board, index)?;
    let mut dealer_masked = None;
    for e in entries {
        match (e.actor, e.kind) {
            (_, MessageKind::Degenerate) => {
                d.abort_degenerate(e.actor)?;
            }
            (Actor::Dealer, MessageKind::Masked) => dealer_masked = Some(element(&e.message)?),
            (Actor::Participant, MessageKind::Masked) => {
                let dm = dealer_masked.take().ok_or_else(|| bad("participant masked value before dealer's"))?;
                d.publish_masked(dm, element(&e.message)?)?;
            }
            (Actor::Participant, MessageKind::PrivateKey) => {
                let sk = params.scalar(encoding::biguint_from_hex(&e.message)?)?;
                d.reveal_key(&sk)?;
            }
            (Actor::Dealer, MessageKind::Lambda) => {
                let bytes = hex::decode(&e.message).map_err(|_| bad("lambda is not hex"))?;
                d.publish_lambda(EncryptedShare::from_bytes(bytes))?;
            }
            (Actor::Participant, MessageKind::Accept) => {
                d.respond(Response::Accept)?;
            }
            (Actor::Participant, MessageKind::Alpha) => {
                d.respond(Response::Alpha(encoding::biguint_from_hex(&e.message)?))?;
            }
            // Arbiter messages are re-derived, then compared below.
            (Actor::Arbiter, _) => {}
            _ => return Err(bad(&format!("unexpected {:?} message from {:?}", e.kind, e.actor))),
        }
    }
    if d.phase() == Phase::Responded {
        d.adjudicate()?;
    }
    let derived = d.verdict().ok_or_else(|| bad("transcript ends before a verdict can be derived"))?;
    let identical = d.transcript().items() == transcript.items();
    let recorded = match transcript.items().last() {
        Some(Item::Verdict { verdict }) => Some(*verdict),
        _ => None,
    };
    Ok(Replay { index, derived, recorded, identical })
}
