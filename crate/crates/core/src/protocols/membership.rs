// SPDX-License-Identifier: Apache-2.0

//! Interactive proof that the prover holds the share behind a published
//! share image.
//!
//! 1. V picks a in [1, q-1] and sends g^a.
//! 2. P answers `R_P = g^{[(g^a)^{s_i}]^-1}`.
//! 3. V computes `R_V = g^{[(g^{s_i})^a]^-1}` from the board.
//! 4. V accepts iff `R_V == R_P`.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::transcript::{Actor, MessageKind, Transcript};
use crate::encoding;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::pvss::BulletinBoard;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipChallenge {
    a: Scalar,
    g_a: GroupElement,
}

impl MembershipChallenge {
    pub fn generate<R: RngCore>(params: &GroupParams, rng: &mut R) -> MembershipChallenge {
        let a = params.random_nonzero_scalar(rng);
        let g_a = params.g_pow(a.value());
        MembershipChallenge { a, g_a }
    }

    /// Rejects a = 0, which makes every response equal to g.
    pub fn from_secret(params: &GroupParams, a: Scalar) -> Result<MembershipChallenge> {
        if a.is_zero() {
            return Err(Error::ScalarOutOfRange);
        }
        let g_a = params.g_pow(a.value());
        Ok(MembershipChallenge { a, g_a })
    }

    pub fn secret(&self) -> &Scalar {
        &self.a
    }

    pub fn g_a(&self) -> &GroupElement {
        &self.g_a
    }
}

/// Prover side: `masked_inverse_exp(g_a^s)`.
pub fn membership_respond(params: &GroupParams, share: &Scalar, g_a: &GroupElement) -> Result<GroupElement> {
    let h = params.mod_exp(g_a, share.value());
    params.masked_inverse_exp(h.value())
}

/// Verifier side: recompute from the share image and compare.
pub fn membership_verify(
    params: &GroupParams,
    a: &Scalar,
    share_image: &GroupElement,
    response: &GroupElement,
) -> Result<bool> {
    Ok(&recompute(params, a, share_image)? == response)
}

fn recompute(params: &GroupParams, a: &Scalar, share_image: &GroupElement) -> Result<GroupElement> {
    let h = params.mod_exp(share_image, a.value());
    params.masked_inverse_exp(h.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipVerdict {
    Accept,
    Reject,
    /// The verifier's recomputation hit a non-invertible exponent.
    Unresolvable,
}

impl MembershipVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MembershipVerdict::Accept => "accept",
            MembershipVerdict::Reject => "reject",
            MembershipVerdict::Unresolvable => "unresolvable",
        }
    }
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipPhase {
    Challenged,
    Responded,
    Decided,
}

/// Verifier-driven session against the prover claiming index `index`.
#[derive(Debug, Clone)]
pub struct MembershipSession<'b> {
    board: &'b BulletinBoard,
    index: u64,
    image: GroupElement,
    challenge: MembershipChallenge,
    phase: MembershipPhase,
    response: Option<GroupElement>,
    verdict: Option<MembershipVerdict>,
    transcript: Transcript<MembershipVerdict>,
}

impl<'b> MembershipSession<'b> {
    pub fn open(board: &'b BulletinBoard, index: u64, challenge: MembershipChallenge) -> Result<MembershipSession<'b>> {
        if board.pubkey(index).is_none() {
            return Err(Error::IndexOutOfRange(index));
        }
        let mut transcript = Transcript::default();
        transcript.push(1, Actor::Verifier, MessageKind::Challenge, challenge.g_a.to_hex());
        Ok(MembershipSession {
            board,
            index,
            image: board.expected_image(index),
            challenge,
            phase: MembershipPhase::Challenged,
            response: None,
            verdict: None,
            transcript,
        })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn challenge(&self) -> &MembershipChallenge {
        &self.challenge
    }

    pub fn phase(&self) -> MembershipPhase {
        self.phase
    }

    pub fn verdict(&self) -> Option<MembershipVerdict> {
        self.verdict
    }

    pub fn transcript(&self) -> &Transcript<MembershipVerdict> {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript<MembershipVerdict> {
        self.transcript
    }

    fn out_of_phase(&self, step: &'static str) -> Error {
        Error::OutOfPhase { step, phase: format!("{:?}", self.phase) }
    }

    pub fn receive(&mut self, response: GroupElement) -> Result<()> {
        if self.phase != MembershipPhase::Challenged {
            return Err(self.out_of_phase("receive"));
        }
        self.transcript.push(2, Actor::Participant, MessageKind::Response, response.to_hex());
        self.response = Some(response);
        self.phase = MembershipPhase::Responded;
        Ok(())
    }

    /// The prover could not form a response. Closes the session unresolved.
    pub fn abort_degenerate(&mut self) -> Result<MembershipVerdict> {
        if self.phase != MembershipPhase::Challenged {
            return Err(self.out_of_phase("abort_degenerate"));
        }
        self.transcript.push(2, Actor::Participant, MessageKind::Degenerate, "degenerate");
        Ok(self.finish(MembershipVerdict::Unresolvable))
    }

    fn finish(&mut self, verdict: MembershipVerdict) -> MembershipVerdict {
        self.verdict = Some(verdict);
        self.phase = MembershipPhase::Decided;
        self.transcript.close(verdict);
        verdict
    }

    pub fn decide(&mut self) -> Result<MembershipVerdict> {
        let Some(response) = (self.phase == MembershipPhase::Responded).then_some(()).and(self.response.as_ref())
        else {
            return Err(self.out_of_phase("decide"));
        };
        let verdict = match recompute(&self.board.params, &self.challenge.a, &self.image) {
            Ok(r_v) => {
                let accept = &r_v == response;
                self.transcript.push(3, Actor::Verifier, MessageKind::Recomputed, r_v.to_hex());
                if accept {
                    MembershipVerdict::Accept
                } else {
                    MembershipVerdict::Reject
                }
            }
            Err(_) => {
                self.transcript.push(3, Actor::Verifier, MessageKind::Degenerate, "degenerate");
                MembershipVerdict::Unresolvable
            }
        };
        Ok(self.finish(verdict))
    }
}

/// Runs the proof with a prover that answers using `share`.
pub fn run_membership<'b>(
    board: &'b BulletinBoard,
    index: u64,
    challenge: MembershipChallenge,
    share: &Scalar,
) -> Result<MembershipSession<'b>> {
    let mut session = MembershipSession::open(board, index, challenge)?;
    match membership_respond(&board.params, share, session.challenge.g_a()) {
        Ok(r) => {
            session.receive(r)?;
            session.decide()?;
        }
        Err(Error::DegenerateExponent) => {
            session.abort_degenerate()?;
        }
        Err(e) => return Err(e),
    }
    Ok(session)
}

/// Re-derives a recorded session given the verifier's challenge secret.
/// Returns the derived verdict and whether the transcript matches exactly.
pub fn replay_membership(
    board: &BulletinBoard,
    index: u64,
    a: &Scalar,
    transcript: &Transcript<MembershipVerdict>,
) -> Result<(MembershipVerdict, bool)> {
    let bad = |m: &str| Error::Transcript(m.to_string());
    let challenge = MembershipChallenge::from_secret(&board.params, a.clone())?;
    let mut session = MembershipSession::open(board, index, challenge)?;
    for e in transcript.entries() {
        match (e.actor, e.kind) {
            (Actor::Verifier, _) => {}
            (Actor::Participant, MessageKind::Response) => {
                let r = board.params.element(encoding::biguint_from_hex(&e.message)?)?;
                session.receive(r)?;
                session.decide()?;
            }
            (Actor::Participant, MessageKind::Degenerate) => {
                session.abort_degenerate()?;
            }
            _ => return Err(bad(&format!("unexpected {:?} message from {:?}", e.kind, e.actor))),
        }
    }
    let verdict = session.verdict().ok_or_else(|| bad("transcript has no prover response"))?;
    Ok((verdict, session.transcript() == transcript))
}
