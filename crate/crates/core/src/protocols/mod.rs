// SPDX-License-Identifier: Apache-2.0

//! Interactive protocols run after dealing: the five-step dispute between
//! dealer, participant and arbiter, and the challenge-response membership proof.

pub mod dispute;
pub mod membership;
pub mod transcript;

pub use dispute::{
    adjudicate, check_masked, dealer_lambda, dealer_publish_masked, key_reveal_adjudicate, participant_publish_masked,
    participant_respond, replay_dispute, run_dispute, DealerScript, Dispute, DisputeState, MaskCheck,
    ParticipantResponder, ParticipantScript, Phase, Replay, Response, Verdict,
};
pub use membership::{
    membership_respond, membership_verify, replay_membership, run_membership, MembershipChallenge, MembershipPhase,
    MembershipSession, MembershipVerdict,
};
pub use transcript::{Actor, Entry, Item, MessageKind, Transcript};
