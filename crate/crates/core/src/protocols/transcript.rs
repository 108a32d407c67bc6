// SPDX-License-Identifier: Apache-2.0

//! Ordered, replayable protocol transcripts.
//!
//! Serialized as a JSON list of `{"step", "actor", "kind", "message"}` objects
//! closed by a single `{"verdict": ...}` object.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Actor {
    #[serde(rename = "D")]
    Dealer,
    #[serde(rename = "P")]
    Participant,
    #[serde(rename = "R")]
    Arbiter,
    #[serde(rename = "V")]
    Verifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    PublicKey,
    Masked,
    MaskCheck,
    PrivateKey,
    Lambda,
    Accept,
    Alpha,
    Degenerate,
    Challenge,
    Response,
    Recomputed,
}

impl MessageKind {
    /// Kinds whose payload is share-typed plaintext (an element of Z_q that a
    /// party claims is, or is derived from, a share) rather than a group element
    /// or a masked byte string.
    pub fn carries_share_plaintext(self) -> bool {
        matches!(self, MessageKind::Alpha)
    }

    /// Kinds permitted to expose private material: the key-reveal branch.
    pub fn is_key_reveal(self) -> bool {
        matches!(self, MessageKind::PrivateKey)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub step: u8,
    pub actor: Actor,
    pub kind: MessageKind,
    /// Lowercase hex for values, a keyword for control messages.
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Item<V> {
    Message(Entry),
    Verdict { verdict: V },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcript<V> {
    items: Vec<Item<V>>,
}

impl<V> Default for Transcript<V> {
    fn default() -> Self {
        Transcript { items: Vec::new() }
    }
}

impl<V: Clone> Transcript<V> {
    pub fn push(&mut self, step: u8, actor: Actor, kind: MessageKind, message: impl Into<String>) {
        self.items.push(Item::Message(Entry { step, actor, kind, message: message.into() }));
    }

    pub fn close(&mut self, verdict: V) {
        self.items.push(Item::Verdict { verdict });
    }

    pub fn items(&self) -> &[Item<V>] {
        &self.items
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.items.iter().filter_map(|it| match it {
            Item::Message(e) => Some(e),
            Item::Verdict { .. } => None,
        })
    }

    /// The terminal verdict, if the transcript is closed.
    pub fn verdict(&self) -> Option<V> {
        match self.items.last() {
            Some(Item::Verdict { verdict }) => Some(verdict.clone()),
            _ => None,
        }
    }
}
