// SPDX-License-Identifier: Apache-2.0

//! Parsing of `--dealer-cheat` and `--participant-cheat` arguments.
//!
//! Dealer:
//! - `lambdaN:V[,V]` uses lambda form N; the values are s' (if the form uses
//!   it) then a' behind pk' = g^{a'} (if the form uses it).
//! - `share:S` deals and defends the wrong share S throughout.
//! - `masked:M` publishes M as the step-2 value.
//!
//! Participant:
//! - `alpha:A`, or a bare `A`, sends A at step 4.
//! - `masked:M` publishes M as the step-2 value.
//!
//! All values are decimal.

use std::str::FromStr;

use num_bigint::BigUint;
use xorpvss::sim::LambdaForm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DealerCheat {
    Lambda { form: LambdaForm, share: Option<BigUint>, key: Option<BigUint> },
    Share(BigUint),
    Masked(BigUint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParticipantCheat {
    Alpha(BigUint),
    Masked(BigUint),
}

fn decimal(s: &str) -> Result<BigUint, String> {
    BigUint::from_str(s.trim()).map_err(|_| format!("not a decimal integer: {s:?}"))
}

impl FromStr for DealerCheat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, rest) = s.split_once(':').ok_or_else(|| format!("expected KIND:VALUE, got {s:?}"))?;
        match head {
            "share" => Ok(DealerCheat::Share(decimal(rest)?)),
            "masked" => Ok(DealerCheat::Masked(decimal(rest)?)),
            _ => {
                let n = head
                    .strip_prefix("lambda")
                    .and_then(|n| n.parse::<u8>().ok())
                    .ok_or_else(|| format!("unknown dealer cheat {head:?}"))?;
                let form = LambdaForm::new(n).map_err(|e| e.to_string())?;
                let mut values = rest.split(',').map(decimal).collect::<Result<Vec<_>, _>>()?.into_iter();
                let share = form.needs_share_substitute().then(|| values.next()).flatten();
                let key = form.wrong_key().then(|| values.next()).flatten();
                let wanted = form.needs_share_substitute() as usize + form.wrong_key() as usize;
                if share.is_none() && form.needs_share_substitute()
                    || key.is_none() && form.wrong_key()
                    || values.next().is_some()
                {
                    return Err(format!("{head} takes {wanted} value(s)"));
                }
                Ok(DealerCheat::Lambda { form, share, key })
            }
        }
    }
}

impl FromStr for ParticipantCheat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None => Ok(ParticipantCheat::Alpha(decimal(s)?)),
            Some(("alpha", v)) => Ok(ParticipantCheat::Alpha(decimal(v)?)),
            Some(("masked", v)) => Ok(ParticipantCheat::Masked(decimal(v)?)),
            Some((k, _)) => Err(format!("unknown participant cheat {k:?}")),
        }
    }
}
