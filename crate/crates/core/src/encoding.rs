// SPDX-License-Identifier: Apache-2.0

//! Byte and hex encodings shared by every wire format.

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Big-endian, zero-padded to exactly `width` bytes.
pub fn to_fixed_bytes(value: &BigUint, width: usize) -> Result<Vec<u8>> {
    let raw = value.to_bytes_be();
    let raw: &[u8] = if raw == [0] { &[] } else { &raw };
    if raw.len() > width {
        return Err(Error::InvalidLength { expected: width, found: raw.len() });
    }
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(raw);
    Ok(out)
}

pub fn from_bytes(bytes: &[u8]) -> BigUint {
    BigUint::from_bytes_be(bytes)
}

/// Lowercase hex of the minimal big-endian encoding (`0` encodes as `"00"`).
pub fn biguint_to_hex(value: &BigUint) -> String {
    hex::encode(value.to_bytes_be())
}

pub fn biguint_from_hex(s: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidParameter(format!("not a hex integer: {s:?}")));
    }
    BigUint::parse_bytes(s.as_bytes(), 16).ok_or_else(|| Error::InvalidParameter(format!("not a hex integer: {s:?}")))
}

pub(crate) mod hex_biguint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&biguint_to_hex(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        biguint_from_hex(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod hex_bytes {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(&s).map_err(serde::de::Error::custom)
    }
}

/// Serializes to pretty JSON with object keys sorted, for diff-stable files.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json::Value keeps objects in a BTreeMap unless `preserve_order` is on.
    let v = serde_json::to_value(value)?;
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_pads_and_rejects_overflow() {
        assert_eq!(to_fixed_bytes(&BigUint::from(10u8), 1).unwrap(), vec![0x0a]);
        assert_eq!(to_fixed_bytes(&BigUint::from(0u8), 2).unwrap(), vec![0, 0]);
        assert_eq!(to_fixed_bytes(&BigUint::from(0x1234u16), 3).unwrap(), vec![0, 0x12, 0x34]);
        assert!(matches!(
            to_fixed_bytes(&BigUint::from(0x1234u16), 1),
            Err(Error::InvalidLength { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn hex_round_trip() {
        assert_eq!(biguint_to_hex(&BigUint::from(23u8)), "17");
        assert_eq!(biguint_to_hex(&BigUint::from(11u8)), "0b");
        assert_eq!(biguint_to_hex(&BigUint::from(0u8)), "00");
        assert_eq!(biguint_from_hex("0b").unwrap(), BigUint::from(11u8));
        assert!(biguint_from_hex("0x0b").is_err());
        assert!(biguint_from_hex("").is_err());
    }
}
