//! Payload values carried by transactions, events and scenario arguments.

use crate::codec::{self, Canon, CodecError, Reader};
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// A kind-specific map of named values, as stored in `Transaction.payload`
/// and event payloads. `BTreeMap` keeps iteration (and therefore hashing)
/// order deterministic.
pub type Payload = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    U64(u64),
    Str(String),
    /// Raw bytes; serialized to JSON as `{"hex": "…"}`.
    Bytes(Vec<u8>),
    List(Vec<Value>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Value::U64(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bytes(&self) -> Option<&[u8]> {
        match self {
            Value::Bytes(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(l) => Some(l),
            _ => None,
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::U64(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl Canon for Value {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            Value::Bool(b) => {
                codec::put_u8(out, 0);
                codec::put_bool(out, *b);
            }
            Value::U64(n) => {
                codec::put_u8(out, 1);
                codec::put_u64(out, *n);
            }
            Value::Str(s) => {
                codec::put_u8(out, 2);
                codec::put_str(out, s);
            }
            Value::Bytes(b) => {
                codec::put_u8(out, 3);
                codec::put_bytes(out, b);
            }
            Value::List(items) => {
                codec::put_u8(out, 4);
                codec::put_u64(out, items.len() as u64);
                for item in items {
                    item.encode(out);
                }
            }
        }
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        match r.u8()? {
            0 => Ok(Value::Bool(r.boolean()?)),
            1 => Ok(Value::U64(r.u64()?)),
            2 => Ok(Value::Str(r.string()?)),
            3 => Ok(Value::Bytes(r.bytes()?)),
            4 => {
                let len = r.seq_len()?;
                let mut items = Vec::with_capacity(len);
                for _ in 0..len {
                    items.push(Value::decode(r)?);
                }
                Ok(Value::List(items))
            }
            tag => Err(CodecError::UnknownTag { tag, context: "Value" }),
        }
    }
}

pub fn encode_payload(payload: &Payload, out: &mut Vec<u8>) {
    codec::put_u64(out, payload.len() as u64);
    for (k, v) in payload {
        codec::put_str(out, k);
        v.encode(out);
    }
}

pub fn decode_payload(r: &mut Reader<'_>) -> Result<Payload, CodecError> {
    let len = r.seq_len()?;
    let mut map = Payload::new();
    for _ in 0..len {
        let k = r.string()?;
        let v = Value::decode(r)?;
        map.insert(k, v);
    }
    Ok(map)
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Bool(b) => s.serialize_bool(*b),
            Value::U64(n) => s.serialize_u64(*n),
            Value::Str(v) => s.serialize_str(v),
            Value::Bytes(b) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("hex", &hex::encode(b))?;
                m.end()
            }
            Value::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ValueVisitor;

        impl<'de> Visitor<'de> for ValueVisitor {
            type Value = Value;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("bool, u64, string, list, or {\"hex\": …}")
            }

            fn visit_bool<E: de::Error>(self, v: bool) -> Result<Value, E> {
                Ok(Value::Bool(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                Ok(Value::U64(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
                u64::try_from(v)
                    .map(Value::U64)
                    .map_err(|_| E::custom("negative numbers are not supported"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                Ok(Value::Str(v.to_string()))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
                let mut items = Vec::new();
                while let Some(item) = seq.next_element()? {
                    items.push(item);
                }
                Ok(Value::List(items))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Value, A::Error> {
                let key: Option<String> = map.next_key()?;
                match key.as_deref() {
                    Some("hex") => {
                        let raw: String = map.next_value()?;
                        let bytes = hex::decode(&raw).map_err(de::Error::custom)?;
                        Ok(Value::Bytes(bytes))
                    }
                    _ => Err(de::Error::custom("expected {\"hex\": …} object")),
                }
            }
        }

        d.deserialize_any(ValueVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{from_bytes, to_bytes};

    fn sample() -> Value {
        Value::List(vec![
            Value::Bool(true),
            Value::U64(1024),
            Value::Str("a.dat".into()),
            Value::Bytes(vec![0, 255, 7]),
        ])
    }

    #[test]
    fn canon_round_trip() {
        let v = sample();
        assert_eq!(from_bytes::<Value>(&to_bytes(&v)).unwrap(), v);
    }

    #[test]
    fn json_round_trip() {
        let v = sample();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&json).unwrap(), v);
        assert!(json.contains("\"hex\":\"00ff07\""));
    }

    #[test]
    fn payload_encoding_is_key_ordered() {
        let mut a = Payload::new();
        a.insert("z".into(), Value::U64(1));
        a.insert("a".into(), Value::U64(2));
        let mut b = Payload::new();
        b.insert("a".into(), Value::U64(2));
        b.insert("z".into(), Value::U64(1));
        let mut ea = Vec::new();
        let mut eb = Vec::new();
        encode_payload(&a, &mut ea);
        encode_payload(&b, &mut eb);
        assert_eq!(ea, eb);
    }
}
