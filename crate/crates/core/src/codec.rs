//! Canonical binary encoding.
//!
//! Everything that is hashed, dumped to disk, or compared across peers goes
//! through this codec, so the byte layout is part of the compatibility
//! contract:
//!
//! - integers are fixed-width big-endian (`u8`, `u32`, `u64`);
//! - byte strings carry a `u64` length prefix followed by the raw bytes;
//! - strings are byte strings of their UTF-8 data;
//! - sequences carry a `u64` element count followed by the elements;
//! - maps are sequences of `(key, value)` pairs in ascending key order;
//! - enums are a single tag byte followed by the variant fields;
//! - booleans are one byte, `0` or `1`.
//!
//! Decoding rejects trailing bytes, unknown tags and non-UTF-8 strings.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("unexpected end of input at byte {0}")]
    UnexpectedEof(usize),
    #[error("unknown tag {tag} for {context}")]
    UnknownTag { tag: u8, context: &'static str },
    #[error("invalid UTF-8 in encoded string")]
    BadUtf8,
    #[error("{0} trailing bytes after value")]
    Trailing(usize),
    #[error("invalid boolean byte {0}")]
    BadBool(u8),
    #[error("length {0} exceeds remaining input")]
    BadLength(u64),
    #[error("malformed value: {0}")]
    Malformed(String),
}

/// Types with a canonical, deterministic binary form.
pub trait Canon: Sized {
    fn encode(&self, out: &mut Vec<u8>);
    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError>;
}

pub fn to_bytes<T: Canon>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    value.encode(&mut out);
    out
}

/// Decodes a value and requires the input to be fully consumed.
pub fn from_bytes<T: Canon>(bytes: &[u8]) -> Result<T, CodecError> {
    let mut r = Reader::new(bytes);
    let v = T::decode(&mut r)?;
    r.finish()?;
    Ok(v)
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(&self) -> Result<(), CodecError> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(CodecError::Trailing(self.remaining()))
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.remaining() < n {
            return Err(CodecError::UnexpectedEof(self.pos));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn boolean(&mut self) -> Result<bool, CodecError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(CodecError::BadBool(b)),
        }
    }

    pub fn bytes(&mut self) -> Result<Vec<u8>, CodecError> {
        let len = self.u64()?;
        if len > self.remaining() as u64 {
            return Err(CodecError::BadLength(len));
        }
        Ok(self.take(len as usize)?.to_vec())
    }

    pub fn string(&mut self) -> Result<String, CodecError> {
        String::from_utf8(self.bytes()?).map_err(|_| CodecError::BadUtf8)
    }

    pub fn array32(&mut self) -> Result<[u8; 32], CodecError> {
        Ok(self.take(32)?.try_into().unwrap())
    }

    /// Length prefix for sequences and maps.
    pub fn seq_len(&mut self) -> Result<usize, CodecError> {
        let len = self.u64()?;
        // Every element occupies at least one byte.
        if len > self.remaining() as u64 {
            return Err(CodecError::BadLength(len));
        }
        Ok(len as usize)
    }
}

pub fn put_u8(out: &mut Vec<u8>, v: u8) {
    out.push(v);
}

pub fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub fn put_bool(out: &mut Vec<u8>, v: bool) {
    out.push(v as u8);
}

pub fn put_bytes(out: &mut Vec<u8>, v: &[u8]) {
    put_u64(out, v.len() as u64);
    out.extend_from_slice(v);
}

pub fn put_str(out: &mut Vec<u8>, v: &str) {
    put_bytes(out, v.as_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_round_trip() {
        let mut out = Vec::new();
        put_u8(&mut out, 7);
        put_u32(&mut out, 0xDEAD_BEEF);
        put_u64(&mut out, 42);
        put_bool(&mut out, true);
        put_str(&mut out, "héllo");
        put_bytes(&mut out, &[1, 2, 3]);

        let mut r = Reader::new(&out);
        assert_eq!(r.u8().unwrap(), 7);
        assert_eq!(r.u32().unwrap(), 0xDEAD_BEEF);
        assert_eq!(r.u64().unwrap(), 42);
        assert!(r.boolean().unwrap());
        assert_eq!(r.string().unwrap(), "héllo");
        assert_eq!(r.bytes().unwrap(), vec![1, 2, 3]);
        r.finish().unwrap();
    }

    #[test]
    fn truncated_input_is_rejected() {
        let mut out = Vec::new();
        put_str(&mut out, "abcdef");
        out.truncate(out.len() - 2);
        let mut r = Reader::new(&out);
        assert!(r.string().is_err());
    }

    #[test]
    fn oversized_length_is_rejected() {
        let mut out = Vec::new();
        put_u64(&mut out, u64::MAX);
        let mut r = Reader::new(&out);
        assert_eq!(r.bytes().unwrap_err(), CodecError::BadLength(u64::MAX));
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let mut r = Reader::new(&[0, 1]);
        r.u8().unwrap();
        assert_eq!(r.finish().unwrap_err(), CodecError::Trailing(1));
    }
}
