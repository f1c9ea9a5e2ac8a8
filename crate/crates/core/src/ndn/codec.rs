//! Canonical binary form of packets.
//!
//! Layout: one type byte (1 = Interest, 2 = Data, 3 = Nack) followed by the
//! fields in declaration order. Integers are little-endian and fixed width.
//! A name is a `u16` component count followed by `u8`-length-prefixed
//! components; a payload is `u32`-length-prefixed.
//!
//! ```text
//! Interest: 0x01 name nonce:u32 lifetime_ms:u32 can_be_prefix:u8 hop_count:u32
//! Data:     0x02 name payload freshness_ms:u32
//! Nack:     0x03 reason:u8 name nonce:u32
//! ```

use thiserror::Error;

use super::packet::{Data, Interest, Nack, NackReason, Packet, MAX_PAYLOAD_LEN};
use super::Name;

const TYPE_INTEREST: u8 = 1;
const TYPE_DATA: u8 = 2;
const TYPE_NACK: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("packet truncated at byte {0}")]
    Truncated(usize),
    #[error("unknown packet type {0:#04x}")]
    UnknownType(u8),
    #[error("malformed packet: {0}")]
    Malformed(&'static str),
}

pub fn encode_packet(packet: &Packet) -> Vec<u8> {
    let mut out = Vec::with_capacity(64);
    match packet {
        Packet::Interest(i) => {
            out.push(TYPE_INTEREST);
            put_name(&mut out, &i.name);
            out.extend_from_slice(&i.nonce.to_le_bytes());
            out.extend_from_slice(&i.lifetime_ms.to_le_bytes());
            out.push(u8::from(i.can_be_prefix));
            out.extend_from_slice(&i.hop_count.to_le_bytes());
        }
        Packet::Data(d) => {
            out.push(TYPE_DATA);
            put_name(&mut out, &d.name);
            out.extend_from_slice(&(d.payload.len() as u32).to_le_bytes());
            out.extend_from_slice(&d.payload);
            out.extend_from_slice(&d.freshness_ms.to_le_bytes());
        }
        Packet::Nack(n) => {
            out.push(TYPE_NACK);
            out.push(n.reason.code());
            put_name(&mut out, &n.name);
            out.extend_from_slice(&n.nonce.to_le_bytes());
        }
    }
    out
}

pub fn decode_packet(bytes: &[u8]) -> Result<Packet, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let packet = match r.u8()? {
        TYPE_INTEREST => {
            let name = r.name()?;
            let nonce = r.u32()?;
            let lifetime_ms = r.u32()?;
            if lifetime_ms == 0 {
                return Err(DecodeError::Malformed("zero interest lifetime"));
            }
            let can_be_prefix = match r.u8()? {
                0 => false,
                1 => true,
                _ => return Err(DecodeError::Malformed("can_be_prefix is not 0 or 1")),
            };
            let hop_count = r.u32()?;
            Packet::Interest(Interest {
                name,
                nonce,
                lifetime_ms,
                can_be_prefix,
                hop_count,
            })
        }
        TYPE_DATA => {
            let name = r.name()?;
            let len = r.u32()? as usize;
            if len > MAX_PAYLOAD_LEN {
                return Err(DecodeError::Malformed("payload exceeds mtu"));
            }
            let payload = r.take(len)?.to_vec();
            let freshness_ms = r.u32()?;
            Packet::Data(Data {
                name,
                payload,
                freshness_ms,
            })
        }
        TYPE_NACK => {
            let reason = NackReason::from_code(r.u8()?)
                .ok_or(DecodeError::Malformed("unknown nack reason"))?;
            let name = r.name()?;
            let nonce = r.u32()?;
            Packet::Nack(Nack {
                reason,
                name,
                nonce,
            })
        }
        other => return Err(DecodeError::UnknownType(other)),
    };
    if r.pos != bytes.len() {
        return Err(DecodeError::Malformed("trailing bytes"));
    }
    Ok(packet)
}

fn put_name(out: &mut Vec<u8>, name: &Name) {
    out.extend_from_slice(&(name.len() as u16).to_le_bytes());
    for c in name.components() {
        out.push(c.len() as u8);
        out.extend_from_slice(c);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(DecodeError::Truncated(self.buf.len())),
        }
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn name(&mut self) -> Result<Name, DecodeError> {
        let count = self.u16()? as usize;
        let mut components = Vec::with_capacity(count);
        for _ in 0..count {
            let len = self.u8()? as usize;
            components.push(self.take(len)?.to_vec());
        }
        Name::from_components(components).map_err(|_| DecodeError::Malformed("invalid name"))
    }
}
