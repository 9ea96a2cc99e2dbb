//! Binary framing for coded packet streams.
//!
//! ```text
//! header:  "GSS1" | a u16 | b u16 | tau u16 | n_1..n_{tau+1} u16 each | field order u32
//! packet:  t u32 | flag u8 (0 present, 1 erased) | n symbols if present
//! ```
//!
//! All integers are big-endian. Symbols take one byte over GF(2^8) and two
//! bytes (big-endian) over GF(2^16).

use std::io::{self, Read, Write};

use super::StreamPacket;
use crate::dispersion::DispersionVector;
use crate::gf::{FieldSpec, Symbol};
use crate::params::ChannelParams;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GSS1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamHeader {
    pub params: ChannelParams,
    pub dispersion: DispersionVector,
    pub field: FieldSpec,
}

impl StreamHeader {
    pub fn n(&self) -> usize {
        self.dispersion.total() as usize
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let span = self.params.window() as usize;
        if self.dispersion.span() != span {
            return Err(Error::LengthMismatch { expected: span, actual: self.dispersion.span() });
        }
        w.write_all(MAGIC)?;
        for x in [self.params.a(), self.params.b(), self.params.tau()] {
            w.write_all(&(x as u16).to_be_bytes())?;
        }
        for &x in self.dispersion.entries() {
            let x = u16::try_from(x).map_err(|_| Error::Wire(format!("dispersion entry {x} exceeds u16")))?;
            w.write_all(&x.to_be_bytes())?;
        }
        w.write_all(&(self.field.order() as u32).to_be_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Wire(format!("bad magic {magic:?}")));
        }
        let a = read_u16(r)? as u32;
        let b = read_u16(r)? as u32;
        let tau = read_u16(r)? as u32;
        let params = ChannelParams::new(a, b, tau)?;
        let entries = (0..=tau).map(|_| read_u16(r).map(u32::from)).collect::<io::Result<Vec<_>>>()?;
        let mut order = [0u8; 4];
        r.read_exact(&mut order)?;
        let field = FieldSpec::from_order(u32::from_be_bytes(order) as u64)?;
        Ok(StreamHeader { params, dispersion: DispersionVector::new(entries), field })
    }
}

fn read_u16<R: Read>(r: &mut R) -> io::Result<u16> {
    let mut buf = [0u8; 2];
    r.read_exact(&mut buf)?;
    Ok(u16::from_be_bytes(buf))
}

pub struct FrameWriter<W> {
    inner: W,
    n: usize,
    symbol_bytes: usize,
}

impl<W: Write> FrameWriter<W> {
    pub fn new(mut inner: W, header: &StreamHeader) -> Result<Self> {
        header.write_to(&mut inner)?;
        Ok(FrameWriter { inner, n: header.n(), symbol_bytes: header.field.symbol_bytes() })
    }

    pub fn write_packet(&mut self, packet: &StreamPacket) -> Result<()> {
        let t = u32::try_from(packet.t).map_err(|_| Error::Wire(format!("time {} exceeds u32", packet.t)))?;
        self.inner.write_all(&t.to_be_bytes())?;
        match &packet.symbols {
            None => self.inner.write_all(&[1])?,
            Some(symbols) => {
                if symbols.len() != self.n {
                    return Err(Error::LengthMismatch { expected: self.n, actual: symbols.len() });
                }
                self.inner.write_all(&[0])?;
                for &s in symbols {
                    if self.symbol_bytes == 1 {
                        self.inner.write_all(&[s as u8])?;
                    } else {
                        self.inner.write_all(&s.to_be_bytes())?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

pub struct FrameReader<R> {
    inner: R,
    header: StreamHeader,
}

impl<R: Read> FrameReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let header = StreamHeader::read_from(&mut inner)?;
        Ok(FrameReader { inner, header })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    /// Next packet, or `None` at a clean end of stream.
    pub fn read_packet(&mut self) -> Result<Option<StreamPacket>> {
        let mut t = [0u8; 4];
        match self.inner.read(&mut t[..1])? {
            0 => return Ok(None),
            _ => self.inner.read_exact(&mut t[1..])?,
        }
        let t = u32::from_be_bytes(t) as u64;
        let mut flag = [0u8; 1];
        self.inner.read_exact(&mut flag)?;
        match flag[0] {
            1 => Ok(Some(StreamPacket::erased(t))),
            0 => {
                let width = self.header.field.symbol_bytes();
                let mut raw = vec![0u8; self.header.n() * width];
                self.inner.read_exact(&mut raw)?;
                let symbols: Vec<Symbol> = if width == 1 {
                    raw.into_iter().map(Symbol::from).collect()
                } else {
                    raw.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
                };
                Ok(Some(StreamPacket { t, symbols: Some(symbols) }))
            }
            other => Err(Error::Wire(format!("bad packet flag {other}"))),
        }
    }
}

impl<R: Read> Iterator for FrameReader<R> {
    type Item = Result<StreamPacket>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_packet().transpose()
    }
}
