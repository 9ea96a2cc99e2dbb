//! Streaming encoder and block-decoding receiver for codes built by
//! embedding MDS codewords across packets according to a dispersion vector.
//!
//! Symbol index `p` (0-based) of every packet belongs to the codeword
//! anchored `lag(p)` packets earlier, where `lag(p) + 1` is the offset of the
//! dispersion slot holding codeword symbol `p`. Message symbols are the first
//! `k` symbols of each packet, so every packet starts with its own message.
//! The stream is preceded by a virtual all-zero message preamble: every
//! symbol that would sit in a packet before time 0 is zero.

mod encoder;
mod receiver;
pub mod verify;
pub mod wire;

use serde::{Deserialize, Serialize};

pub use encoder::StreamEncoder;
pub use receiver::StreamReceiver;
pub use verify::{transmit, verify_exhaustive, Counterexample, Verdict, VerifyOptions};

use crate::dispersion::{best_dispersion, construction1, DispersionVector};
use crate::gf::{FieldSpec, MdsCode, Symbol};
use crate::params::ChannelParams;
use crate::{Error, Result};

/// Packet offset of each codeword symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordLayout {
    /// 1-based offset `j(p)` for each codeword symbol, nondecreasing.
    offsets: Vec<usize>,
    span: usize,
}

impl CodewordLayout {
    pub fn new(dispersion: &DispersionVector) -> Result<Self> {
        match dispersion.entries().first() {
            None | Some(0) => return Err(Error::EmptyFirstSlot),
            _ => {}
        }
        let offsets = dispersion
            .entries()
            .iter()
            .enumerate()
            .flat_map(|(j, &count)| std::iter::repeat(j + 1).take(count as usize))
            .collect();
        Ok(CodewordLayout { offsets, span: dispersion.span() })
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Packets between the codeword anchor and the packet carrying symbol `p`.
    #[inline]
    pub fn lag(&self, p: usize) -> usize {
        self.offsets[p] - 1
    }

    pub fn n(&self) -> usize {
        self.offsets.len()
    }

    pub fn span(&self) -> usize {
        self.span
    }
}

/// A packet-level streaming code: channel parameters, dispersion vector and
/// the `[n, k]` MDS base code.
#[derive(Debug, Clone)]
pub struct StreamCode {
    params: ChannelParams,
    dispersion: DispersionVector,
    layout: CodewordLayout,
    mds: MdsCode,
}

impl StreamCode {
    /// Uses `k = n - r`, `r` being the effective resilience of `dispersion`.
    pub fn new(params: ChannelParams, dispersion: DispersionVector) -> Result<Self> {
        let report = dispersion.resilience(&params)?;
        if report.k() == 0 {
            return Err(Error::InvalidDimensions { n: report.n as usize, k: 0 });
        }
        Self::with_dimension(params, dispersion, report.k() as usize)
    }

    /// Overrides the base-code dimension (e.g. to build a deliberately weak code).
    pub fn with_dimension(params: ChannelParams, dispersion: DispersionVector, k: usize) -> Result<Self> {
        let expected = params.window() as usize;
        if dispersion.span() != expected {
            return Err(Error::LengthMismatch { expected, actual: dispersion.span() });
        }
        let layout = CodewordLayout::new(&dispersion)?;
        let n = layout.n();
        let mds = MdsCode::new(n, k, FieldSpec::for_length(n)?)?;
        Ok(StreamCode { params, dispersion, layout, mds })
    }

    /// GSS code: maximum-rate dispersion vector.
    pub fn gss(params: ChannelParams) -> Result<Self> {
        Self::new(params, best_dispersion(&params).vector)
    }

    /// SS code: 0/1 dispersion vector.
    pub fn ss(params: ChannelParams) -> Result<Self> {
        Self::new(params, construction1(&params).vector)
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn dispersion(&self) -> &DispersionVector {
        &self.dispersion
    }

    pub fn layout(&self) -> &CodewordLayout {
        &self.layout
    }

    pub fn mds(&self) -> &MdsCode {
        &self.mds
    }

    pub fn n(&self) -> usize {
        self.mds.n()
    }

    pub fn k(&self) -> usize {
        self.mds.k()
    }

    pub fn tau(&self) -> u64 {
        self.params.tau() as u64
    }

    pub fn field_spec(&self) -> FieldSpec {
        self.mds.field_spec()
    }
}

/// Coded packet `x(t) = [m(t) | p(t)]`, or an erasure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamPacket {
    pub t: u64,
    pub symbols: Option<Vec<Symbol>>,
}

impl StreamPacket {
    pub fn erased(t: u64) -> Self {
        StreamPacket { t, symbols: None }
    }

    pub fn is_erased(&self) -> bool {
        self.symbols.is_none()
    }

    /// Same packet with its payload dropped.
    pub fn erase(self) -> Self {
        StreamPacket::erased(self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DecodeStatus {
    OnTime,
    Late,
    Failed,
}

impl DecodeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecodeStatus::OnTime => "ON_TIME",
            DecodeStatus::Late => "LATE",
            DecodeStatus::Failed => "FAILED",
        }
    }
}

/// Outcome for message packet `m(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeEvent {
    pub t: u64,
    pub decode_time: u64,
    pub status: DecodeStatus,
    /// Recovered `m(t)`; `None` when failed.
    pub message: Option<Vec<Symbol>>,
    /// 0-based message positions that could not be recovered.
    pub unrecoverable: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(s: &str) -> DispersionVector {
        s.parse().unwrap()
    }

    #[test]
    fn layout_examples() {
        let l = CodewordLayout::new(&dv("3,1,1,1,1,3")).unwrap();
        assert_eq!(l.offsets(), &[1, 1, 1, 2, 3, 4, 5, 6, 6, 6]);
        let l = CodewordLayout::new(&dv("1,1,1,0,0,1")).unwrap();
        assert_eq!(l.offsets(), &[1, 2, 3, 6]);
        let l = CodewordLayout::new(&dv("4")).unwrap();
        assert_eq!(l.offsets(), &[1, 1, 1, 1]);
        assert_eq!(CodewordLayout::new(&dv("0,1,1")).unwrap_err(), Error::EmptyFirstSlot);
    }

    #[test]
    fn layout_is_a_bijection_per_packet() {
        let v = dv("3,2,2,2,2,3,2,2,2,2,3");
        let l = CodewordLayout::new(&v).unwrap();
        for (j, &count) in v.entries().iter().enumerate() {
            assert_eq!(l.offsets().iter().filter(|&&o| o == j + 1).count(), count as usize);
        }
        assert!(l.offsets().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn code_dimensions() {
        let params = ChannelParams::new(3, 5, 5).unwrap();
        let gss = StreamCode::gss(params).unwrap();
        assert_eq!((gss.n(), gss.k()), (10, 3));
        let ss = StreamCode::ss(params).unwrap();
        assert_eq!((ss.n(), ss.k()), (4, 1));
        let big = StreamCode::gss(ChannelParams::new(7, 10, 50).unwrap()).unwrap();
        assert!(big.n() > 256);
        assert_eq!(big.field_spec(), FieldSpec::GF65536);
    }
}
