use std::collections::{BTreeMap, VecDeque};

use super::{StreamCode, StreamPacket};
use crate::gf::Symbol;
use crate::{Error, Result};

/// Turns the message stream `m(0), m(1), ...` into coded packets.
#[derive(Debug)]
pub struct StreamEncoder<'a> {
    code: &'a StreamCode,
    t: u64,
    /// Messages for times `t - history.len() .. t`.
    history: VecDeque<Vec<Symbol>>,
    /// Full codewords by anchor, computed once their last message symbol is in.
    codewords: BTreeMap<i64, Vec<Symbol>>,
}

impl<'a> StreamEncoder<'a> {
    pub fn new(code: &'a StreamCode) -> Self {
        StreamEncoder { code, t: 0, history: VecDeque::new(), codewords: BTreeMap::new() }
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    fn message_symbol(&self, time: i64, p: usize) -> Symbol {
        if time < 0 {
            return 0;
        }
        let back = (self.t as i64 - time) as usize;
        self.history[self.history.len() - 1 - back][p]
    }

    fn codeword(&mut self, anchor: i64) -> Result<&[Symbol]> {
        if !self.codewords.contains_key(&anchor) {
            let layout = self.code.layout();
            let message: Vec<Symbol> =
                (0..self.code.k()).map(|q| self.message_symbol(anchor + layout.lag(q) as i64, q)).collect();
            let codeword = self.code.mds().encode(&message)?;
            self.codewords.insert(anchor, codeword);
        }
        Ok(&self.codewords[&anchor])
    }

    /// Emits packet `x(t)` for message `m(t)`.
    pub fn step(&mut self, message: &[Symbol]) -> Result<StreamPacket> {
        let (n, k) = (self.code.n(), self.code.k());
        if message.len() != k {
            return Err(Error::LengthMismatch { expected: k, actual: message.len() });
        }
        let tau = self.code.tau() as usize;
        self.history.push_back(message.to_vec());
        if self.history.len() > tau + 1 {
            self.history.pop_front();
        }
        let now = self.t as i64;
        let mut symbols = message.to_vec();
        for p in k..n {
            let anchor = now - self.code.layout().lag(p) as i64;
            let s = self.codeword(anchor)?[p];
            symbols.push(s);
        }
        self.codewords.retain(|&anchor, _| anchor > now - tau as i64);
        self.t += 1;
        Ok(StreamPacket { t: now as u64, symbols: Some(symbols) })
    }
}
