use std::collections::{BTreeMap, VecDeque};

use super::{DecodeEvent, DecodeStatus, StreamCode, StreamPacket};
use crate::gf::Symbol;
use crate::{Error, Result};

#[derive(Debug)]
struct OpenCodeword {
    anchor: i64,
    received: Vec<Option<Symbol>>,
    count: usize,
    /// Some message symbol of this codeword sits in an erased packet.
    needed: bool,
    resolved: bool,
}

#[derive(Debug)]
struct PendingMessage {
    symbols: Vec<Option<Symbol>>,
    failed: Vec<usize>,
    outstanding: usize,
}

/// Block-decoding receiver.
///
/// Unerased packets release their message immediately. For an erased packet
/// each codeword carrying one of its message symbols is decoded as soon as
/// `k` of its symbols have arrived; a codeword still short of `k` symbols
/// when its span closes makes the message fail.
#[derive(Debug)]
pub struct StreamReceiver<'a> {
    code: &'a StreamCode,
    next_t: u64,
    /// Codewords anchored at `next_t - tau ..= next_t - 1`, oldest first.
    open: VecDeque<OpenCodeword>,
    pending: BTreeMap<u64, PendingMessage>,
}

impl<'a> StreamReceiver<'a> {
    pub fn new(code: &'a StreamCode) -> Self {
        let tau = code.tau() as i64;
        let layout = code.layout();
        let open = (-tau..0)
            .map(|anchor| {
                let received: Vec<Option<Symbol>> =
                    (0..code.n()).map(|p| (anchor + (layout.lag(p) as i64) < 0).then_some(0)).collect();
                let count = received.iter().flatten().count();
                OpenCodeword { anchor, received, count, needed: false, resolved: false }
            })
            .collect();
        StreamReceiver { code, next_t: 0, open, pending: BTreeMap::new() }
    }

    pub fn time(&self) -> u64 {
        self.next_t
    }

    /// Absorbs the packet (or erasure) for the next time slot and returns the
    /// message events that became final, ordered by message time.
    pub fn step(&mut self, packet: &StreamPacket) -> Result<Vec<DecodeEvent>> {
        let t = self.next_t;
        if packet.t != t {
            return Err(Error::OutOfOrder { expected: t, got: packet.t });
        }
        let (n, k, tau) = (self.code.n(), self.code.k(), self.code.tau());
        if let Some(symbols) = &packet.symbols {
            if symbols.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: symbols.len() });
            }
        }
        self.open.push_back(OpenCodeword {
            anchor: t as i64,
            received: vec![None; n],
            count: 0,
            needed: false,
            resolved: false,
        });

        let mut events = Vec::new();
        let layout = self.code.layout();
        let front = self.open[0].anchor;
        match &packet.symbols {
            Some(symbols) => {
                for (p, &s) in symbols.iter().enumerate() {
                    let cw = &mut self.open[(t as i64 - layout.lag(p) as i64 - front) as usize];
                    cw.received[p] = Some(s);
                    cw.count += 1;
                }
                events.push(DecodeEvent {
                    t,
                    decode_time: t,
                    status: DecodeStatus::OnTime,
                    message: Some(symbols[..k].to_vec()),
                    unrecoverable: Vec::new(),
                });
            }
            None => {
                for p in 0..k {
                    self.open[(t as i64 - layout.lag(p) as i64 - front) as usize].needed = true;
                }
                self.pending.insert(t, PendingMessage { symbols: vec![None; k], failed: Vec::new(), outstanding: k });
            }
        }

        let closing = t as i64 - tau as i64;
        self.resolve(|cw| cw.anchor == closing)?;
        events.extend(self.drain_ready(t));
        while self.open.front().is_some_and(|cw| cw.anchor <= closing) {
            self.open.pop_front();
        }
        self.next_t += 1;
        Ok(events)
    }

    /// Ends the stream: every open codeword is decoded from what has arrived
    /// or declared failed, and all pending messages are reported.
    pub fn finish(&mut self) -> Result<Vec<DecodeEvent>> {
        let now = self.next_t.saturating_sub(1);
        self.resolve(|_| true)?;
        let events = self.drain_ready(now);
        self.open.clear();
        Ok(events)
    }

    /// Decodes needed codewords holding at least `k` symbols; fails those for
    /// which `closing` holds and that are still short.
    fn resolve(&mut self, closing: impl Fn(&OpenCodeword) -> bool) -> Result<()> {
        let k = self.code.k();
        let layout = self.code.layout();
        for cw in self.open.iter_mut() {
            if !cw.needed || cw.resolved {
                continue;
            }
            let outcome = if cw.count >= k {
                Some(self.code.mds().decode(&cw.received)?)
            } else if closing(cw) {
                None
            } else {
                continue;
            };
            cw.resolved = true;
            for p in 0..k {
                let s = (cw.anchor + layout.lag(p) as i64) as u64;
                let Some(msg) = self.pending.get_mut(&s) else { continue };
                if msg.symbols[p].is_some() || msg.failed.contains(&p) {
                    continue;
                }
                match &outcome {
                    Some(message) => msg.symbols[p] = Some(message[p]),
                    None => msg.failed.push(p),
                }
                msg.outstanding -= 1;
            }
        }
        Ok(())
    }

    fn drain_ready(&mut self, now: u64) -> Vec<DecodeEvent> {
        let tau = self.code.tau();
        let ready: Vec<u64> = self.pending.iter().filter(|(_, m)| m.outstanding == 0).map(|(&s, _)| s).collect();
        ready
            .into_iter()
            .map(|s| {
                let mut msg = self.pending.remove(&s).expect("listed above");
                if msg.failed.is_empty() {
                    DecodeEvent {
                        t: s,
                        decode_time: now,
                        status: if now <= s + tau { DecodeStatus::OnTime } else { DecodeStatus::Late },
                        message: Some(msg.symbols.into_iter().map(|x| x.expect("resolved")).collect()),
                        unrecoverable: Vec::new(),
                    }
                } else {
                    msg.failed.sort_unstable();
                    DecodeEvent {
                        t: s,
                        decode_time: now,
                        status: DecodeStatus::Failed,
                        message: None,
                        unrecoverable: msg.failed,
                    }
                }
            })
            .collect()
    }
}
