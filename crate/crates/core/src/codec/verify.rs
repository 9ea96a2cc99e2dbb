use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DecodeEvent, DecodeStatus, StreamCode, StreamEncoder, StreamReceiver};
use crate::channel::{enumerate_admissible, ErasurePattern};
use crate::exec::{derive_seed, Execution};
use crate::gf::Symbol;
use crate::{Budget, Error, Result};

/// Uniformly random messages for `horizon` time slots.
pub fn random_messages(code: &StreamCode, horizon: usize, seed: u64) -> Vec<Vec<Symbol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (code.field_spec().order() - 1) as Symbol;
    (0..horizon).map(|_| (0..code.k()).map(|_| rng.gen_range(0..=top)).collect()).collect()
}

/// Encodes `messages`, erases the packets in `pattern`, and returns every
/// decode event (including the end-of-stream flush) sorted by message time.
pub fn transmit(code: &StreamCode, messages: &[Vec<Symbol>], pattern: &ErasurePattern) -> Result<Vec<DecodeEvent>> {
    let mut enc = StreamEncoder::new(code);
    let mut rx = StreamReceiver::new(code);
    let mut events = Vec::with_capacity(messages.len());
    for (t, msg) in messages.iter().enumerate() {
        let mut pkt = enc.step(msg)?;
        if pattern.is_erased(t) {
            pkt = pkt.erase();
        }
        events.extend(rx.step(&pkt)?);
    }
    events.extend(rx.finish()?);
    events.sort_by_key(|e| e.t);
    Ok(events)
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub budget: Budget,
    /// Test only maximal admissible patterns.
    pub maximal_only: bool,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: Budget::DEFAULT,
            maximal_only: false,
            seed: crate::channel::DEFAULT_SEED,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub pattern: ErasurePattern,
    pub message_time: u64,
    pub status: DecodeStatus,
    /// Recovered message differs from the one sent.
    pub corrupted: bool,
    /// Anchor of the first codeword that could not be decoded.
    pub failing_anchor: Option<i64>,
    pub unrecoverable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub horizon: usize,
    pub patterns_checked: usize,
    pub maximal_only: bool,
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Runs the code against every admissible pattern on `[0, horizon)` and
/// checks that each message `m(t)`, `t < horizon - tau`, is recovered
/// correctly by `t + tau`. Returns the lexicographically first failing
/// pattern, if any.
pub fn verify_exhaustive(code: &StreamCode, horizon: usize, opts: VerifyOptions) -> Result<Verdict> {
    let window = code.params().window() as usize;
    if horizon < window {
        return Err(Error::HorizonTooShort { horizon, window });
    }
    let patterns = enumerate_admissible(code.params(), horizon, opts.budget, opts.maximal_only)?;
    let indexed: Vec<(usize, &ErasurePattern)> = patterns.iter().enumerate().collect();
    let interior = (horizon - code.tau() as usize) as u64;
    let found = opts.exec.find_map_first(&indexed, |&(i, pattern)| {
        let messages = random_messages(code, horizon, derive_seed(opts.seed, i as u64));
        check_pattern(code, &messages, pattern, interior).transpose()
    });
    Ok(Verdict {
        horizon,
        patterns_checked: patterns.len(),
        maximal_only: opts.maximal_only,
        counterexample: found.transpose()?,
    })
}

fn check_pattern(
    code: &StreamCode,
    messages: &[Vec<Symbol>],
    pattern: &ErasurePattern,
    interior: u64,
) -> Result<Option<Counterexample>> {
    let events = transmit(code, messages, pattern)?;
    for t in 0..interior {
        let event = events.iter().find(|e| e.t == t);
        let bad = match event {
            Some(e) if e.status == DecodeStatus::OnTime && e.message.as_ref() == Some(&messages[t as usize]) => {
                continue
            }
            Some(e) => e.clone(),
            None => DecodeEvent {
                t,
                decode_time: t,
                status: DecodeStatus::Failed,
                message: None,
                unrecoverable: (0..code.k()).collect(),
            },
        };
        let failing_anchor = bad.unrecoverable.first().map(|&p| t as i64 - code.layout().lag(p) as i64);
        return Ok(Some(Counterexample {
            pattern: pattern.clone(),
            message_time: t,
            status: bad.status,
            corrupted: bad.status != DecodeStatus::Failed,
            failing_anchor,
            unrecoverable: bad.unrecoverable,
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ChannelParams;

    #[test]
    fn gss_355_passes_small_horizon() {
        let code = StreamCode::gss(ChannelParams::new(3, 5, 5).unwrap()).unwrap();
        let v = verify_exhaustive(&code, 8, VerifyOptions::default()).unwrap();
        assert!(v.passed());
        assert!(v.patterns_checked > 1);
    }

    #[test]
    fn weakened_code_yields_burst_counterexample() {
        let params = ChannelParams::new(3, 5, 5).unwrap();
        let code = StreamCode::with_dimension(params, "3,1,1,1,1,3".parse().unwrap(), 4).unwrap();
        let v = verify_exhaustive(&code, 8, VerifyOptions::default()).unwrap();
        let cx = v.counterexample.expect("k = 4 cannot absorb 7 erased symbols");
        assert_eq!(cx.status, DecodeStatus::Failed);
        assert!(cx.failing_anchor.is_some());
    }

    #[test]
    fn horizon_must_cover_a_window() {
        let code = StreamCode::gss(ChannelParams::new(3, 5, 5).unwrap()).unwrap();
        assert!(verify_exhaustive(&code, 5, VerifyOptions::default()).is_err());
        let v = verify_exhaustive(&code, 6, VerifyOptions::default()).unwrap();
        assert!(v.passed());
    }
}
