//! Monte Carlo comparison of the GSS and SS codes of one `(a, b, tau)` over a
//! Gilbert-Elliott channel.

use serde::Serialize;

use crate::channel::{ge_sample, GeConfig};
use crate::codec::{transmit, verify::random_messages, DecodeStatus, StreamCode};
use crate::exec::{derive_seed, Execution};
use crate::params::ChannelParams;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Gss,
    Ss,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Gss => "gss",
            Scheme::Ss => "ss",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    pub params: ChannelParams,
    /// Its `seed` is the run seed; trial seeds are derived from it.
    pub ge: GeConfig,
    pub length: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub packets: u64,
    pub erased: u64,
    /// Messages `m(t)` with `t + tau` inside the run, the only ones scored.
    pub messages: u64,
    pub on_time: u64,
    pub late: u64,
    pub failed: u64,
}

impl Counts {
    fn add(&mut self, other: &Counts) {
        self.packets += other.packets;
        self.erased += other.erased;
        self.messages += other.messages;
        self.on_time += other.on_time;
        self.late += other.late;
        self.failed += other.failed;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialStats {
    pub trial: usize,
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationResult {
    /// Ordered by trial, then scheme.
    pub trials: Vec<TrialStats>,
    pub totals: Vec<(Scheme, Counts)>,
}

pub fn simulate(config: &SimulationConfig, exec: Execution) -> Result<SimulationResult> {
    config.ge.validate()?;
    let codes = [(Scheme::Gss, StreamCode::gss(config.params)?), (Scheme::Ss, StreamCode::ss(config.params)?)];
    let trial_ids: Vec<usize> = (0..config.trials).collect();
    let per_trial = exec.map(&trial_ids, |&trial| -> Result<Vec<TrialStats>> {
        let seed = config.ge.seed;
        let pattern = ge_sample(&config.ge.with_seed(derive_seed(seed, 2 * trial as u64)), config.length)?;
        let message_seed = derive_seed(seed, 2 * trial as u64 + 1);
        codes
            .iter()
            .map(|(scheme, code)| {
                let messages = random_messages(code, config.length, message_seed);
                let events = transmit(code, &messages, &pattern)?;
                let scored = config.length.saturating_sub(code.tau() as usize) as u64;
                let mut counts = Counts {
                    packets: config.length as u64,
                    erased: pattern.len() as u64,
                    messages: scored,
                    ..Counts::default()
                };
                for event in events.iter().filter(|e| e.t < scored) {
                    match event.status {
                        DecodeStatus::OnTime if event.message.as_ref() == Some(&messages[event.t as usize]) => {
                            counts.on_time += 1
                        }
                        DecodeStatus::Late => counts.late += 1,
                        _ => counts.failed += 1,
                    }
                }
                Ok(TrialStats { trial, scheme: *scheme, n: code.n(), k: code.k(), counts })
            })
            .collect()
    });
    let mut trials = Vec::with_capacity(2 * config.trials);
    for stats in per_trial {
        trials.extend(stats?);
    }
    let totals = codes
        .iter()
        .map(|(scheme, _)| {
            let mut total = Counts::default();
            trials.iter().filter(|s| s.scheme == *scheme).for_each(|s| total.add(&s.counts));
            (*scheme, total)
        })
        .collect();
    Ok(SimulationResult { trials, totals })
}
