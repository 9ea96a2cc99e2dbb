//! Dispersion vectors `(n_1, ..., n_{tau+1})`: how many symbols of one
//! codeword go into each of the `tau + 1` packets it spans.
//!
//! A vector is an `(a, b, tau, n, r)`-dispersion vector when it sums to `n`,
//! every choice of `a` entries sums to at most `r`, every run of `b`
//! consecutive entries sums to at most `r`, and at least one of those sums
//! equals `r`. Its rate is `(n - r) / n`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::params::{ChannelParams, Rate, Regime};
use crate::{Budget, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DispersionVector {
    entries: Vec<u32>,
}

impl DispersionVector {
    pub fn new(entries: Vec<u32>) -> Self {
        DispersionVector { entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Dispersion span (number of packets), `tau + 1` for a matching vector.
    pub fn span(&self) -> usize {
        self.entries.len()
    }

    /// Total number of symbols `n`.
    pub fn total(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// Prefix sums `m_j = n_1 + ... + n_j` for `j = 1..=span`.
    pub fn prefix(&self) -> Vec<u32> {
        self.entries
            .iter()
            .scan(0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    pub fn scaled(&self, factor: u32) -> Self {
        DispersionVector::new(self.entries.iter().map(|&x| x * factor).collect())
    }

    fn check_span(&self, params: &ChannelParams) -> Result<()> {
        let expected = params.window() as usize;
        if self.span() != expected {
            return Err(Error::LengthMismatch { expected, actual: self.span() });
        }
        Ok(())
    }

    /// Minimal `r` for which the subset and window constraints hold, with the
    /// resulting rate and which constraint family attains it.
    pub fn resilience(&self, params: &ChannelParams) -> Result<ResilienceReport> {
        self.check_span(params)?;
        let n = self.total();
        if n == 0 {
            return Err(Error::ZeroTotal);
        }
        let subset = top_sum(&self.entries, params.a() as usize);
        let (_, window) = max_window(&self.entries, params.b() as usize);
        let r = subset.max(window);
        Ok(ResilienceReport {
            n,
            r,
            rate: Rate::new((n - r) as u64, n as u64),
            random_tight: subset == r,
            burst_tight: window == r,
        })
    }

    /// Checks the `(a, b, tau, n, r)` conditions with `n = total()`.
    pub fn check(&self, params: &ChannelParams, r: u32) -> DispersionCheck {
        let first_slot_empty = self.entries.first().map_or(true, |&x| x == 0);
        let fail = |violation| DispersionCheck { violation: Some(violation), first_slot_empty };
        if self.check_span(params).is_err() {
            return fail(Violation::Span { expected: params.window() as usize, actual: self.span() });
        }
        let b = params.b() as usize;
        let mut max_sum = 0;
        for start in 0..=self.span() - b {
            let sum: u32 = self.entries[start..start + b].iter().sum();
            if sum > r {
                return fail(Violation::Window { start: start + 1, end: start + b, sum, r });
            }
            max_sum = max_sum.max(sum);
        }
        let subset = top_indices(&self.entries, params.a() as usize);
        let sum: u32 = subset.iter().map(|&i| self.entries[i - 1]).sum();
        if sum > r {
            return fail(Violation::Subset { indices: subset, sum, r });
        }
        max_sum = max_sum.max(sum);
        if max_sum != r {
            return fail(Violation::NoneTight { max_sum, r });
        }
        DispersionCheck { violation: None, first_slot_empty }
    }
}

impl fmt::Display for DispersionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for DispersionVector {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<Vec<_>, _>>().map(Self::new)
    }
}

/// Sum of the `count` largest entries.
fn top_sum(entries: &[u32], count: usize) -> u32 {
    let mut sorted = entries.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    sorted.iter().take(count).sum()
}

/// 1-based indices of the `count` largest entries, ties broken by position.
fn top_indices(entries: &[u32], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=entries.len()).collect();
    idx.sort_by(|&i, &j| entries[j - 1].cmp(&entries[i - 1]).then(i.cmp(&j)));
    idx.truncate(count);
    idx
}

/// Largest sum of `len` consecutive entries and its 0-based start.
fn max_window(entries: &[u32], len: usize) -> (usize, u32) {
    let mut sum: u32 = entries[..len].iter().sum();
    let mut best = (0, sum);
    for start in 1..=entries.len() - len {
        sum = sum + entries[start + len - 1] - entries[start - 1];
        if sum > best.1 {
            best = (start, sum);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResilienceReport {
    pub n: u32,
    /// Effective resilience: the largest number of symbols of one codeword an
    /// admissible pattern can erase.
    pub r: u32,
    #[serde(with = "rate_string")]
    pub rate: Rate,
    pub random_tight: bool,
    pub burst_tight: bool,
}

impl ResilienceReport {
    /// Dimension `k = n - r` of the MDS base code.
    pub fn k(&self) -> u32 {
        self.n - self.r
    }
}

pub(crate) mod rate_string {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::params::{rational, Rate};

    pub fn serialize<S: Serializer>(rate: &Rate, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational(rate))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rate, D::Error> {
        let s = String::deserialize(d)?;
        let (n, den) = s.split_once('/').ok_or_else(|| de::Error::custom("expected num/den"))?;
        let n = n.parse().map_err(de::Error::custom)?;
        let den: u64 = den.parse().map_err(de::Error::custom)?;
        if den == 0 {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Rate::new(n, den))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispersionCheck {
    pub violation: Option<Violation>,
    /// `n_1 = 0` is accepted, but constructed vectors never have it.
    pub first_slot_empty: bool,
}

impl DispersionCheck {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Span {
        expected: usize,
        actual: usize,
    },
    /// Window `[start, end]` (1-based, inclusive).
    Window {
        start: usize,
        end: usize,
        sum: u32,
        r: u32,
    },
    Subset {
        indices: Vec<usize>,
        sum: u32,
        r: u32,
    },
    NoneTight {
        max_sum: u32,
        r: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Span { expected, actual } => write!(f, "span {actual} != tau+1 = {expected}"),
            Violation::Window { start, end, sum, r } => {
                write!(f, "burst window [{start}..{end}] sums to {sum} > {r}")
            }
            Violation::Subset { indices, sum, r } => write!(f, "subset {indices:?} sums to {sum} > {r}"),
            Violation::NoneTight { max_sum, r } => {
                write!(f, "no constraint tight: largest constraint sum {max_sum} < {r}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    /// 0/1 entries: one symbol in packets whose index mod b falls in [1, a].
    Construction1,
    /// `gamma` at packets 1, b+1, 2b+1, ... and `t` elsewhere.
    Construction2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub kind: ConstructionKind,
    pub vector: DispersionVector,
    pub report: ResilienceReport,
    /// `(n, r)` predicted by the closed forms for this construction.
    pub predicted: (u32, u32),
    /// `(t, gamma)` for construction 2.
    pub scale: Option<(u32, u32)>,
}

/// Residue of the 1-based index `i` modulo `b`, taken in `[1, b]`.
fn residue(i: u32, b: u32) -> u32 {
    (i - 1) % b + 1
}

pub fn construction1(params: &ChannelParams) -> Construction {
    let (a, b) = (params.a(), params.b());
    let entries = (1..=params.window()).map(|i| u32::from(residue(i, b) <= a)).collect();
    let vector = DispersionVector::new(entries);
    let report = vector.resilience(params).expect("construction 1 is non-empty");
    let d = params.decompose();
    Construction {
        kind: ConstructionKind::Construction1,
        predicted: (d.m * a + d.delta.min(a), a),
        vector,
        report,
        scale: None,
    }
}

pub fn construction2(params: &ChannelParams) -> Result<Construction> {
    let (a, b, tau) = (params.a(), params.b(), params.tau());
    if params.regime() != Regime::GsdeGain {
        return Err(Error::RegimeMismatch { a, b, tau });
    }
    let d = params.decompose();
    let (m, delta, gap) = (d.m, d.delta, b - a);
    let t = gap.lcm(&m) / gap;
    let gamma = t + t * gap / m;
    let entries = (1..=params.window()).map(|i| if residue(i, b) == 1 { gamma } else { t }).collect();
    let vector = DispersionVector::new(entries);
    let report = vector.resilience(params)?;
    // n = t (m b + (m+1)(b-a)/m + delta), r = t (b + (b-a)/m)
    let n = t * (m * b + delta) + t * (m + 1) * gap / m;
    let r = t * b + t * gap / m;
    Ok(Construction {
        kind: ConstructionKind::Construction2,
        vector,
        report,
        predicted: (n, r),
        scale: Some((t, gamma)),
    })
}

/// Rate-maximizing dispersion vector: construction 2 in the GSDE-gain regime,
/// construction 1 otherwise.
pub fn best_dispersion(params: &ChannelParams) -> Construction {
    match params.regime() {
        Regime::GsdeGain => construction2(params).expect("regime checked"),
        _ => construction1(params),
    }
}

/// `ceil(tau^2 / b) + (tau + 1) b`, a length every GSS code stays within.
pub fn field_size_bound(params: &ChannelParams) -> u64 {
    let (tau, b) = (params.tau() as u64, params.b() as u64);
    (tau * tau).div_ceil(b) + (tau + 1) * b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub rate: Rate,
    /// Lexicographically smallest vector attaining `rate`.
    pub witness: DispersionVector,
    pub entry_bound: u32,
    /// Number of vectors scored.
    pub searched: u64,
}

/// Exhaustive maximum rate over all vectors with entries in `[0, entry_bound]`
/// and `n_1 >= 1`.
pub fn brute_force_max_rate(
    params: &ChannelParams,
    entry_bound: u32,
    budget: Budget,
    exec: Execution,
) -> Result<OracleResult> {
    let span = params.window() as usize;
    let base = entry_bound as u64 + 1;
    let size = (0..span).try_fold(1u64, |acc, _| acc.checked_mul(base)).unwrap_or(u64::MAX);
    budget.check(size)?;
    if entry_bound == 0 {
        return Err(Error::ZeroTotal);
    }

    // Partition on the first two entries; each chunk is scanned in
    // lexicographic order so chunk-local ties already keep the smallest witness.
    let fixed = span.min(2);
    let mut prefixes = Vec::new();
    for first in 1..=entry_bound {
        if fixed == 1 {
            prefixes.push(vec![first]);
        } else {
            prefixes.extend((0..=entry_bound).map(|second| vec![first, second]));
        }
    }
    let (a, b) = (params.a() as usize, params.b() as usize);
    let chunks = exec.map(&prefixes, |prefix| scan_chunk(prefix, span, entry_bound, a, b));

    let mut searched = 0;
    let mut best: Option<(u64, u64, Vec<u32>)> = None;
    for (count, candidate) in chunks {
        searched += count;
        if let Some(c) = candidate {
            // strict improvement only: earlier chunks hold smaller witnesses
            if best.as_ref().map_or(true, |b| better(c.0, c.1, b.0, b.1)) {
                best = Some(c);
            }
        }
    }
    let (num, den, witness) = best.expect("at least one vector has n_1 >= 1");
    Ok(OracleResult { rate: Rate::new(num, den), witness: DispersionVector::new(witness), entry_bound, searched })
}

/// `x_num / x_den > y_num / y_den`.
fn better(x_num: u64, x_den: u64, y_num: u64, y_den: u64) -> bool {
    x_num * y_den > y_num * x_den
}

fn scan_chunk(prefix: &[u32], span: usize, bound: u32, a: usize, b: usize) -> (u64, Option<(u64, u64, Vec<u32>)>) {
    let mut v = vec![0u32; span];
    v[..prefix.len()].copy_from_slice(prefix);
    let mut sorted = vec![0u32; span];
    let mut best: Option<(u64, u64, Vec<u32>)> = None;
    let mut count = 0u64;
    loop {
        count += 1;
        let n: u32 = v.iter().sum();
        sorted.copy_from_slice(&v);
        sorted.sort_unstable_by(|x, y| y.cmp(x));
        let subset: u32 = sorted[..a].iter().sum();
        let mut window: u32 = v[..b].iter().sum();
        let mut r = subset.max(window);
        for start in 1..=span - b {
            window = window + v[start + b - 1] - v[start - 1];
            r = r.max(window);
        }
        let (num, den) = ((n - r) as u64, n as u64);
        if best.as_ref().map_or(true, |c| better(num, den, c.0, c.1)) {
            best = Some((num, den, v.clone()));
        }

        // odometer over the free suffix, last position fastest
        let mut pos = span;
        loop {
            if pos == prefix.len() {
                return (count, best);
            }
            pos -= 1;
            if v[pos] < bound {
                v[pos] += 1;
                break;
            }
            v[pos] = 0;
        }
    }
}
