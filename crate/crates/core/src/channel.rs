//! The delay-constrained sliding-window (DCSW) erasure channel and a
//! Gilbert-Elliott loss generator.
//!
//! A pattern is admissible for `(a, b, tau)` when, in every window of
//! `tau + 1` consecutive slots lying fully inside `[0, horizon)`, the erased
//! slots either number at most `a`, or form a single run of at most `b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionVector;
use crate::params::ChannelParams;
use crate::{Budget, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct ErasurePattern {
    horizon: usize,
    /// Sorted, distinct.
    erased: Vec<usize>,
}

#[derive(Deserialize)]
struct RawPattern {
    horizon: usize,
    erased: Vec<usize>,
}

impl TryFrom<RawPattern> for ErasurePattern {
    type Error = Error;

    fn try_from(raw: RawPattern) -> Result<Self> {
        ErasurePattern::new(raw.horizon, raw.erased)
    }
}

impl ErasurePattern {
    pub fn new(horizon: usize, mut erased: Vec<usize>) -> Result<Self> {
        erased.sort_unstable();
        erased.dedup();
        if let Some(&index) = erased.last().filter(|&&t| t >= horizon) {
            return Err(Error::InvalidPattern { index, horizon });
        }
        Ok(ErasurePattern { horizon, erased })
    }

    pub fn empty(horizon: usize) -> Self {
        ErasurePattern { horizon, erased: Vec::new() }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    pub fn is_erased(&self, t: usize) -> bool {
        self.erased.binary_search(&t).is_ok()
    }

    pub fn to_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.horizon];
        for &t in &self.erased {
            mask[t] = true;
        }
        mask
    }

    fn with(&self, t: usize) -> ErasurePattern {
        let mut erased = self.erased.clone();
        let pos = erased.binary_search(&t).unwrap_or_else(|p| p);
        erased.insert(pos, t);
        ErasurePattern { horizon: self.horizon, erased }
    }

    pub fn is_admissible(&self, params: &ChannelParams) -> bool {
        let w = params.window() as usize;
        if self.horizon < w {
            return true;
        }
        let (mut lo, mut hi) = (0, 0);
        for start in 0..=self.horizon - w {
            while lo < self.erased.len() && self.erased[lo] < start {
                lo += 1;
            }
            while hi < self.erased.len() && self.erased[hi] < start + w {
                hi += 1;
            }
            if !window_ok(&self.erased[lo..hi], params) {
                return false;
            }
        }
        true
    }

    /// Admissible, and no single further erasure keeps it admissible.
    pub fn is_maximal(&self, params: &ChannelParams) -> bool {
        (0..self.horizon).filter(|t| !self.is_erased(*t)).all(|t| !self.with(t).is_admissible(params))
    }
}

/// Erasures (sorted) inside one window.
fn window_ok(erased: &[usize], params: &ChannelParams) -> bool {
    let count = erased.len();
    if count <= params.a() as usize {
        return true;
    }
    count <= params.b() as usize && erased[count - 1] - erased[0] + 1 == count
}

/// Lazily yields every admissible pattern on `[0, horizon)` in lexicographic
/// order of the sorted erased sets, starting with the empty pattern.
///
/// Backtracking extends the current set with increasing slots. A violated
/// window stays violated under such extensions (its count only grows and an
/// interior gap cannot be filled from the right), so those branches are cut.
pub struct AdmissiblePatterns {
    params: ChannelParams,
    horizon: usize,
    stack: Vec<usize>,
    /// Next candidate slot to try at the current depth.
    next: usize,
    started: bool,
    visited: u64,
    budget: Budget,
    done: bool,
}

impl AdmissiblePatterns {
    pub fn new(params: ChannelParams, horizon: usize, budget: Budget) -> Self {
        AdmissiblePatterns {
            params,
            horizon,
            stack: Vec::new(),
            next: 0,
            started: false,
            visited: 0,
            budget,
            done: false,
        }
    }

    /// Checks only the windows containing the newest slot `t`.
    fn extension_ok(&self, t: usize) -> bool {
        let w = self.params.window() as usize;
        if self.horizon < w {
            return true;
        }
        let first = t.saturating_sub(w - 1);
        let last = t.min(self.horizon - w);
        (first..=last).all(|start| {
            let lo = self.stack.partition_point(|&x| x < start);
            let mut inside: Vec<usize> = self.stack[lo..].to_vec();
            inside.push(t);
            window_ok(&inside, &self.params)
        })
    }
}

impl Iterator for AdmissiblePatterns {
    type Item = Result<ErasurePattern>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.visited = 1;
            return Some(Ok(ErasurePattern::empty(self.horizon)));
        }
        loop {
            while self.next < self.horizon {
                let t = self.next;
                self.next += 1;
                if self.extension_ok(t) {
                    self.visited += 1;
                    if let Err(e) = self.budget.check(self.visited) {
                        self.done = true;
                        return Some(Err(e));
                    }
                    self.stack.push(t);
                    self.next = t + 1;
                    return Some(Ok(ErasurePattern { horizon: self.horizon, erased: self.stack.clone() }));
                }
            }
            match self.stack.pop() {
                Some(t) => self.next = t + 1,
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

/// Collects the admissible patterns, optionally keeping only maximal ones.
///
/// Every admissible pattern is contained in a maximal one, and erasing fewer
/// packets never erases more symbols of any codeword, so recovery under all
/// maximal patterns implies recovery under all admissible patterns.
pub fn enumerate_admissible(
    params: &ChannelParams,
    horizon: usize,
    budget: Budget,
    maximal_only: bool,
) -> Result<Vec<ErasurePattern>> {
    let mut out = Vec::new();
    for pattern in AdmissiblePatterns::new(*params, horizon, budget) {
        let pattern = pattern?;
        if !maximal_only || pattern.is_maximal(params) {
            out.push(pattern);
        }
    }
    Ok(out)
}

/// Erased-symbol count of each codeword whose span `[t, t + tau]` lies in
/// `[0, horizon)`, indexed by anchor `t`.
pub fn codeword_loss_profile(pattern: &ErasurePattern, dispersion: &DispersionVector) -> Vec<u32> {
    let span = dispersion.span();
    if pattern.horizon() < span {
        return Vec::new();
    }
    let mask = pattern.to_mask();
    (0..=pattern.horizon() - span)
        .map(|anchor| dispersion.entries().iter().enumerate().filter(|(i, _)| mask[anchor + i]).map(|(_, &n)| n).sum())
        .collect()
}

/// Two-state Markov loss model. The chain starts in the good state; each slot
/// is lost with the current state's loss probability, then the state moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeConfig {
    pub p_good_to_bad: f64,
    pub p_bad_to_good: f64,
    pub loss_good: f64,
    pub loss_bad: f64,
    pub seed: u64,
}

impl GeConfig {
    /// Toolkit defaults (not derived from any measured channel).
    pub const DEFAULT: GeConfig =
        GeConfig { p_good_to_bad: 0.01, p_bad_to_good: 0.3, loss_good: 0.001, loss_bad: 1.0, seed: DEFAULT_SEED };

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("p_good_to_bad", self.p_good_to_bad),
            ("p_bad_to_good", self.p_bad_to_good),
            ("loss_good", self.loss_good),
            ("loss_bad", self.loss_bad),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GeConfig { seed, ..self }
    }
}

impl Default for GeConfig {
    fn default() -> Self {
        GeConfig::DEFAULT
    }
}

pub const DEFAULT_SEED: u64 = 0x6755_5353_2021;

pub fn ge_sample(config: &GeConfig, length: usize) -> Result<ErasurePattern> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut bad = false;
    let mut erased = Vec::new();
    for t in 0..length {
        let loss = if bad { config.loss_bad } else { config.loss_good };
        if rng.gen_bool(loss) {
            erased.push(t);
        }
        let flip = if bad { config.p_bad_to_good } else { config.p_good_to_bad };
        if rng.gen_bool(flip) {
            bad = !bad;
        }
    }
    Ok(ErasurePattern { horizon: length, erased })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: u32, b: u32, tau: u32) -> ChannelParams {
        ChannelParams::new(a, b, tau).unwrap()
    }

    fn pat(h: usize, e: &[usize]) -> ErasurePattern {
        ErasurePattern::new(h, e.to_vec()).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        let params = p(3, 5, 5);
        assert!(pat(6, &[0, 1, 2, 3, 4]).is_admissible(&params));
        assert!(pat(6, &[0, 2, 4]).is_admissible(&params));
        assert!(!pat(6, &[0, 1, 2, 3, 5]).is_admissible(&params));
        assert!(!pat(7, &[0, 1, 2, 3, 4, 5]).is_admissible(&params));
        // two runs in one window use the count branch
        assert!(!pat(6, &[0, 1, 3, 4]).is_admissible(&params));
        // windows only fully inside the horizon
        assert!(pat(3, &[0, 1, 2]).is_admissible(&p(1, 1, 5)));
    }

    #[test]
    fn pattern_rejects_out_of_range() {
        assert_eq!(ErasurePattern::new(4, vec![4]).unwrap_err(), Error::InvalidPattern { index: 4, horizon: 4 });
        assert_eq!(pat(5, &[3, 1, 3]).erased(), &[1, 3]);
    }

    #[test]
    fn enumerate_small_case() {
        let all = enumerate_admissible(&p(1, 1, 1), 2, Budget::DEFAULT, false).unwrap();
        let sets: Vec<&[usize]> = all.iter().map(|x| x.erased()).collect();
        assert_eq!(sets, vec![&[][..], &[0][..], &[1][..]]);
    }

    #[test]
    fn enumeration_budget() {
        let err = enumerate_admissible(&p(3, 5, 5), 12, Budget(100), false).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 100, .. }));
    }

    #[test]
    fn loss_profile_examples() {
        let v: DispersionVector = "3,1,1,1,1,3".parse().unwrap();
        assert_eq!(codeword_loss_profile(&pat(6, &[0, 1, 2, 3, 4]), &v), vec![7]);
        assert_eq!(codeword_loss_profile(&pat(6, &[0, 1, 5]), &v), vec![7]);
        assert_eq!(codeword_loss_profile(&pat(9, &[]), &v), vec![0; 4]);
        assert_eq!(codeword_loss_profile(&pat(7, &[5]), &v), vec![3, 1]);
    }

    #[test]
    fn ge_extremes_and_determinism() {
        let none = GeConfig { p_good_to_bad: 0.3, p_bad_to_good: 0.3, loss_good: 0.0, loss_bad: 0.0, seed: 1 };
        assert!(ge_sample(&none, 500).unwrap().is_empty());
        let all = GeConfig { loss_good: 1.0, loss_bad: 1.0, ..none };
        assert_eq!(ge_sample(&all, 500).unwrap().len(), 500);
        let cfg = GeConfig::DEFAULT.with_seed(99);
        assert_eq!(ge_sample(&cfg, 5000).unwrap(), ge_sample(&cfg, 5000).unwrap());
        assert_ne!(ge_sample(&cfg, 5000).unwrap(), ge_sample(&cfg.with_seed(100), 5000).unwrap());
        let bad = GeConfig { loss_bad: 1.5, ..none };
        assert!(matches!(ge_sample(&bad, 3), Err(Error::InvalidProbability { name: "loss_bad", .. })));
    }

    #[test]
    fn json_forms() {
        let p = pat(6, &[0, 2]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"horizon":6,"erased":[0,2]}"#);
        assert_eq!(serde_json::from_str::<ErasurePattern>(&json).unwrap(), p);
        assert!(serde_json::from_str::<ErasurePattern>(r#"{"horizon":2,"erased":[5]}"#).is_err());

        let cfg: GeConfig =
            serde_json::from_str(r#"{"p_good_to_bad":0.1,"p_bad_to_good":0.5,"loss_good":0,"loss_bad":1,"seed":7}"#)
                .unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(serde_json::from_str::<GeConfig>(
            r#"{"p_good_to_bad":0.1,"p_bad_to_good":0.5,"loss_good":0,"loss_bad":1}"#
        )
        .is_err());
    }
}
