//! Channel parameters `(a, b, tau)` and the closed-form rates attached to them.
//!
//! All rates are exact rationals; floating point appears only when a rate is
//! rendered for display.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact code rate.
pub type Rate = Ratio<u64>;

/// Parameters of the delay-constrained sliding-window channel: in every
/// window of `tau + 1` packets either at most `a` arbitrary erasures or one
/// burst of at most `b` consecutive erasures; every message must be decoded
/// within `tau` packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ChannelParams {
    a: u32,
    b: u32,
    tau: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    a: u32,
    b: u32,
    tau: u32,
    #[serde(default, skip_deserializing)]
    w: u32,
}

impl TryFrom<RawParams> for ChannelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ChannelParams::new(raw.a, raw.b, raw.tau)
    }
}

impl From<ChannelParams> for RawParams {
    fn from(p: ChannelParams) -> Self {
        RawParams { a: p.a, b: p.b, tau: p.tau, w: p.window() }
    }
}

impl ChannelParams {
    pub fn new(a: u32, b: u32, tau: u32) -> Result<Self> {
        if a == 0 || a > b || b > tau || tau >= u16::MAX as u32 {
            return Err(Error::InvalidParams { a, b, tau });
        }
        Ok(ChannelParams { a, b, tau })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    /// Window size `w = tau + 1`, also the dispersion span.
    pub fn window(&self) -> u32 {
        self.tau + 1
    }

    pub fn decompose(&self) -> Decomposition {
        let w = self.window();
        Decomposition { m: w / self.b, delta: w % self.b }
    }

    /// `(tau + 1 - a) / (tau + 1 - a + b)`, the best rate of any streaming code.
    pub fn optimal_rate(&self) -> Rate {
        let num = (self.window() - self.a) as u64;
        Rate::new(num, num + self.b as u64)
    }

    /// Rate of the simple streaming (0/1 dispersion) code, valid in every regime.
    pub fn ss_rate(&self) -> Rate {
        let Decomposition { m, delta } = self.decompose();
        let (m, a) = (m as u64, self.a as u64);
        let extra = delta.min(self.a) as u64;
        // (m - 1 + extra/a) / (m + extra/a)
        Rate::new((m - 1) * a + extra, m * a + extra)
    }

    /// Maximum rate of a streaming code obtained by generalized staggered
    /// diagonal embedding with span `tau + 1`.
    pub fn max_gsde_rate(&self) -> Rate {
        let Decomposition { m, delta } = self.decompose();
        if delta > 0 && self.a > (m + 1) * delta {
            let (a, b, m, d) = (self.a as u64, self.b as u64, m as u64, delta as u64);
            // mu = (b - a + m d) / ((m + 1) b - a)
            let mu_num = b - a + m * d;
            let mu_den = (m + 1) * b - a;
            Rate::new((m - 1) * mu_den + mu_num, m * mu_den + mu_num)
        } else {
            self.ss_rate()
        }
    }

    pub fn regime(&self) -> Regime {
        let Decomposition { m, delta } = self.decompose();
        if delta > 0 && self.a > (m + 1) * delta {
            if self.b > self.a {
                Regime::GsdeGain
            } else {
                Regime::DegenerateEqualAb
            }
        } else {
            Regime::SsEquivalent
        }
    }
}

impl fmt::Display for ChannelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.tau)
    }
}

/// `tau + 1 = m * b + delta` with `0 <= delta < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub m: u32,
    pub delta: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// `delta = 0` or `a <= (m+1) delta`: the 0/1 construction is already optimal.
    SsEquivalent,
    /// `b > a > (m+1) delta > 0`: GSDE strictly beats the SS code.
    GsdeGain,
    /// `a = b > (m+1) delta > 0`: the GSDE bound collapses to the SS rate.
    DegenerateEqualAb,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SsEquivalent => "SS_EQUIVALENT",
            Regime::GsdeGain => "GSDE_GAIN",
            Regime::DegenerateEqualAb => "DEGENERATE_EQUAL_AB",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Renders `rate` with three decimals, rounding half away from zero.
pub fn decimal3(rate: &Rate) -> String {
    let scaled = (*rate.numer() as u128 * 2000 + *rate.denom() as u128) / (2 * *rate.denom() as u128);
    format!("{}.{:03}", scaled / 1000, scaled % 1000)
}

/// Renders `rate` as `"num/den"`.
pub fn rational(rate: &Rate) -> String {
    format!("{}/{}", rate.numer(), rate.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: u32, b: u32, tau: u32) -> ChannelParams {
        ChannelParams::new(a, b, tau).unwrap()
    }

    fn r(n: u64, d: u64) -> Rate {
        Rate::new(n, d)
    }

    #[test]
    fn rejects_invalid_triples() {
        assert!(ChannelParams::new(0, 1, 1).is_err());
        assert!(ChannelParams::new(3, 2, 5).is_err());
        assert!(ChannelParams::new(2, 6, 5).is_err());
        assert!(ChannelParams::new(1, 1, 1).is_ok());
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(p(3, 5, 5).decompose(), Decomposition { m: 1, delta: 1 });
        assert_eq!(p(4, 5, 10).decompose(), Decomposition { m: 2, delta: 1 });
        assert_eq!(p(2, 3, 5).decompose(), Decomposition { m: 2, delta: 0 });
    }

    #[test]
    fn optimal_rate_examples() {
        assert_eq!(p(3, 5, 5).optimal_rate(), r(3, 8));
        assert_eq!(p(9, 15, 15).optimal_rate(), r(7, 22));
        assert_eq!(p(1, 1, 1).optimal_rate(), r(1, 2));
    }

    #[test]
    fn ss_rate_examples() {
        assert_eq!(p(3, 5, 5).ss_rate(), r(1, 4));
        assert_eq!(p(9, 15, 15).ss_rate(), r(1, 10));
        assert_eq!(p(10, 18, 20).ss_rate(), r(3, 13));
    }

    #[test]
    fn max_gsde_rate_examples() {
        assert_eq!(p(3, 5, 5).max_gsde_rate(), r(3, 10));
        assert_eq!(p(5, 8, 16).max_gsde_rate(), r(24, 43));
        assert_eq!(p(4, 5, 10).max_gsde_rate(), r(14, 25));
    }

    #[test]
    fn regime_examples() {
        assert_eq!(p(3, 5, 5).regime(), Regime::GsdeGain);
        assert_eq!(p(2, 3, 5).regime(), Regime::SsEquivalent);
        assert_eq!(p(4, 4, 8).regime(), Regime::DegenerateEqualAb);
        // theta = (b - a + m delta) / ((m+1) b - a) = 2/8 = delta / a
        assert_eq!(p(4, 4, 8).max_gsde_rate(), r(5, 9));
        assert_eq!(p(4, 4, 8).ss_rate(), r(5, 9));
    }

    #[test]
    fn rate_ordering_and_regimes_over_sweep() {
        for tau in 1..=30 {
            for b in 1..=tau {
                for a in 1..=b {
                    let params = p(a, b, tau);
                    let d = params.decompose();
                    assert_eq!(d.m * b + d.delta, tau + 1);
                    assert!(d.m >= 1 && d.delta < b);
                    let (ss, gss, opt) = (params.ss_rate(), params.max_gsde_rate(), params.optimal_rate());
                    assert!(ss <= gss && gss <= opt, "{params}");
                    match params.regime() {
                        Regime::GsdeGain => assert!(gss > ss, "{params}"),
                        _ => assert_eq!(gss, ss, "{params}"),
                    }
                }
            }
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal3(&r(3, 8)), "0.375");
        assert_eq!(decimal3(&r(5, 9)), "0.556");
        assert_eq!(decimal3(&r(24, 43)), "0.558");
        assert_eq!(decimal3(&r(3, 5)), "0.600");
        assert_eq!(decimal3(&r(1, 1)), "1.000");
        assert_eq!(decimal3(&r(0, 1)), "0.000");
        assert_eq!(rational(&r(6, 20)), "3/10");
    }

    #[test]
    fn serde_round_trip_validates() {
        let json = serde_json::to_string(&p(3, 5, 5)).unwrap();
        assert_eq!(json, r#"{"a":3,"b":5,"tau":5,"w":6}"#);
        let back: ChannelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p(3, 5, 5));
        assert!(serde_json::from_str::<ChannelParams>(r#"{"a":6,"b":5,"tau":5}"#).is_err());
    }
}
