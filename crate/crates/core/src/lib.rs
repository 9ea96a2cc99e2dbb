//! Generalized simple streaming (GSS) codes.
//!
//! A GSS code spreads the symbols of each codeword of a systematic `[n, k]`
//! MDS code over `tau + 1` consecutive packets. The number of symbols that
//! land in each packet is given by a *dispersion vector*. When the vector
//! bounds the per-codeword loss of every admissible erasure pattern of the
//! `(a, b, tau)` sliding-window channel by `n - k`, every message packet is
//! recovered by plain block decoding within `tau` packets.
//!
//! ```text
//! packet:      t     t+1   t+2   t+3   t+4   t+5
//! dispersion:  3     1     1     1     1     3        (a, b, tau) = (3, 5, 5)
//! symbols:     x1-3  x4    x5    x6    x7    x8-10    one [10, 3] codeword
//! ```
//!
//! Module map:
//!
//! - [`params`]: channel parameters, closed-form rates and regime classification.
//! - [`dispersion`]: dispersion vectors, the two constructions and the brute-force rate oracle.
//! - [`gf`]: GF(2^8)/GF(2^16) arithmetic and the systematic MDS base code.
//! - [`channel`]: admissibility, admissible-pattern enumeration and Gilbert-Elliott sampling.
//! - [`codec`]: streaming encoder, block-decoding receiver, exhaustive verifier and wire framing.
//! - [`simulate`]: stochastic trials comparing GSS and SS codes.
//! - [`exec`]: sequential / rayon execution of the embarrassingly parallel loops.

pub mod channel;
pub mod codec;
pub mod dispersion;
mod error;
pub mod exec;
pub mod gf;
pub mod params;
pub mod simulate;

pub use channel::{ErasurePattern, GeConfig};
pub use codec::{CodewordLayout, DecodeEvent, DecodeStatus, StreamCode, StreamEncoder, StreamReceiver};
pub use dispersion::{DispersionVector, ResilienceReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use gf::{FieldSpec, MdsCode};
pub use params::{ChannelParams, Decomposition, Rate, Regime};

/// Crate version, echoed in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Caps the size of exhaustive searches (pattern enumeration, oracle state space).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(50_000_000);

    pub fn check(self, size: u64) -> Result<()> {
        if size > self.0 {
            Err(Error::BudgetExceeded { size, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
