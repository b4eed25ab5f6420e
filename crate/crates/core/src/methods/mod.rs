//! Unsupervised blood-volume-pulse recovery from spatially averaged RGB traces.

mod chrom;
mod green;
mod ica;
mod jade;
mod lgi;
mod pbv;
mod pos;

pub use chrom::chrom_bvp;
pub use green::green_bvp;
pub use ica::ica_bvp;
pub use jade::{jade_separate, JadeOutput, MAX_SWEEPS};
pub use lgi::{lgi_bvp, lgi_projector};
pub use pbv::{pbv_bvp, PbvSignature};
pub use pos::{pos_bvp, PosConstants};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::FilterConfig;
use crate::error::{Error, Result};
use crate::ingestion::RgbTrace;
use crate::scalar::{mean, std_pop, Real};

/// Recovery algorithm; declaration order is the canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Green,
    Ica,
    Chrom,
    Pos,
    Pbv,
    Lgi,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Green, Method::Ica, Method::Chrom, Method::Pos, Method::Pbv, Method::Lgi];

    pub fn name(self) -> &'static str {
        match self {
            Method::Green => "green",
            Method::Ica => "ica",
            Method::Chrom => "chrom",
            Method::Pos => "pos",
            Method::Pbv => "pbv",
            Method::Lgi => "lgi",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown method {s:?} (expected one of green, ica, chrom, pos, pbv, lgi)")))
    }
}

/// Conditions a method met and worked around instead of failing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodFlag {
    /// A normalising spread was zero; the output is all zeros.
    ZeroDenominator,
    /// Ill-conditioned colour covariance, regularised or zeroed.
    SingularCovariance,
    /// Whitening was impossible; the green channel was used instead.
    RankDeficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpSignal<T> {
    pub samples: Vec<T>,
    pub fps: T,
    pub method: Method,
    pub flags: Vec<MethodFlag>,
}

impl<T: Real> BvpSignal<T> {
    fn new(samples: Vec<T>, fps: T, method: Method) -> Self {
        Self { samples, fps, method, flags: Vec::new() }
    }

    fn flagged(mut self, flag: MethodFlag) -> Self {
        self.flags.push(flag);
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Per-run knobs shared by the methods.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MethodOptions {
    /// Band used by CHROM's internal filtering and ICA's component selection.
    pub filter: FilterConfig,
    pub pbv_signature: Option<PbvSignature>,
    pub pad_factor: Option<usize>,
}

/// Run `method` on `trace`.
pub fn recover<T: Real>(method: Method, trace: &RgbTrace<T>, opts: &MethodOptions) -> Result<BvpSignal<T>> {
    let fs = trace.fps;
    match method {
        Method::Green => green_bvp(trace),
        Method::Ica => ica_bvp(trace, fs, opts),
        Method::Chrom => chrom_bvp(trace, fs, &opts.filter),
        Method::Pos => pos_bvp(trace, fs),
        Method::Pbv => pbv_bvp(trace, opts.pbv_signature.as_ref()),
        Method::Lgi => lgi_bvp(trace),
    }
}

fn require_len(what: &'static str, n: usize, needed: usize) -> Result<()> {
    if n < needed {
        return Err(Error::TooShort { what, needed, got: n });
    }
    Ok(())
}

/// Each channel divided by its mean.
fn mean_normalized<T: Real>(trace: &RgbTrace<T>) -> Result<[Vec<T>; 3]> {
    let mut out: [Vec<T>; 3] = Default::default();
    for (c, ch) in trace.channels().into_iter().enumerate() {
        let m = mean(ch);
        if m == T::zero() || !m.is_finite() {
            return Err(Error::DegenerateInput(format!("channel {c} has mean {m}")));
        }
        out[c] = ch.iter().map(|&v| v / m).collect();
    }
    Ok(out)
}

/// Standardise a dimensionless signal, treating a spread below the rounding
/// floor as no signal at all.
fn standardize_dimensionless<T: Real>(x: &[T]) -> Option<Vec<T>> {
    let sd = std_pop(x);
    if !(sd > T::numerical_floor()) || !sd.is_finite() {
        return None;
    }
    let m = mean(x);
    Some(x.iter().map(|&v| (v - m) / sd).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_roundtrip_in_enum_order() {
        let names: Vec<_> = Method::ALL.iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["green", "ica", "chrom", "pos", "pbv", "lgi"]);
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("ssr".parse::<Method>().is_err());
        let mut sorted = vec![Method::Lgi, Method::Green, Method::Pos];
        sorted.sort();
        assert_eq!(sorted, [Method::Green, Method::Pos, Method::Lgi]);
    }
}
