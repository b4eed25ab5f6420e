use serde::{Deserialize, Serialize};

use super::spectrum::periodogram;
use crate::error::{Error, Result};
use crate::methods::Method;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HrSource {
    Prediction,
    Label,
}

/// Heart rate in beats per minute, always inside the search band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrEstimate {
    pub bpm: f64,
    pub band_low_bpm: f64,
    pub band_high_bpm: f64,
    pub method: Option<Method>,
    pub source: HrSource,
}

/// Spectral peak of `x` inside `[low_hz, high_hz]`, in beats per minute.
///
/// Needs at least eight seconds of signal so the padded periodogram resolves
/// the peak to better than half a beat per minute.
pub fn estimate_hr<T: Real>(x: &[T], fs: T, low_hz: T, high_hz: T, pad_factor: usize) -> Result<HrEstimate> {
    let needed = (T::lit(8.0) * fs).ceil().to_usize().unwrap_or(usize::MAX);
    if x.len() < needed {
        return Err(Error::TooShort { what: "estimate_hr", needed, got: x.len() });
    }
    let spectrum = periodogram(x, fs, pad_factor)?;
    let k = spectrum.peak_in_band(low_hz, high_hz).ok_or(Error::EmptyBand)?;
    Ok(HrEstimate {
        bpm: 60.0 * spectrum.freqs[k].as_f64(),
        band_low_bpm: 60.0 * low_hz.as_f64(),
        band_high_bpm: 60.0 * high_hz.as_f64(),
        method: None,
        source: HrSource::Prediction,
    })
}
