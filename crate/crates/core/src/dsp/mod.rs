//! Postprocessing shared by predictions and labels: detrending, zero-phase
//! Butterworth bandpass, periodogram and spectral heart-rate extraction.

mod detrend;
mod filter;
mod hr;
mod spectrum;

pub use detrend::{detrend, DEFAULT_LAMBDA};
pub use filter::{design_bandpass, filtfilt, BandpassDesign, Biquad, BiquadCascade, FilterCache};
pub use hr::{estimate_hr, HrEstimate, HrSource};
pub use spectrum::{periodogram, Spectrum, DEFAULT_PAD_FACTOR};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::Method;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    pub order: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { low_hz: 0.75, high_hz: 2.5, order: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetrendConfig {
    pub enabled: bool,
    pub lambda: f64,
}

impl Default for DetrendConfig {
    fn default() -> Self {
        Self { enabled: true, lambda: DEFAULT_LAMBDA }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HrConfig {
    pub pad_factor: usize,
}

impl Default for HrConfig {
    fn default() -> Self {
        Self { pad_factor: DEFAULT_PAD_FACTOR }
    }
}

/// Postprocessing settings; the heart-rate search band equals the filter band.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspConfig {
    pub filter: FilterConfig,
    pub detrend: DetrendConfig,
    pub hr: HrConfig,
}

impl DspConfig {
    pub fn validate(&self) -> Result<()> {
        let f = &self.filter;
        if f.order == 0 || !(f.low_hz > 0.0 && f.low_hz < f.high_hz) {
            return Err(Error::ConfigInvalid(format!(
                "filter band {}-{} Hz with order {}",
                f.low_hz, f.high_hz, f.order
            )));
        }
        if !(self.detrend.lambda > 0.0 && self.detrend.lambda.is_finite()) {
            return Err(Error::ConfigInvalid(format!("detrend.lambda = {}", self.detrend.lambda)));
        }
        if self.hr.pad_factor == 0 {
            return Err(Error::ConfigInvalid("hr.pad_factor must be at least 1".into()));
        }
        Ok(())
    }

    pub fn bandpass<T: Real>(&self, fs: T) -> Result<BiquadCascade<T>> {
        design_bandpass(self.filter.order, T::lit(self.filter.low_hz), T::lit(self.filter.high_hz), fs)
    }

    /// Detrend (if enabled), bandpass and return the filtered waveform.
    pub fn condition<T: Real>(&self, x: &[T], fs: T) -> Result<Vec<T>> {
        let detrended;
        let input = if self.detrend.enabled {
            detrended = detrend(x, T::lit(self.detrend.lambda))?;
            &detrended[..]
        } else {
            x
        };
        filtfilt(&self.bandpass(fs)?, input)
    }

    /// Heart rate of a waveform. Predictions and labels both go through here.
    pub fn heart_rate<T: Real>(&self, x: &[T], fs: T, method: Option<Method>, source: HrSource) -> Result<HrEstimate> {
        let filtered = self.condition(x, fs)?;
        let mut hr = estimate_hr(
            &filtered,
            fs,
            T::lit(self.filter.low_hz),
            T::lit(self.filter.high_hz),
            self.hr.pad_factor,
        )?;
        hr.method = method;
        hr.source = source;
        Ok(hr)
    }
}
