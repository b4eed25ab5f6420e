use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::{mean, Real};

/// Zero-padding factor applied before the FFT.
pub const DEFAULT_PAD_FACTOR: usize = 8;

/// One-sided power spectrum, `power[k] = |X[k]|²` at `freqs[k] = k·fs/nfft`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub freqs: Vec<T>,
    pub power: Vec<T>,
    pub nfft: usize,
    pub fs: T,
}

impl<T: Real> Spectrum<T> {
    /// Bin spacing in Hz.
    pub fn resolution(&self) -> T {
        self.fs / T::from_usize_lossy(self.nfft)
    }

    /// Signal energy `Σ x²` recovered from the one-sided spectrum.
    pub fn total_power(&self) -> T {
        let last = self.power.len() - 1;
        let two = T::lit(2.0);
        let interior: T = self.power[1..last].iter().copied().sum();
        (self.power[0] + two * interior + self.power[last]) / T::from_usize_lossy(self.nfft)
    }

    /// Index of the largest power among bins with `low ≤ f ≤ high` (first on ties).
    pub fn peak_in_band(&self, low_hz: T, high_hz: T) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, (&f, &p)) in self.freqs.iter().zip(&self.power).enumerate() {
            if f < low_hz || f > high_hz {
                continue;
            }
            if best.is_none_or(|b| p > self.power[b]) {
                best = Some(k);
            }
        }
        best
    }
}

/// Periodogram of the mean-removed signal zero-padded to the next power of two
/// at least `pad_factor·N`.
pub fn periodogram<T: Real>(x: &[T], fs: T, pad_factor: usize) -> Result<Spectrum<T>> {
    if x.len() < 8 {
        return Err(Error::TooShort { what: "periodogram", needed: 8, got: x.len() });
    }
    let nfft = (pad_factor.max(1) * x.len()).next_power_of_two();
    let m = mean(x);
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::from(v - m)).collect();
    buf.resize(nfft, Complex::from(T::zero()));
    FftPlanner::<T>::new().plan_fft_forward(nfft).process(&mut buf);
    let half = nfft / 2;
    let df = fs / T::from_usize_lossy(nfft);
    Ok(Spectrum {
        freqs: (0..=half).map(|k| T::from_usize_lossy(k) * df).collect(),
        power: buf[..=half].iter().map(|c| c.norm_sqr()).collect(),
        nfft,
        fs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_tone_peak() {
        let fs = 30.0;
        let x: Vec<f64> = (0..900).map(|i| (2.0 * std::f64::consts::PI * 1.2 * i as f64 / fs).sin()).collect();
        let s = periodogram(&x, fs, DEFAULT_PAD_FACTOR).unwrap();
        assert_eq!(s.nfft, 8192);
        let k = s.peak_in_band(0.0, fs / 2.0).unwrap();
        assert!((s.freqs[k] - 1.2).abs() <= s.resolution());
    }

    #[test]
    fn parseval_on_white_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..1000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = mean(&x);
        let n_var: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
        let s = periodogram(&x, 30.0, DEFAULT_PAD_FACTOR).unwrap();
        let rel = (s.total_power() - n_var).abs() / n_var;
        assert!(rel < 0.05, "relative error {rel}");
    }

    #[test]
    fn constant_has_no_power() {
        let s = periodogram(&[0.7f64; 64], 30.0, DEFAULT_PAD_FACTOR).unwrap();
        assert!(s.power.iter().all(|&p| p < 1e-24));
    }

    #[test]
    fn frequency_grid() {
        let s = periodogram(&[1.0f32, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0], 10.0, 2).unwrap();
        assert_eq!(s.nfft, 32);
        for (k, f) in s.freqs.iter().enumerate() {
            assert!((f - k as f32 * 10.0 / 32.0).abs() < 1e-6);
        }
        assert!(s.power.iter().all(|p| p.is_finite() && *p >= 0.0));
    }

    #[test]
    fn too_short() {
        assert!(matches!(periodogram(&[1.0f64; 7], 30.0, 8), Err(Error::TooShort { .. })));
    }
}
