//! Butterworth bandpass design (bilinear transform with prewarping) and
//! zero-phase application as a cascade of second-order sections.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Second-order section with `a0` normalised to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad<T> {
    pub b0: T,
    pub b1: T,
    pub b2: T,
    pub a1: T,
    pub a2: T,
}

impl<T: Real> Biquad<T> {
    fn response(&self, z_inv: Complex<T>) -> Complex<T> {
        let z2 = z_inv * z_inv;
        let num = Complex::from(self.b0) + z_inv * self.b1 + z2 * self.b2;
        let den = Complex::from(T::one()) + z_inv * self.a1 + z2 * self.a2;
        num / den
    }

    /// Roots of `z² + a1·z + a2`.
    pub fn poles(&self) -> [Complex<T>; 2] {
        let two = T::lit(2.0);
        let disc = Complex::from(self.a1 * self.a1 - T::lit(4.0) * self.a2).sqrt();
        let a1 = Complex::from(-self.a1);
        [(a1 + disc) / two, (a1 - disc) / two]
    }

    /// Steady-state transposed direct-form II state for a unit step input.
    fn step_state(&self) -> [T; 2] {
        let gain = (self.b0 + self.b1 + self.b2) / (T::one() + self.a1 + self.a2);
        let z2 = self.b2 - self.a2 * gain;
        let z1 = self.b1 - self.a1 * gain + z2;
        [z1, z2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassDesign<T> {
    pub order: usize,
    pub low_hz: T,
    pub high_hz: T,
    pub fs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiquadCascade<T> {
    pub sections: Vec<Biquad<T>>,
    pub design: BandpassDesign<T>,
}

/// Digital Butterworth bandpass: an analog prototype of `order` poles is
/// shifted to the band (giving `2·order` poles), then mapped through the
/// bilinear transform with both edges prewarped.
pub fn design_bandpass<T: Real>(order: usize, low_hz: T, high_hz: T, fs: T) -> Result<BiquadCascade<T>> {
    let invalid = || Error::InvalidBand { low_hz: low_hz.as_f64(), high_hz: high_hz.as_f64(), fs: fs.as_f64() };
    let two = T::lit(2.0);
    if order == 0 || !(T::zero() < low_hz && low_hz < high_hz && high_hz < fs / two) {
        return Err(invalid());
    }
    let pi = T::PI();
    let k = two * fs;
    let w_lo = k * (pi * low_hz / fs).tan();
    let w_hi = k * (pi * high_hz / fs).tan();
    let bw = w_hi - w_lo;
    let w0_sq = w_lo * w_hi;

    let mut poles = Vec::with_capacity(2 * order);
    for i in 0..order {
        let theta = pi * T::from_usize_lossy(2 * i + 1 + order) / T::from_usize_lossy(2 * order);
        let proto = Complex::from_polar(T::one(), theta);
        let a = proto * (bw / two);
        let d = (a * a - w0_sq).sqrt();
        for s in [a + d, a - d] {
            poles.push((Complex::from(k) + s) / (Complex::from(k) - s));
        }
    }

    let tiny = T::epsilon().sqrt();
    let mut complex: Vec<Complex<T>> = poles.iter().copied().filter(|p| p.im > tiny).collect();
    complex.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
    let mut real: Vec<T> = poles.iter().filter(|p| p.im.abs() <= tiny).map(|p| p.re).collect();
    real.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut sections: Vec<Biquad<T>> = complex
        .iter()
        .map(|p| Biquad { b0: T::one(), b1: T::zero(), b2: -T::one(), a1: -two * p.re, a2: p.norm_sqr() })
        .collect();
    for pair in real.chunks(2) {
        let (p, q) = (pair[0], *pair.get(1).unwrap_or(&T::zero()));
        sections.push(Biquad { b0: T::one(), b1: T::zero(), b2: -T::one(), a1: -(p + q), a2: p * q });
    }
    if sections.len() != order {
        return Err(invalid());
    }

    // Unit gain at the prewarped centre, where the analog response is exactly 1.
    let center = two * (w0_sq.sqrt() / k).atan();
    let z_inv = Complex::from_polar(T::one(), -center);
    for s in sections.iter_mut() {
        let g = T::one() / s.response(z_inv).norm();
        s.b0 = s.b0 * g;
        s.b2 = s.b2 * g;
    }
    let total = sections.iter().fold(Complex::from(T::one()), |acc, s| acc * s.response(z_inv));
    if total.re < T::zero() {
        sections[0].b0 = -sections[0].b0;
        sections[0].b2 = -sections[0].b2;
    }
    Ok(BiquadCascade { sections, design: BandpassDesign { order, low_hz, high_hz, fs } })
}

impl<T: Real> BiquadCascade<T> {
    /// Complex response at `freq_hz`.
    pub fn response(&self, freq_hz: T) -> Complex<T> {
        let w = T::lit(2.0) * T::PI() * freq_hz / self.design.fs;
        let z_inv = Complex::from_polar(T::one(), -w);
        self.sections.iter().fold(Complex::from(T::one()), |acc, s| acc * s.response(z_inv))
    }

    pub fn magnitude(&self, freq_hz: T) -> T {
        self.response(freq_hz).norm()
    }

    pub fn poles(&self) -> Vec<Complex<T>> {
        self.sections.iter().flat_map(|s| s.poles()).collect()
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < T::one())
    }

    /// Length of the odd-reflection padding used by [`filtfilt`].
    pub fn pad_len(&self) -> usize {
        3 * (2 * self.design.order)
    }

    /// Causal pass whose initial state is the step steady state scaled by the
    /// first input sample, so a signal starting at a constant level starts
    /// without a transient.
    fn run(&self, x: &mut [T]) {
        let x0 = x.first().copied().unwrap_or(T::zero());
        let mut level = x0;
        for s in &self.sections {
            let [z1_ss, z2_ss] = s.step_state();
            let (mut z1, mut z2) = (z1_ss * level, z2_ss * level);
            level = level * (s.b0 + s.b1 + s.b2) / (T::one() + s.a1 + s.a2);
            for v in x.iter_mut() {
                let input = *v;
                let y = s.b0 * input + z1;
                z1 = s.b1 * input - s.a1 * y + z2;
                z2 = s.b2 * input - s.a2 * y;
                *v = y;
            }
        }
    }
}

/// Forward-backward filtering with odd-reflection edge padding; zero net phase.
pub fn filtfilt<T: Real>(filter: &BiquadCascade<T>, x: &[T]) -> Result<Vec<T>> {
    let pad = filter.pad_len();
    let n = x.len();
    if n <= pad {
        return Err(Error::TooShort { what: "filtfilt", needed: pad + 1, got: n });
    }
    let two = T::lit(2.0);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| two * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| two * x[n - 1] - x[n - 1 - i]));
    filter.run(&mut ext);
    ext.reverse();
    filter.run(&mut ext);
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}

type FilterKey = (usize, u64, u64, u64);

/// Designed filters keyed by `(order, low, high, fs)`; read-mostly and shareable.
#[derive(Debug, Default)]
pub struct FilterCache {
    inner: RwLock<HashMap<FilterKey, Arc<BiquadCascade<f64>>>>,
}

impl FilterCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Result<Arc<BiquadCascade<f64>>> {
        let key = (order, low_hz.to_bits(), high_hz.to_bits(), fs.to_bits());
        if let Some(f) = self.inner.read().unwrap().get(&key) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(design_bandpass(order, low_hz, high_hz, fs)?);
        self.inner.write().unwrap().entry(key).or_insert_with(|| Arc::clone(&f));
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
