use super::{mean_normalized, require_len, standardize_dimensionless, BvpSignal, Method, MethodFlag};
use crate::dsp::{design_bandpass, filtfilt, FilterConfig};
use crate::error::Result;
use crate::ingestion::RgbTrace;
use crate::scalar::{std_pop, Real};

/// Chrominance method: bandpassed `X = 3R − 2G` and `Y = 1.5R + G − 1.5B`
/// on mean-normalised channels, combined as `X − (σX/σY)·Y`.
pub fn chrom_bvp<T: Real>(trace: &RgbTrace<T>, fs: T, band: &FilterConfig) -> Result<BvpSignal<T>> {
    let needed = (T::lit(3.0) * fs).ceil().to_usize().unwrap_or(usize::MAX);
    require_len("chrom", trace.len(), needed)?;
    let [rn, gn, bn] = mean_normalized(trace)?;
    let (three, two, one_half) = (T::lit(3.0), T::lit(2.0), T::lit(1.5));
    let x: Vec<T> = rn.iter().zip(&gn).map(|(&r, &g)| three * r - two * g).collect();
    let y: Vec<T> = rn
        .iter()
        .zip(&gn)
        .zip(&bn)
        .map(|((&r, &g), &b)| one_half * r + g - one_half * b)
        .collect();

    let filter = design_bandpass(band.order, T::lit(band.low_hz), T::lit(band.high_hz), fs)?;
    let xf = filtfilt(&filter, &x)?;
    let yf = filtfilt(&filter, &y)?;
    let zeros = || BvpSignal::new(vec![T::zero(); trace.len()], fs, Method::Chrom);

    let sy = std_pop(&yf);
    if !(sy > T::numerical_floor()) {
        return Ok(zeros().flagged(MethodFlag::ZeroDenominator));
    }
    let alpha = std_pop(&xf) / sy;
    let s: Vec<T> = xf.iter().zip(&yf).map(|(&a, &b)| a - alpha * b).collect();
    Ok(match standardize_dimensionless(&s) {
        Some(out) => BvpSignal::new(out, fs, Method::Chrom),
        None => zeros(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::pearson;
    use std::f64::consts::PI;

    fn luminance_trace(n: usize) -> RgbTrace<f64> {
        let s: Vec<f64> = (0..n).map(|i| 0.5 + 0.05 * (2.0 * PI * 1.3 * i as f64 / 30.0).sin()).collect();
        RgbTrace::new(s.clone(), s.clone(), s, 30.0).unwrap()
    }

    #[test]
    fn pure_luminance_is_cancelled() {
        let out = chrom_bvp(&luminance_trace(300), 30.0, &FilterConfig::default()).unwrap();
        let rms = (out.samples.iter().map(|v| v * v).sum::<f64>() / 300.0).sqrt();
        assert!(rms < 1e-6 * 0.05, "rms {rms}");
    }

    #[test]
    fn constant_trace_gives_zeros() {
        let tr = RgbTrace::new(vec![0.6; 120], vec![0.4; 120], vec![0.3; 120], 30.0).unwrap();
        let out = chrom_bvp(&tr, 30.0, &FilterConfig::default()).unwrap();
        assert!(out.samples.iter().all(|&v| v == 0.0));
        assert_eq!(out.flags, vec![MethodFlag::ZeroDenominator]);
    }

    #[test]
    fn zero_mean_channel_is_degenerate() {
        let tr = RgbTrace::new(vec![0.0; 120], vec![0.4; 120], vec![0.3; 120], 30.0).unwrap();
        assert!(chrom_bvp(&tr, 30.0, &FilterConfig::default()).is_err());
    }

    #[test]
    fn skin_tone_pulse_is_recovered() {
        let sig = [0.33, 0.77, 0.53];
        let base = [0.6, 0.45, 0.35];
        let pulse: Vec<f64> = (0..600).map(|i| (2.0 * PI * 1.2 * i as f64 / 30.0).sin()).collect();
        let ch = |c: usize| pulse.iter().map(|p| base[c] * (1.0 + 0.005 * sig[c] * p)).collect::<Vec<_>>();
        let tr = RgbTrace::new(ch(0), ch(1), ch(2), 30.0).unwrap();
        let out = chrom_bvp(&tr, 30.0, &FilterConfig::default()).unwrap();
        let r = pearson(&out.samples[60..540], &pulse[60..540]).unwrap();
        assert!(r.abs() >= 0.95, "corr {r}");
    }

    #[test]
    fn needs_three_seconds() {
        let tr = luminance_trace(89);
        assert!(chrom_bvp(&tr, 30.0, &FilterConfig::default()).is_err());
    }
}
