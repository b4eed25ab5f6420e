use super::{green_bvp, jade_separate, require_len, BvpSignal, Method, MethodFlag, MethodOptions};
use crate::dsp::{periodogram, DEFAULT_PAD_FACTOR};
use crate::error::{Error, Result};
use crate::ingestion::{standardize, RgbTrace};
use crate::scalar::{pearson, Real};

/// Independent component analysis on the standardised channels.
///
/// The source with the largest periodogram peak inside the heart-rate band is
/// kept, standardised, and oriented to correlate non-negatively with green.
/// A rank-deficient trace falls back to the green method.
pub fn ica_bvp<T: Real>(trace: &RgbTrace<T>, fs: T, opts: &MethodOptions) -> Result<BvpSignal<T>> {
    let needed = (T::lit(5.0) * fs).ceil().to_usize().unwrap_or(usize::MAX);
    require_len("ica", trace.len(), needed)?;
    let x = trace.channels().map(standardize);
    let separated = match jade_separate(&x) {
        Ok(out) => out,
        Err(Error::RankDeficient { .. }) => {
            let mut g = green_bvp(trace)?;
            g.method = Method::Ica;
            return Ok(g.flagged(MethodFlag::RankDeficient));
        }
        Err(e) => return Err(e),
    };
    let (low, high) = (T::lit(opts.filter.low_hz), T::lit(opts.filter.high_hz));
    let pad = opts.pad_factor.unwrap_or(DEFAULT_PAD_FACTOR);
    let mut best: Option<(usize, T)> = None;
    for (i, src) in separated.sources.iter().enumerate() {
        let spec = periodogram(src, fs, pad)?;
        let Some(k) = spec.peak_in_band(low, high) else { continue };
        if best.is_none_or(|(_, p)| spec.power[k] > p) {
            best = Some((i, spec.power[k]));
        }
    }
    let (idx, _) = best.ok_or(Error::EmptyBand)?;
    let mut out = standardize(&separated.sources[idx]);
    if pearson(&out, &trace.g).is_some_and(|r| r < T::zero()) {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(BvpSignal::new(out, fs, Method::Ica))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    #[test]
    fn selects_the_in_band_sine() {
        let n = 600;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let sine: Vec<f64> = (0..n).map(|t| (2.0 * PI * 1.2 * t as f64 / 30.0).sin()).collect();
        let tr = RgbTrace::new(
            (0..n).map(|_| 0.5 + noise.sample(&mut rng)).collect(),
            sine.iter().map(|s| 0.5 + 0.01 * s).collect(),
            (0..n).map(|_| 0.4 + noise.sample(&mut rng)).collect(),
            30.0,
        )
        .unwrap();
        let out = ica_bvp(&tr, 30.0, &MethodOptions::default()).unwrap();
        let r = pearson(&out.samples, &sine).unwrap();
        assert!(r >= 0.99, "corr {r}");
    }

    #[test]
    fn mixed_sine_is_unmixed_and_sign_fixed() {
        let n = 900;
        let sine: Vec<f64> = (0..n).map(|t| (2.0 * PI * 1.3 * t as f64 / 30.0).sin()).collect();
        let saw: Vec<f64> = (0..n).map(|t| ((t as f64 * 0.3 / 30.0) % 1.0) - 0.5).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<f64> = (0..n).map(|_| rand_distr::Uniform::new(-0.5, 0.5).unwrap().sample(&mut rng)).collect();
        let mix = [[0.8, 0.5, 0.2], [0.6, -0.7, 0.3], [0.1, 0.4, 0.9]];
        let ch = |c: usize| (0..n).map(|t| 0.5 + 0.01 * (mix[c][0] * sine[t] + mix[c][1] * saw[t] + mix[c][2] * noise[t])).collect::<Vec<_>>();
        let tr = RgbTrace::new(ch(0), ch(1), ch(2), 30.0).unwrap();
        let out = ica_bvp(&tr, 30.0, &MethodOptions::default()).unwrap();
        assert!(out.flags.is_empty());
        let r = pearson(&out.samples, &sine).unwrap();
        assert!(r.abs() >= 0.95, "corr {r}");
        assert!(pearson(&out.samples, &tr.g).unwrap() >= 0.0);
    }

    #[test]
    fn identical_channels_fall_back_to_green() {
        let s: Vec<f64> = (0..300).map(|t| 0.5 + 0.01 * (t as f64 * 0.25).sin()).collect();
        let tr = RgbTrace::new(s.clone(), s.clone(), s, 30.0).unwrap();
        let out = ica_bvp(&tr, 30.0, &MethodOptions::default()).unwrap();
        assert_eq!(out.flags, vec![MethodFlag::RankDeficient]);
        assert_eq!(out.method, Method::Ica);
        assert_eq!(out.samples, green_bvp(&tr).unwrap().samples);
    }

    #[test]
    fn needs_five_seconds() {
        let tr = RgbTrace::new(vec![0.5; 149], vec![0.5; 149], vec![0.5; 149], 30.0).unwrap();
        assert!(matches!(ica_bvp(&tr, 30.0, &MethodOptions::default()), Err(Error::TooShort { .. })));
    }
}
