use super::{require_len, BvpSignal, Method};
use crate::error::Result;
use crate::ingestion::{standardize, RgbTrace};
use crate::scalar::Real;

/// The standardised green channel.
pub fn green_bvp<T: Real>(trace: &RgbTrace<T>) -> Result<BvpSignal<T>> {
    require_len("green", trace.len(), 2)?;
    Ok(BvpSignal::new(standardize(&trace.g), trace.fps, Method::Green))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::estimate_hr;

    fn trace(g: Vec<f64>, r: f64, b: f64) -> RgbTrace<f64> {
        let n = g.len();
        RgbTrace::new(vec![r; n], g, vec![b; n], 30.0).unwrap()
    }

    #[test]
    fn sine_in_green_is_recovered() {
        let g: Vec<f64> = (0..600).map(|i| 0.5 + 0.01 * (2.0 * std::f64::consts::PI * 1.5 * i as f64 / 30.0).sin()).collect();
        let out = green_bvp(&trace(g, 0.3, 0.2)).unwrap();
        let hr = estimate_hr(&out.samples, 30.0, 0.75, 2.5, 8).unwrap();
        assert!((hr.bpm - 90.0).abs() <= 0.5);
    }

    #[test]
    fn constant_green_gives_zeros() {
        let out = green_bvp(&trace(vec![0.41; 50], 0.3, 0.2)).unwrap();
        assert!(out.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ignores_red_and_blue() {
        let g: Vec<f64> = (0..40).map(|i| 0.4 + 0.001 * (i % 5) as f64).collect();
        let a = green_bvp(&trace(g.clone(), 0.3, 0.2)).unwrap();
        let mut other = trace(g, 0.0, 0.0);
        other.r.iter_mut().enumerate().for_each(|(i, v)| *v = (i as f64 * 0.1).sin().abs());
        let b = green_bvp(&other).unwrap();
        assert_eq!(a.samples, b.samples);
    }
}
