use crate::error::{Error, Result};
use crate::linalg::Pentadiagonal;
use crate::scalar::Real;

pub const DEFAULT_LAMBDA: f64 = 100.0;

/// Smoothness-priors detrending: subtract the trend solving
/// `(I + λ²·D₂ᵀD₂)·trend = x`, where `D₂` is the second-difference operator.
pub fn detrend<T: Real>(x: &[T], lambda: T) -> Result<Vec<T>> {
    if x.len() < 3 {
        return Err(Error::TooShort { what: "detrend", needed: 3, got: x.len() });
    }
    let system = Pentadiagonal::smoothness_prior(x.len(), lambda * lambda);
    let trend = system
        .solve(x)
        .ok_or_else(|| Error::DegenerateInput("detrend system is not positive definite".into()))?;
    Ok(x.iter().zip(trend).map(|(&v, t)| v - t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{mean, std_pop};

    /// Dense reference solve of the same normal equations.
    fn dense_detrend(x: &[f64], lambda: f64) -> Vec<f64> {
        let n = x.len();
        let mut d2 = nalgebra::DMatrix::<f64>::zeros(n - 2, n);
        for r in 0..n - 2 {
            d2[(r, r)] = 1.0;
            d2[(r, r + 1)] = -2.0;
            d2[(r, r + 2)] = 1.0;
        }
        let a = nalgebra::DMatrix::<f64>::identity(n, n) + d2.transpose() * &d2 * (lambda * lambda);
        let trend = a.lu().solve(&nalgebra::DVector::from_column_slice(x)).unwrap();
        x.iter().zip(trend.iter()).map(|(v, t)| v - t).collect()
    }

    #[test]
    fn matches_dense_solver() {
        let x: Vec<f64> = (0..120).map(|i| (i as f64 * 0.21).sin() + 0.01 * i as f64).collect();
        let fast = detrend(&x, 10.0).unwrap();
        let slow = dense_detrend(&x, 10.0);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn linear_ramp_is_removed() {
        let x: Vec<f64> = (0..300).map(|i| 0.5 + 0.01 * i as f64).collect();
        let range = 0.01 * 299.0;
        let y = detrend(&x, DEFAULT_LAMBDA).unwrap();
        let worst = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 0.05 * range, "residual {worst}");
    }

    #[test]
    fn zero_stays_zero() {
        assert_eq!(detrend(&[0.0f64; 50], DEFAULT_LAMBDA).unwrap(), vec![0.0; 50]);
    }

    #[test]
    fn output_has_zero_mean() {
        let x: Vec<f64> = (0..400).map(|i| (i as f64 * 0.05).cos() * 3.0 + (i as f64).sqrt()).collect();
        let y = detrend(&x, DEFAULT_LAMBDA).unwrap();
        assert!(mean(&y).abs() <= 1e-6 * std_pop(&x));
    }

    #[test]
    fn in_band_tone_is_preserved() {
        let fs = 30.0;
        let x: Vec<f64> = (0..900).map(|i| (2.0 * std::f64::consts::PI * 1.5 * i as f64 / fs).sin()).collect();
        let y = detrend(&x, DEFAULT_LAMBDA).unwrap();
        // amplitude by projection onto the tone over the interior
        let (num, den) = x[100..800]
            .iter()
            .zip(&y[100..800])
            .fold((0.0, 0.0), |(n, d), (a, b)| (n + a * b, d + a * a));
        assert!(num / den >= 0.95, "retained {}", num / den);
    }

    #[test]
    fn too_short() {
        assert!(matches!(detrend(&[1.0f64, 2.0], 10.0), Err(Error::TooShort { .. })));
    }
}
