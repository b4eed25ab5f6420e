use std::fmt;
use std::str::FromStr;

use super::{mean_normalized, require_len, standardize_dimensionless, BvpSignal, Method, MethodFlag};
use crate::error::{Error, Result};
use crate::ingestion::RgbTrace;
use crate::linalg::{gram3, solve3, sym_eigen3};
use crate::scalar::{std_pop, Real};

/// Relative R, G, B amplitudes of the pulse-induced colour change, unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbvSignature([f64; 3]);

impl PbvSignature {
    /// Normalise a non-negative, non-zero vector to unit length.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(Error::ConfigInvalid(format!("PBV signature components must be non-negative: {v:?}")));
        }
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ConfigInvalid("PBV signature must be non-zero".into()));
        }
        Ok(Self(v.map(|c| c / norm)))
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }
}

impl FromStr for PbvSignature {
    type Err = Error;

    /// Three comma-separated reals, e.g. `0.33,0.77,0.53`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::ConfigInvalid(format!("PBV signature {s:?}: {e}")))?;
        let v: [f64; 3] = parts
            .try_into()
            .map_err(|_| Error::ConfigInvalid(format!("PBV signature {s:?} needs three components")))?;
        Self::new(v)
    }
}

impl fmt::Display for PbvSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Blood-volume-pulse signature method: solve `Q·w = p` with `Q = Cn·Cnᵀ` and
/// project the zero-mean normalised channels onto `w`.
///
/// Without an explicit signature, `p` is the per-channel standard deviation of
/// the normalised trace. A covariance with condition number above 1e12 is
/// regularised by adding `1e-9·trace(Q)/3` to its diagonal.
pub fn pbv_bvp<T: Real>(trace: &RgbTrace<T>, signature: Option<&PbvSignature>) -> Result<BvpSignal<T>> {
    let n = trace.len();
    require_len("pbv", n, 3)?;
    let fs = trace.fps;
    let cn = mean_normalized(trace)?.map(|row| row.into_iter().map(|v| v - T::one()).collect::<Vec<T>>());
    let zeros = || BvpSignal::new(vec![T::zero(); n], fs, Method::Pbv);

    let p: [T; 3] = match signature {
        Some(sig) => sig.vector().map(T::lit),
        None => {
            let sd: [T; 3] = std::array::from_fn(|c| std_pop(&cn[c]));
            let norm = sd.iter().map(|&v| v * v).sum::<T>().sqrt();
            if !(norm > T::numerical_floor()) {
                return Ok(zeros().flagged(MethodFlag::SingularCovariance));
            }
            sd.map(|v| v / norm)
        }
    };

    let mut q = gram3(&cn, T::one());
    let (vals, _) = sym_eigen3(&q);
    let n_t = T::from_usize_lossy(n);
    if !(vals[0] > T::numerical_floor() * T::numerical_floor() * n_t) {
        return Ok(zeros().flagged(MethodFlag::SingularCovariance));
    }
    let max_cond = T::lit(1e12).min(T::one() / T::numerical_floor());
    let mut flags = Vec::new();
    if !(vals[2] * max_cond >= vals[0]) {
        let ridge = T::lit(1e-9).max(T::epsilon()) * (q[0][0] + q[1][1] + q[2][2]) / T::lit(3.0);
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = row[i] + ridge;
        }
        flags.push(MethodFlag::SingularCovariance);
    }
    let w = solve3(&q, &p).ok_or_else(|| Error::DegenerateInput("PBV covariance is singular".into()))?;
    let w_norm = w.iter().map(|&v| v * v).sum::<T>().sqrt();
    if !(w_norm > T::zero()) || !w_norm.is_finite() {
        return Ok(zeros().flagged(MethodFlag::SingularCovariance));
    }
    let w = w.map(|v| v / w_norm);
    let projected: Vec<T> = (0..n).map(|t| w[0] * cn[0][t] + w[1] * cn[1][t] + w[2] * cn[2][t]).collect();
    let mut out = match standardize_dimensionless(&projected) {
        Some(s) => BvpSignal::new(s, fs, Method::Pbv),
        None => zeros(),
    };
    out.flags = flags;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::pearson;
    use std::f64::consts::PI;

    const SIG: [f64; 3] = [0.33, 0.77, 0.53];
    const BASE: [f64; 3] = [0.6, 0.45, 0.35];

    fn pulse(n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * 1.1 * i as f64 / 30.0).sin()).collect()
    }

    #[test]
    fn signature_parsing_normalises() {
        let s: PbvSignature = "3, 0, 4".parse().unwrap();
        assert_eq!(s.vector(), [0.6, 0.0, 0.8]);
        let norm: f64 = PbvSignature::new(SIG).unwrap().vector().iter().map(|c| c * c).sum();
        assert!((norm - 1.0).abs() < 1e-9);
        assert!("1,2".parse::<PbvSignature>().is_err());
        assert!("1,-2,3".parse::<PbvSignature>().is_err());
        assert!("0,0,0".parse::<PbvSignature>().is_err());
    }

    #[test]
    fn rank_one_input_uses_ridge_and_recovers_pulse() {
        let s = pulse(400);
        let ch = |c: usize| s.iter().map(|p| BASE[c] * (1.0 + 0.004 * SIG[c] * p)).collect::<Vec<_>>();
        let tr = RgbTrace::new(ch(0), ch(1), ch(2), 30.0).unwrap();
        let out = pbv_bvp(&tr, None).unwrap();
        assert!(out.flags.contains(&MethodFlag::SingularCovariance));
        let r = pearson(&out.samples, &s).unwrap();
        assert!(r.abs() >= 0.999, "corr {r}");
    }

    #[test]
    fn constant_trace_is_singular_and_zero() {
        let tr = RgbTrace::new(vec![0.5; 60], vec![0.4; 60], vec![0.3; 60], 30.0).unwrap();
        let out = pbv_bvp(&tr, None).unwrap();
        assert!(out.samples.iter().all(|&v| v == 0.0));
        assert_eq!(out.flags, vec![MethodFlag::SingularCovariance]);
    }

    #[test]
    fn common_mode_distortion_is_suppressed() {
        let n = 600;
        let s = pulse(n);
        let m: Vec<f64> = (0..n).map(|i| (2.0 * PI * 0.37 * i as f64 / 30.0 + 0.4).sin()).collect();
        let ch = |c: usize| {
            (0..n).map(|t| BASE[c] * (1.0 + 0.003 * SIG[c] * s[t] + 0.03 * m[t])).collect::<Vec<_>>()
        };
        let tr = RgbTrace::new(ch(0), ch(1), ch(2), 30.0).unwrap();
        let sig = PbvSignature::new(SIG).unwrap();
        let out = pbv_bvp(&tr, Some(&sig)).unwrap();
        let with_pulse = pearson(&out.samples, &s).unwrap().abs();
        let with_distortion = pearson(&out.samples, &m).unwrap().abs();
        assert!(with_pulse >= 0.9, "pulse corr {with_pulse}");
        assert!(with_distortion < 0.2, "distortion corr {with_distortion}");
    }
}
