use super::{mean_normalized, require_len, standardize_dimensionless, BvpSignal, Method};
use crate::error::Result;
use crate::ingestion::RgbTrace;
use crate::linalg::{gram3, sym_eigen3, Mat3};
use crate::scalar::Real;

/// Rank-one projector `P = I − u·uᵀ` removing the dominant direction `u` of the
/// mean-normalised colour matrix, together with `u` and that matrix.
///
/// `u` is the first left singular vector, taken as the leading eigenvector of
/// the 3×3 Gram matrix.
pub fn lgi_projector<T: Real>(trace: &RgbTrace<T>) -> Result<(Mat3<T>, [T; 3], [Vec<T>; 3])> {
    let cn = mean_normalized(trace)?;
    let gram = gram3(&cn, T::one());
    let (_, vecs) = sym_eigen3(&gram);
    let u = [vecs[0][0], vecs[1][0], vecs[2][0]];
    let mut p = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { T::one() } else { T::zero() };
            p[i][j] = delta - u[i] * u[j];
        }
    }
    Ok((p, u, cn))
}

/// Local group invariance: project out the dominant colour direction and keep
/// the green row of the projected matrix.
pub fn lgi_bvp<T: Real>(trace: &RgbTrace<T>) -> Result<BvpSignal<T>> {
    let n = trace.len();
    require_len("lgi", n, 3)?;
    let (p, _, cn) = lgi_projector(trace)?;
    let green: Vec<T> = (0..n).map(|t| p[1][0] * cn[0][t] + p[1][1] * cn[1][t] + p[1][2] * cn[2][t]).collect();
    let samples = standardize_dimensionless(&green).unwrap_or_else(|| vec![T::zero(); n]);
    Ok(BvpSignal::new(samples, trace.fps, Method::Lgi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul3;
    use crate::scalar::pearson;
    use std::f64::consts::PI;

    #[test]
    fn rank_one_input_is_annihilated() {
        let s: Vec<f64> = (0..300).map(|i| 0.5 + 0.1 * (i as f64 * 0.2).sin()).collect();
        let tr = RgbTrace::new(
            s.iter().map(|v| 0.9 * v).collect(),
            s.iter().map(|v| 0.7 * v).collect(),
            s.iter().map(|v| 0.4 * v).collect(),
            30.0,
        )
        .unwrap();
        assert!(lgi_bvp(&tr).unwrap().samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn projector_identities() {
        let tr = RgbTrace::new(
            (0..200).map(|i| 0.5 + 0.02 * (i as f64 * 0.11).sin()).collect(),
            (0..200).map(|i| 0.4 + 0.03 * (i as f64 * 0.07).cos()).collect(),
            (0..200).map(|i| 0.3 + 0.01 * (i as f64 * 0.23).sin()).collect(),
            30.0,
        )
        .unwrap();
        let (p, u, cn) = lgi_projector(&tr).unwrap();
        let p2 = matmul3(&p, &p);
        for i in 0..3 {
            for j in 0..3 {
                assert!((p2[i][j] - p[i][j]).abs() < 1e-9);
            }
            let pu: f64 = (0..3).map(|k| p[i][k] * u[k]).sum();
            assert!(pu.abs() < 1e-9);
        }
        for t in 0..200 {
            let f: [f64; 3] = std::array::from_fn(|i| (0..3).map(|k| p[i][k] * cn[k][t]).sum());
            let dot: f64 = (0..3).map(|i| u[i] * f[i]).sum();
            assert!(dot.abs() < 1e-9);
        }
    }

    #[test]
    fn dominant_common_motion_is_removed() {
        let n = 600;
        let motion: Vec<f64> = (0..n).map(|i| (2.0 * PI * 0.9 * i as f64 / 30.0).sin() * (1.0 + 0.3 * (i as f64 * 0.01).cos())).collect();
        let pulse: Vec<f64> = (0..n).map(|i| (2.0 * PI * 1.4 * i as f64 / 30.0).sin()).collect();
        // pulse direction orthogonal to (1, 1, 1)
        let q = [1.0, -2.0, 1.0].map(|v: f64| v / 6f64.sqrt());
        let ch = |c: usize| (0..n).map(|t| 0.5 * (1.0 + 0.05 * motion[t] + 0.002 * q[c] * pulse[t])).collect::<Vec<_>>();
        let tr = RgbTrace::new(ch(0), ch(1), ch(2), 30.0).unwrap();
        let out = lgi_bvp(&tr).unwrap();
        let r = pearson(&out.samples, &pulse).unwrap().abs();
        assert!(r >= 0.9, "corr {r}");
    }
}
