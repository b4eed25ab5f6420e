//! Joint approximate diagonalisation of fourth-order cumulant eigenmatrices
//! for three observed channels.
//!
//! The observations are whitened through the eigendecomposition of their
//! covariance, the six cumulant matrices of the whitened data are formed, and
//! Givens rotations are swept over all index pairs until every rotation angle
//! in a sweep falls below the threshold. Nothing is randomised, so equal inputs
//! give bit-identical outputs.

use crate::error::{Error, Result};
use crate::linalg::{apply3, identity3, matmul3, sym_eigen3, transpose3, Mat3};
use crate::scalar::{mean, Real};

/// Sweep cap for the joint diagonalisation.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct JadeOutput<T> {
    pub sources: [Vec<T>; 3],
    pub demixing: Mat3<T>,
    pub sweeps: usize,
}

fn cumulant_matrices<T: Real>(z: &[Vec<T>; 3]) -> Vec<Mat3<T>> {
    let n = z[0].len();
    let inv_n = T::one() / T::from_usize_lossy(n);
    let sqrt2 = T::lit(2.0).sqrt();
    let delta = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
    // Σ_t w_t·z_k(t)·z_l(t) / N for a per-sample weight w.
    let weighted = |w: &dyn Fn(usize) -> T| {
        let mut m = [[T::zero(); 3]; 3];
        for t in 0..n {
            let wt = w(t);
            for k in 0..3 {
                let a = wt * z[k][t];
                for l in k..3 {
                    m[k][l] = m[k][l] + a * z[l][t];
                }
            }
        }
        for k in 0..3 {
            for l in k..3 {
                m[k][l] = m[k][l] * inv_n;
                m[l][k] = m[k][l];
            }
        }
        m
    };
    let mut out = Vec::with_capacity(6);
    for i in 0..3 {
        let mut q = weighted(&|t| z[i][t] * z[i][t]);
        for k in 0..3 {
            for l in 0..3 {
                q[k][l] = q[k][l] - delta(k, l) - T::lit(2.0) * delta(k, i) * delta(l, i);
            }
        }
        out.push(q);
        for j in 0..i {
            let mut q = weighted(&|t| z[i][t] * z[j][t]);
            for k in 0..3 {
                for l in 0..3 {
                    q[k][l] = sqrt2 * (q[k][l] - delta(k, i) * delta(l, j) - delta(k, j) * delta(l, i));
                }
            }
            out.push(q);
        }
    }
    out
}

/// Separate three mixed channels into independent sources.
///
/// `demixing · cov(x) · demixingᵀ` is the identity, so every source has unit
/// variance. Fails with [`Error::RankDeficient`] when a covariance eigenvalue is
/// below `1e-12` of the largest.
pub fn jade_separate<T: Real>(x: &[Vec<T>; 3]) -> Result<JadeOutput<T>> {
    let n = x[0].len();
    if x.iter().any(|r| r.len() != n) {
        return Err(Error::DegenerateInput("rows differ in length".into()));
    }
    if n < 10 {
        return Err(Error::TooShort { what: "jade", needed: 10, got: n });
    }
    let centered: [Vec<T>; 3] = std::array::from_fn(|i| {
        let m = mean(&x[i]);
        x[i].iter().map(|&v| v - m).collect()
    });
    let cov = crate::linalg::gram3(&centered, T::one() / T::from_usize_lossy(n));
    let (vals, vecs) = sym_eigen3(&cov);
    let ratio = vals[2] / vals[0];
    if !(vals[0] > T::zero()) || !(ratio >= T::lit(1e-12)) {
        return Err(Error::RankDeficient { ratio: ratio.to_f64().unwrap_or(0.0) });
    }
    let mut whitening = transpose3(&vecs);
    for (row, &lam) in whitening.iter_mut().zip(&vals) {
        let s = T::one() / lam.sqrt();
        row.iter_mut().for_each(|v| *v = *v * s);
    }
    let z = apply3(&whitening, &centered);
    let mut cms = cumulant_matrices(&z);

    let threshold = T::tol_at_least(1e-8);
    let mut v = identity3::<T>();
    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let (mut g11, mut g22, mut g12) = (T::zero(), T::zero(), T::zero());
            for m in &cms {
                let on = m[p][p] - m[q][q];
                let off = m[p][q] + m[q][p];
                g11 = g11 + on * on;
                g22 = g22 + off * off;
                g12 = g12 + on * off;
            }
            let ton = g11 - g22;
            let toff = g12 + g12;
            let theta = T::lit(0.5) * toff.atan2(ton + (ton * ton + toff * toff).sqrt());
            if theta.abs() <= threshold {
                continue;
            }
            rotated = true;
            let (c, s) = (theta.cos(), theta.sin());
            for row in v.iter_mut() {
                let (a, b) = (row[p], row[q]);
                row[p] = c * a + s * b;
                row[q] = c * b - s * a;
            }
            for m in cms.iter_mut() {
                for k in 0..3 {
                    let (a, b) = (m[p][k], m[q][k]);
                    m[p][k] = c * a + s * b;
                    m[q][k] = c * b - s * a;
                }
                for k in 0..3 {
                    let (a, b) = (m[k][p], m[k][q]);
                    m[k][p] = c * a + s * b;
                    m[k][q] = c * b - s * a;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let demixing = matmul3(&transpose3(&v), &whitening);
    let sources = apply3(&demixing, x);
    Ok(JadeOutput { sources, demixing, sweeps })
}
