//! Small dense and banded linear algebra used by the methods and the detrender.

use crate::scalar::Real;

pub type Mat3<T> = [[T; 3]; 3];

pub fn identity3<T: Real>() -> Mat3<T> {
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, o, z], [z, z, o]]
}

pub fn matmul3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose3<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// `rows · rowsᵀ` scaled by `scale`, for three equal-length rows.
pub fn gram3<T: Real>(rows: &[Vec<T>; 3], scale: T) -> Mat3<T> {
    let mut g = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let s: T = rows[i].iter().zip(&rows[j]).map(|(&a, &b)| a * b).sum();
            g[i][j] = s * scale;
            g[j][i] = g[i][j];
        }
    }
    g
}

/// Apply a 3×3 matrix to three rows: `out[i] = Σ_k m[i][k]·rows[k]`.
pub fn apply3<T: Real>(m: &Mat3<T>, rows: &[Vec<T>; 3]) -> [Vec<T>; 3] {
    let n = rows[0].len();
    std::array::from_fn(|i| {
        (0..n)
            .map(|t| m[i][0] * rows[0][t] + m[i][1] * rows[1][t] + m[i][2] * rows[2][t])
            .collect()
    })
}

/// Eigen-decomposition of a symmetric 3×3 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// the *columns* of the returned matrix. Equal eigenvalues keep the order in
/// which the sweep produced them.
pub fn sym_eigen3<T: Real>(a: &Mat3<T>) -> ([T; 3], Mat3<T>) {
    let mut m = *a;
    let mut v = identity3::<T>();
    let two = T::lit(2.0);
    for _sweep in 0..64 {
        let off = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
        let diag = m[0][0] * m[0][0] + m[1][1] * m[1][1] + m[2][2] * m[2][2];
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if m[p][q] == T::zero() {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (two * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (mkp, mkq) = (m[k][p], m[k][q]);
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let (mpk, mqk) = (m[p][k], m[q][k]);
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.map(|i| m[i][i]);
    let mut vecs = [[T::zero(); 3]; 3];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vecs[row][col] = v[row][src];
        }
    }
    (vals, vecs)
}

/// Solve `a·x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes.
pub fn solve3<T: Real>(a: &Mat3<T>, b: &[T; 3]) -> Option<[T; 3]> {
    let mut m = *a;
    let mut r = *b;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col] == T::zero() || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] = m[row][k] - f * m[col][k];
            }
            r[row] = r[row] - f * r[col];
        }
    }
    let mut x = [T::zero(); 3];
    for i in (0..3).rev() {
        let s: T = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (r[i] - s) / m[i][i];
    }
    Some(x)
}

/// Symmetric positive-definite pentadiagonal system, stored by diagonals.
///
/// `d0[i] = A[i][i]`, `d1[i] = A[i][i+1]`, `d2[i] = A[i][i+2]`.
pub struct Pentadiagonal<T> {
    pub d0: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

impl<T: Real> Pentadiagonal<T> {
    /// `I + weight·D₂ᵀD₂` for the (n−2)×n second-difference operator.
    pub fn smoothness_prior(n: usize, weight: T) -> Self {
        let mut d0 = vec![T::one(); n];
        let mut d1 = vec![T::zero(); n.saturating_sub(1)];
        let mut d2 = vec![T::zero(); n.saturating_sub(2)];
        // Each row r of D₂ is [1, -2, 1] at columns r, r+1, r+2.
        let stencil = [T::one(), -T::lit(2.0), T::one()];
        for r in 0..n.saturating_sub(2) {
            for a in 0..3 {
                d0[r + a] = d0[r + a] + weight * stencil[a] * stencil[a];
                if a < 2 {
                    d1[r + a] = d1[r + a] + weight * stencil[a] * stencil[a + 1];
                }
            }
            d2[r] = d2[r] + weight * stencil[0] * stencil[2];
        }
        Self { d0, d1, d2 }
    }

    /// Banded Cholesky solve (`A = L·Lᵀ`, bandwidth 2). `None` if not positive definite.
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        let n = self.d0.len();
        assert_eq!(rhs.len(), n);
        // L stored by diagonals: l0 (main), l1 (first sub), l2 (second sub).
        let mut l0 = vec![T::zero(); n];
        let mut l1 = vec![T::zero(); n];
        let mut l2 = vec![T::zero(); n];
        for i in 0..n {
            if i >= 2 {
                l2[i] = self.d2[i - 2] / l0[i - 2];
            }
            if i >= 1 {
                let mut v = self.d1[i - 1];
                if i >= 2 {
                    v = v - l2[i] * l1[i - 1];
                }
                l1[i] = v / l0[i - 1];
            }
            let diag = self.d0[i] - l1[i] * l1[i] - l2[i] * l2[i];
            if diag <= T::zero() || !diag.is_finite() {
                return None;
            }
            l0[i] = diag.sqrt();
        }
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut v = rhs[i];
            if i >= 1 {
                v = v - l1[i] * y[i - 1];
            }
            if i >= 2 {
                v = v - l2[i] * y[i - 2];
            }
            y[i] = v / l0[i];
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut v = y[i];
            if i + 1 < n {
                v = v - l1[i + 1] * x[i + 1];
            }
            if i + 2 < n {
                v = v - l2[i + 2] * x[i + 2];
            }
            x[i] = v / l0[i];
        }
        Some(x)
    }
}
