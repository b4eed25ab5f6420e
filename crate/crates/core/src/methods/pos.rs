use super::{require_len, standardize_dimensionless, BvpSignal, Method};
use crate::error::{Error, Result};
use crate::ingestion::RgbTrace;
use crate::scalar::{mean, std_pop, Real};

/// Projection plane orthogonal to the skin tone and the sliding-window length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosConstants {
    pub projection: [[i8; 3]; 2],
    pub window_seconds: f64,
}

impl PosConstants {
    pub const STANDARD: PosConstants = PosConstants { projection: [[0, 1, -1], [-2, 1, 1]], window_seconds: 1.6 };

    pub fn window_len(&self, fs: f64) -> usize {
        (self.window_seconds * fs).ceil() as usize
    }
}

/// Plane-orthogonal-to-skin: per-window temporal normalisation, projection,
/// alpha tuning of the two projected signals, and overlap-add.
pub fn pos_bvp<T: Real>(trace: &RgbTrace<T>, fs: T) -> Result<BvpSignal<T>> {
    let consts = PosConstants::STANDARD;
    let n = trace.len();
    let win = consts.window_len(fs.as_f64()).max(1);
    require_len("pos", n, 2)?;
    if win > n {
        return Err(Error::WindowTooLong { window: win, len: n });
    }
    let p: [[T; 3]; 2] = consts.projection.map(|row| row.map(|v| T::lit(v as f64)));
    let channels = trace.channels();
    let mut acc = vec![T::zero(); n];
    let mut s1 = vec![T::zero(); win];
    let mut s2 = vec![T::zero(); win];
    for start in 0..=n - win {
        let mut means = [T::zero(); 3];
        for c in 0..3 {
            means[c] = mean(&channels[c][start..start + win]);
            if means[c] == T::zero() {
                return Err(Error::DegenerateInput(format!("channel {c} is zero in window at {start}")));
            }
        }
        for t in 0..win {
            let cn: [T; 3] = std::array::from_fn(|c| channels[c][start + t] / means[c]);
            s1[t] = p[0][0] * cn[0] + p[0][1] * cn[1] + p[0][2] * cn[2];
            s2[t] = p[1][0] * cn[0] + p[1][1] * cn[1] + p[1][2] * cn[2];
        }
        let sd2 = std_pop(&s2);
        let alpha = if sd2 > T::zero() { std_pop(&s1) / sd2 } else { T::zero() };
        let h: Vec<T> = s1.iter().zip(&s2).map(|(&a, &b)| a + alpha * b).collect();
        let hm = mean(&h);
        for (t, v) in h.into_iter().enumerate() {
            acc[start + t] = acc[start + t] + (v - hm);
        }
    }
    let samples = standardize_dimensionless(&acc).unwrap_or_else(|| vec![T::zero(); n]);
    Ok(BvpSignal::new(samples, fs, Method::Pos))
}
