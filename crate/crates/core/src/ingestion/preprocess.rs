use super::{FrameSequence, LabelSeries, RgbTrace, Roi};
use crate::error::{Error, Result};
use crate::scalar::{mean, std_pop, Real};

/// Frames per cached chunk.
pub const DEFAULT_CHUNK_LEN: usize = 180;

/// Resample labels onto frame timestamps `t_k = k / fps` by linear interpolation.
///
/// Timestamps past the last label sample hold the final value; the label span
/// may fall short of the video by at most 5 %.
pub fn align_labels<T: Real>(labels: &LabelSeries<T>, fps: T, n_frames: usize) -> Result<Vec<T>> {
    if !(fps > T::zero()) {
        return Err(Error::InvalidManifest(format!("fps must be positive, got {fps}")));
    }
    let m = labels.samples.len();
    let needed = T::from_usize_lossy(n_frames) / fps;
    let available = labels.duration_s();
    if available < needed * T::lit(0.95) {
        return Err(Error::InsufficientCoverage {
            needed_s: needed.as_f64(),
            available_s: available.as_f64(),
        });
    }
    let last = T::from_usize_lossy(m - 1);
    let step = labels.rate / fps;
    Ok((0..n_frames)
        .map(|k| {
            let pos = (T::from_usize_lossy(k) * step).min(last);
            let i = pos.floor().to_usize().unwrap_or(0).min(m - 1);
            let frac = pos - T::from_usize_lossy(i);
            if frac == T::zero() || i + 1 >= m {
                labels.samples[i]
            } else {
                labels.samples[i] + (labels.samples[i + 1] - labels.samples[i]) * frac
            }
        })
        .collect())
}

/// Per-frame mean of each colour channel over `roi` (full frame when `None`).
pub fn spatial_average<T: Real>(frames: &FrameSequence<T>, roi: Option<Roi>) -> Result<RgbTrace<T>> {
    let (h, w) = (frames.height(), frames.width());
    let roi = roi.unwrap_or(Roi::full(h, w));
    roi.check(h, w)?;
    let count = T::from_usize_lossy(roi.w * roi.h);
    let n = frames.len();
    let mut out: [Vec<T>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    for k in 0..n {
        let frame = frames.frame(k);
        let mut acc = [T::zero(); 3];
        for y in roi.y..roi.y + roi.h {
            let row = &frame[(y * w + roi.x) * 3..(y * w + roi.x + roi.w) * 3];
            for px in row.chunks_exact(3) {
                acc[0] = acc[0] + px[0];
                acc[1] = acc[1] + px[1];
                acc[2] = acc[2] + px[2];
            }
        }
        for c in 0..3 {
            out[c].push(acc[c] / count);
        }
    }
    let [r, g, b] = out;
    RgbTrace::new(r, g, b, frames.fps())
}

/// Normalised frame difference `(x[k+1]-x[k]) / (x[k+1]+x[k])`, scaled to unit
/// population standard deviation. The final element is zero so the output
/// keeps the input length.
pub fn diff_normalize<T: Real>(x: &[T]) -> Result<Vec<T>> {
    if x.len() < 2 {
        return Err(Error::TooShort { what: "diff_normalize", needed: 2, got: x.len() });
    }
    let mut d: Vec<T> = x
        .windows(2)
        .map(|p| {
            let den = p[1] + p[0];
            if den == T::zero() {
                T::zero()
            } else {
                (p[1] - p[0]) / den
            }
        })
        .collect();
    d.push(T::zero());
    let sd = std_pop(&d);
    if sd > T::zero() && sd.is_finite() {
        d.iter_mut().for_each(|v| *v = *v / sd);
    } else {
        d.iter_mut().for_each(|v| *v = T::zero());
    }
    Ok(d)
}

/// `(x - mean) / std_pop`; all zeros when the spread is zero or lost in rounding
/// noise around the mean.
pub fn standardize<T: Real>(x: &[T]) -> Vec<T> {
    let m = mean(x);
    let sd = std_pop(x);
    if !(sd > T::numerical_floor() * m.abs()) || !sd.is_finite() {
        return vec![T::zero(); x.len()];
    }
    x.iter().map(|&v| (v - m) / sd).collect()
}

/// One `[chunk_len, H, W, 6]` block: channels 0-2 hold difference-normalised
/// frames, channels 3-5 standardised raw frames.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoChunk<T> {
    pub data: Vec<T>,
    pub chunk_len: usize,
    pub height: usize,
    pub width: usize,
    pub source_id: String,
    pub chunk_index: usize,
}

impl<T: Real> VideoChunk<T> {
    pub const CHANNELS: usize = 6;

    pub fn at(&self, k: usize, y: usize, x: usize, c: usize) -> T {
        self.data[((k * self.height + y) * self.width + x) * Self::CHANNELS + c]
    }

    pub fn cast<U: Real>(&self) -> VideoChunk<U> {
        VideoChunk {
            data: self.data.iter().map(|v| U::from_f64(v.as_f64()).unwrap()).collect(),
            chunk_len: self.chunk_len,
            height: self.height,
            width: self.width,
            source_id: self.source_id.clone(),
            chunk_index: self.chunk_index,
        }
    }
}

/// Split into non-overlapping chunks of `chunk_len` frames; a trailing partial
/// chunk is dropped.
pub fn make_chunks<T: Real>(
    frames: &FrameSequence<T>,
    chunk_len: usize,
    source_id: &str,
) -> Result<Vec<VideoChunk<T>>> {
    if chunk_len < 2 {
        return Err(Error::TooShort { what: "chunk length", needed: 2, got: chunk_len });
    }
    let (h, w) = (frames.height(), frames.width());
    let count = frames.len() / chunk_len;
    let ch = VideoChunk::<T>::CHANNELS;
    let mut chunks = Vec::with_capacity(count);
    let mut series = vec![T::zero(); chunk_len];
    for index in 0..count {
        let start = index * chunk_len;
        let mut data = vec![T::zero(); chunk_len * h * w * ch];
        for y in 0..h {
            for x in 0..w {
                for c in 0..3 {
                    for (t, s) in series.iter_mut().enumerate() {
                        *s = frames.pixel(start + t, y, x, c);
                    }
                    let diff = diff_normalize(&series)?;
                    let raw = standardize(&series);
                    for t in 0..chunk_len {
                        let base = ((t * h + y) * w + x) * ch;
                        data[base + c] = diff[t];
                        data[base + 3 + c] = raw[t];
                    }
                }
            }
        }
        chunks.push(VideoChunk {
            data,
            chunk_len,
            height: h,
            width: w,
            source_id: source_id.to_string(),
            chunk_index: index,
        });
    }
    Ok(chunks)
}
