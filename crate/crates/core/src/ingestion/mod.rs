//! Recording ingestion: manifests, on-disk frame and label formats, label
//! alignment, spatial averaging and the six-channel chunk representation.

mod cache;
mod loader;
mod manifest;
mod preprocess;

pub use cache::{
    read_chunk_cache, read_frames_bin, write_chunk_cache, write_frames_bin, CacheEntry,
    CHUNK_HEADER_BYTES, FRAMES_HEADER_BYTES, LABEL_HEADER_BYTES,
};
pub use loader::{load_recording, parse_labels};
pub use manifest::{DatasetKind, RecordingManifest, Roi};
pub use preprocess::{
    align_labels, diff_normalize, make_chunks, spatial_average, standardize, VideoChunk,
    DEFAULT_CHUNK_LEN,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frames stored as `[N, H, W, 3]`, row-major, intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence<T> {
    data: Vec<T>,
    n: usize,
    height: usize,
    width: usize,
    fps: T,
}

impl<T: Real> FrameSequence<T> {
    pub fn new(data: Vec<T>, n: usize, height: usize, width: usize, fps: T) -> Result<Self> {
        if data.len() != n * height * width * 3 {
            return Err(Error::InvalidManifest(format!(
                "frame buffer holds {} values, expected {}x{}x{}x3",
                data.len(),
                n,
                height,
                width
            )));
        }
        if n < 2 {
            return Err(Error::TooShort { what: "frame sequence", needed: 2, got: n });
        }
        if !(fps > T::zero()) {
            return Err(Error::InvalidManifest(format!("fps must be positive, got {fps}")));
        }
        let frame_len = height * width * 3;
        if let Some(pos) = data.iter().position(|v| !(*v >= T::zero() && *v <= T::one())) {
            return Err(Error::CorruptFrame {
                index: pos / frame_len.max(1),
                reason: format!("value {} outside [0, 1]", data[pos]),
            });
        }
        Ok(Self { data, n, height, width, fps })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn fps(&self) -> T {
        self.fps
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// One frame as `[H, W, 3]`.
    pub fn frame(&self, k: usize) -> &[T] {
        let len = self.height * self.width * 3;
        &self.data[k * len..(k + 1) * len]
    }

    pub fn pixel(&self, k: usize, y: usize, x: usize, c: usize) -> T {
        self.data[((k * self.height + y) * self.width + x) * 3 + c]
    }
}

/// Gold-standard PPG samples at their native rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSeries<T> {
    pub samples: Vec<T>,
    pub rate: T,
}

impl<T: Real> LabelSeries<T> {
    pub fn new(samples: Vec<T>, rate: T) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooShort { what: "label series", needed: 2, got: samples.len() });
        }
        if !(rate > T::zero()) {
            return Err(Error::InvalidManifest(format!("label rate must be positive, got {rate}")));
        }
        Ok(Self { samples, rate })
    }

    pub fn duration_s(&self) -> T {
        T::from_usize_lossy(self.samples.len()) / self.rate
    }
}

/// Per-frame spatial means of the three colour channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbTrace<T> {
    pub r: Vec<T>,
    pub g: Vec<T>,
    pub b: Vec<T>,
    pub fps: T,
}

impl<T: Real> RgbTrace<T> {
    pub fn new(r: Vec<T>, g: Vec<T>, b: Vec<T>, fps: T) -> Result<Self> {
        if r.len() != g.len() || g.len() != b.len() {
            return Err(Error::DegenerateInput(format!(
                "channel lengths differ: {}/{}/{}",
                r.len(),
                g.len(),
                b.len()
            )));
        }
        if !(fps > T::zero()) {
            return Err(Error::InvalidManifest(format!("fps must be positive, got {fps}")));
        }
        Ok(Self { r, g, b, fps })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn channels(&self) -> [&[T]; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn scaled(&self, c: T) -> Self {
        let s = |v: &[T]| v.iter().map(|&x| x * c).collect();
        Self { r: s(&self.r), g: s(&self.g), b: s(&self.b), fps: self.fps }
    }

    /// Frames `[start, end)` as a new trace.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            r: self.r[start..end].to_vec(),
            g: self.g[start..end].to_vec(),
            b: self.b[start..end].to_vec(),
            fps: self.fps,
        }
    }
}
