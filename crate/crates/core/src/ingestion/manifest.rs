use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Naming and label-file convention a recording follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    /// `ground_truth.txt`: first line holds the PPG samples, whitespace separated.
    Ubfc,
    /// JSON with `/FullPackage` waveform samples and `/Image` frame timestamps.
    Pure,
    /// Waveform exported to a single-column CSV.
    Scamps,
    Generic,
    Synthetic,
}

/// Pixel rectangle; `x`/`y` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Roi {
    pub fn full(height: usize, width: usize) -> Self {
        Self { x: 0, y: 0, w: width, h: height }
    }

    pub fn check(&self, height: usize, width: usize) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::EmptyRoi);
        }
        if self.x + self.w > width || self.y + self.h > height {
            return Err(Error::RoiOutOfBounds(self.to_string(), height, width));
        }
        Ok(())
    }
}

impl fmt::Display for Roi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}+{}+{}", self.w, self.h, self.x, self.y)
    }
}

/// One recording on disk. Relative paths are resolved against the manifest's
/// own directory by [`RecordingManifest::from_file`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingManifest {
    pub id: String,
    pub frames_path: PathBuf,
    pub labels_path: PathBuf,
    pub fps: f64,
    pub label_rate: f64,
    pub dataset_kind: DatasetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roi: Option<Roi>,
}

impl RecordingManifest {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidManifest("empty id".into()));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::InvalidManifest(format!("fps must be positive, got {}", self.fps)));
        }
        if !(self.label_rate.is_finite() && self.label_rate > 0.0) {
            return Err(Error::InvalidManifest(format!(
                "label_rate must be positive, got {}",
                self.label_rate
            )));
        }
        if let Some(roi) = self.roi {
            if roi.w == 0 || roi.h == 0 {
                return Err(Error::EmptyRoi);
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    /// Read a manifest and resolve its relative paths against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingPath(path.to_path_buf()));
        }
        let mut m = Self::from_json(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if m.frames_path.is_relative() {
            m.frames_path = base.join(&m.frames_path);
        }
        if m.labels_path.is_relative() {
            m.labels_path = base.join(&m.labels_path);
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"id":"s1","frames_path":"frames.bin","labels_path":"labels.csv",
        "fps":30,"label_rate":30,"dataset_kind":"synthetic","roi":{"x":1,"y":2,"w":3,"h":4}}"#;

    #[test]
    fn parses_and_roundtrips() {
        let m = RecordingManifest::from_json(SAMPLE).unwrap();
        assert_eq!(m.dataset_kind, DatasetKind::Synthetic);
        assert_eq!(m.roi, Some(Roi { x: 1, y: 2, w: 3, h: 4 }));
        assert_eq!(RecordingManifest::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn zero_fps_is_rejected() {
        let bad = SAMPLE.replace("\"fps\":30", "\"fps\":0");
        assert!(matches!(RecordingManifest::from_json(&bad), Err(Error::InvalidManifest(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("\"id\":\"s1\"", "\"id\":\"s1\",\"extra\":1");
        assert!(RecordingManifest::from_json(&bad).is_err());
    }

    #[test]
    fn roi_bounds() {
        let roi = Roi { x: 2, y: 0, w: 3, h: 2 };
        assert!(roi.check(2, 5).is_ok());
        assert!(matches!(roi.check(2, 4), Err(Error::RoiOutOfBounds(..))));
        assert!(matches!(Roi { x: 0, y: 0, w: 0, h: 1 }.check(2, 2), Err(Error::EmptyRoi)));
    }
}
