use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("path does not exist: {0}")]
    MissingPath(PathBuf),
    #[error("frame {index} is corrupt: {reason}")]
    CorruptFrame { index: usize, reason: String },
    #[error("label file line {line}: {reason}")]
    LabelParseError { line: usize, reason: String },
    #[error("declared fps {declared} disagrees with frame timestamps ({measured:.3} fps)")]
    RateMismatch { declared: f64, measured: f64 },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("labels cover {available_s:.3} s but {needed_s:.3} s of video are needed")]
    InsufficientCoverage { needed_s: f64, available_s: f64 },
    #[error("region of interest has zero area")]
    EmptyRoi,
    #[error("region of interest {0} lies outside the {1}x{2} frame")]
    RoiOutOfBounds(String, usize, usize),
    #[error("{what}: need at least {needed} samples, got {got}")]
    TooShort { what: &'static str, needed: usize, got: usize },
    #[error("{path}: bad magic, expected {expected:?}")]
    BadMagic { path: PathBuf, expected: &'static str },
    #[error("{path}: unsupported format version {found}")]
    VersionMismatch { path: PathBuf, found: u32 },
    #[error("{0}: file is truncated")]
    TruncatedFile(PathBuf),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("window of {window} samples exceeds signal length {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("joint diagonalisation did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("covariance is rank deficient (eigenvalue ratio {ratio:e})")]
    RankDeficient { ratio: f64 },
    #[error("invalid band {low_hz}-{high_hz} Hz at fs={fs} Hz")]
    InvalidBand { low_hz: f64, high_hz: f64, fs: f64 },
    #[error("no spectral bin falls inside the heart-rate band")]
    EmptyBand,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("results line {line}: {reason}")]
    ResultsParse { line: usize, reason: String },
    #[error("no results to evaluate")]
    NoResults,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
