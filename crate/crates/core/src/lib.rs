//! Remote photoplethysmography benchmark pipeline.
//!
//! Frames are reduced to spatially averaged RGB traces, one of six
//! unsupervised methods recovers a blood-volume pulse, the pulse is detrended
//! and bandpassed, and heart rate is read off the periodogram peak. Labels go
//! through the same postprocessing so predictions and ground truth are
//! compared like for like.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below name the common concrete instantiations.

pub mod dsp;
pub mod error;
pub mod evaluation;
pub mod ingestion;
pub mod linalg;
pub mod methods;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

pub type FrameSequence64 = ingestion::FrameSequence<f64>;
pub type FrameSequence32 = ingestion::FrameSequence<f32>;
pub type LabelSeries64 = ingestion::LabelSeries<f64>;
pub type LabelSeries32 = ingestion::LabelSeries<f32>;
pub type RgbTrace64 = ingestion::RgbTrace<f64>;
pub type RgbTrace32 = ingestion::RgbTrace<f32>;
pub type VideoChunk32 = ingestion::VideoChunk<f32>;
pub type BvpSignal64 = methods::BvpSignal<f64>;
pub type BvpSignal32 = methods::BvpSignal<f32>;
pub type BiquadCascade64 = dsp::BiquadCascade<f64>;
pub type Spectrum64 = dsp::Spectrum<f64>;
