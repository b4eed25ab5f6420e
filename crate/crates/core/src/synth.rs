//! Synthetic recordings with a known ground-truth pulse.
//!
//! Channel `c` at frame `k` is
//! `baseline_c · (1 + pulse_amplitude·signature_c·p(t_k) + illum_amplitude·m(t_k))`
//! with `p` a unit-amplitude pulse at the configured heart rate and `m` a slow
//! sinusoidal illumination drift. Pixels add independent Gaussian noise.
//!
//! Randomness comes from ChaCha8 seeded with `seed`: stream 0 draws the pulse
//! and illumination phases, stream `k + 1` draws the pixel noise of frame `k`.
//! Frames can therefore be generated independently and in any order.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::{write_frames_bin, DatasetKind, FrameSequence, RecordingManifest, RgbTrace};
use crate::methods::PbvSignature;
use crate::scalar::Real;

/// Constant heart rate, or a linear ramp `[start, end]` across the recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HrSpec {
    Constant(f64),
    Ramp([f64; 2]),
}

impl HrSpec {
    fn endpoints(self) -> [f64; 2] {
        match self {
            HrSpec::Constant(hr) => [hr, hr],
            HrSpec::Ramp(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    #[default]
    Sine,
    /// `0.75·sin φ + 0.25·sin(2φ + π/2)`: asymmetric, with a strong second harmonic.
    TwoHarmonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub fps: f64,
    pub hr_bpm: HrSpec,
    /// Relative R, G, B pulse amplitudes; normalised to unit length.
    pub pulse_signature: [f64; 3],
    pub pulse_amplitude: f64,
    pub baseline_rgb: [f64; 3],
    pub illum_amplitude: f64,
    pub illum_freq_hz: f64,
    pub noise_std: f64,
    /// `[height, width]`.
    pub frame_size: [usize; 2],
    pub pulse_shape: PulseShape,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            duration_s: 20.0,
            fps: 30.0,
            hr_bpm: HrSpec::Constant(72.0),
            pulse_signature: [0.33, 0.77, 0.53],
            pulse_amplitude: 0.005,
            baseline_rgb: [0.7, 0.5, 0.4],
            illum_amplitude: 0.0,
            illum_freq_hz: 0.2,
            noise_std: 0.0,
            frame_size: [64, 64],
            pulse_shape: PulseShape::Sine,
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::ConfigInvalid(msg)
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        for hr in self.hr_bpm.endpoints() {
            if !(45.0..=150.0).contains(&hr) {
                return Err(invalid(format!("hr_bpm {hr} outside [45, 150]")));
            }
        }
        if !(self.fps >= 15.0 && self.fps.is_finite()) {
            return Err(invalid(format!("fps {} below 15", self.fps)));
        }
        if !(self.duration_s >= 8.0 && self.duration_s.is_finite()) {
            return Err(invalid(format!("duration_s {} below 8", self.duration_s)));
        }
        if self.baseline_rgb.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
            return Err(invalid(format!("baseline_rgb {:?} must lie in (0, 1)", self.baseline_rgb)));
        }
        for (name, v) in [
            ("pulse_amplitude", self.pulse_amplitude),
            ("illum_amplitude", self.illum_amplitude),
            ("noise_std", self.noise_std),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.illum_freq_hz >= 0.0 && self.illum_freq_hz < 0.5) {
            return Err(invalid(format!("illum_freq_hz {} must lie in [0, 0.5)", self.illum_freq_hz)));
        }
        if self.frame_size.contains(&0) {
            return Err(invalid(format!("frame_size {:?} has a zero dimension", self.frame_size)));
        }
        let sig = self.signature()?.vector();
        for c in 0..3 {
            let swing = self.pulse_amplitude * sig[c] + self.illum_amplitude;
            let hi = self.baseline_rgb[c] * (1.0 + swing);
            let lo = self.baseline_rgb[c] * (1.0 - swing);
            if hi > 1.0 || lo < 0.0 {
                return Err(invalid(format!(
                    "channel {c} swings over [{lo:.4}, {hi:.4}], outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> Result<PbvSignature> {
        PbvSignature::new(self.pulse_signature)
    }

    pub fn n_frames(&self) -> usize {
        (self.duration_s * self.fps).round() as usize
    }

    /// Ground-truth HR in BPM: the constant rate, or the mean of a ramp.
    pub fn true_hr(&self) -> f64 {
        let [a, b] = self.hr_bpm.endpoints();
        0.5 * (a + b)
    }
}

/// Noise-free per-frame model shared by the trace and video generators.
struct Model {
    n: usize,
    rgb: [Vec<f64>; 3],
    ppg: Vec<f64>,
}

fn model(cfg: &SynthConfig) -> Result<Model> {
    cfg.validate()?;
    let sig = cfg.signature()?.vector();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pulse_phase = rng.random::<f64>() * 2.0 * PI;
    let illum_phase = rng.random::<f64>() * 2.0 * PI;

    let n = cfg.n_frames();
    let [f0, f1] = cfg.hr_bpm.endpoints().map(|hr| hr / 60.0);
    let duration = n as f64 / cfg.fps;
    let mut rgb = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut ppg = vec![0.0; n];
    for k in 0..n {
        let t = k as f64 / cfg.fps;
        let phi = 2.0 * PI * (f0 * t + (f1 - f0) * t * t / (2.0 * duration)) + pulse_phase;
        let p = match cfg.pulse_shape {
            PulseShape::Sine => phi.sin(),
            PulseShape::TwoHarmonic => 0.75 * phi.sin() + 0.25 * (2.0 * phi + FRAC_PI_2).sin(),
        };
        let m = (2.0 * PI * cfg.illum_freq_hz * t + illum_phase).sin();
        ppg[k] = p;
        for c in 0..3 {
            rgb[c][k] = cfg.baseline_rgb[c] * (1.0 + cfg.pulse_amplitude * sig[c] * p + cfg.illum_amplitude * m);
        }
    }
    Ok(Model { n, rgb, ppg })
}

/// Analytic RGB trace, ground-truth PPG waveform and true HR (BPM).
pub fn synth_trace<T: Real>(cfg: &SynthConfig) -> Result<(RgbTrace<T>, Vec<T>, f64)> {
    let Model { rgb, ppg, .. } = model(cfg)?;
    let cast = |v: Vec<f64>| -> Vec<T> { v.into_iter().map(T::lit).collect() };
    let [r, g, b] = rgb;
    let trace = RgbTrace::new(cast(r), cast(g), cast(b), T::lit(cfg.fps))?;
    Ok((trace, cast(ppg), cfg.true_hr()))
}

/// Full frame tensor: every pixel follows the analytic trace plus independent
/// Gaussian noise of std `noise_std`, clamped to `[0, 1]`.
pub fn synth_video<T: Real>(cfg: &SynthConfig) -> Result<FrameSequence<T>> {
    let Model { n, rgb, .. } = model(cfg)?;
    let [h, w] = cfg.frame_size;
    let noise = Normal::new(0.0, cfg.noise_std).map_err(|e| invalid(e.to_string()))?;
    let mut data = Vec::with_capacity(n * h * w * 3);
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64 + 1);
        let base = [rgb[0][k], rgb[1][k], rgb[2][k]];
        for _ in 0..h * w {
            for v in base {
                let x = if cfg.noise_std > 0.0 { v + noise.sample(&mut rng) } else { v };
                data.push(T::lit(x.clamp(0.0, 1.0)));
            }
        }
    }
    FrameSequence::new(data, n, h, w, T::lit(cfg.fps))
}

/// Write `frames.bin`, `labels.csv` and `manifest.json` into `dir` and return
/// the manifest with paths resolved. The manifest on disk uses relative paths
/// so the directory can be moved or compared byte for byte.
pub fn write_synthetic_recording<T: Real>(cfg: &SynthConfig, id: &str, dir: &Path) -> Result<RecordingManifest> {
    fs::create_dir_all(dir)?;
    let frames = synth_video::<T>(cfg)?;
    let (_, ppg, _) = synth_trace::<T>(cfg)?;
    write_frames_bin(&frames, &dir.join("frames.bin"))?;

    let mut labels = String::from("ppg\n");
    for v in &ppg {
        labels.push_str(&format!("{v}\n"));
    }
    fs::write(dir.join("labels.csv"), labels)?;

    let manifest = RecordingManifest {
        id: id.to_string(),
        frames_path: "frames.bin".into(),
        labels_path: "labels.csv".into(),
        fps: cfg.fps,
        label_rate: cfg.fps,
        dataset_kind: DatasetKind::Synthetic,
        roi: None,
    };
    manifest.validate()?;
    fs::write(dir.join("manifest.json"), manifest.to_json())?;
    RecordingManifest::from_file(&dir.join("manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::periodogram;
    use crate::ingestion::{load_recording, spatial_average};

    fn small(noise_std: f64) -> SynthConfig {
        SynthConfig { duration_s: 8.0, frame_size: [16, 16], noise_std, ..SynthConfig::default() }
    }

    #[test]
    fn trace_matches_closed_form() {
        let cfg = SynthConfig { illum_amplitude: 0.01, ..small(0.0) };
        let (trace, ppg, hr) = synth_trace::<f64>(&cfg).unwrap();
        assert_eq!(hr, 72.0);
        assert_eq!(trace.len(), 240);
        let sig = cfg.signature().unwrap().vector();
        // Recover the illumination term from the blue channel and check the red one.
        for k in 0..trace.len() {
            let m = (trace.b[k] / cfg.baseline_rgb[2] - 1.0 - cfg.pulse_amplitude * sig[2] * ppg[k]) / cfg.illum_amplitude;
            let r = cfg.baseline_rgb[0] * (1.0 + cfg.pulse_amplitude * sig[0] * ppg[k] + cfg.illum_amplitude * m);
            assert!((r - trace.r[k]).abs() < 1e-12);
            assert!(m.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn noiseless_video_averages_to_trace() {
        let cfg = small(0.0);
        let video = synth_video::<f64>(&cfg).unwrap();
        let avg = spatial_average(&video, None).unwrap();
        let (trace, _, _) = synth_trace::<f64>(&cfg).unwrap();
        for (a, b) in avg.channels().iter().zip(trace.channels()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noise_averages_out() {
        let cfg = SynthConfig { frame_size: [64, 64], noise_std: 0.05, duration_s: 8.0, ..SynthConfig::default() };
        let video = synth_video::<f64>(&cfg).unwrap();
        let avg = spatial_average(&video, None).unwrap();
        let (trace, _, _) = synth_trace::<f64>(&cfg).unwrap();
        let bound = 3.0 * 0.05 / 64.0;
        let mut worst = 0.0f64;
        let mut over = 0;
        for (a, b) in avg.channels().iter().zip(trace.channels()) {
            for (x, y) in a.iter().zip(b) {
                let d = (x - y).abs();
                worst = worst.max(d);
                over += usize::from(d >= bound);
            }
        }
        // 720 samples at 3 sigma: a couple of exceedances are expected by chance.
        assert!(over <= 5, "{over} samples beyond 3 sigma (worst {worst})");
        assert!(worst < 5.0 * 0.05 / 64.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = small(0.02);
        assert_eq!(synth_video::<f32>(&cfg).unwrap(), synth_video::<f32>(&cfg).unwrap());
        let a = synth_trace::<f64>(&cfg).unwrap();
        assert_eq!(a.0, synth_trace::<f64>(&cfg).unwrap().0);
        let other = SynthConfig { seed: 1, ..cfg };
        assert_ne!(a.0, synth_trace::<f64>(&other).unwrap().0);
    }

    #[test]
    fn pixels_stay_in_unit_range() {
        let cfg = SynthConfig { noise_std: 0.5, ..small(0.0) };
        let video = synth_video::<f32>(&cfg).unwrap();
        assert!(video.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn ppg_peak_at_configured_rate() {
        for hr in [50.0, 72.0, 97.5, 140.0] {
            let cfg = SynthConfig { hr_bpm: HrSpec::Constant(hr), ..small(0.0) };
            let (_, ppg, _) = synth_trace::<f64>(&cfg).unwrap();
            let spec = periodogram(&ppg, 30.0, 8).unwrap();
            let f = spec.freqs[spec.peak_in_band(0.5, 3.0).unwrap()];
            assert!((f * 60.0 - hr).abs() <= spec.resolution() * 60.0, "hr {hr} peak {}", f * 60.0);
        }
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            SynthConfig { hr_bpm: HrSpec::Constant(40.0), ..SynthConfig::default() },
            SynthConfig { hr_bpm: HrSpec::Ramp([60.0, 160.0]), ..SynthConfig::default() },
            SynthConfig { fps: 10.0, ..SynthConfig::default() },
            SynthConfig { duration_s: 5.0, ..SynthConfig::default() },
            SynthConfig { illum_freq_hz: 0.5, ..SynthConfig::default() },
            SynthConfig { pulse_amplitude: 2.0, ..SynthConfig::default() },
            SynthConfig { pulse_amplitude: -0.1, ..SynthConfig::default() },
            SynthConfig { baseline_rgb: [0.5, 1.0, 0.5], ..SynthConfig::default() },
            SynthConfig { frame_size: [0, 4], ..SynthConfig::default() },
        ];
        for cfg in bad {
            assert!(matches!(synth_trace::<f64>(&cfg), Err(Error::ConfigInvalid(_))), "{cfg:?}");
        }
    }

    #[test]
    fn config_toml_shapes() {
        let ramp: SynthConfig = serde_json::from_str(r#"{"hr_bpm":[60,90]}"#).unwrap();
        assert_eq!(ramp.hr_bpm, HrSpec::Ramp([60.0, 90.0]));
        assert_eq!(ramp.true_hr(), 75.0);
        let c: SynthConfig = serde_json::from_str(r#"{"hr_bpm":81.5,"pulse_shape":"two_harmonic"}"#).unwrap();
        assert_eq!(c.hr_bpm, HrSpec::Constant(81.5));
        assert_eq!(c.pulse_shape, PulseShape::TwoHarmonic);
        assert!(serde_json::from_str::<SynthConfig>(r#"{"hr":70}"#).is_err());
    }

    #[test]
    fn written_recording_loads_back() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(0.01);
        let manifest = write_synthetic_recording::<f32>(&cfg, "syn_000", dir.path()).unwrap();
        let (frames, labels) = load_recording::<f32>(&manifest).unwrap();
        assert_eq!(frames, synth_video::<f32>(&cfg).unwrap());
        assert_eq!(labels.samples, synth_trace::<f32>(&cfg).unwrap().1);
        assert_eq!(labels.rate, 30.0);
        let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(text.contains("\"frames_path\": \"frames.bin\""));
    }
}
