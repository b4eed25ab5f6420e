use std::fs;
use std::io::BufReader;
use std::path::Path;

use super::{read_frames_bin, DatasetKind, FrameSequence, LabelSeries, RecordingManifest};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Load frames and gold-standard labels for one recording.
///
/// `frames_path` is either a `frames.bin` tensor or a directory of PNG images,
/// read in lexicographic file-name order. Labels are parsed according to the
/// manifest's dataset kind and returned at their native rate.
pub fn load_recording<T: Real>(manifest: &RecordingManifest) -> Result<(FrameSequence<T>, LabelSeries<T>)> {
    manifest.validate()?;
    for p in [&manifest.frames_path, &manifest.labels_path] {
        if !p.exists() {
            return Err(Error::MissingPath(p.clone()));
        }
    }
    let fps = T::lit(manifest.fps);
    let frames = if manifest.frames_path.is_dir() {
        read_png_dir(&manifest.frames_path, fps)?
    } else {
        read_frames_bin(&manifest.frames_path, fps)?
    };
    if let Some(roi) = manifest.roi {
        roi.check(frames.height(), frames.width())?;
    }
    let text = fs::read_to_string(&manifest.labels_path)?;
    let samples = parse_labels(&text, manifest.dataset_kind)?;
    if manifest.dataset_kind == DatasetKind::Pure {
        if let Some(measured) = pure_frame_rate(&text)? {
            check_rate(manifest.fps, measured)?;
        }
    }
    let labels = LabelSeries::new(samples.into_iter().map(T::lit).collect(), T::lit(manifest.label_rate))?;
    Ok((frames, labels))
}

fn check_rate(declared: f64, measured: f64) -> Result<()> {
    if ((measured - declared) / declared).abs() > 0.01 {
        return Err(Error::RateMismatch { declared, measured });
    }
    Ok(())
}

/// Parse a label file following the convention of `kind`.
pub fn parse_labels(text: &str, kind: DatasetKind) -> Result<Vec<f64>> {
    match kind {
        DatasetKind::Ubfc => parse_ubfc(text),
        DatasetKind::Pure => parse_pure(text),
        DatasetKind::Scamps | DatasetKind::Generic | DatasetKind::Synthetic => parse_single_column(text),
    }
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::LabelParseError { line, reason: format!("not a number: {field:?}") })?;
    if !v.is_finite() {
        return Err(Error::LabelParseError { line, reason: format!("non-finite value {v}") });
    }
    Ok(v)
}

fn parse_single_column(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let field = raw.trim();
        if field.is_empty() {
            continue;
        }
        if field.contains(',') {
            return Err(Error::LabelParseError { line, reason: "expected a single column".into() });
        }
        // a non-numeric first row is a header
        if out.is_empty() && i == 0 && field.parse::<f64>().is_err() {
            continue;
        }
        out.push(parse_value(field, line)?);
    }
    Ok(out)
}

fn parse_ubfc(text: &str) -> Result<Vec<f64>> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| Error::LabelParseError { line: 1, reason: "empty file".into() })?;
    first.split_whitespace().map(|f| parse_value(f, 1)).collect()
}

fn pure_json(text: &str) -> Result<serde_json::Value> {
    serde_json::from_str(text).map_err(|e| Error::LabelParseError { line: e.line(), reason: e.to_string() })
}

fn parse_pure(text: &str) -> Result<Vec<f64>> {
    let doc = pure_json(text)?;
    let pkgs = doc
        .get("/FullPackage")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::LabelParseError { line: 1, reason: "missing /FullPackage array".into() })?;
    pkgs.iter()
        .enumerate()
        .map(|(i, p)| {
            p.pointer("/Value/waveform")
                .and_then(|v| v.as_f64())
                .ok_or_else(|| Error::LabelParseError { line: i + 1, reason: "entry without Value.waveform".into() })
        })
        .collect()
}

/// Frame rate implied by the `/Image` timestamps (nanoseconds), if present.
fn pure_frame_rate(text: &str) -> Result<Option<f64>> {
    let doc = pure_json(text)?;
    let Some(images) = doc.get("/Image").and_then(|v| v.as_array()) else {
        return Ok(None);
    };
    let stamps: Vec<f64> = images.iter().filter_map(|e| e.get("Timestamp")?.as_f64()).collect();
    if stamps.len() < 2 {
        return Ok(None);
    }
    let span_s = (stamps[stamps.len() - 1] - stamps[0]) * 1e-9;
    if span_s <= 0.0 {
        return Ok(None);
    }
    Ok(Some((stamps.len() - 1) as f64 / span_s))
}

fn read_png_dir<T: Real>(dir: &Path, fps: T) -> Result<FrameSequence<T>> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    let mut data = Vec::new();
    let mut dims = None;
    for (index, path) in files.iter().enumerate() {
        let (h, w, pixels) = decode_png(path).map_err(|reason| Error::CorruptFrame { index, reason })?;
        match dims {
            None => dims = Some((h, w)),
            Some(d) if d != (h, w) => {
                return Err(Error::CorruptFrame {
                    index,
                    reason: format!("size {h}x{w} differs from first frame {}x{}", d.0, d.1),
                })
            }
            _ => {}
        }
        data.extend(pixels.into_iter().map(|v| T::lit(v as f64)));
    }
    let (h, w) = dims.unwrap_or((0, 0));
    FrameSequence::new(data, files.len(), h, w, fps)
}

/// Decode to RGB intensities in [0, 1].
fn decode_png(path: &Path) -> std::result::Result<(usize, usize, Vec<f32>), String> {
    let file = fs::File::open(path).map_err(|e| e.to_string())?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let size = reader.output_buffer_size().ok_or("image too large")?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let buf = &buf[..info.buffer_size()];
    let (h, w) = (info.height as usize, info.width as usize);
    let samples: Vec<f32> = match info.bit_depth {
        png::BitDepth::Sixteen => buf.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]]) as f32 / 65535.0).collect(),
        png::BitDepth::Eight => buf.iter().map(|&b| b as f32 / 255.0).collect(),
        other => return Err(format!("unsupported bit depth {other:?}")),
    };
    let per_px = match info.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        other => return Err(format!("unsupported colour type {other:?}")),
    };
    let mut rgb = Vec::with_capacity(h * w * 3);
    for px in samples.chunks_exact(per_px) {
        if per_px >= 3 {
            rgb.extend_from_slice(&px[..3]);
        } else {
            rgb.extend_from_slice(&[px[0]; 3]);
        }
    }
    Ok((h, w, rgb))
}
