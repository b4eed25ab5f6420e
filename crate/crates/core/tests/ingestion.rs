use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rppg_core::ingestion::{
    align_labels, load_recording, make_chunks, read_chunk_cache, spatial_average, write_chunk_cache, DatasetKind,
    LabelSeries, RecordingManifest, Roi, CHUNK_HEADER_BYTES,
};
use rppg_core::synth::{write_synthetic_recording, SynthConfig};
use rppg_core::Error;

fn write_png(path: &Path, w: u32, h: u32, rgb: &[u8]) {
    let file = fs::File::create(path).unwrap();
    let mut enc = png::Encoder::new(BufWriter::new(file), w, h);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header().unwrap().write_image_data(rgb).unwrap();
}

fn generic_fixture(dir: &Path, n: usize) -> RecordingManifest {
    let frames = dir.join("frames");
    fs::create_dir_all(&frames).unwrap();
    for k in 0..n {
        // Left half dark, right half bright; brightness steps with k.
        let mut rgb = Vec::new();
        for _y in 0..4 {
            for x in 0..4 {
                let v = if x < 2 { 0u8 } else { (100 + k) as u8 };
                rgb.extend([v, v / 2, v / 4]);
            }
        }
        write_png(&frames.join(format!("frame_{:06}.png", k + 1)), 4, 4, &rgb);
    }
    let labels: String = (0..n).map(|k| format!("{}\n", (k as f64 * 0.1).sin())).collect();
    fs::write(dir.join("labels.csv"), labels).unwrap();
    let manifest = RecordingManifest {
        id: "fixture".into(),
        frames_path: "frames".into(),
        labels_path: "labels.csv".into(),
        fps: 30.0,
        label_rate: 30.0,
        dataset_kind: DatasetKind::Generic,
        roi: Some(Roi { x: 2, y: 0, w: 2, h: 4 }),
    };
    fs::write(dir.join("manifest.json"), manifest.to_json()).unwrap();
    RecordingManifest::from_file(&dir.join("manifest.json")).unwrap()
}

#[test]
fn generic_png_directory_loads() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generic_fixture(dir.path(), 64);
    let (frames, labels) = load_recording::<f64>(&manifest).unwrap();
    assert_eq!(frames.len(), 64);
    assert_eq!((frames.height(), frames.width()), (4, 4));
    assert_eq!(labels.samples.len(), 64);

    let trace = spatial_average(&frames, manifest.roi).unwrap();
    assert!((trace.r[5] - 105.0 / 255.0).abs() < 1e-6);
    assert!((trace.g[5] - 52.0 / 255.0).abs() < 1e-6);
    let full = spatial_average(&frames, None).unwrap();
    assert!((full.r[5] - 0.5 * 105.0 / 255.0).abs() < 1e-6);
}

#[test]
fn corrupt_png_reports_its_index() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generic_fixture(dir.path(), 8);
    fs::write(dir.path().join("frames/frame_000004.png"), b"not a png").unwrap();
    match load_recording::<f64>(&manifest) {
        Err(Error::CorruptFrame { index: 3, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_paths_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = generic_fixture(dir.path(), 4);
    manifest.labels_path = dir.path().join("nope.csv");
    assert!(matches!(load_recording::<f32>(&manifest), Err(Error::MissingPath(_))));
    assert!(RecordingManifest::from_file(&dir.path().join("absent.json")).is_err());
}

#[test]
fn zero_fps_manifest_is_rejected() {
    let text = r#"{"id":"a","frames_path":"f","labels_path":"l","fps":0,"label_rate":30,"dataset_kind":"generic"}"#;
    assert!(matches!(RecordingManifest::from_json(text), Err(Error::InvalidManifest(_))));
}

#[test]
fn resampled_sine_labels_track_the_analytic_tone() {
    let f = 1.5;
    let samples: Vec<f64> = (0..1200).map(|k| (2.0 * std::f64::consts::PI * f * k as f64 / 60.0).sin()).collect();
    let labels = LabelSeries::new(samples, 60.0).unwrap();
    let aligned = align_labels(&labels, 30.0, 600).unwrap();
    for (k, v) in aligned.iter().enumerate() {
        let want = (2.0 * std::f64::consts::PI * f * k as f64 / 30.0).sin();
        assert!((v - want).abs() < 1e-3);
    }
    let half = LabelSeries::new(vec![0.0; 500], 60.0).unwrap();
    assert!(matches!(align_labels(&half, 30.0, 600), Err(Error::InsufficientCoverage { .. })));
}

#[test]
fn synthetic_recording_through_chunk_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig { duration_s: 15.0, frame_size: [8, 8], noise_std: 0.01, ..SynthConfig::default() };
    let manifest = write_synthetic_recording::<f32>(&cfg, "rec", &dir.path().join("rec")).unwrap();
    let (frames, labels) = load_recording::<f32>(&manifest).unwrap();
    assert_eq!(frames.len(), 450);
    let chunks = make_chunks(&frames, 180, "rec").unwrap();
    assert_eq!(chunks.len(), 2);
    let aligned = align_labels(&labels, frames.fps(), frames.len()).unwrap();
    let label_chunks: Vec<Vec<f32>> = (0..2).map(|k| aligned[k * 180..(k + 1) * 180].to_vec()).collect();

    let cache = dir.path().join("cache").join("rec");
    let entries = write_chunk_cache(&chunks, &label_chunks, &cache).unwrap();
    for e in &entries {
        let size = fs::metadata(&e.chunk_path).unwrap().len() as usize;
        assert_eq!(size, CHUNK_HEADER_BYTES + 180 * 8 * 8 * 6 * 4);
    }
    let (back, back_labels) = read_chunk_cache(&cache).unwrap();
    assert_eq!(back, chunks);
    assert_eq!(back_labels, label_chunks);
}
