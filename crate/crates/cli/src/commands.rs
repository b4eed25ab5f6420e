//! The four subcommands. Each returns a summary; per-recording failures are
//! collected as exclusions instead of aborting the batch.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rppg_core::dsp::HrSource;
use rppg_core::evaluation::{
    aggregate, exclusions_to_csv, label_hr, parse_results_csv, render_report, results_to_csv, Exclusion,
    MetricsReport, ReportFormat, VideoResult,
};
use rppg_core::ingestion::{
    align_labels, diff_normalize, load_recording, make_chunks, spatial_average, write_chunk_cache, RecordingManifest,
};
use rppg_core::methods::{recover, BvpSignal, Method};
use rppg_core::synth::write_synthetic_recording;
use rppg_core::{Error, Result};
use sha2::{Digest, Sha256};

use crate::config::{ChunkMode, RunConfig, SynthBatch};

pub const INDEX_HEADER: &str = "video_id,chunk_index,chunk_file,chunk_sha256,label_file,label_sha256";

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::ConfigInvalid(format!("worker pool: {e}")))
}

fn exclusion(video_id: &str, stage: &str, err: &Error) -> Exclusion {
    Exclusion { video_id: video_id.to_string(), stage: stage.to_string(), error: err.to_string() }
}

/// Manifests in path order; unreadable ones become `manifest` exclusions keyed by path.
fn load_manifests(cfg: &RunConfig) -> Result<(Vec<RecordingManifest>, Vec<Exclusion>)> {
    let mut manifests = Vec::new();
    let mut excluded = Vec::new();
    for path in cfg.manifest_paths()? {
        match RecordingManifest::from_file(&path) {
            Ok(m) => manifests.push(m),
            Err(e) => excluded.push(exclusion(&path.display().to_string(), "manifest", &e)),
        }
    }
    let mut seen = HashSet::new();
    for m in &manifests {
        if m.id.contains(['/', '\\']) || m.id == "." || m.id == ".." {
            return Err(Error::InvalidManifest(format!("recording id {:?} is not a valid directory name", m.id)));
        }
        if !seen.insert(m.id.clone()) {
            return Err(Error::InvalidManifest(format!("duplicate recording id {:?}", m.id)));
        }
    }
    Ok((manifests, excluded))
}

fn write_sidecar(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(cfg.output_dir.join("resolved_config.toml"), cfg.to_toml())?;
    Ok(())
}

fn sha256_hex(path: &Path) -> Result<String> {
    let digest = Sha256::digest(fs::read(path)?);
    Ok(digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRow {
    pub video_id: String,
    pub chunk_index: usize,
    pub chunk_file: String,
    pub chunk_sha256: String,
    pub label_file: String,
    pub label_sha256: String,
}

#[derive(Debug)]
pub struct PreprocessSummary {
    pub index_path: PathBuf,
    pub rows: Vec<IndexRow>,
    pub exclusions: Vec<Exclusion>,
}

fn preprocess_one(m: &RecordingManifest, chunk_len: usize, cache_dir: &Path) -> std::result::Result<Vec<IndexRow>, Exclusion> {
    let (frames, labels) = load_recording::<f32>(m).map_err(|e| exclusion(&m.id, "load", &e))?;
    let aligned = align_labels(&labels, frames.fps(), frames.len()).map_err(|e| exclusion(&m.id, "align", &e))?;
    let chunks = make_chunks(&frames, chunk_len, &m.id).map_err(|e| exclusion(&m.id, "chunk", &e))?;
    let label_chunks = chunks
        .iter()
        .map(|c| diff_normalize(&aligned[c.chunk_index * chunk_len..(c.chunk_index + 1) * chunk_len]))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| exclusion(&m.id, "chunk", &e))?;

    let dir = cache_dir.join(&m.id);
    let write = || -> Result<Vec<IndexRow>> {
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        let entries = write_chunk_cache(&chunks, &label_chunks, &dir)?;
        entries
            .iter()
            .map(|e| {
                let rel = |p: &Path| format!("{}/{}", m.id, p.file_name().unwrap().to_string_lossy());
                Ok(IndexRow {
                    video_id: m.id.clone(),
                    chunk_index: e.chunk_index,
                    chunk_file: rel(&e.chunk_path),
                    chunk_sha256: sha256_hex(&e.chunk_path)?,
                    label_file: rel(&e.label_path),
                    label_sha256: sha256_hex(&e.label_path)?,
                })
            })
            .collect()
    };
    write().map_err(|e| exclusion(&m.id, "cache", &e))
}

/// Load, align, chunk and cache every recording under `<output_dir>/cache`,
/// then write `index.csv` and `exclusions.csv` there.
pub fn cmd_preprocess(cfg: &RunConfig) -> Result<PreprocessSummary> {
    cfg.validate()?;
    let (manifests, mut exclusions) = load_manifests(cfg)?;
    write_sidecar(cfg)?;
    let cache_dir = cfg.output_dir.join("cache");
    fs::create_dir_all(&cache_dir)?;

    let outcomes: Vec<_> = pool(cfg.jobs)?
        .install(|| manifests.par_iter().map(|m| preprocess_one(m, cfg.chunk_len, &cache_dir)).collect());
    let mut rows = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => rows.extend(r),
            Err(x) => exclusions.push(x),
        }
    }
    rows.sort_by(|a, b| (&a.video_id, a.chunk_index).cmp(&(&b.video_id, b.chunk_index)));

    let mut index = String::from(INDEX_HEADER);
    index.push('\n');
    for r in &rows {
        let _ = writeln!(
            index,
            "{},{},{},{},{},{}",
            r.video_id, r.chunk_index, r.chunk_file, r.chunk_sha256, r.label_file, r.label_sha256
        );
    }
    let index_path = cache_dir.join("index.csv");
    fs::write(&index_path, index)?;
    fs::write(cache_dir.join("exclusions.csv"), exclusions_to_csv(&exclusions))?;
    Ok(PreprocessSummary { index_path, rows, exclusions })
}

#[derive(Debug)]
pub struct RunSummary {
    pub results_path: PathBuf,
    pub results: Vec<VideoResult>,
    pub exclusions: Vec<Exclusion>,
}

fn chunked_bvp(
    method: Method,
    trace: &rppg_core::RgbTrace64,
    chunk_len: usize,
    opts: &rppg_core::methods::MethodOptions,
) -> Result<Vec<f64>> {
    let n_chunks = trace.len() / chunk_len;
    let mut out = Vec::with_capacity(n_chunks * chunk_len);
    for k in 0..n_chunks {
        let BvpSignal { samples, .. } = recover(method, &trace.slice(k * chunk_len, (k + 1) * chunk_len), opts)?;
        out.extend(samples);
    }
    Ok(out)
}

fn run_one(m: &RecordingManifest, cfg: &RunConfig) -> (Vec<VideoResult>, Vec<Exclusion>) {
    let mut results = Vec::new();
    let mut excluded = Vec::new();
    let dsp = cfg.dsp();
    let opts = match cfg.method_options() {
        Ok(o) => o,
        Err(e) => return (results, vec![exclusion(&m.id, "config", &e)]),
    };
    let prepared = (|| -> std::result::Result<_, Exclusion> {
        let (frames, labels) = load_recording::<f64>(m).map_err(|e| exclusion(&m.id, "load", &e))?;
        let fps = frames.fps();
        let mut trace = spatial_average(&frames, m.roi).map_err(|e| exclusion(&m.id, "trace", &e))?;
        drop(frames);
        let mut aligned = align_labels(&labels, fps, trace.len()).map_err(|e| exclusion(&m.id, "align", &e))?;
        if cfg.chunk_mode == ChunkMode::Chunk {
            let used = trace.len() / cfg.chunk_len * cfg.chunk_len;
            if used == 0 {
                let e = Error::TooShort { what: "chunked recording", needed: cfg.chunk_len, got: trace.len() };
                return Err(exclusion(&m.id, "chunk", &e));
            }
            trace = trace.slice(0, used);
            aligned.truncate(used);
        }
        let label = label_hr(&aligned, fps, &dsp).map_err(|e| exclusion(&m.id, "label", &e))?;
        Ok((trace, fps, label.bpm))
    })();
    let (trace, fps, label_bpm) = match prepared {
        Ok(p) => p,
        Err(x) => return (results, vec![x]),
    };

    for &method in &cfg.methods {
        let bvp = match cfg.chunk_mode {
            ChunkMode::Video => recover(method, &trace, &opts).map(|b| b.samples),
            ChunkMode::Chunk => chunked_bvp(method, &trace, cfg.chunk_len, &opts),
        };
        match bvp.and_then(|b| dsp.heart_rate(&b, fps, Some(method), HrSource::Prediction)) {
            Ok(est) => results.push(VideoResult {
                video_id: m.id.clone(),
                method,
                hr_pred: est.bpm,
                hr_label: label_bpm,
            }),
            Err(e) => excluded.push(exclusion(&m.id, method.name(), &e)),
        }
    }
    (results, excluded)
}

/// Every (recording, method) pair through trace, method, postprocessing and
/// HR; writes `results.csv` and `exclusions.csv` under `output_dir`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    cfg.method_options()?;
    let (manifests, mut exclusions) = load_manifests(cfg)?;
    write_sidecar(cfg)?;

    let outcomes: Vec<_> = pool(cfg.jobs)?.install(|| manifests.par_iter().map(|m| run_one(m, cfg)).collect());
    let mut results = Vec::new();
    for (r, x) in outcomes {
        results.extend(r);
        exclusions.extend(x);
    }
    results.sort_by(|a, b| a.video_id.cmp(&b.video_id).then(a.method.cmp(&b.method)));

    let results_path = cfg.output_dir.join("results.csv");
    fs::write(&results_path, results_to_csv(&results))?;
    fs::write(cfg.output_dir.join("exclusions.csv"), exclusions_to_csv(&exclusions))?;
    Ok(RunSummary { results_path, results, exclusions })
}

#[derive(Debug)]
pub struct EvaluateSummary {
    pub reports: Vec<MetricsReport>,
    pub csv_path: PathBuf,
    pub markdown_path: PathBuf,
    pub markdown: String,
}

/// Aggregate a results CSV into `report.csv` and `report.md` in `output_dir`.
pub fn cmd_evaluate(results_path: &Path, output_dir: &Path) -> Result<EvaluateSummary> {
    if !results_path.exists() {
        return Err(Error::MissingPath(results_path.to_path_buf()));
    }
    let results = parse_results_csv(&fs::read_to_string(results_path)?)?;
    let reports = aggregate(&results)?;
    fs::create_dir_all(output_dir)?;
    let csv_path = output_dir.join("report.csv");
    let markdown_path = output_dir.join("report.md");
    let markdown = render_report(&reports, ReportFormat::Markdown);
    fs::write(&csv_path, render_report(&reports, ReportFormat::Csv))?;
    fs::write(&markdown_path, &markdown)?;
    Ok(EvaluateSummary { reports, csv_path, markdown_path, markdown })
}

#[derive(Debug)]
pub struct SynthSummary {
    /// Manifest files written, in id order.
    pub manifests: Vec<PathBuf>,
}

/// Write every recording of the batch to `<output_dir>/<id>/`. All configs
/// are validated before anything is written.
pub fn cmd_synth(batch: &SynthBatch, jobs: usize) -> Result<SynthSummary> {
    let recordings = batch.recordings();
    for (_, cfg) in &recordings {
        cfg.validate()?;
    }
    fs::create_dir_all(&batch.output_dir)?;
    let written: Vec<Result<PathBuf>> = pool(jobs)?.install(|| {
        recordings
            .par_iter()
            .map(|(id, cfg)| {
                let dir = batch.output_dir.join(id);
                write_synthetic_recording::<f32>(cfg, id, &dir)?;
                Ok(dir.join("manifest.json"))
            })
            .collect()
    });
    Ok(SynthSummary { manifests: written.into_iter().collect::<Result<_>>()? })
}
