//! Run and synth configuration: TOML file, command-line overrides, defaults.
//!
//! Overrides are merged into the parsed file as dotted keys before
//! deserialisation, so a flag always wins over the file and the file over the
//! built-in default.

use std::fs;
use std::path::{Path, PathBuf};

use rppg_core::dsp::{DetrendConfig, DspConfig, FilterConfig, HrConfig};
use rppg_core::ingestion::DEFAULT_CHUNK_LEN;
use rppg_core::methods::{Method, MethodOptions, PbvSignature};
use rppg_core::synth::{HrSpec, SynthConfig};
use rppg_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkMode {
    /// One BVP and one HR per recording.
    #[default]
    Video,
    /// Methods run on consecutive non-overlapping chunks whose BVPs are
    /// concatenated before the per-recording HR estimate.
    Chunk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Manifest paths or glob patterns.
    pub manifests: Vec<String>,
    pub methods: Vec<Method>,
    pub chunk_mode: ChunkMode,
    pub chunk_len: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 means available parallelism.
    pub jobs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pbv_signature: Option<[f64; 3]>,
    pub filter: FilterConfig,
    pub detrend: DetrendConfig,
    pub hr: HrConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifests: Vec::new(),
            methods: Method::ALL.to_vec(),
            chunk_mode: ChunkMode::Video,
            chunk_len: DEFAULT_CHUNK_LEN,
            output_dir: PathBuf::from("rppg_out"),
            seed: 0,
            jobs: 0,
            pbv_signature: None,
            filter: FilterConfig::default(),
            detrend: DetrendConfig::default(),
            hr: HrConfig::default(),
        }
    }
}

/// One `dotted.key = value` override taken from the command line.
pub type Override = (String, toml::Value);

fn read_table(path: Option<&Path>) -> Result<toml::Table> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    if !path.exists() {
        return Err(Error::MissingPath(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    text.parse::<toml::Table>()
        .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))
}

fn apply_overrides(table: &mut toml::Table, overrides: &[Override]) -> Result<()> {
    for (key, value) in overrides {
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().expect("split yields at least one part");
        let mut cur = &mut *table;
        for p in parts {
            let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cur = entry
                .as_table_mut()
                .ok_or_else(|| Error::ConfigInvalid(format!("`{p}` is not a table")))?;
        }
        cur.insert(last.to_string(), value.clone());
    }
    Ok(())
}

/// Parse `path` (if any), apply `overrides`, fill the rest from defaults.
pub fn resolve<C: DeserializeOwned>(path: Option<&Path>, overrides: &[Override]) -> Result<C> {
    let mut table = read_table(path)?;
    apply_overrides(&mut table, overrides)?;
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::ConfigInvalid(e.message().to_string()))
}

fn has_glob_chars(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &[Override]) -> Result<Self> {
        let cfg: Self = resolve(path, overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.manifests.is_empty() {
            return Err(Error::ConfigInvalid("no manifests given".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::ConfigInvalid("no methods given".into()));
        }
        if self.chunk_len < 2 {
            return Err(Error::ConfigInvalid(format!("chunk_len must be at least 2, got {}", self.chunk_len)));
        }
        if let Some(sig) = self.pbv_signature {
            PbvSignature::new(sig)?;
        }
        self.dsp().validate()
    }

    pub fn dsp(&self) -> DspConfig {
        DspConfig { filter: self.filter, detrend: self.detrend, hr: self.hr }
    }

    pub fn method_options(&self) -> Result<MethodOptions> {
        Ok(MethodOptions {
            filter: self.filter,
            pbv_signature: self.pbv_signature.map(PbvSignature::new).transpose()?,
            pad_factor: Some(self.hr.pad_factor),
        })
    }

    /// Expand glob patterns; literal paths are kept even if missing so the
    /// failure is reported per recording. Sorted and de-duplicated.
    pub fn manifest_paths(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for pattern in &self.manifests {
            if !has_glob_chars(pattern) {
                out.push(PathBuf::from(pattern));
                continue;
            }
            let paths = glob::glob(pattern).map_err(|e| Error::ConfigInvalid(format!("pattern {pattern:?}: {e}")))?;
            for p in paths {
                out.push(p.map_err(|e| Error::Io(e.into()))?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::ConfigInvalid("manifest patterns matched no files".into()));
        }
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serialises")
    }
}

/// A batch of synthetic recordings sharing one base configuration.
///
/// Recording `i` uses seed `base.seed + i`. With `hr_bpm_range = [lo, hi]` the
/// heart rates are spaced uniformly from `lo` to `hi`; otherwise every
/// recording uses `base.hr_bpm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthBatch {
    pub count: usize,
    pub id_prefix: String,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hr_bpm_range: Option<[f64; 2]>,
    pub base: SynthConfig,
}

impl Default for SynthBatch {
    fn default() -> Self {
        Self {
            count: 1,
            id_prefix: "synth".into(),
            output_dir: PathBuf::from("synth_out"),
            hr_bpm_range: None,
            base: SynthConfig::default(),
        }
    }
}

impl SynthBatch {
    pub fn load(path: Option<&Path>, overrides: &[Override]) -> Result<Self> {
        let batch: Self = resolve(path, overrides)?;
        if batch.count == 0 {
            return Err(Error::ConfigInvalid("count must be at least 1".into()));
        }
        if batch.id_prefix.is_empty() || batch.id_prefix.contains(['/', '\\']) {
            return Err(Error::ConfigInvalid(format!("invalid id_prefix {:?}", batch.id_prefix)));
        }
        for (_, cfg) in batch.recordings() {
            cfg.validate()?;
        }
        Ok(batch)
    }

    /// `(id, config)` of every recording in the batch.
    pub fn recordings(&self) -> Vec<(String, SynthConfig)> {
        (0..self.count)
            .map(|i| {
                let mut cfg = self.base.clone();
                cfg.seed = self.base.seed.wrapping_add(i as u64);
                if let Some([lo, hi]) = self.hr_bpm_range {
                    let t = if self.count > 1 { i as f64 / (self.count - 1) as f64 } else { 0.0 };
                    cfg.hr_bpm = HrSpec::Constant(lo + (hi - lo) * t);
                }
                (format!("{}_{i:03}", self.id_prefix), cfg)
            })
            .collect()
    }
}
