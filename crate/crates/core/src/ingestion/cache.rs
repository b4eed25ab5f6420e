//! Little-endian binary containers: raw frame tensors (`RPGF`), cached chunks
//! (`RPGC`) and cached chunk labels (`RPGL`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{FrameSequence, VideoChunk};
use crate::error::{Error, Result};
use crate::scalar::Real;

const FRAMES_MAGIC: &[u8; 4] = b"RPGF";
const CHUNK_MAGIC: &[u8; 4] = b"RPGC";
const LABEL_MAGIC: &[u8; 4] = b"RPGL";
const VERSION: u32 = 1;

pub const FRAMES_HEADER_BYTES: usize = 4 + 4 * 4;
pub const CHUNK_HEADER_BYTES: usize = 4 + 5 * 4;
pub const LABEL_HEADER_BYTES: usize = 4 + 2 * 4;

/// One cached chunk with its label file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub chunk_index: usize,
    pub chunk_path: PathBuf,
    pub label_path: PathBuf,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], path: &'a Path, magic: &'static [u8; 4]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::TruncatedFile(path.to_path_buf()));
        }
        if &bytes[..4] != magic {
            return Err(Error::BadMagic {
                path: path.to_path_buf(),
                expected: std::str::from_utf8(magic).unwrap(),
            });
        }
        let mut r = Self { bytes, pos: 4, path };
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::VersionMismatch { path: path.to_path_buf(), found: version });
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::TruncatedFile(self.path.to_path_buf()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn dim(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    fn f32s(&mut self, count: usize) -> Result<Vec<f32>> {
        let raw = self.take(count.checked_mul(4).ok_or_else(|| Error::TruncatedFile(self.path.to_path_buf()))?)?;
        Ok(raw.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::CorruptFrame {
                index: 0,
                reason: format!("{}: {} trailing bytes", self.path.display(), self.bytes.len() - self.pos),
            });
        }
        Ok(())
    }
}

fn header(magic: &[u8; 4], dims: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + dims.len() * 4);
    out.extend_from_slice(magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for &d in dims {
        let d = u32::try_from(d).expect("dimension fits in u32");
        out.extend_from_slice(&d.to_le_bytes());
    }
    out
}

fn push_f32s<T: Real>(out: &mut Vec<u8>, values: &[T]) {
    out.reserve(values.len() * 4);
    for v in values {
        let f = v.to_f32().expect("finite value");
        out.extend_from_slice(&f.to_le_bytes());
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Write a frame tensor as `frames.bin` (float32 payload).
pub fn write_frames_bin<T: Real>(frames: &FrameSequence<T>, path: &Path) -> Result<()> {
    let mut bytes = header(FRAMES_MAGIC, &[frames.len(), frames.height(), frames.width()]);
    push_f32s(&mut bytes, frames.data());
    write_atomic(path, &bytes)
}

/// Read a `frames.bin` tensor; values outside `[0, 1]` are reported as corrupt frames.
pub fn read_frames_bin<T: Real>(path: &Path, fps: T) -> Result<FrameSequence<T>> {
    let bytes = fs::read(path)?;
    let mut r = Reader::new(&bytes, path, FRAMES_MAGIC)?;
    let (n, h, w) = (r.dim()?, r.dim()?, r.dim()?);
    let values = r.f32s(n * h * w * 3)?;
    r.finish()?;
    let frame_len = (h * w * 3).max(1);
    if let Some(pos) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::CorruptFrame {
            index: pos / frame_len,
            reason: format!("value {} outside [0, 1]", values[pos]),
        });
    }
    let data = values.into_iter().map(|v| T::from_f32(v).unwrap()).collect();
    FrameSequence::new(data, n, h, w, fps)
}

fn chunk_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("chunk_{k}.rpc"))
}

fn label_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("labels_{k}.rpl"))
}

/// Write every chunk and its label slice into `dir`, one file pair per chunk.
pub fn write_chunk_cache(chunks: &[VideoChunk<f32>], labels: &[Vec<f32>], dir: &Path) -> Result<Vec<CacheEntry>> {
    if chunks.len() != labels.len() {
        return Err(Error::InvalidManifest(format!(
            "{} chunks but {} label slices",
            chunks.len(),
            labels.len()
        )));
    }
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(chunks.len());
    for (chunk, lab) in chunks.iter().zip(labels) {
        let k = chunk.chunk_index;
        let mut bytes = header(CHUNK_MAGIC, &[chunk.chunk_len, chunk.height, chunk.width, VideoChunk::<f32>::CHANNELS]);
        push_f32s(&mut bytes, &chunk.data);
        let cp = chunk_path(dir, k);
        write_atomic(&cp, &bytes)?;

        let mut bytes = header(LABEL_MAGIC, &[lab.len()]);
        push_f32s(&mut bytes, lab);
        let lp = label_path(dir, k);
        write_atomic(&lp, &bytes)?;
        entries.push(CacheEntry { chunk_index: k, chunk_path: cp, label_path: lp });
    }
    Ok(entries)
}

fn read_chunk(path: &Path, source_id: &str, chunk_index: usize) -> Result<VideoChunk<f32>> {
    let bytes = fs::read(path)?;
    let mut r = Reader::new(&bytes, path, CHUNK_MAGIC)?;
    let (len, h, w, c) = (r.dim()?, r.dim()?, r.dim()?, r.dim()?);
    if c != VideoChunk::<f32>::CHANNELS {
        return Err(Error::CorruptFrame { index: 0, reason: format!("{}: {c} channels", path.display()) });
    }
    let data = r.f32s(len * h * w * c)?;
    r.finish()?;
    Ok(VideoChunk { data, chunk_len: len, height: h, width: w, source_id: source_id.to_string(), chunk_index })
}

fn read_labels(path: &Path) -> Result<Vec<f32>> {
    let bytes = fs::read(path)?;
    let mut r = Reader::new(&bytes, path, LABEL_MAGIC)?;
    let len = r.dim()?;
    let out = r.f32s(len)?;
    r.finish()?;
    Ok(out)
}

/// Read back every `chunk_<k>.rpc` / `labels_<k>.rpl` pair in `dir`, ordered by `k`.
/// The directory name becomes each chunk's `source_id`.
pub fn read_chunk_cache(dir: &Path) -> Result<(Vec<VideoChunk<f32>>, Vec<Vec<f32>>)> {
    if !dir.is_dir() {
        return Err(Error::MissingPath(dir.to_path_buf()));
    }
    let source_id = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut indices: Vec<usize> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            name.strip_prefix("chunk_")?.strip_suffix(".rpc")?.parse().ok()
        })
        .collect();
    indices.sort_unstable();
    let mut chunks = Vec::with_capacity(indices.len());
    let mut labels = Vec::with_capacity(indices.len());
    for k in indices {
        chunks.push(read_chunk(&chunk_path(dir, k), &source_id, k)?);
        let lp = label_path(dir, k);
        if !lp.exists() {
            return Err(Error::MissingPath(lp));
        }
        labels.push(read_labels(&lp)?);
    }
    Ok((chunks, labels))
}
