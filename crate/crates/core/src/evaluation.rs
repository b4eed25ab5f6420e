//! Video-level heart-rate metrics and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dsp::{DspConfig, HrEstimate, HrSource};
use crate::error::{Error, Result};
use crate::methods::Method;
use crate::scalar::{pearson, Real};

/// Predicted and gold-standard heart rate of one video under one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoResult {
    pub video_id: String,
    pub method: Method,
    #[serde(rename = "hr_pred_bpm")]
    pub hr_pred: f64,
    #[serde(rename = "hr_label_bpm")]
    pub hr_label: f64,
}

/// A stage failure that removed a video (or a video/method pair) from aggregation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub video_id: String,
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub method: Method,
    pub n_videos: usize,
    pub mae: f64,
    pub rmse: f64,
    /// Percent.
    pub mape: f64,
    /// NaN when undefined (fewer than two videos, or constant HRs).
    pub pearson: f64,
}

impl MetricsReport {
    pub fn pearson_defined(&self) -> bool {
        !self.pearson.is_nan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

pub const REPORT_CSV_HEADER: &str = "method,n_videos,mae_bpm,rmse_bpm,mape_pct,pearson";
pub const RESULTS_CSV_HEADER: &str = "video_id,method,hr_pred_bpm,hr_label_bpm";
pub const EXCLUSIONS_CSV_HEADER: &str = "video_id,stage,error";

/// Gold-standard heart rate, through exactly the same chain as predictions.
pub fn label_hr<T: Real>(labels: &[T], fs: T, dsp: &DspConfig) -> Result<HrEstimate> {
    dsp.heart_rate(labels, fs, None, HrSource::Label)
}

/// MAE, RMSE, MAPE (against label HR, in percent) and Pearson across videos
/// for a single method.
pub fn compute_metrics(results: &[VideoResult]) -> Result<MetricsReport> {
    let first = results.first().ok_or(Error::NoResults)?;
    if let Some(other) = results.iter().find(|r| r.method != first.method) {
        return Err(Error::DegenerateInput(format!(
            "results mix methods {} and {}",
            first.method, other.method
        )));
    }
    let n = results.len() as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut pct_sum = 0.0;
    for r in results {
        let e = r.hr_pred - r.hr_label;
        abs_sum += e.abs();
        sq_sum += e * e;
        pct_sum += e.abs() / r.hr_label;
    }
    let preds: Vec<f64> = results.iter().map(|r| r.hr_pred).collect();
    let labels: Vec<f64> = results.iter().map(|r| r.hr_label).collect();
    let rho = if results.len() >= 2 { pearson(&preds, &labels).unwrap_or(f64::NAN) } else { f64::NAN };
    Ok(MetricsReport {
        method: first.method,
        n_videos: results.len(),
        mae: abs_sum / n,
        rmse: (sq_sum / n).sqrt(),
        mape: 100.0 * pct_sum / n,
        pearson: rho,
    })
}

/// One report per method present, in method order. Input order is irrelevant.
pub fn aggregate(results: &[VideoResult]) -> Result<Vec<MetricsReport>> {
    if results.is_empty() {
        return Err(Error::NoResults);
    }
    let mut by_method: BTreeMap<Method, Vec<VideoResult>> = BTreeMap::new();
    for r in results {
        by_method.entry(r.method).or_default().push(r.clone());
    }
    by_method
        .into_values()
        .map(|mut rs| {
            rs.sort_by(|a, b| a.video_id.cmp(&b.video_id));
            compute_metrics(&rs)
        })
        .collect()
}

fn fixed2(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Table with columns `[method, n_videos, MAE, RMSE, MAPE, Pearson]`, one row
/// per method in method order, values to two decimals.
pub fn render_report(reports: &[MetricsReport], format: ReportFormat) -> String {
    let mut rows: Vec<&MetricsReport> = reports.iter().collect();
    rows.sort_by_key(|r| r.method);
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(REPORT_CSV_HEADER);
            out.push('\n');
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.method,
                    r.n_videos,
                    fixed2(r.mae),
                    fixed2(r.rmse),
                    fixed2(r.mape),
                    fixed2(r.pearson)
                );
            }
        }
        ReportFormat::Markdown => {
            out.push_str("| method | n_videos | MAE | RMSE | MAPE | Pearson |\n");
            out.push_str("|---|---:|---:|---:|---:|---:|\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    r.method,
                    r.n_videos,
                    fixed2(r.mae),
                    fixed2(r.rmse),
                    fixed2(r.mape),
                    fixed2(r.pearson)
                );
            }
        }
    }
    out
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

/// Per-video results CSV, rows sorted by `(video_id, method)`.
pub fn results_to_csv(results: &[VideoResult]) -> String {
    let mut rows = results.to_vec();
    rows.sort_by(|a, b| a.video_id.cmp(&b.video_id).then(a.method.cmp(&b.method)));
    let mut w = csv_writer();
    w.write_record(RESULTS_CSV_HEADER.split(',')).unwrap();
    for r in &rows {
        w.serialize(r).unwrap();
    }
    finish_csv(w)
}

pub fn exclusions_to_csv(exclusions: &[Exclusion]) -> String {
    let mut rows = exclusions.to_vec();
    rows.sort_by(|a, b| (&a.video_id, &a.stage, &a.error).cmp(&(&b.video_id, &b.stage, &b.error)));
    let mut w = csv_writer();
    w.write_record(EXCLUSIONS_CSV_HEADER.split(',')).unwrap();
    for e in &rows {
        w.serialize(e).unwrap();
    }
    finish_csv(w)
}

/// Parse a per-video results CSV; errors carry the 1-based line number.
pub fn parse_results_csv(text: &str) -> Result<Vec<VideoResult>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::ResultsParse { line: 1, reason: e.to_string() })?
        .clone();
    if headers.iter().collect::<Vec<_>>().join(",") != RESULTS_CSV_HEADER {
        if headers.is_empty() {
            return Err(Error::NoResults);
        }
        return Err(Error::ResultsParse { line: 1, reason: format!("expected header {RESULTS_CSV_HEADER:?}") });
    }
    let mut out = Vec::new();
    for rec in reader.deserialize::<VideoResult>() {
        let r = rec.map_err(|e| Error::ResultsParse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            reason: e.to_string(),
        })?;
        out.push(r);
    }
    if out.is_empty() {
        return Err(Error::NoResults);
    }
    Ok(out)
}
