//! `rppg` command line: `preprocess`, `run`, `evaluate` and `synth`.
//!
//! Exit codes: 0 when everything succeeded, 1 when some recordings or
//! (recording, method) pairs were excluded or a command failed at runtime,
//! 2 for invalid usage, configuration or input files.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rppg_core::Error;

use crate::config::{Override, RunConfig, SynthBatch};

#[derive(Debug, Parser)]
#[command(name = "rppg", version, about = "Remote photoplethysmography benchmark harness")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 uses available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load recordings, align labels and write the six-channel chunk cache.
    Preprocess(PipelineArgs),
    /// Run methods on every recording and write per-video results.
    Run(PipelineArgs),
    /// Aggregate a results CSV into a metrics report.
    Evaluate {
        /// Per-video results CSV written by `run`.
        results: PathBuf,
    },
    /// Generate synthetic recordings from a batch config (or `--config`).
    Synth {
        batch: Option<PathBuf>,
    },
}

/// Flags named after the configuration keys they override.
#[derive(Debug, Default, Args)]
pub struct PipelineArgs {
    /// Manifest paths or glob patterns (comma separated or repeated).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub manifests: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub methods: Option<Vec<String>>,
    #[arg(long = "chunk_mode")]
    pub chunk_mode: Option<String>,
    #[arg(long = "chunk_len")]
    pub chunk_len: Option<usize>,
    /// PBV signature as `r,g,b`.
    #[arg(long = "pbv_signature")]
    pub pbv_signature: Option<String>,
    #[arg(long = "filter.low_hz")]
    pub filter_low_hz: Option<f64>,
    #[arg(long = "filter.high_hz")]
    pub filter_high_hz: Option<f64>,
    #[arg(long = "filter.order")]
    pub filter_order: Option<usize>,
    #[arg(long = "detrend.enabled")]
    pub detrend_enabled: Option<bool>,
    #[arg(long = "detrend.lambda")]
    pub detrend_lambda: Option<f64>,
    #[arg(long = "hr.pad_factor")]
    pub hr_pad_factor: Option<usize>,
}

fn strings(v: &[String]) -> toml::Value {
    toml::Value::Array(v.iter().map(|s| toml::Value::String(s.clone())).collect())
}

fn int(v: usize) -> toml::Value {
    toml::Value::Integer(v as i64)
}

impl Cli {
    fn global_overrides(&self) -> Vec<Override> {
        let mut o = Vec::new();
        if let Some(p) = &self.output {
            o.push(("output_dir".into(), toml::Value::String(p.display().to_string())));
        }
        o
    }

    fn run_overrides(&self, args: &PipelineArgs) -> Result<Vec<Override>, Error> {
        let mut o = self.global_overrides();
        if let Some(j) = self.jobs {
            o.push(("jobs".into(), int(j)));
        }
        if let Some(s) = self.seed {
            o.push(("seed".into(), toml::Value::Integer(s as i64)));
        }
        if let Some(v) = &args.manifests {
            o.push(("manifests".into(), strings(v)));
        }
        if let Some(v) = &args.methods {
            o.push(("methods".into(), strings(v)));
        }
        if let Some(v) = &args.chunk_mode {
            o.push(("chunk_mode".into(), toml::Value::String(v.clone())));
        }
        if let Some(v) = args.chunk_len {
            o.push(("chunk_len".into(), int(v)));
        }
        if let Some(v) = &args.pbv_signature {
            let sig = v
                .split(',')
                .map(|p| p.trim().parse::<f64>().map(toml::Value::Float))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::ConfigInvalid(format!("pbv_signature {v:?}: {e}")))?;
            o.push(("pbv_signature".into(), toml::Value::Array(sig)));
        }
        let floats = [
            ("filter.low_hz", args.filter_low_hz),
            ("filter.high_hz", args.filter_high_hz),
            ("detrend.lambda", args.detrend_lambda),
        ];
        for (k, v) in floats {
            if let Some(v) = v {
                o.push((k.into(), toml::Value::Float(v)));
            }
        }
        if let Some(v) = args.filter_order {
            o.push(("filter.order".into(), int(v)));
        }
        if let Some(v) = args.detrend_enabled {
            o.push(("detrend.enabled".into(), toml::Value::Boolean(v)));
        }
        if let Some(v) = args.hr_pad_factor {
            o.push(("hr.pad_factor".into(), int(v)));
        }
        Ok(o)
    }
}

/// Errors caused by the caller's input rather than by a recording.
fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::ConfigInvalid(_)
            | Error::InvalidManifest(_)
            | Error::MissingPath(_)
            | Error::NoResults
            | Error::ResultsParse { .. }
            | Error::InvalidBand { .. }
    )
}

fn exit_code_for(e: &Error) -> i32 {
    if is_usage_error(e) {
        2
    } else {
        1
    }
}

fn report_exclusions(n: usize) -> i32 {
    if n > 0 {
        eprintln!("{n} exclusion(s) logged");
        1
    } else {
        0
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Preprocess(args) => {
            let cfg = RunConfig::load(cli.config.as_deref(), &cli.run_overrides(args)?)?;
            let s = commands::cmd_preprocess(&cfg)?;
            println!("{} chunks indexed in {}", s.rows.len(), s.index_path.display());
            Ok(report_exclusions(s.exclusions.len()))
        }
        Command::Run(args) => {
            let cfg = RunConfig::load(cli.config.as_deref(), &cli.run_overrides(args)?)?;
            let s = commands::cmd_run(&cfg)?;
            println!("{} results written to {}", s.results.len(), s.results_path.display());
            Ok(report_exclusions(s.exclusions.len()))
        }
        Command::Evaluate { results } => {
            let out = match &cli.output {
                Some(p) => p.clone(),
                None => results.parent().map(PathBuf::from).unwrap_or_default(),
            };
            let s = commands::cmd_evaluate(results, &out)?;
            print!("{}", s.markdown);
            Ok(0)
        }
        Command::Synth { batch } => {
            let path = batch.as_deref().or(cli.config.as_deref());
            let mut overrides = cli.global_overrides();
            if let Some(s) = cli.seed {
                overrides.push(("base.seed".into(), toml::Value::Integer(s as i64)));
            }
            let b = SynthBatch::load(path, &overrides)?;
            let s = commands::cmd_synth(&b, cli.jobs.unwrap_or(0))?;
            println!("{} recordings written to {}", s.manifests.len(), b.output_dir.display());
            Ok(0)
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
