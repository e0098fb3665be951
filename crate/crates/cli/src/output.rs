use std::io::Write;

use serde::Serialize;
use species_core::{Family, ModelParams, SampleSummary};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct ModelOut {
    pub family: Family,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl From<&ModelParams> for ModelOut {
    fn from(p: &ModelParams) -> Self {
        ModelOut {
            family: p.family(),
            sigma: p.sigma(),
            beta: p.beta(),
            theta: p.theta(),
        }
    }
}

/// Fields shared by every JSON document.
#[derive(Debug, Serialize)]
pub struct Header {
    pub command: &'static str,
    pub model: ModelOut,
    pub sample: SampleSummary,
}

impl Header {
    pub fn new(config: &RunConfig) -> Self {
        Header {
            command: config.command.name(),
            model: ModelOut::from(&config.model),
            sample: config.sample,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PmfRow {
    pub k: usize,
    pub prob: f64,
}

#[derive(Debug, Serialize)]
pub struct PmfDoc {
    #[serde(flatten)]
    pub header: Header,
    pub m: usize,
    pub precision_bits: u32,
    pub mean: f64,
    pub pmf: Vec<PmfRow>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Asymptotic,
}

#[derive(Debug, Serialize)]
pub struct MonteCarloMeta {
    pub seed: u64,
    pub draws: usize,
    pub mc_stderr: f64,
    /// The limit law is used at leading order only.
    pub bias_correction: &'static str,
}

#[derive(Debug, Serialize)]
pub struct EstimateDoc {
    #[serde(flatten)]
    pub header: Header,
    pub m: usize,
    pub method: Method,
    pub point: f64,
    pub interval: [f64; 2],
    /// "hpd" for the exact engine, "equal-tailed" for the limit-law engine.
    pub interval_kind: &'static str,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloMeta>,
}

#[derive(Debug, Serialize)]
pub struct HpdDoc {
    #[serde(flatten)]
    pub header: Header,
    pub m: usize,
    pub level: f64,
    pub lo: usize,
    pub hi: usize,
    pub mass: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulateDoc {
    #[serde(flatten)]
    pub header: Header,
    pub m: usize,
    pub seed: u64,
    pub draws: usize,
    pub k: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct SampleLimitDoc {
    #[serde(flatten)]
    pub header: Header,
    pub seed: u64,
    pub draws: usize,
    pub z: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct CheckOut {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct ValidateDoc {
    #[serde(flatten)]
    pub header: Header,
    pub m: usize,
    pub passed: bool,
    pub checks: Vec<CheckOut>,
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, doc: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, doc)?;
    writeln!(out)?;
    Ok(())
}

/// CSV with a header row; `rows` yields one record per line.
pub fn write_csv<I, R>(out: &mut dyn Write, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit<T: Serialize>(
    config: &RunConfig,
    out: &mut dyn Write,
    doc: &T,
    csv_header: &[&str],
    csv_rows: Vec<Vec<String>>,
) -> Result<(), CliError> {
    match config.output_format {
        OutputFormat::Json => write_json(out, doc),
        OutputFormat::Csv => write_csv(out, csv_header, csv_rows),
    }
}
