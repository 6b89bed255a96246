//! Result rows and their CSV/JSON emission. Column order is part of the
//! contract: it is the declaration order of each row struct and is listed in
//! [`Row::COLUMNS`].

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config(
                "format",
                format!("unknown format `{other}` (csv or json)"),
            )),
        }
    }
}

pub trait Row: Serialize + DeserializeOwned {
    const COLUMNS: &'static [&'static str];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvSweepRow {
    pub experiment_id: String,
    pub channel: String,
    pub n: usize,
    #[serde(rename = "R_nats")]
    pub r_nats: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub codebook_seed: Option<u64>,
    pub tv: f64,
    pub tv_stderr: Option<f64>,
    /// `exact-enumeration`, `monte-carlo`, or `summary-mean` / `summary-max`.
    pub method: String,
    pub p2_mass: Option<f64>,
    pub epsilon: Option<f64>,
    pub wall_ms: u64,
}

impl Row for TvSweepRow {
    const COLUMNS: &'static [&'static str] = &[
        "experiment_id",
        "channel",
        "n",
        "R_nats",
        "M",
        "codebook_seed",
        "tv",
        "tv_stderr",
        "method",
        "p2_mass",
        "epsilon",
        "wall_ms",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub experiment_id: String,
    pub channel: String,
    pub n: usize,
    #[serde(rename = "R_nats")]
    pub r_nats: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub num_codebooks: usize,
    pub method: String,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub n_min: usize,
    pub hypothesis_met: bool,
    pub threshold: f64,
    pub theorem2_rhs: f64,
    pub theorem2_rhs_ln: f64,
    pub lemma2_bound: Option<f64>,
    pub tv_exceed_count: usize,
    pub tv_exceed_freq: f64,
    pub theorem2_slack: f64,
    /// Empty when the block length is below `n_min`.
    pub theorem2_holds: Option<bool>,
    pub mean_tv: f64,
    pub lemma1_epsilon: f64,
    pub lemma1_delta: f64,
    pub lemma1_mu: f64,
    pub lemma1_bound: f64,
    pub p2_exceed_count: usize,
    pub p2_exceed_freq: f64,
    pub lemma1_slack: f64,
    pub lemma1_holds: bool,
}

impl Row for ConcentrationRow {
    const COLUMNS: &'static [&'static str] = &[
        "experiment_id",
        "channel",
        "n",
        "R_nats",
        "M",
        "num_codebooks",
        "method",
        "epsilon",
        "alpha",
        "beta1",
        "beta2",
        "gamma1",
        "gamma2",
        "n_min",
        "hypothesis_met",
        "threshold",
        "theorem2_rhs",
        "theorem2_rhs_ln",
        "lemma2_bound",
        "tv_exceed_count",
        "tv_exceed_freq",
        "theorem2_slack",
        "theorem2_holds",
        "mean_tv",
        "lemma1_epsilon",
        "lemma1_delta",
        "lemma1_mu",
        "lemma1_bound",
        "p2_exceed_count",
        "p2_exceed_freq",
        "lemma1_slack",
        "lemma1_holds",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderRow {
    pub experiment_id: String,
    pub channel: String,
    pub n: usize,
    pub xi: f64,
    pub c: f64,
    pub d: f64,
    pub berry_esseen_constant: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub rho: f64,
    /// `ok`, `hypothesis-not-met` or `codebook-too-large`.
    pub status: String,
    #[serde(rename = "R_nats")]
    pub r_nats: Option<f64>,
    pub mu: Option<f64>,
    pub epsilon: Option<f64>,
    pub theorem3_rhs: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub num_codebooks: usize,
    pub method: Option<String>,
    pub event_threshold: Option<f64>,
    pub exceed_count: Option<usize>,
    pub exceed_freq: Option<f64>,
    pub slack: Option<f64>,
    pub holds: Option<bool>,
    pub mean_tv: Option<f64>,
}

impl Row for SecondOrderRow {
    const COLUMNS: &'static [&'static str] = &[
        "experiment_id",
        "channel",
        "n",
        "xi",
        "c",
        "d",
        "berry_esseen_constant",
        "I",
        "V",
        "rho",
        "status",
        "R_nats",
        "mu",
        "epsilon",
        "theorem3_rhs",
        "M",
        "num_codebooks",
        "method",
        "event_threshold",
        "exceed_count",
        "exceed_freq",
        "slack",
        "holds",
        "mean_tv",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseRow {
    pub experiment_id: String,
    pub channel: String,
    pub n: usize,
    #[serde(rename = "R_nats")]
    pub r_nats: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub codebook_index: usize,
    pub codebook_seed: u64,
    /// `|𝒴_k|`, the number of output atoms after quantization.
    pub output_size: usize,
    pub delta: f64,
    pub delta_stderr: Option<f64>,
    pub method: String,
    /// Monte Carlo distance before quantization, continuous outputs only.
    pub tv_unquantized: Option<f64>,
    pub tv_unquantized_stderr: Option<f64>,
    /// `checked` or `delta-above-quarter`.
    pub status: String,
    pub i_ell: Option<f64>,
    pub slack: Option<f64>,
    pub holds: Option<bool>,
}

impl Row for ConverseRow {
    const COLUMNS: &'static [&'static str] = &[
        "experiment_id",
        "channel",
        "n",
        "R_nats",
        "M",
        "codebook_index",
        "codebook_seed",
        "output_size",
        "delta",
        "delta_stderr",
        "method",
        "tv_unquantized",
        "tv_unquantized_stderr",
        "status",
        "i_ell",
        "slack",
        "holds",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub experiment_id: String,
    pub channel: String,
    pub bound: String,
    pub n: usize,
    #[serde(rename = "R_nats")]
    pub r_nats: Option<f64>,
    pub value: f64,
    pub ln_value: f64,
    /// JSON object echoing every input of the bound.
    pub inputs: String,
}

impl Row for BoundRow {
    const COLUMNS: &'static [&'static str] = &[
        "experiment_id",
        "channel",
        "bound",
        "n",
        "R_nats",
        "value",
        "ln_value",
        "inputs",
    ];
}

pub fn write_csv<R: Row, W: Write>(rows: &[R], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    wtr.write_record(R::COLUMNS).map_err(ser)?;
    for r in rows {
        wtr.serialize(r).map_err(ser)?;
    }
    wtr.flush().map_err(|e| Error::Serialization(e.to_string()))
}

pub fn read_csv<R: Row>(text: &str) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Serialization(e.to_string()))?;
    if headers.iter().ne(R::COLUMNS.iter().copied()) {
        return Err(Error::Serialization(format!("unexpected columns {headers:?}")));
    }
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::Serialization(e.to_string())))
        .collect()
}

pub fn write_json<R: Row, W: Write>(rows: &[R], mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, rows).map_err(|e| Error::Serialization(e.to_string()))?;
    writeln!(w).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn read_json<R: Row>(text: &str) -> Result<Vec<R>> {
    serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn render<R: Row>(rows: &[R], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut buf)?,
        Format::Json => write_json(rows, &mut buf)?,
    }
    Ok(buf)
}

/// Writes `rows` to `path` in `format`.
pub fn emit<R: Row>(rows: &[R], format: Format, path: &Path) -> Result<()> {
    let bytes = render(rows, format)?;
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
