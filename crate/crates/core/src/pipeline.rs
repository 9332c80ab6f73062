//! Batch feature extraction: JSONL streams in, CSV feature rows out.
//!
//! Each input line is an object `{"id": .., "label": .., "points": [[..], ..]}`.
//! Streams are transformed by a chain of [`TransformSpec`]s, interpolated,
//! and summarised by their truncated signature or log-signature.

use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::path::{PiecewiseLinearPath, Stream};
use crate::signature::{log_signature, signature};
use crate::tensor::{word_count, Word};
use crate::transforms::{apply_chain, chain_output_dim, validate_chain, TransformSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct StreamRecord {
    pub id: String,
    pub label: Option<String>,
    pub stream: Stream,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    #[serde(default)]
    label: Option<String>,
    points: Vec<Vec<f64>>,
}

/// Reads one stream per non-blank line, preserving order.
pub fn read_streams<R: BufRead>(reader: R) -> Result<Vec<StreamRecord>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        let stream = Stream::new(raw.points).map_err(|e| Error::Parse {
            line: line_no,
            message: format!("stream {:?}: {e}", raw.id),
        })?;
        out.push(StreamRecord { id: raw.id, label: raw.label, stream });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Signature,
    LogSignature,
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sig" | "signature" => Ok(FeatureKind::Signature),
            "logsig" | "logsignature" => Ok(FeatureKind::LogSignature),
            other => Err(Error::Config(format!("unknown feature kind {other:?} (expected sig or logsig)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub depth: usize,
    pub chain: Vec<TransformSpec>,
    pub kind: FeatureKind,
    pub include_constant: bool,
    /// Recorded for provenance; extraction itself is deterministic.
    pub seed: u64,
}

impl RunConfig {
    pub fn new(depth: usize, chain: Vec<TransformSpec>, kind: FeatureKind) -> Self {
        RunConfig { depth, chain, kind, include_constant: false, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::Config("signature level must be at least 1".into()));
        }
        validate_chain(&self.chain)
    }

    /// Length of every feature vector for inputs of dimension `input_dim`.
    pub fn feature_len(&self, input_dim: usize) -> usize {
        word_count(chain_output_dim(&self.chain, input_dim), self.depth) + usize::from(self.include_constant)
    }

    /// CSV column names of the features for inputs of dimension `input_dim`.
    pub fn feature_names(&self, input_dim: usize) -> Vec<String> {
        let alphabet = chain_output_dim(&self.chain, input_dim);
        Word::all(alphabet, self.depth)
            .skip(usize::from(!self.include_constant))
            .map(|w| w.feature_name(alphabet))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub label: Option<String>,
    pub features: Vec<f64>,
}

/// Features of a single stream.
pub fn stream_features(stream: &Stream, config: &RunConfig) -> Result<Vec<f64>> {
    let transformed = apply_chain(stream, &config.chain)?;
    let path = PiecewiseLinearPath::from_stream(&transformed);
    let series = match config.kind {
        FeatureKind::Signature => signature(&path, config.depth),
        FeatureKind::LogSignature => log_signature(&path, config.depth),
    };
    Ok(series.flatten(config.include_constant))
}

/// Extracts features for every stream. Streams are processed in parallel;
/// output order equals input order.
pub fn extract(streams: &[StreamRecord], config: &RunConfig) -> Result<Vec<FeatureRecord>> {
    config.validate()?;
    if let Some(first) = streams.first() {
        let dim = first.stream.dim();
        if let Some(odd) = streams.iter().find(|r| r.stream.dim() != dim) {
            return Err(Error::Input(format!(
                "stream {:?} has dimension {}, expected {dim} as in the first stream",
                odd.id,
                odd.stream.dim()
            )));
        }
    }
    streams
        .par_iter()
        .map(|rec| {
            let features = stream_features(&rec.stream, config).map_err(|e| e.in_stream(&rec.id))?;
            Ok(FeatureRecord { id: rec.id.clone(), label: rec.label.clone(), features })
        })
        .collect()
}

/// Scientific notation with 17 significant digits, enough to round-trip any f64.
fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `id,label,<names…>` then one row per record.
pub fn write_features<W: Write>(records: &[FeatureRecord], names: &[String], sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let header = ["id", "label"].into_iter().map(str::to_string).chain(names.iter().cloned());
    writer.write_record(header).map_err(csv_err)?;
    for rec in records {
        if rec.features.len() != names.len() {
            return Err(Error::Shape(format!(
                "record {:?} has {} features, header has {}",
                rec.id,
                rec.features.len(),
                names.len()
            )));
        }
        let row = [rec.id.clone(), rec.label.clone().unwrap_or_default()]
            .into_iter()
            .chain(rec.features.iter().map(|&v| format_real(v)));
        writer.write_record(row).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Input(format!("csv: {other:?}")),
    }
}

/// Reads, extracts and writes in one pass. Returns the number of records.
pub fn run<R: BufRead, W: Write>(input: R, output: W, config: &RunConfig) -> Result<usize> {
    config.validate()?;
    let streams = read_streams(input)?;
    let records = extract(&streams, config)?;
    let names = streams.first().map(|s| config.feature_names(s.stream.dim())).unwrap_or_default();
    write_features(&records, &names, output)?;
    Ok(records.len())
}
