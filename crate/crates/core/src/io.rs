//! Prediction files: CSV with a `score,label[,weight]` header, or JSON lines
//! with the same keys.
//!
//! Labels are free text. The configured positive label maps to the positive
//! class and the first other label seen maps to the negative class; a third
//! distinct label is an error.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::metrics::{Curve, MetricsReport};
use crate::model::{Dataset, Label, Sample, SymmetricSpec};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("row {row}: unknown label `{label}`, expected `{positive}` or `{negative}`")]
    UnknownLabel {
        row: usize,
        label: String,
        positive: String,
        negative: String,
    },
    #[error("row {row}: weight must be strictly positive, got {value}")]
    NonPositiveWeight { row: usize, value: f64 },
    #[error("row {row}: column `{column}` is not finite")]
    NonFiniteValue { row: usize, column: String },
}

impl FileError {
    fn parse(row: usize, column: &str, message: impl Into<String>) -> Self {
        FileError::Parse {
            row,
            column: column.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl`/`.ndjson` are JSON lines, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("jsonl") || ext.eq_ignore_ascii_case("ndjson") => {
                Format::Jsonl
            }
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}`, expected csv or jsonl")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        })
    }
}

/// Text of the two class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelNames {
    pub positive: String,
    pub negative: String,
}

impl LabelNames {
    /// Names for a file whose negative label never appeared: `"0"` when the
    /// positive label is `"1"`, otherwise `not_<positive>`.
    pub fn with_default_negative(positive: &str) -> Self {
        let negative = if positive == "1" {
            "0".to_string()
        } else {
            format!("not_{positive}")
        };
        Self {
            positive: positive.to_string(),
            negative,
        }
    }

    pub fn name(&self, label: Label) -> &str {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }
}

impl Default for LabelNames {
    fn default() -> Self {
        Self::with_default_negative("1")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub dataset: Dataset,
    pub spec: SymmetricSpec,
    pub labels: LabelNames,
    /// Whether the file carried a weight column or key.
    pub weighted: bool,
}

struct LabelMapper {
    positive: String,
    negative: Option<String>,
}

impl LabelMapper {
    fn map(&mut self, row: usize, text: &str) -> Result<Label, FileError> {
        if text == self.positive {
            return Ok(Label::Positive);
        }
        match &self.negative {
            Some(neg) if neg == text => Ok(Label::Negative),
            Some(neg) => Err(FileError::UnknownLabel {
                row,
                label: text.to_string(),
                positive: self.positive.clone(),
                negative: neg.clone(),
            }),
            None => {
                self.negative = Some(text.to_string());
                Ok(Label::Negative)
            }
        }
    }

    fn names(self) -> LabelNames {
        match self.negative {
            Some(negative) => LabelNames {
                positive: self.positive,
                negative,
            },
            None => LabelNames::with_default_negative(&self.positive),
        }
    }
}

fn parse_number(row: usize, column: &str, text: &str) -> Result<f64, FileError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| FileError::parse(row, column, format!("`{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(FileError::NonFiniteValue {
            row,
            column: column.to_string(),
        });
    }
    Ok(v)
}

fn make_sample(row: usize, score: f64, label: Label, weight: Option<f64>) -> Result<Sample, FileError> {
    let weight = weight.unwrap_or(1.0);
    if weight <= 0.0 {
        return Err(FileError::NonPositiveWeight { row, value: weight });
    }
    Sample::new(score, label, weight).map_err(|e| FileError::parse(row, "score", e.to_string()))
}

fn read_csv<R: Read>(reader: R, mapper: &mut LabelMapper) -> Result<(Vec<Sample>, bool), FileError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| FileError::parse(0, "header", e.to_string()))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let score_col = find("score").ok_or_else(|| FileError::parse(0, "score", "missing column"))?;
    let label_col = find("label").ok_or_else(|| FileError::parse(0, "label", "missing column"))?;
    let weight_col = find("weight");

    let mut samples = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| FileError::parse(row, "record", e.to_string()))?;
        let field = |col: usize, name: &str| {
            record
                .get(col)
                .ok_or_else(|| FileError::parse(row, name, "missing field"))
        };
        let score = parse_number(row, "score", field(score_col, "score")?)?;
        let label = mapper.map(row, field(label_col, "label")?)?;
        let weight = match weight_col.and_then(|c| record.get(c)) {
            Some(text) if !text.is_empty() => Some(parse_number(row, "weight", text)?),
            _ => None,
        };
        samples.push(make_sample(row, score, label, weight)?);
    }
    Ok((samples, weight_col.is_some()))
}

fn json_label(row: usize, v: &Value) -> Result<String, FileError> {
    match v {
        Value::String(s) => Ok(s.trim().to_string()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(if *b { "1" } else { "0" }.to_string()),
        _ => Err(FileError::parse(row, "label", "expected a string, number or boolean")),
    }
}

fn json_number(row: usize, column: &str, v: &Value) -> Result<f64, FileError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| FileError::parse(row, column, "number out of range")),
        Value::String(s) => parse_number(row, column, s),
        _ => Err(FileError::parse(row, column, "expected a number")),
    }
}

fn read_jsonl<R: Read>(reader: R, mapper: &mut LabelMapper) -> Result<(Vec<Sample>, bool), FileError> {
    let mut samples = Vec::new();
    let mut weighted = false;
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let row = k + 1;
        let line = line.map_err(|e| FileError::parse(row, "line", e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let obj: Value = serde_json::from_str(&line)
            .map_err(|e| FileError::parse(row, "line", e.to_string()))?;
        let obj = obj
            .as_object()
            .ok_or_else(|| FileError::parse(row, "line", "expected a JSON object"))?;
        let score = obj
            .get("score")
            .ok_or_else(|| FileError::parse(row, "score", "missing key"))?;
        let score = json_number(row, "score", score)?;
        let label = obj
            .get("label")
            .ok_or_else(|| FileError::parse(row, "label", "missing key"))?;
        let label = mapper.map(row, &json_label(row, label)?)?;
        let weight = match obj.get("weight") {
            None | Some(Value::Null) => None,
            Some(v) => {
                weighted = true;
                Some(json_number(row, "weight", v)?)
            }
        };
        samples.push(make_sample(row, score, label, weight)?);
    }
    Ok((samples, weighted))
}

/// Reads a prediction file from any reader. Rows are numbered from 1,
/// not counting the CSV header.
pub fn ingest_reader<R: Read>(
    reader: R,
    format: Format,
    positive_label: &str,
    s_star: f64,
) -> Result<Ingested, FileError> {
    let mut mapper = LabelMapper {
        positive: positive_label.to_string(),
        negative: None,
    };
    let (samples, weighted) = match format {
        Format::Csv => read_csv(reader, &mut mapper)?,
        Format::Jsonl => read_jsonl(reader, &mut mapper)?,
    };
    Ok(Ingested {
        dataset: Dataset::new(samples),
        spec: SymmetricSpec::new(s_star),
        labels: mapper.names(),
        weighted,
    })
}

pub fn ingest(
    path: &Path,
    format: Format,
    positive_label: &str,
    s_star: f64,
) -> Result<Ingested, FileError> {
    let file = File::open(path).map_err(|source| FileError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(file, format, positive_label, s_star)
}

/// Writes a dataset. Numbers use the shortest representation that parses
/// back to the same `f64`. The weight column is emitted when `weighted` is
/// set or any weight differs from 1.
pub fn write_dataset<W: Write>(
    mut out: W,
    d: &Dataset,
    format: Format,
    labels: &LabelNames,
    weighted: bool,
) -> std::io::Result<()> {
    let weighted = weighted || d.iter().any(|s| s.weight() != 1.0);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            if weighted {
                w.write_record(["score", "label", "weight"])?;
            } else {
                w.write_record(["score", "label"])?;
            }
            for s in d {
                let score = s.score().to_string();
                let label = labels.name(s.label());
                if weighted {
                    w.write_record([score.as_str(), label, s.weight().to_string().as_str()])?;
                } else {
                    w.write_record([score.as_str(), label])?;
                }
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for s in d {
                let line = if weighted {
                    json!({"score": s.score(), "label": labels.name(s.label()), "weight": s.weight()})
                } else {
                    json!({"score": s.score(), "label": labels.name(s.label())})
                };
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()
}

pub fn write_dataset_file(
    path: &Path,
    d: &Dataset,
    format: Format,
    labels: &LabelNames,
    weighted: bool,
) -> Result<(), FileError> {
    let wrap = |source| FileError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    write_dataset(BufWriter::new(file), d, format, labels, weighted).map_err(wrap)
}

/// `x,y` rows of the exact curve breakpoints.
pub fn write_curve_csv<W: Write>(mut out: W, curve: &Curve) -> std::io::Result<()> {
    writeln!(out, "x,y")?;
    for (x, y) in &curve.points {
        writeln!(out, "{x},{y}")?;
    }
    out.flush()
}

pub fn report_json(r: &MetricsReport) -> Value {
    serde_json::to_value(r).expect("report serialises")
}

/// Aligned two-column table; an undefined AUROC prints as `n/a`.
pub fn report_table(r: &MetricsReport) -> String {
    let auroc = r.auroc.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
    let rows = [
        ("lxcim", format!("{:.6}", r.lxcim)),
        ("accuracy", format!("{:.6}", r.accuracy)),
        ("auroc", auroc),
        ("audrc", format!("{:.6}", r.audrc)),
        ("n", r.n.to_string()),
        ("total_weight", format!("{}", r.total_weight)),
    ];
    let mut s = format!("{:<14}{:>12}\n", "metric", "value");
    for (name, value) in rows {
        s.push_str(&format!("{name:<14}{value:>12}\n"));
    }
    s
}
