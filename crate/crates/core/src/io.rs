//! Dataset files: delimited numeric tables and line-oriented sequences.
//!
//! The table reader detects a header row by parsing: a first row whose fields
//! are all non-numeric is a header, anything else is data. Numeric headers are
//! therefore indistinguishable from data and must name the label column by
//! index instead.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::dataset::{Dataset, DatasetKind, Sample, SampleValue};
use crate::error::{Error, Result};
use crate::model::atomic_write;
use crate::scalar::Real;

/// On-disk dataset layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Comma-separated numeric features, optional header, optional label column.
    Csv,
    /// One sequence per line, optionally followed by a tab and a label.
    Seq,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "seq" => Ok(Format::Seq),
            other => Err(Error::InvalidConfig(format!(
                "unknown format '{other}', expected csv or seq"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Seq => "seq",
        })
    }
}

/// Reads a dataset from disk. `label_col` selects the label column of a csv
/// file, by header name or 0-based index; seq files carry labels inline.
pub fn load_dataset<F: Real>(
    path: &Path,
    format: Format,
    label_col: Option<&str>,
) -> Result<Dataset<F>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let samples = match format {
        Format::Csv => parse_csv(&text, path, label_col)?,
        Format::Seq => {
            if label_col.is_some() {
                return Err(Error::InvalidConfig(
                    "label column selection applies to csv input only".into(),
                ));
            }
            parse_seq(&text)
        }
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, samples)
}

fn parse_csv<F: Real>(
    text: &str,
    path: &Path,
    label_col: Option<&str>,
) -> Result<Vec<Sample<F>>> {
    let malformed = |message: String| Error::MalformedInput {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        records.push(record);
    }
    if records.is_empty() {
        return Ok(Vec::new());
    }

    let has_header = records[0].iter().all(|f| f.parse::<f64>().is_err());
    let header = has_header.then(|| records.remove(0));
    let width = header
        .as_ref()
        .map(|h| h.len())
        .or_else(|| records.first().map(|r| r.len()))
        .unwrap_or(0);

    let label_idx = match label_col {
        None => None,
        Some(name) => Some(resolve_label_column(name, header.as_ref(), width)?),
    };

    let mut samples = Vec::with_capacity(records.len());
    for record in &records {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(malformed(format!(
                "line {line}: {} fields, expected {width}",
                record.len()
            )));
        }
        let mut values = Vec::with_capacity(width - usize::from(label_idx.is_some()));
        let mut label = None;
        for (j, field) in record.iter().enumerate() {
            if Some(j) == label_idx {
                label = (!field.is_empty()).then(|| field.to_string());
                continue;
            }
            let x: f64 = field
                .parse()
                .map_err(|_| malformed(format!("line {line}, column {j}: '{field}' is not numeric")))?;
            if !x.is_finite() {
                return Err(malformed(format!(
                    "line {line}, column {j}: non-finite value '{field}'"
                )));
            }
            values.push(F::from_f64(x));
        }
        samples.push(Sample {
            value: SampleValue::Vector(values),
            label,
        });
    }
    Ok(samples)
}

fn resolve_label_column(
    name: &str,
    header: Option<&csv::StringRecord>,
    width: usize,
) -> Result<usize> {
    if let Some(h) = header {
        if let Some(idx) = h.iter().position(|f| f == name) {
            return Ok(idx);
        }
    }
    if let Ok(idx) = name.parse::<usize>() {
        if idx < width {
            return Ok(idx);
        }
        return Err(Error::InvalidConfig(format!(
            "label column {idx} out of range for {width} columns"
        )));
    }
    Err(Error::InvalidConfig(match header {
        Some(_) => format!("label column '{name}' not found in the header"),
        None => format!("label column '{name}' needs a header row or a numeric index"),
    }))
}

fn parse_seq<F: Real>(text: &str) -> Vec<Sample<F>> {
    text.lines()
        .filter(|line| !line.is_empty())
        .map(|line| match line.split_once('\t') {
            Some((seq, label)) if !label.trim().is_empty() => {
                Sample::sequence(seq).with_label(label.trim())
            }
            Some((seq, _)) => Sample::sequence(seq),
            None => Sample::sequence(line),
        })
        .collect()
}

/// Writes a vector dataset as csv with an `f0..f{d-1}` header, plus a `label`
/// column when any sample is labeled. Floats use the shortest representation
/// that reads back bit-identically. The write is atomic.
pub fn write_dataset_csv<F: Real>(dataset: &Dataset<F>, path: &Path) -> Result<()> {
    let dim = match &dataset.kind {
        DatasetKind::Vector { dim } => *dim,
        DatasetKind::Sequence { .. } => {
            return Err(Error::InvalidConfig(
                "sequence datasets are written in seq format, not csv".into(),
            ))
        }
    };
    let labeled = dataset.samples.iter().any(|s| s.label.is_some());
    let mut writer = csv::Writer::from_writer(Vec::new());
    let write_err = |message: String| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(message),
    };

    let mut header: Vec<String> = (0..dim).map(|j| format!("f{j}")).collect();
    if labeled {
        header.push("label".into());
    }
    writer
        .write_record(&header)
        .map_err(|e| write_err(e.to_string()))?;
    for sample in &dataset.samples {
        let v = sample.as_vector().expect("kind guarantees vectors");
        let mut fields: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        if labeled {
            fields.push(sample.label.clone().unwrap_or_default());
        }
        writer
            .write_record(&fields)
            .map_err(|e| write_err(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| write_err(e.to_string()))?;
    atomic_write(path, &bytes)
}
