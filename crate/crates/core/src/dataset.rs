//! Input samples and homogeneous datasets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Payload of one sample: a dense numeric vector or a symbolic sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SampleValue<F> {
    Vector(Vec<F>),
    Sequence(String),
}

/// One input object plus an optional class label.
///
/// Labels never influence training; they exist for evaluation protocols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample<F> {
    pub value: SampleValue<F>,
    pub label: Option<String>,
}

impl<F: Real> Sample<F> {
    pub fn vector(values: Vec<F>) -> Self {
        Sample {
            value: SampleValue::Vector(values),
            label: None,
        }
    }

    pub fn sequence(seq: impl Into<String>) -> Self {
        Sample {
            value: SampleValue::Sequence(seq.into()),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn as_vector(&self) -> Option<&[F]> {
        match &self.value {
            SampleValue::Vector(v) => Some(v),
            SampleValue::Sequence(_) => None,
        }
    }

    pub fn as_sequence(&self) -> Option<&str> {
        match &self.value {
            SampleValue::Vector(_) => None,
            SampleValue::Sequence(s) => Some(s),
        }
    }
}

/// Variant-level metadata shared by every sample in a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DatasetKind {
    /// All samples are vectors of this length.
    Vector { dim: usize },
    /// All samples are sequences over this sorted alphabet.
    Sequence { alphabet: Vec<char> },
}

/// Ordered, homogeneous collection of samples with stable 0-based indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<F> {
    pub name: String,
    pub samples: Vec<Sample<F>>,
    pub kind: DatasetKind,
}

impl<F: Real> Dataset<F> {
    /// Validates homogeneity and finiteness, and infers the kind metadata.
    pub fn new(name: impl Into<String>, samples: Vec<Sample<F>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::BadDataset("dataset has no samples".into()));
        }
        let kind = match &samples[0].value {
            SampleValue::Vector(first) => {
                let dim = first.len();
                if dim == 0 {
                    return Err(Error::BadDataset("zero-dimensional vector sample".into()));
                }
                for (i, s) in samples.iter().enumerate() {
                    let v = s.as_vector().ok_or_else(|| {
                        Error::BadDataset(format!("sample {i} is not a vector"))
                    })?;
                    if v.len() != dim {
                        return Err(Error::BadDataset(format!(
                            "sample {i} has {} features, expected {dim}",
                            v.len()
                        )));
                    }
                    if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                        return Err(Error::BadDataset(format!(
                            "sample {i} feature {bad} is not finite"
                        )));
                    }
                }
                DatasetKind::Vector { dim }
            }
            SampleValue::Sequence(_) => {
                let mut alphabet: Vec<char> = Vec::new();
                for (i, s) in samples.iter().enumerate() {
                    let seq = s.as_sequence().ok_or_else(|| {
                        Error::BadDataset(format!("sample {i} is not a sequence"))
                    })?;
                    alphabet.extend(seq.chars());
                }
                alphabet.sort_unstable();
                alphabet.dedup();
                DatasetKind::Sequence { alphabet }
            }
        };
        Ok(Dataset {
            name: name.into(),
            samples,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// New dataset containing the given sample indices, in the given order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> Result<Self> {
        let samples = indices
            .iter()
            .map(|&i| {
                self.samples
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::BadDataset(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(name, samples)
    }

    /// True when every sample equals the first; such data carries no structure.
    pub fn is_degenerate(&self) -> bool {
        self.samples
            .iter()
            .all(|s| s.value == self.samples[0].value)
    }
}
