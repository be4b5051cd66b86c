//! Trained model representation and on-disk persistence.
//!
//! A model is everything scoring needs: the tuned measure parameters, the
//! chosen k, the raw prototype samples (so new points can be embedded), the
//! embedded training matrix, the component partition, and each component's
//! frozen centrality statistics. Persistence is a versioned JSON document;
//! floats survive the round trip bit-exactly through shortest-representation
//! encoding.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dataset::{Sample, SampleValue};
use crate::dissimilarity::{EmbeddedPoints, Measure, MeasureParams, PrototypeSet};
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::scalar::Real;

/// Output of training; immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel<F> {
    pub measure: Measure,
    /// Tuned measure parameters.
    pub p_star: MeasureParams<F>,
    /// Neighbor count of the selected graph.
    pub k_star: usize,
    /// Raw prototype samples, referenced by embedding columns.
    pub prototypes: PrototypeSet<F>,
    /// Embedded working set; rows follow the training subset order.
    pub embedded_train: EmbeddedPoints<F>,
    /// Connected components of the k_star graph: the decision regions.
    pub partition: Partition,
    /// Per-component maximum closeness at training time.
    pub chi_star: Vec<F>,
    /// Per-component frozen acceptance thresholds.
    pub thresholds: Vec<F>,
    pub alpha: F,
    pub percentile_l: F,
    /// Objective value of the selected candidate.
    pub final_eta: F,
    /// Search generations completed before termination.
    pub iterations: usize,
    pub seed: u64,
    /// Best objective seen after each generation, including the initial one.
    pub eta_history: Vec<F>,
}

/// Serialized form; field layout is the on-disk contract.
#[derive(Serialize, Deserialize)]
struct ModelDoc<F> {
    format_version: u32,
    measure: Measure,
    p_star: Vec<F>,
    p_bounds: Vec<(F, F)>,
    k_star: usize,
    alpha: F,
    percentile_l: F,
    prototype_indices: Vec<usize>,
    prototype_samples: Vec<SampleDoc<F>>,
    embedded_rows: usize,
    embedded_cols: usize,
    embedded_data: Vec<F>,
    components: Vec<Vec<usize>>,
    chi_star: Vec<F>,
    thresholds: Vec<F>,
    final_eta: F,
    iterations: usize,
    seed: u64,
    eta_history: Vec<F>,
}

#[derive(Serialize, Deserialize)]
struct SampleDoc<F> {
    #[serde(skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<F>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sequence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

const FORMAT_VERSION: u32 = 1;

impl<F: Real> TrainedModel<F> {
    /// Number of decision regions.
    pub fn component_count(&self) -> usize {
        self.partition.components.len()
    }

    /// Structural checks shared by training output and loaded documents.
    pub fn validate(&self) -> Result<()> {
        let d = self.partition.components.len();
        if d == 0 {
            return Err(Error::InvalidConfig("model has no components".into()));
        }
        if self.chi_star.len() != d || self.thresholds.len() != d {
            return Err(Error::InvalidConfig(format!(
                "model has {d} components but {} chi_star and {} thresholds",
                self.chi_star.len(),
                self.thresholds.len()
            )));
        }
        if self.partition.component_of.len() != self.embedded_train.rows() {
            return Err(Error::InvalidConfig(format!(
                "partition covers {} vertices but the embedding has {} rows",
                self.partition.component_of.len(),
                self.embedded_train.rows()
            )));
        }
        if self.embedded_train.cols() != self.prototypes.len() {
            return Err(Error::InvalidConfig(format!(
                "embedding has {} columns but {} prototypes",
                self.embedded_train.cols(),
                self.prototypes.len()
            )));
        }
        if self.k_star == 0 || self.k_star + 1 > self.embedded_train.rows() {
            return Err(Error::InvalidConfig(format!(
                "k_star = {} out of range for {} training rows",
                self.k_star,
                self.embedded_train.rows()
            )));
        }
        if !(self.alpha > F::zero() && self.alpha < F::one()) {
            return Err(Error::InvalidConfig(format!("alpha {} not in (0, 1)", self.alpha)));
        }
        if self.percentile_l <= F::zero() || self.percentile_l > F::from_f64(100.0) {
            return Err(Error::InvalidConfig(format!(
                "percentile {} not in (0, 100]",
                self.percentile_l
            )));
        }
        if !(self.final_eta > F::zero() && self.final_eta <= F::one()) {
            return Err(Error::InvalidConfig(format!(
                "final eta {} not in (0, 1]",
                self.final_eta
            )));
        }
        if self.thresholds.iter().any(|t| !t.is_finite() || *t < F::zero()) {
            return Err(Error::InvalidConfig(
                "negative or non-finite threshold".into(),
            ));
        }
        if self.chi_star.iter().any(|c| !c.is_finite() || *c < F::zero()) {
            return Err(Error::InvalidConfig(
                "negative or non-finite max closeness".into(),
            ));
        }
        self.p_star.validate()?;
        Ok(())
    }
}

/// Writes the model to `path` as pretty-printed JSON via a sibling temp file
/// and an atomic rename, so readers never observe a half-written document.
pub fn save_model<F>(model: &TrainedModel<F>, path: &Path) -> Result<()>
where
    F: Real + Serialize,
{
    let doc = ModelDoc {
        format_version: FORMAT_VERSION,
        measure: model.measure,
        p_star: model.p_star.values.clone(),
        p_bounds: model.p_star.bounds.clone(),
        k_star: model.k_star,
        alpha: model.alpha,
        percentile_l: model.percentile_l,
        prototype_indices: model.prototypes.indices.clone(),
        prototype_samples: model.prototypes.samples.iter().map(sample_doc).collect(),
        embedded_rows: model.embedded_train.rows(),
        embedded_cols: model.embedded_train.cols(),
        embedded_data: model.embedded_train.as_slice().to_vec(),
        components: model.partition.components.clone(),
        chi_star: model.chi_star.clone(),
        thresholds: model.thresholds.clone(),
        final_eta: model.final_eta,
        iterations: model.iterations,
        seed: model.seed,
        eta_history: model.eta_history.clone(),
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })?;
    atomic_write(path, text.as_bytes())
}

/// Atomic file replacement: write a temp file in the target directory, flush,
/// then rename over the destination.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Loads and validates a model document.
pub fn load_model<F>(path: &Path) -> Result<TrainedModel<F>>
where
    F: Real + Serialize + DeserializeOwned,
{
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |message: String| Error::BadModel {
        path: path.to_path_buf(),
        message,
    };
    let doc: ModelDoc<F> =
        serde_json::from_str(&text).map_err(|e| bad(format!("not a model document: {e}")))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(bad(format!(
            "format version {} unsupported (expected {FORMAT_VERSION})",
            doc.format_version
        )));
    }
    let p_star = MeasureParams {
        values: doc.p_star,
        bounds: doc.p_bounds,
    };
    let samples: Vec<Sample<F>> = doc
        .prototype_samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| sample_from_doc(s).ok_or_else(|| bad(format!("prototype {i} malformed"))))
        .collect::<Result<_>>()?;
    if samples.len() != doc.prototype_indices.len() {
        return Err(bad(format!(
            "{} prototype samples but {} indices",
            samples.len(),
            doc.prototype_indices.len()
        )));
    }
    let prototypes = PrototypeSet {
        indices: doc.prototype_indices,
        samples,
    };
    let embedded_train =
        EmbeddedPoints::from_flat(doc.embedded_rows, doc.embedded_cols, doc.embedded_data)
            .map_err(|e| bad(e.to_string()))?;
    let partition = Partition::from_components(doc.components).map_err(|e| bad(e.to_string()))?;
    let model = TrainedModel {
        measure: doc.measure,
        p_star,
        k_star: doc.k_star,
        prototypes,
        embedded_train,
        partition,
        chi_star: doc.chi_star,
        thresholds: doc.thresholds,
        alpha: doc.alpha,
        percentile_l: doc.percentile_l,
        final_eta: doc.final_eta,
        iterations: doc.iterations,
        seed: doc.seed,
        eta_history: doc.eta_history,
    };
    model.validate().map_err(|e| bad(e.to_string()))?;
    Ok(model)
}

fn sample_doc<F: Real>(s: &Sample<F>) -> SampleDoc<F> {
    match &s.value {
        SampleValue::Vector(v) => SampleDoc {
            vector: Some(v.clone()),
            sequence: None,
            label: s.label.clone(),
        },
        SampleValue::Sequence(q) => SampleDoc {
            vector: None,
            sequence: Some(q.clone()),
            label: s.label.clone(),
        },
    }
}

fn sample_from_doc<F: Real>(doc: SampleDoc<F>) -> Option<Sample<F>> {
    let value = match (doc.vector, doc.sequence) {
        (Some(v), None) => {
            if v.iter().any(|x| !x.is_finite()) {
                return None;
            }
            SampleValue::Vector(v)
        }
        (None, Some(s)) => SampleValue::Sequence(s),
        _ => return None,
    };
    Some(Sample {
        value,
        label: doc.label,
    })
}
