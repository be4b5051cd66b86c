//! Parametric dissimilarity measures and the dissimilarity-space embedding.
//!
//! A sample is represented by its vector of dissimilarities to a fixed set of
//! prototype samples, turning arbitrary input domains into points in R^m.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, DatasetKind, Sample, SampleValue};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Identifier of the dissimilarity measure a parameter vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// sqrt(sum_i p_i (x_i - y_i)^2) over numeric vectors, p_i in [0, 1].
    WeightedEuclidean,
    /// Edit distance with per-operation costs (insert, delete, substitute).
    WeightedEdit,
}

impl Measure {
    /// Measure that applies to a dataset's sample variant.
    pub fn for_kind(kind: &DatasetKind) -> Measure {
        match kind {
            DatasetKind::Vector { .. } => Measure::WeightedEuclidean,
            DatasetKind::Sequence { .. } => Measure::WeightedEdit,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::WeightedEuclidean => "weighted_euclidean",
            Measure::WeightedEdit => "weighted_edit",
        }
    }
}

/// Smallest admissible edit-operation cost; keeps the cost space bounded away
/// from the degenerate zero where the measure stops separating sequences.
pub const EDIT_COST_MIN: f64 = 1e-3;

/// Parameter vector of a measure together with per-entry closed bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams<F> {
    pub values: Vec<F>,
    pub bounds: Vec<(F, F)>,
}

impl<F: Real> MeasureParams<F> {
    /// Feature weights for the weighted Euclidean measure, each in [0, 1].
    pub fn euclidean(weights: Vec<F>) -> Result<Self> {
        let bounds = vec![(F::zero(), F::one()); weights.len()];
        Self::checked(weights, bounds)
    }

    /// (insert, delete, substitute) costs for the weighted edit measure.
    pub fn edit(insert: F, delete: F, substitute: F) -> Result<Self> {
        let lo = F::from_f64(EDIT_COST_MIN);
        let bounds = vec![(lo, F::one()); 3];
        Self::checked(vec![insert, delete, substitute], bounds)
    }

    /// Neutral parameters: all-ones weights or unit edit costs.
    pub fn neutral(measure: Measure, dim: usize) -> Self {
        match measure {
            Measure::WeightedEuclidean => {
                Self::euclidean(vec![F::one(); dim]).expect("ones are in bounds")
            }
            Measure::WeightedEdit => {
                Self::edit(F::one(), F::one(), F::one()).expect("ones are in bounds")
            }
        }
    }

    fn checked(values: Vec<F>, bounds: Vec<(F, F)>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("empty parameter vector".into()));
        }
        for (i, (v, (lo, hi))) in values.iter().zip(&bounds).enumerate() {
            if !v.is_finite() || *v < *lo || *v > *hi {
                return Err(Error::InvalidConfig(format!(
                    "parameter {i} = {v} outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(MeasureParams { values, bounds })
    }

    /// Re-validates values against bounds; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.bounds.len() {
            return Err(Error::InvalidConfig(
                "parameter and bound counts differ".into(),
            ));
        }
        Self::checked(self.values.clone(), self.bounds.clone()).map(|_| ())
    }
}

/// Prototype samples against which dissimilarities are computed.
///
/// Indices refer to the source dataset; samples are copied so a persisted
/// model can embed new points without the original data.
#[derive(Clone, Debug, PartialEq)]
pub struct PrototypeSet<F> {
    pub indices: Vec<usize>,
    pub samples: Vec<Sample<F>>,
}

impl<F: Real> PrototypeSet<F> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Row-major n x m matrix of dissimilarities to m prototypes.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedPoints<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> EmbeddedPoints<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::BadDataset("empty embedding".into()));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::BadDataset(format!("ragged embedding row {i}")));
            }
            if r.iter().any(|x| !x.is_finite() || *x < F::zero()) {
                return Err(Error::BadDataset(format!(
                    "embedding row {i} has a negative or non-finite entry"
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(EmbeddedPoints {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub(crate) fn from_flat(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadDataset("embedding shape mismatch".into()));
        }
        if data.iter().any(|x| !x.is_finite() || *x < F::zero()) {
            return Err(Error::BadDataset(
                "embedding has a negative or non-finite entry".into(),
            ));
        }
        Ok(EmbeddedPoints { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    /// Euclidean distance between two embedded rows.
    pub fn row_distance(&self, i: usize, j: usize) -> F {
        euclidean(self.row(i), self.row(j))
    }

    /// All entries multiplied by a positive constant.
    pub fn scaled(&self, c: F) -> Self {
        EmbeddedPoints {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    /// New embedding made of the given rows, in order, plus one extra row.
    pub fn gather_with_extra(&self, rows: &[usize], extra: &[F]) -> Result<Self> {
        let mut data = Vec::with_capacity((rows.len() + 1) * self.cols);
        for &r in rows {
            if r >= self.rows {
                return Err(Error::BadDataset(format!("row {r} out of range")));
            }
            data.extend_from_slice(self.row(r));
        }
        if extra.len() != self.cols {
            return Err(Error::BadDataset("extra row has wrong width".into()));
        }
        data.extend_from_slice(extra);
        EmbeddedPoints::from_flat(rows.len() + 1, self.cols, data)
    }
}

/// Plain Euclidean distance between equal-length slices.
pub(crate) fn euclidean<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        acc = acc + d * d;
    }
    acc.sqrt()
}

/// Weighted Euclidean dissimilarity sqrt(sum_i p_i (x_i - y_i)^2).
pub fn weighted_euclidean<F: Real>(x: &[F], y: &[F], p: &MeasureParams<F>) -> Result<F> {
    if x.len() != y.len() || x.len() != p.values.len() {
        return Err(Error::InvalidConfig(format!(
            "dimension mismatch: x={}, y={}, p={}",
            x.len(),
            y.len(),
            p.values.len()
        )));
    }
    let mut acc = F::zero();
    for ((a, b), w) in x.iter().zip(y).zip(&p.values) {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::BadDataset("non-finite vector entry".into()));
        }
        let d = *a - *b;
        acc = acc + *w * d * d;
    }
    let out = acc.sqrt();
    if !out.is_finite() {
        return Err(Error::BadDataset("dissimilarity overflowed".into()));
    }
    Ok(out)
}

/// Minimal-cost edit distance with per-operation costs p = (ins, del, sub).
///
/// Single-row dynamic program over characters; dp[j] holds the cost of
/// transforming the consumed prefix of s into t[..j].
pub fn weighted_edit_distance<F: Real>(s: &str, t: &str, p: &MeasureParams<F>) -> Result<F> {
    if p.values.len() != 3 {
        return Err(Error::InvalidConfig(format!(
            "edit distance needs 3 costs, got {}",
            p.values.len()
        )));
    }
    let (w_ins, w_del, w_sub) = (p.values[0], p.values[1], p.values[2]);
    let s: Vec<char> = s.chars().collect();
    let t: Vec<char> = t.chars().collect();
    let mut dp: Vec<F> = (0..=t.len())
        .map(|j| w_ins * F::from_f64(j as f64))
        .collect();
    for (i, &sc) in s.iter().enumerate() {
        let mut diag = dp[0];
        dp[0] = w_del * F::from_f64((i + 1) as f64);
        for (j, &tc) in t.iter().enumerate() {
            let sub = if sc == tc { diag } else { diag + w_sub };
            let del = dp[j + 1] + w_del;
            let ins = dp[j] + w_ins;
            diag = dp[j + 1];
            dp[j + 1] = sub.min(del).min(ins);
        }
    }
    Ok(dp[t.len()])
}

/// Uniform sample of at most `max_size` prototype indices.
///
/// When the dataset fits, every sample is a prototype (R = S); otherwise a
/// seeded draw without replacement picks `max_size` of them, reported in
/// ascending index order.
pub fn select_prototypes<F: Real>(
    dataset: &Dataset<F>,
    max_size: usize,
    seed: u64,
) -> Result<PrototypeSet<F>> {
    if max_size < 2 {
        return Err(Error::InvalidConfig(format!(
            "prototype budget {max_size} < 2"
        )));
    }
    if dataset.is_empty() {
        return Err(Error::BadDataset("no samples to select from".into()));
    }
    let n = dataset.len();
    let mut indices: Vec<usize> = if n <= max_size {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, n, max_size).into_vec();
        picked.sort_unstable();
        picked
    };
    indices.dedup();
    let samples = indices.iter().map(|&i| dataset.samples[i].clone()).collect();
    Ok(PrototypeSet { indices, samples })
}

/// Dissimilarity-space embedding: entry (i, j) is the measure applied to
/// (samples[i], prototypes[j]) with parameters p. Rows computed in parallel.
pub fn embed<F: Real>(
    samples: &[Sample<F>],
    prototypes: &PrototypeSet<F>,
    p: &MeasureParams<F>,
    measure: Measure,
) -> Result<EmbeddedPoints<F>> {
    if samples.is_empty() {
        return Err(Error::BadDataset("nothing to embed".into()));
    }
    if prototypes.is_empty() {
        return Err(Error::InvalidConfig("empty prototype set".into()));
    }
    let rows = samples
        .par_iter()
        .map(|s| embed_sample(s, prototypes, p, measure))
        .collect::<Result<Vec<Vec<F>>>>()?;
    EmbeddedPoints::from_rows(rows)
}

/// One embedding row: dissimilarities of a single sample to every prototype.
pub(crate) fn embed_sample<F: Real>(
    sample: &Sample<F>,
    prototypes: &PrototypeSet<F>,
    p: &MeasureParams<F>,
    measure: Measure,
) -> Result<Vec<F>> {
    prototypes
        .samples
        .iter()
        .map(|r| dissimilarity(sample, r, p, measure))
        .collect()
}

fn dissimilarity<F: Real>(
    a: &Sample<F>,
    b: &Sample<F>,
    p: &MeasureParams<F>,
    measure: Measure,
) -> Result<F> {
    match (measure, &a.value, &b.value) {
        (Measure::WeightedEuclidean, SampleValue::Vector(x), SampleValue::Vector(y)) => {
            weighted_euclidean(x, y, p)
        }
        (Measure::WeightedEdit, SampleValue::Sequence(s), SampleValue::Sequence(t)) => {
            weighted_edit_distance(s, t, p)
        }
        _ => Err(Error::BadDataset(format!(
            "sample variant does not match measure {}",
            measure.name()
        ))),
    }
}
