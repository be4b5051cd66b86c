//! Ranking evaluation: AUC of membership scores under a repeated
//! train-on-nominal protocol.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::dissimilarity::Measure;
use crate::error::{Error, Result};
use crate::fuzzy::score_sample;
use crate::scalar::Real;
use crate::trainer::{train, TrainerConfig};

/// Spacing constant for per-repeat seeds; consecutive repeats land far apart
/// in the seed space.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Protocol identifier embedded in every report.
pub const PROTOCOL_VERSION: &str = "split-nominal-v1";

/// Outcome of a repeated evaluation run.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport<F> {
    /// One AUC per repeat, in repeat order.
    pub aucs: Vec<F>,
    pub mean: F,
    /// Sample standard deviation over repeats; 0 for a single repeat.
    pub std_dev: F,
    /// Held-out nominal samples per repeat.
    pub n_nominal_test: usize,
    /// Non-nominal samples scored per repeat (all of them).
    pub n_outlier_test: usize,
    /// Human-readable protocol statement, versioned.
    pub protocol: String,
}

/// Probability that a random nominal score outranks a random outlier score,
/// ties counted as one half.
pub fn compute_auc<F: Real>(nominal: &[F], outliers: &[F]) -> Result<F> {
    if nominal.is_empty() || outliers.is_empty() {
        return Err(Error::BadDataset(format!(
            "AUC needs both classes non-empty (nominal {}, outliers {})",
            nominal.len(),
            outliers.len()
        )));
    }
    let mut favorable = 0.0f64;
    for n in nominal {
        for o in outliers {
            if n > o {
                favorable += 1.0;
            } else if n == o {
                favorable += 0.5;
            }
        }
    }
    Ok(F::from_f64(
        favorable / (nominal.len() as f64 * outliers.len() as f64),
    ))
}

/// Repeated one-class evaluation.
///
/// Per repeat: shuffle the nominal class with a repeat-specific seed, train on
/// a `split_fraction` share of it, then score the held-out nominal samples
/// together with every non-nominal sample and take the AUC of the membership
/// scores. Outliers never enter training.
pub fn run_experiment<F: Real>(
    dataset: &Dataset<F>,
    nominal_label: &str,
    split_fraction: f64,
    repeats: usize,
    config: &TrainerConfig<F>,
) -> Result<EvalReport<F>> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&split_fraction) || split_fraction <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "split fraction {split_fraction} not in (0, 1)"
        )));
    }
    let nominal_idx: Vec<usize> = (0..dataset.len())
        .filter(|&i| dataset.samples[i].label.as_deref() == Some(nominal_label))
        .collect();
    let outlier_idx: Vec<usize> = (0..dataset.len())
        .filter(|&i| dataset.samples[i].label.as_deref() != Some(nominal_label))
        .collect();
    if nominal_idx.is_empty() {
        return Err(Error::BadDataset(format!(
            "nominal label '{nominal_label}' not present in the dataset"
        )));
    }
    if nominal_idx.len() < 8 {
        return Err(Error::BadDataset(format!(
            "nominal class has {} samples; need at least 8",
            nominal_idx.len()
        )));
    }
    if outlier_idx.is_empty() {
        return Err(Error::BadDataset(
            "every sample carries the nominal label; nothing to rank against".into(),
        ));
    }
    let train_count = ((nominal_idx.len() as f64) * split_fraction).floor() as usize;
    if train_count < 4 || train_count == nominal_idx.len() {
        return Err(Error::BadDataset(format!(
            "split leaves {train_count} training samples of {}",
            nominal_idx.len()
        )));
    }
    let measure = Measure::for_kind(&dataset.kind);

    let mut aucs = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let seed_r = config.seed.wrapping_add((r as u64).wrapping_mul(SEED_STRIDE));
        let mut rng = ChaCha8Rng::seed_from_u64(seed_r);
        let mut shuffled = nominal_idx.clone();
        shuffled.shuffle(&mut rng);
        let mut train_idx = shuffled[..train_count].to_vec();
        train_idx.sort_unstable();
        let test_idx = &shuffled[train_count..];

        let train_set = dataset.subset(format!("{}[r{r}]", dataset.name), &train_idx)?;
        let repeat_config = TrainerConfig {
            seed: seed_r,
            ..config.clone()
        };
        let model = train(&train_set, measure, &repeat_config)?;

        let score_many = |idx: &[usize]| -> Result<Vec<F>> {
            idx.par_iter()
                .map(|&i| score_sample(&model, &dataset.samples[i]).map(|d| d.membership))
                .collect()
        };
        let nominal_scores = score_many(test_idx)?;
        let outlier_scores = score_many(&outlier_idx)?;
        aucs.push(compute_auc(&nominal_scores, &outlier_scores)?);
    }

    let k = F::from_f64(repeats as f64);
    let mean = aucs.iter().fold(F::zero(), |a, &b| a + b) / k;
    let std_dev = if repeats > 1 {
        let ss = aucs
            .iter()
            .fold(F::zero(), |a, &b| a + (b - mean) * (b - mean));
        (ss / F::from_f64((repeats - 1) as f64)).sqrt()
    } else {
        F::zero()
    };
    let protocol = format!(
        "{PROTOCOL_VERSION}: nominal '{nominal_label}' shuffled per repeat, \
         {:.0}% trains, held-out nominal plus all {} non-nominal samples scored \
         by membership; {repeats} repeats from base seed {}",
        split_fraction * 100.0,
        outlier_idx.len(),
        config.seed
    );
    Ok(EvalReport {
        aucs,
        mean,
        std_dev,
        n_nominal_test: nominal_idx.len() - train_count,
        n_outlier_test: outlier_idx.len(),
        protocol,
    })
}
