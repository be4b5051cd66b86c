//! Seeded synthetic dataset generators.
//!
//! Four classic shapes for exercising structure recovery: well-separated
//! Gaussian blobs, a structureless uniform square, a disc ringed by a
//! half-annulus, and two separated clusters in high dimension. All draws go
//! through a counter-based generator in a fixed order, so a spec plus seed
//! pins the dataset bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Three isotropic unit-variance blobs, centers 10 sigma apart pairwise.
    Gaussians3,
    /// Uniform draws from the unit hypercube.
    Uniform,
    /// Unit disc plus a half-annulus of radius 2..3 arched over it.
    CrescentFullMoon,
    /// Two unit-variance blobs separated by max(10, 2.8 * sqrt(dim)).
    Highdim2,
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Gaussians3 => "gaussians3",
            Generator::Uniform => "uniform",
            Generator::CrescentFullMoon => "crescent_full_moon",
            Generator::Highdim2 => "highdim2",
        }
    }

    /// Natural dimensionality when the caller does not pick one.
    pub fn default_dim(&self) -> usize {
        match self {
            Generator::Highdim2 => 100,
            _ => 2,
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussians3" => Ok(Generator::Gaussians3),
            "uniform" => Ok(Generator::Uniform),
            "crescent_full_moon" => Ok(Generator::CrescentFullMoon),
            "highdim2" => Ok(Generator::Highdim2),
            other => Err(Error::InvalidConfig(format!(
                "unknown generator '{other}' (expected gaussians3, uniform, crescent_full_moon, or highdim2)"
            ))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full description of a synthetic dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub generator: Generator,
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(generator: Generator, n: usize, dim: usize, seed: u64) -> Result<Self> {
        if n < 10 {
            return Err(Error::InvalidConfig(format!("size {n} < 10")));
        }
        let min_dim = match generator {
            Generator::Gaussians3 | Generator::CrescentFullMoon => 2,
            _ => 1,
        };
        if dim < min_dim {
            return Err(Error::InvalidConfig(format!(
                "{} needs dimension >= {min_dim}, got {dim}",
                generator.name()
            )));
        }
        if generator == Generator::CrescentFullMoon && dim != 2 {
            return Err(Error::InvalidConfig(
                "crescent_full_moon is a planar construction; dimension must be 2".into(),
            ));
        }
        Ok(SyntheticSpec {
            generator,
            n,
            dim,
            seed,
        })
    }
}

/// Generates the dataset a [`SyntheticSpec`] describes.
pub fn generate_synthetic<F: Real>(spec: &SyntheticSpec) -> Result<Dataset<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples = match spec.generator {
        Generator::Gaussians3 => gaussians3(&mut rng, spec.n, spec.dim),
        Generator::Uniform => uniform(&mut rng, spec.n, spec.dim),
        Generator::CrescentFullMoon => crescent_full_moon(&mut rng, spec.n),
        Generator::Highdim2 => highdim2(&mut rng, spec.n, spec.dim),
    };
    Dataset::new(
        format!("{}(n={}, dim={}, seed={})", spec.generator, spec.n, spec.dim, spec.seed),
        samples,
    )
}

fn normal_point<F: Real>(rng: &mut ChaCha8Rng, center: &[f64]) -> Sample<F> {
    Sample::vector(
        center
            .iter()
            .map(|c| F::from_f64(c + rng.sample::<f64, _>(StandardNormal)))
            .collect(),
    )
}

fn gaussians3<F: Real>(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Sample<F>> {
    // Equilateral triangle of side 10 in the first two coordinates.
    let mut centers = vec![vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
    centers[1][0] = 10.0;
    centers[2][0] = 5.0;
    centers[2][1] = 75.0f64.sqrt();
    let mut samples = Vec::with_capacity(n);
    for (label, center) in centers.iter().enumerate() {
        let count = n / 3 + usize::from(label < n % 3);
        for _ in 0..count {
            samples.push(normal_point::<F>(rng, center).with_label(label.to_string()));
        }
    }
    samples
}

fn uniform<F: Real>(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Sample<F>> {
    (0..n)
        .map(|_| {
            Sample::vector(
                (0..dim)
                    .map(|_| F::from_f64(rng.random::<f64>()))
                    .collect(),
            )
        })
        .collect()
}

fn crescent_full_moon<F: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sample<F>> {
    let disc = n / 2;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..disc {
        // Area-uniform draw from the unit disc.
        let r = rng.random::<f64>().sqrt();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        samples.push(
            Sample::vector(vec![
                F::from_f64(r * theta.cos()),
                F::from_f64(r * theta.sin()),
            ])
            .with_label("0"),
        );
    }
    for _ in disc..n {
        // Upper half-annulus between radii 2 and 3.
        let r = 2.0 + rng.random::<f64>();
        let theta = rng.random::<f64>() * std::f64::consts::PI;
        samples.push(
            Sample::vector(vec![
                F::from_f64(r * theta.cos()),
                F::from_f64(r * theta.sin()),
            ])
            .with_label("1"),
        );
    }
    samples
}

fn highdim2<F: Real>(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Sample<F>> {
    // Center separation grows with sqrt(dim) so the clusters stay resolvable
    // against the sqrt(dim) spread of isotropic noise.
    let separation = (2.8 * (dim as f64).sqrt()).max(10.0);
    let shift = separation / (dim as f64).sqrt();
    let c0 = vec![0.0; dim];
    let c1 = vec![shift; dim];
    let first = n / 2;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..first {
        samples.push(normal_point::<F>(rng, &c0).with_label("0"));
    }
    for _ in first..n {
        samples.push(normal_point::<F>(rng, &c1).with_label("1"));
    }
    samples
}
