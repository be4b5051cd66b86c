//! Graph-length based Renyi entropy estimation and the training objective.
//!
//! The entropy of a point set is estimated from the total edge-length power
//! sum of its kNN graph. Splitting the set into parts and comparing the whole
//! graph's entropy against the size-weighted entropies of the parts yields a
//! non-negative divergence: zero when the parts look alike, large when they
//! concentrate in separated regions.

use crate::dissimilarity::EmbeddedPoints;
use crate::error::{Error, Result};
use crate::graph::{KnnGraph, NeighborTable, Partition};
use crate::scalar::Real;

/// Entropy estimator configuration tied to an embedding dimension m.
///
/// gamma = m * (1 - alpha), so the estimator's prefactor m/gamma equals
/// 1/(1-alpha). The bias constant depends only on (m, gamma) and therefore
/// cancels inside any size-weighted entropy difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyConfig<F> {
    pub alpha: F,
    pub m: usize,
    pub gamma: F,
    bias: F,
}

impl<F: Real> EntropyConfig<F> {
    pub fn new(alpha: F, m: usize) -> Result<Self> {
        if !(alpha > F::zero() && alpha < F::one()) {
            return Err(Error::InvalidConfig(format!("alpha = {alpha} outside (0, 1)")));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("embedding dimension 0".into()));
        }
        let gamma = F::from_f64(m as f64) * (F::one() - alpha);
        Ok(EntropyConfig {
            alpha,
            m,
            gamma,
            bias: bias_constant(m, gamma),
        })
    }

    /// Same configuration with the bias constant replaced; lets tests check
    /// that size-weighted entropy differences do not depend on it.
    pub fn with_bias(mut self, bias: F) -> Self {
        self.bias = bias;
        self
    }
}

/// ln((gamma/2) * ln(m / (2*pi*e))) where the argument is positive, else 0.
///
/// The argument goes negative for m < 2*pi*e where the constant has no
/// defined logarithm; since it is data-independent and cancels in entropy
/// differences, dropping it there changes no decision.
fn bias_constant<F: Real>(m: usize, gamma: F) -> F {
    let two_pi_e = F::from_f64(2.0 * std::f64::consts::PI * std::f64::consts::E);
    let arg = gamma / F::from_f64(2.0) * (F::from_f64(m as f64) / two_pi_e).ln();
    if arg > F::zero() {
        arg.ln()
    } else {
        F::zero()
    }
}

/// Natural log of the graph length sum(w^gamma), via log-sum-exp over
/// gamma * ln(w) for stability at large gamma.
///
/// Zero-weight edges contribute nothing (the w -> 0 limit of w^gamma); a
/// graph whose edges all have zero weight has length 0 and log-length -inf.
pub fn log_graph_length<F: Real>(graph: &KnnGraph<F>, gamma: F) -> Result<F> {
    if graph.edges.is_empty() {
        return Err(Error::Degenerate(format!(
            "graph on {} vertices has no edges",
            graph.vertex_count
        )));
    }
    if gamma <= F::zero() {
        return Err(Error::InvalidConfig(format!("gamma = {gamma} must be > 0")));
    }
    let mut terms: Vec<F> = Vec::with_capacity(graph.edges.len());
    for &(_, _, w) in &graph.edges {
        if w > F::zero() {
            terms.push(gamma * w.ln());
        }
    }
    let Some(max) = terms
        .iter()
        .copied()
        .fold(None::<F>, |acc, t| Some(acc.map_or(t, |a| a.max(t))))
    else {
        return Ok(F::neg_infinity());
    };
    let mut sum = F::zero();
    for t in &terms {
        sum = sum + (*t - max).exp();
    }
    Ok(max + sum.ln())
}

/// Renyi alpha-entropy estimate from a kNN graph over n points:
/// (m/gamma) * (ln L_gamma - alpha * ln n - bias).
pub fn renyi_entropy<F: Real>(graph: &KnnGraph<F>, config: &EntropyConfig<F>, n: usize) -> Result<F> {
    if n < 2 {
        return Err(Error::Degenerate(format!("{n} points cannot span a graph")));
    }
    let log_len = log_graph_length(graph, config.gamma)?;
    let m = F::from_f64(config.m as f64);
    let ln_n = F::from_f64(n as f64).ln();
    Ok(m / config.gamma * (log_len - config.alpha * ln_n - config.bias))
}

/// Entropy term for one partition component: 0 for components that cannot
/// span a graph (fewer than 2 vertices) or whose graph length vanishes.
fn component_entropy<F: Real>(
    k_graph: &KnnGraph<F>,
    vertices: &[usize],
    config: &EntropyConfig<F>,
) -> F {
    if vertices.len() < 2 {
        return F::zero();
    }
    let sub = k_graph.induced_subgraph(vertices);
    match renyi_entropy(&sub, config, vertices.len()) {
        Ok(h) if h.is_finite() => h,
        _ => F::zero(),
    }
}

/// Size-weighted entropy difference between a whole graph and the component
/// sub-graphs of a finer graph, clamped at 0.
pub(crate) fn alpha_jensen_graphs<F: Real>(
    whole: &KnnGraph<F>,
    k_graph: &KnnGraph<F>,
    partition: &Partition,
    config: &EntropyConfig<F>,
) -> F {
    let n = whole.vertex_count;
    let h_whole = match renyi_entropy(whole, config, n) {
        Ok(h) if h.is_finite() => h,
        _ => F::zero(),
    };
    let mut mixture = F::zero();
    for comp in &partition.components {
        let beta = F::from_f64(comp.len() as f64) / F::from_f64(n as f64);
        mixture = mixture + beta * component_entropy(k_graph, comp, config);
    }
    (h_whole - mixture).max(F::zero())
}

/// alpha-Jensen difference for a k-NN partition of embedded points.
///
/// The whole-set entropy uses the (k+1)-NN graph so the two sides never share
/// an identical edge set; each component's entropy uses the component's
/// induced sub-graph of the k-NN graph with its own vertex count as n.
pub fn alpha_jensen<F: Real>(
    points: &EmbeddedPoints<F>,
    partition: &Partition,
    k: usize,
    config: &EntropyConfig<F>,
) -> Result<F> {
    let n = points.rows();
    if k + 1 > n.saturating_sub(1) {
        return Err(Error::InvalidConfig(format!(
            "k + 1 = {} exceeds n - 1 = {}",
            k + 1,
            n.saturating_sub(1)
        )));
    }
    let table = NeighborTable::new(points);
    let whole = table.graph_for_k(k + 1)?;
    let k_graph = table.graph_for_k(k)?;
    Ok(alpha_jensen_graphs(&whole, &k_graph, partition, config))
}

/// Objective value: 1 / (1 + delta), strictly decreasing, 1 at delta = 0.
pub fn objective_eta<F: Real>(delta: F) -> F {
    assert!(
        delta >= F::zero(),
        "negative divergence {delta} violates the objective contract"
    );
    F::one() / (F::one() + delta)
}
