//! Model training: a genetic search over measure parameters wrapped around a
//! descending-k scan of candidate graphs.
//!
//! For a fixed parameter vector p the inner scan walks k from floor(sqrt(n))
//! down to 1, scoring each k-NN partition by the objective eta and exiting
//! early the first time eta worsens from one k to the next. That uptick is the
//! signal that model complexity should stop growing; a scan that never upticks
//! found no stable complexity, so its candidate is treated as non-converged
//! and can neither win nor terminate the search. Without that rule the search
//! drifts toward shattered partitions at k = 1, whose tiny components carry
//! pathologically low entropy mixtures and therefore unbeatable eta values.
//!
//! The outer loop is a real-coded GA: tournament selection, uniform crossover,
//! per-gene Gaussian mutation, elitism of one. Candidates are checked in a
//! fixed order (the all-ones neutral individual first) and the run stops at
//! the first converged candidate whose eta falls to the threshold tau, or
//! after a fixed number of generations. Training ends with a uniform rescale
//! of the winning parameters that pins the decision graph's mean edge weight,
//! a direction the objective cannot see but the membership kernel can; the
//! kernel target constant below explains why.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::{Dataset, DatasetKind};
use crate::dissimilarity::{
    embed, select_prototypes, Measure, MeasureParams, PrototypeSet, EDIT_COST_MIN,
};
use crate::entropy::{alpha_jensen_graphs, objective_eta, EntropyConfig};
use crate::error::{Error, Result};
use crate::fuzzy::centrality_profile;
use crate::graph::{connected_components, KnnGraph, NeighborTable, Partition};
use crate::model::TrainedModel;
use crate::scalar::Real;

/// Search hyperparameters; defaults follow the reference configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainerConfig<F> {
    /// Objective threshold; the search stops once a converged candidate
    /// reaches eta <= tau.
    pub tau: F,
    /// Maximum GA generations after the initial population.
    pub max_iterations: usize,
    pub population: usize,
    /// Mutation step as a fraction of each gene's range.
    pub mutation_sigma: F,
    /// Per-gene mutation probability.
    pub mutation_rate: F,
    pub crossover_rate: F,
    /// Tournament size for parent selection.
    pub tournament: usize,
    pub seed: u64,
    /// Entropy order parameter in (0, 1).
    pub alpha: F,
    /// Percentile defining each component's acceptance threshold.
    pub percentile_l: F,
    /// Cap on the training working set; larger datasets are subsampled.
    pub max_train_size: usize,
}

impl<F: Real> Default for TrainerConfig<F> {
    fn default() -> Self {
        TrainerConfig {
            tau: F::from_f64(0.05),
            max_iterations: 50,
            population: 20,
            mutation_sigma: F::from_f64(0.1),
            mutation_rate: F::from_f64(0.1),
            crossover_rate: F::from_f64(0.9),
            tournament: 3,
            seed: 0,
            alpha: F::from_f64(0.5),
            percentile_l: F::from_f64(50.0),
            max_train_size: 500,
        }
    }
}

impl<F: Real> TrainerConfig<F> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tau >= F::zero()) {
            return bad(format!("tau {} must be >= 0", self.tau));
        }
        if self.population < 2 {
            return bad(format!("population {} < 2", self.population));
        }
        if !(self.alpha > F::zero() && self.alpha < F::one()) {
            return bad(format!("alpha {} not in (0, 1)", self.alpha));
        }
        if !(self.percentile_l > F::zero() && self.percentile_l <= F::from_f64(100.0)) {
            return bad(format!("percentile {} not in (0, 100]", self.percentile_l));
        }
        if self.tournament == 0 {
            return bad("tournament size must be >= 1".into());
        }
        if self.max_train_size < 4 {
            return bad(format!("max_train_size {} < 4", self.max_train_size));
        }
        for (name, v) in [
            ("mutation_rate", self.mutation_rate),
            ("crossover_rate", self.crossover_rate),
        ] {
            if !(v >= F::zero() && v <= F::one()) {
                return bad(format!("{name} {v} not in [0, 1]"));
            }
        }
        if !(self.mutation_sigma >= F::zero()) || !self.mutation_sigma.is_finite() {
            return bad(format!("mutation_sigma {} must be >= 0", self.mutation_sigma));
        }
        Ok(())
    }
}

/// Result of scanning one parameter vector over all candidate k values.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateResult<F> {
    pub p: MeasureParams<F>,
    /// k attaining the lowest eta among visited values.
    pub k_best: usize,
    pub eta: F,
    pub partition: Partition,
    /// Whether the scan exited through the uptick stop. Non-converged
    /// candidates are excluded from selection by the trainer.
    pub converged: bool,
}

/// Scans k from floor(sqrt(n)) down to 1 for a fixed parameter vector.
///
/// Each k is scored by the entropy difference between the (k+1)-NN whole graph
/// and the size-weighted component entropies of the k-NN graph. The scan stops
/// at the first eta increase and reports the argmin-eta iterate visited.
pub fn evaluate_candidate<F: Real>(
    dataset: &Dataset<F>,
    prototypes: &PrototypeSet<F>,
    p: &MeasureParams<F>,
    config: &TrainerConfig<F>,
) -> Result<CandidateResult<F>> {
    let measure = Measure::for_kind(&dataset.kind);
    let points = embed(&dataset.samples, prototypes, p, measure)?;
    let n = points.rows();
    let k_max = (n as f64).sqrt().floor() as usize;
    if n < 4 || k_max + 1 > n - 1 {
        return Err(Error::Training(format!(
            "{n} samples are too few: the scan needs floor(sqrt(n)) + 1 <= n - 1 and n >= 4"
        )));
    }
    let entropy = EntropyConfig::new(config.alpha, points.cols())?;
    let table = NeighborTable::new(&points);
    let mut coarser = table.graph_for_k(k_max + 1)?;
    let mut prev_eta: Option<F> = None;
    let mut best: Option<(usize, F, Partition)> = None;
    let mut converged = false;
    for k in (1..=k_max).rev() {
        let graph = table.graph_for_k(k)?;
        let partition = connected_components(&graph);
        let delta = alpha_jensen_graphs(&coarser, &graph, &partition, &entropy);
        let eta = objective_eta(delta);
        if best.as_ref().is_none_or(|(_, e, _)| eta < *e) {
            best = Some((k, eta, partition));
        }
        if let Some(prev) = prev_eta {
            if eta > prev {
                converged = true;
                break;
            }
        }
        prev_eta = Some(eta);
        coarser = graph;
    }
    let (k_best, eta, partition) = best.expect("at least one k was visited");
    Ok(CandidateResult {
        p: p.clone(),
        k_best,
        eta,
        partition,
        converged,
    })
}

/// Selection fitness: converged candidates compete on eta, everything else is
/// pinned at the objective's worst value.
fn fitness<F: Real>(c: &CandidateResult<F>) -> F {
    if c.converged {
        c.eta
    } else {
        F::one()
    }
}

/// Target mean edge weight of the decision graph after training.
///
/// The objective cannot see the absolute scale of the measure: multiplying
/// every distance by c shifts both entropy terms by m ln c, so the difference,
/// eta, the neighbor ordering, and the partition are all unchanged, and the
/// search ends at an arbitrary point on that level set. The membership kernel
/// is not scale-free, though. A probe far from every region retains
/// exp(-(chi_star / threshold)^2 / 2) membership, and that floor only decays
/// once edge weights are small enough that the centrality deficits sit narrow
/// against chi_star. Shrinking the winner uniformly walks along the level set
/// into that regime, so training ends by rescaling the winning parameters
/// until the decision graph's mean edge weight reaches this target. Growing
/// is never attempted: smaller scales are already safe, and edit costs cannot
/// cross their lower bound without distorting relative costs.
const KERNEL_MEAN_EDGE: f64 = 0.25;

fn mean_edge_weight<F: Real>(graph: &KnnGraph<F>) -> Option<F> {
    if graph.edges.is_empty() {
        return None;
    }
    let total = graph
        .edges
        .iter()
        .fold(F::zero(), |acc, &(_, _, w)| acc + w);
    Some(total / F::from_f64(graph.edges.len() as f64))
}

/// Uniform shrink factor that brings the mean edge down to the kernel target,
/// or None when the graph is already at or below it. For edit costs the
/// factor is clamped so no cost can cross its lower bound, because a clamped
/// non-uniform rescale would change which edit operations are cheapest.
fn kernel_shrink_factor<F: Real>(
    mean_edge: F,
    p: &MeasureParams<F>,
    measure: Measure,
) -> Option<F> {
    let target = F::from_f64(KERNEL_MEAN_EDGE);
    if !mean_edge.is_finite() || mean_edge <= target {
        return None;
    }
    let mut factor = target / mean_edge;
    if measure == Measure::WeightedEdit {
        let lo = F::from_f64(EDIT_COST_MIN);
        let min_cost = p.values.iter().fold(F::infinity(), |a, &v| a.min(v));
        factor = factor.max(lo / min_cost);
    }
    (factor < F::one()).then_some(factor)
}

/// Applies a uniform distance rescale in parameter space. Euclidean distances
/// scale with the square root of the weights, edit distances linearly with
/// the costs; the max guards a rounding step below the cost floor.
fn shrink_params<F: Real>(p: &mut MeasureParams<F>, measure: Measure, factor: F) {
    match measure {
        Measure::WeightedEuclidean => {
            let ff = factor * factor;
            for v in &mut p.values {
                *v = *v * ff;
            }
        }
        Measure::WeightedEdit => {
            let lo = F::from_f64(EDIT_COST_MIN);
            for v in &mut p.values {
                *v = (*v * factor).max(lo);
            }
        }
    }
}

struct Search<'a, F> {
    working: &'a Dataset<F>,
    prototypes: &'a PrototypeSet<F>,
    config: &'a TrainerConfig<F>,
    bounds: Vec<(F, F)>,
    best: Option<CandidateResult<F>>,
    eta_history: Vec<F>,
}

impl<F: Real> Search<'_, F> {
    /// Evaluates a batch in parallel, then folds it in candidate order,
    /// returning each candidate's fitness and whether the best converged
    /// candidate reached tau. Candidates after the triggering one are ignored
    /// for selection, keeping parallel and serial runs identical.
    fn absorb(&mut self, genomes: &[MeasureParams<F>]) -> Result<(Vec<F>, bool)> {
        let results: Vec<Result<CandidateResult<F>>> = genomes
            .par_iter()
            .map(|g| evaluate_candidate(self.working, self.prototypes, g, self.config))
            .collect();
        let mut fitnesses = Vec::with_capacity(results.len());
        for result in results {
            let cand = result?;
            fitnesses.push(fitness(&cand));
            if self.best.as_ref().map_or(true, |b| fitness(&cand) < fitness(b)) {
                self.best = Some(cand);
            }
            let best_fit = fitness(self.best.as_ref().expect("just set"));
            if best_fit <= self.config.tau {
                // Sequential stop: later candidates in this batch are never
                // inspected, exactly as if they had not been evaluated.
                return Ok((fitnesses, true));
            }
        }
        Ok((fitnesses, false))
    }

    fn record_generation(&mut self) {
        let f = fitness(self.best.as_ref().expect("population was absorbed"));
        self.eta_history.push(f);
    }
}

fn random_genome<F: Real>(rng: &mut ChaCha8Rng, bounds: &[(F, F)]) -> MeasureParams<F> {
    let values = bounds
        .iter()
        .map(|&(lo, hi)| lo + (hi - lo) * F::from_f64(rng.random::<f64>()))
        .collect();
    MeasureParams {
        values,
        bounds: bounds.to_vec(),
    }
}

fn tournament_pick<'a, F: Real>(
    rng: &mut ChaCha8Rng,
    population: &'a [(MeasureParams<F>, F)],
    size: usize,
) -> &'a MeasureParams<F> {
    let mut best = rng.random_range(0..population.len());
    for _ in 1..size {
        let i = rng.random_range(0..population.len());
        if population[i].1 < population[best].1 {
            best = i;
        }
    }
    &population[best].0
}

fn breed<F: Real>(
    rng: &mut ChaCha8Rng,
    population: &[(MeasureParams<F>, F)],
    config: &TrainerConfig<F>,
    bounds: &[(F, F)],
    count: usize,
) -> Vec<MeasureParams<F>> {
    let mut children = Vec::with_capacity(count);
    while children.len() < count {
        let mut a = tournament_pick(rng, population, config.tournament).clone();
        let mut b = tournament_pick(rng, population, config.tournament).clone();
        if F::from_f64(rng.random::<f64>()) < config.crossover_rate {
            for i in 0..a.values.len() {
                if rng.random::<f64>() < 0.5 {
                    std::mem::swap(&mut a.values[i], &mut b.values[i]);
                }
            }
        }
        for child in [a, b] {
            let mut child = child;
            for (v, &(lo, hi)) in child.values.iter_mut().zip(bounds) {
                if F::from_f64(rng.random::<f64>()) < config.mutation_rate {
                    let z: f64 = rng.sample(StandardNormal);
                    let step = config.mutation_sigma * (hi - lo) * F::from_f64(z);
                    *v = (*v + step).max(lo).min(hi);
                }
            }
            if children.len() < count {
                children.push(child);
            }
        }
    }
    children
}

/// Trains a model: subsamples a working set, searches measure parameters with
/// the GA, and freezes the winning candidate's graph and per-component
/// centrality statistics.
pub fn train<F: Real>(
    dataset: &Dataset<F>,
    measure: Measure,
    config: &TrainerConfig<F>,
) -> Result<TrainedModel<F>> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::BadDataset("cannot train on an empty dataset".into()));
    }
    if measure != Measure::for_kind(&dataset.kind) {
        return Err(Error::InvalidConfig(format!(
            "measure {} does not apply to this dataset",
            measure.name()
        )));
    }
    if dataset.is_degenerate() {
        return Err(Error::Degenerate(
            "all samples are identical; there is no structure to learn".into(),
        ));
    }
    let prototypes = select_prototypes(dataset, config.max_train_size, config.seed)?;
    let working = dataset.subset(
        format!("{}[working]", dataset.name),
        &prototypes.indices,
    )?;
    let gene_count = match &dataset.kind {
        DatasetKind::Vector { dim } => *dim,
        DatasetKind::Sequence { .. } => 3,
    };
    let neutral = MeasureParams::neutral(measure, gene_count);
    let bounds = neutral.bounds.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut search = Search {
        working: &working,
        prototypes: &prototypes,
        config,
        bounds,
        best: None,
        eta_history: Vec::new(),
    };
    let mut init = Vec::with_capacity(config.population);
    init.push(neutral);
    for _ in 1..config.population {
        init.push(random_genome(&mut rng, &search.bounds));
    }
    let mut iterations = 0;
    let (init_fitnesses, mut done) = search.absorb(&init)?;
    search.record_generation();
    let mut population: Vec<(MeasureParams<F>, F)> = init
        .into_iter()
        .zip(init_fitnesses)
        .collect();
    while !done && iterations < config.max_iterations {
        let elite = search.best.as_ref().expect("initial population absorbed");
        let elite_pair = (elite.p.clone(), fitness(elite));
        let children = breed(
            &mut rng,
            &population,
            config,
            &search.bounds,
            config.population - 1,
        );
        iterations += 1;
        let (child_fitnesses, hit) = search.absorb(&children)?;
        done = hit;
        search.record_generation();
        if !done {
            population = std::iter::once(elite_pair)
                .chain(children.into_iter().zip(child_fitnesses))
                .collect();
        }
    }

    let Search {
        best, eta_history, ..
    } = search;
    let mut best = best.expect("search evaluated at least one candidate");
    let mut embedded = embed(&working.samples, &prototypes, &best.p, measure)?;
    let mut k_graph = NeighborTable::new(&embedded).graph_for_k(best.k_best)?;
    if let Some(factor) = mean_edge_weight(&k_graph)
        .and_then(|mean| kernel_shrink_factor(mean, &best.p, measure))
    {
        shrink_params(&mut best.p, measure, factor);
        embedded = embed(&working.samples, &prototypes, &best.p, measure)?;
        k_graph = NeighborTable::new(&embedded).graph_for_k(best.k_best)?;
        // The rescale preserves neighbor order, so this matches the scanned
        // partition; recomputing keeps the model coherent regardless.
        best.partition = connected_components(&k_graph);
    }
    let mut chi_star = Vec::with_capacity(best.partition.components.len());
    let mut thresholds = Vec::with_capacity(best.partition.components.len());
    for comp in &best.partition.components {
        let sub = k_graph.induced_subgraph(comp);
        let profile = centrality_profile(&sub, config.percentile_l)?;
        chi_star.push(profile.chi_star);
        thresholds.push(profile.threshold);
    }
    let model = TrainedModel {
        measure,
        p_star: best.p,
        k_star: best.k_best,
        prototypes,
        embedded_train: embedded,
        partition: best.partition,
        chi_star,
        thresholds,
        alpha: config.alpha,
        percentile_l: config.percentile_l,
        final_eta: best.eta,
        iterations,
        seed: config.seed,
        eta_history,
    };
    model.validate()?;
    Ok(model)
}
