//! Fuzzy membership over decision regions.
//!
//! Each connected component of the trained graph is fuzzified through graph
//! closeness centrality: vertices near the component's topological center get
//! membership close to 1, peripheral vertices fall off on a Gaussian curve
//! whose width is a percentile of the in-sample centrality deficits. A test
//! point is scored by inserting it into each component's point set, rebuilding
//! that component's kNN graph, and reading off its centrality deficit.

use crate::dataset::Sample;
use crate::dissimilarity::embed_sample;
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, KnnGraph};
use crate::model::TrainedModel;
use crate::scalar::Real;

/// Centrality summary of one component.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralityProfile<F> {
    /// Closeness of each vertex, in the component's vertex order.
    pub closeness: Vec<F>,
    /// Maximum closeness over the component.
    pub chi_star: F,
    /// Per-vertex deficits chi_star - closeness; at least one entry is 0.
    pub differences: Vec<F>,
    /// l-th percentile of the deficits; the membership kernel's width.
    pub threshold: F,
}

/// Outcome of scoring one sample against a trained model.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision<F> {
    /// Highest membership over all components.
    pub membership: F,
    /// Whether the sample's deficit in the winning component stayed within
    /// that component's training threshold.
    pub accepted: bool,
    /// Index of the winning component (smallest index on ties).
    pub component: usize,
    /// Membership in every component.
    pub per_component: Vec<F>,
}

/// Closeness centrality of every vertex: sum over other vertices of
/// 2^(-shortest-path distance), with unreachable pairs contributing 0.
pub fn closeness_centrality<F: Real>(graph: &KnnGraph<F>) -> Vec<F> {
    let dist = all_pairs_shortest_paths(graph);
    let n = graph.vertex_count;
    let mut chi = vec![F::zero(); n];
    for v in 0..n {
        let mut acc = F::zero();
        for u in 0..n {
            if u == v {
                continue;
            }
            let d = dist[v * n + u];
            if d.is_finite() {
                acc = acc + (-d).exp2();
            }
        }
        chi[v] = acc;
    }
    chi
}

/// Dense all-pairs shortest paths; infinity marks unreachable pairs.
fn all_pairs_shortest_paths<F: Real>(graph: &KnnGraph<F>) -> Vec<F> {
    let n = graph.vertex_count;
    let mut dist = vec![F::infinity(); n * n];
    for v in 0..n {
        dist[v * n + v] = F::zero();
    }
    for &(u, v, w) in &graph.edges {
        if w < dist[u * n + v] {
            dist[u * n + v] = w;
            dist[v * n + u] = w;
        }
    }
    for via in 0..n {
        for i in 0..n {
            let d_iv = dist[i * n + via];
            if !d_iv.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = d_iv + dist[via * n + j];
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                }
            }
        }
    }
    dist
}

/// Centrality profile of a component sub-graph at percentile l.
pub fn centrality_profile<F: Real>(graph: &KnnGraph<F>, l: F) -> Result<CentralityProfile<F>> {
    if graph.vertex_count == 0 {
        return Err(Error::Degenerate("empty component".into()));
    }
    if l <= F::zero() || l > F::from_f64(100.0) {
        return Err(Error::InvalidConfig(format!(
            "percentile {l} outside (0, 100]"
        )));
    }
    let closeness = closeness_centrality(graph);
    let chi_star = closeness
        .iter()
        .fold(F::neg_infinity(), |a, &b| if b > a { b } else { a });
    let differences: Vec<F> = closeness.iter().map(|&c| chi_star - c).collect();
    let mut sorted = differences.clone();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("deficits are finite"));
    let threshold = percentile_sorted(&sorted, l);
    Ok(CentralityProfile {
        closeness,
        chi_star,
        differences,
        threshold,
    })
}

/// Linearly interpolated l-th percentile of an ascending slice.
fn percentile_sorted<F: Real>(sorted: &[F], l: F) -> F {
    let last = sorted.len() - 1;
    let rank = l / F::from_f64(100.0) * F::from_f64(last as f64);
    let lo = rank.floor().to_f64() as usize;
    let hi = rank.ceil().to_f64() as usize;
    let frac = rank - rank.floor();
    sorted[lo] + frac * (sorted[hi.min(last)] - sorted[lo])
}

/// Gaussian membership of a centrality deficit relative to a threshold.
///
/// A zero threshold degenerates to the indicator of a zero deficit, the
/// pointwise limit of the kernel as its width shrinks.
pub fn membership_degree<F: Real>(chi_hat_v: F, threshold: F) -> F {
    if threshold == F::zero() {
        if chi_hat_v == F::zero() {
            F::one()
        } else {
            F::zero()
        }
    } else {
        let z = chi_hat_v / threshold;
        (-(z * z) / F::from_f64(2.0)).exp()
    }
}

/// Scores one sample against every component of a trained model.
///
/// The sample is embedded with the model's parameters, appended to each
/// component's embedded points, and the component graph is rebuilt from
/// scratch with the trained k (capped at the augmented size minus one). The
/// sample's deficit uses the augmented maximum closeness, while the acceptance
/// threshold stays frozen at its training value.
pub fn score_sample<F: Real>(model: &TrainedModel<F>, x: &Sample<F>) -> Result<Decision<F>> {
    let components = &model.partition.components;
    if model.thresholds.len() != components.len() {
        return Err(Error::InvalidConfig(format!(
            "model has {} components but {} thresholds",
            components.len(),
            model.thresholds.len()
        )));
    }
    let row = embed_sample(x, &model.prototypes, &model.p_star, model.measure)?;
    let mut per_component = Vec::with_capacity(components.len());
    let mut deficits = Vec::with_capacity(components.len());
    for (i, comp) in components.iter().enumerate() {
        let pts = model.embedded_train.gather_with_extra(comp, &row)?;
        let n_aug = comp.len() + 1;
        let k_eff = model.k_star.min(n_aug - 1);
        let graph = build_knn_graph(&pts, k_eff)?;
        let closeness = closeness_centrality(&graph);
        let chi_star = closeness
            .iter()
            .fold(F::neg_infinity(), |a, &b| if b > a { b } else { a });
        let chi_hat = chi_star - closeness[n_aug - 1];
        deficits.push(chi_hat);
        per_component.push(membership_degree(chi_hat, model.thresholds[i]));
    }
    let mut best = 0;
    for i in 1..per_component.len() {
        if per_component[i] > per_component[best] {
            best = i;
        }
    }
    Ok(Decision {
        membership: per_component[best],
        accepted: deficits[best] <= model.thresholds[best],
        component: best,
        per_component,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::dissimilarity::{embed, select_prototypes, Measure, MeasureParams};
    use crate::graph::{connected_components, NeighborTable};

    fn graph(n: usize, edges: Vec<(usize, usize, f64)>) -> KnnGraph<f64> {
        KnnGraph {
            vertex_count: n,
            k: 1,
            edges,
        }
    }

    #[test]
    fn path_graph_closeness_matches_hand_computation() {
        // a - b - c with unit weights: chi(b) = 2^-1 + 2^-1, chi(a) = 2^-1 + 2^-2.
        let g = graph(3, vec![(0, 1, 1.0), (1, 2, 1.0)]);
        let chi = closeness_centrality(&g);
        assert!((chi[1] - 1.0).abs() < 1e-15);
        assert!((chi[0] - 0.75).abs() < 1e-15);
        assert!((chi[2] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_vertex_has_zero_closeness() {
        let g = graph(1, vec![]);
        assert_eq!(closeness_centrality(&g), vec![0.0]);
    }

    #[test]
    fn unreachable_vertices_contribute_nothing() {
        let g = graph(3, vec![(0, 1, 1.0)]);
        let chi = closeness_centrality(&g);
        assert_eq!(chi[2], 0.0);
        assert_eq!(chi[0], 0.5);
    }

    #[test]
    fn shortest_paths_take_detours_when_cheaper() {
        let g = graph(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]);
        let chi = closeness_centrality(&g);
        // d(0, 2) = 2 through the middle vertex, not 5.
        assert!((chi[0] - (0.5 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn closeness_matches_single_source_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let n = rng.random_range(2..=12);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..2).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let e = crate::dissimilarity::EmbeddedPoints::from_rows(
                pts.iter().map(|p| vec![p[0] + 3.0, p[1] + 3.0]).collect(),
            )
            .unwrap();
            let k = rng.random_range(1..n);
            let g = build_knn_graph(&e, k).unwrap();
            let fast = closeness_centrality(&g);
            let slow = oracle_closeness(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    /// Bellman-Ford from every source; independent of the dense relaxation.
    fn oracle_closeness(g: &KnnGraph<f64>) -> Vec<f64> {
        let n = g.vertex_count;
        let mut chi = vec![0.0; n];
        for s in 0..n {
            let mut d = vec![f64::INFINITY; n];
            d[s] = 0.0;
            for _ in 0..n {
                let mut changed = false;
                for &(u, v, w) in &g.edges {
                    if d[u] + w < d[v] {
                        d[v] = d[u] + w;
                        changed = true;
                    }
                    if d[v] + w < d[u] {
                        d[u] = d[v] + w;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            chi[s] = (0..n)
                .filter(|&u| u != s && d[u].is_finite())
                .map(|u| (-d[u]).exp2())
                .sum();
        }
        chi
    }

    #[test]
    fn profile_median_of_three() {
        // Deficits {0, 0.25, 0.25}; the interpolated median is 0.25.
        let g = graph(3, vec![(0, 1, 1.0), (1, 2, 1.0)]);
        let p = centrality_profile(&g, 50.0).unwrap();
        assert_eq!(p.chi_star, 1.0);
        assert!((p.threshold - 0.25).abs() < 1e-15);
    }

    #[test]
    fn profile_percentile_100_is_max_deficit() {
        let g = graph(3, vec![(0, 1, 1.0), (1, 2, 1.0)]);
        let p = centrality_profile(&g, 100.0).unwrap();
        let max = p.differences.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(p.threshold, max);
    }

    #[test]
    fn symmetric_graph_has_zero_threshold() {
        let g = graph(2, vec![(0, 1, 1.0)]);
        let p = centrality_profile(&g, 50.0).unwrap();
        assert_eq!(p.threshold, 0.0);
        assert!(p.differences.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn profile_has_a_zero_deficit() {
        let g = graph(4, vec![(0, 1, 0.5), (1, 2, 2.0), (2, 3, 0.1)]);
        let p = centrality_profile(&g, 50.0).unwrap();
        assert!(p.differences.iter().any(|&d| d == 0.0));
        assert!(p.differences.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn profile_rejects_bad_percentile() {
        let g = graph(2, vec![(0, 1, 1.0)]);
        assert!(centrality_profile(&g, 0.0).is_err());
        assert!(centrality_profile(&g, 100.1).is_err());
    }

    #[test]
    fn membership_at_zero_deficit_is_one() {
        assert_eq!(membership_degree(0.0, 0.3), 1.0);
        assert_eq!(membership_degree(0.0, 0.0), 1.0);
    }

    #[test]
    fn membership_at_threshold() {
        let mu = membership_degree(0.25, 0.25);
        assert_eq!(mu, 0.6065306597126334); // exp(-1/2)
    }

    #[test]
    fn membership_zero_threshold_is_indicator() {
        assert_eq!(membership_degree(1.0, 0.0), 0.0);
    }

    /// Builds a small trained model by hand: one 3-point collinear component.
    /// The spacing keeps the edge weights well under 1.55, where the kernel
    /// width (the median centrality deficit) is narrow enough that a distant
    /// point's membership falls below 1 percent.
    fn tiny_model() -> TrainedModel<f64> {
        let samples = vec![
            Sample::vector(vec![0.0]),
            Sample::vector(vec![0.5]),
            Sample::vector(vec![1.0]),
        ];
        let dataset = Dataset::new("tiny", samples).unwrap();
        let prototypes = select_prototypes(&dataset, 500, 0).unwrap();
        let p_star = MeasureParams::neutral(Measure::WeightedEuclidean, 1);
        let embedded = embed(
            &dataset.samples,
            &prototypes,
            &p_star,
            Measure::WeightedEuclidean,
        )
        .unwrap();
        let table = NeighborTable::new(&embedded);
        let k_graph = table.graph_for_k(1).unwrap();
        let partition = connected_components(&k_graph);
        assert_eq!(partition.components.len(), 1);
        let profile = centrality_profile(&k_graph, 50.0).unwrap();
        TrainedModel {
            measure: Measure::WeightedEuclidean,
            p_star,
            k_star: 1,
            prototypes,
            embedded_train: embedded,
            partition,
            chi_star: vec![profile.chi_star],
            thresholds: vec![profile.threshold],
            alpha: 0.5,
            percentile_l: 50.0,
            final_eta: 0.5,
            iterations: 0,
            seed: 0,
            eta_history: vec![0.5],
        }
    }

    #[test]
    fn duplicate_of_central_vertex_scores_full_membership() {
        let model = tiny_model();
        let d = score_sample(&model, &Sample::vector(vec![0.5])).unwrap();
        assert_eq!(d.membership, 1.0);
        assert!(d.accepted);
        assert_eq!(d.component, 0);
    }

    #[test]
    fn far_outlier_is_rejected() {
        let model = tiny_model();
        let d = score_sample(&model, &Sample::vector(vec![1.0e6])).unwrap();
        assert!(d.membership < 0.01);
        assert!(!d.accepted);
    }

    #[test]
    fn scoring_is_stateless() {
        let model = tiny_model();
        let x = Sample::vector(vec![0.4]);
        let y = Sample::vector(vec![7.0]);
        let first = score_sample(&model, &x).unwrap();
        let _ = score_sample(&model, &y).unwrap();
        let second = score_sample(&model, &x).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn score_rejects_variant_mismatch() {
        let model = tiny_model();
        assert!(score_sample(&model, &Sample::sequence("ab")).is_err());
    }
}
