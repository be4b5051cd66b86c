//! One-class classification on top of entropic spanning graphs.
//!
//! The pipeline: embed every sample into a dissimilarity space (its distances
//! to a fixed prototype set under a parameterized measure), connect the
//! embedded points with a mutual k-nearest-neighbor graph, and read the
//! decision regions off the graph's connected components. Training tunes the
//! measure parameters with a genetic search that minimizes an entropy-based
//! objective: the partition is good when splitting the graph into its
//! components loses as little spanning-graph entropy as possible. Scoring
//! re-inserts a query point into each component's graph and converts its
//! closeness-centrality shift into a fuzzy membership degree.
//!
//! Everything is generic over the float type through [`Real`]; the `*64` and
//! `*32` aliases pin the two supported precisions. All randomness flows from
//! explicit seeds, so training, evaluation, and the saved model files are
//! bit-for-bit reproducible.

pub mod dataset;
pub mod dissimilarity;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod fuzzy;
pub mod graph;
pub mod io;
pub mod model;
pub mod scalar;
pub mod synth;
pub mod trainer;

pub use dataset::{Dataset, DatasetKind, Sample, SampleValue};
pub use dissimilarity::{
    embed, select_prototypes, EmbeddedPoints, Measure, MeasureParams, PrototypeSet,
};
pub use entropy::{alpha_jensen, log_graph_length, objective_eta, renyi_entropy, EntropyConfig};
pub use error::{Error, Result};
pub use eval::{compute_auc, run_experiment, EvalReport, PROTOCOL_VERSION};
pub use fuzzy::{
    centrality_profile, closeness_centrality, membership_degree, score_sample,
    CentralityProfile, Decision,
};
pub use graph::{build_knn_graph, connected_components, KnnGraph, NeighborTable, Partition};
pub use io::{load_dataset, write_dataset_csv, Format};
pub use model::{load_model, save_model, TrainedModel};
pub use scalar::Real;
pub use synth::{generate_synthetic, Generator, SyntheticSpec};
pub use trainer::{evaluate_candidate, train, CandidateResult, TrainerConfig};

/// Double-precision instantiations, the usual choice.
pub type Dataset64 = Dataset<f64>;
pub type TrainerConfig64 = TrainerConfig<f64>;
pub type TrainedModel64 = TrainedModel<f64>;
pub type Decision64 = Decision<f64>;
pub type EvalReport64 = EvalReport<f64>;

/// Single-precision instantiations for memory-bound embeddings.
pub type Dataset32 = Dataset<f32>;
pub type TrainerConfig32 = TrainerConfig<f32>;
pub type TrainedModel32 = TrainedModel<f32>;
pub type Decision32 = Decision<f32>;
pub type EvalReport32 = EvalReport<f32>;
