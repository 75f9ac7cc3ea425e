//! Fast and deep graph networks with untrained recurrent layers.
//!
//! The model embeds a graph by running each of a stack of fixed, randomly
//! initialized recurrent layers to a fixed point of its state equation, with
//! sparse weights rescaled so the iteration is contractive. Only the linear
//! readout on top of the pooled vertex states is trained, in closed form via
//! ridge regression, which makes the whole pipeline deterministic, cheap,
//! and easy to cross-validate rigorously.

pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod model_io;
pub mod readout;
pub mod reservoir;
pub mod seeds;
pub mod sparse;
pub mod spectral;
pub mod synth;
pub mod tudataset;

pub use embedding::{check_ges, embed_graph, iterate_layer, EmbeddingConfig, EmbeddingResult};
pub use error::{Error, Result};
pub use eval::{
    evaluate_config, nested_cv, stratified_folds, train_model, CvReport, FoldOutcome, ModelConfig,
    SearchSpace,
};
pub use graph::{degree_stats, encode_class_labels, encode_targets, Dataset, Graph, TargetMatrix};
pub use model_io::{load_model, save_model};
pub use readout::{augment_bias, fit_ridge, pool_and_project, random_projection, TrainedModel};
pub use reservoir::{build_stack, init_layer, LayerConfig, LayerWeights};
pub use sparse::SparseRowMatrix;
pub use tudataset::parse_tudataset;
