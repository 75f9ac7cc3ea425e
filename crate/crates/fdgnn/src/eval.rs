//! Model configuration, training, and the nested cross-validation harness.
//!
//! The benchmark protocol is nested stratified k-fold cross-validation. For
//! every outer fold, hyperparameters are chosen by random search scored on
//! inner stratified folds of the outer training split alone; the ridge
//! strength is selected jointly with the architecture by scoring a whole
//! grid of values per sampled configuration. The winner is retrained on the
//! full outer training split with fresh weight guesses and scored once on
//! the untouched outer test split. Outer test indices never influence
//! selection -- they are not even embedded until retraining.
//!
//! Accuracies used for selection are accumulated as exact hit counts, so
//! config ranking involves no floating-point summation-order hazards and
//! repeated runs produce byte-identical reports (timing columns aside).

use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::graph::{Dataset, TargetMatrix};
use crate::readout::{
    augment_bias, decide, fit_ridge, pool_and_project, random_projection, TrainedModel,
};
use crate::reservoir::build_stack;
use crate::seeds;

/// Complete hyperparameter set of one model.
///
/// Deserialization fills omitted fields from [`ModelConfig::default`]
/// (hidden size 50), so partial configuration tables work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Number of stacked recurrent layers `L`.
    pub num_layers: usize,
    /// Hidden units per layer `H`.
    pub hidden_size: usize,
    /// Nonzeros per weight row `C`.
    pub connections: usize,
    /// Effective spectral radius (shared by all layers), in (0, 1).
    pub spectral_radius: f64,
    /// Input scale of the first layer (applied to vertex labels).
    pub input_scale_first: f64,
    /// Input scale of layers above the first.
    pub input_scale_deep: f64,
    /// Fixed-point convergence threshold.
    pub epsilon: f64,
    /// Fixed-point iteration cap per layer.
    pub max_iterations: usize,
    /// Rows of the random readout projection (default `2 * hidden_size`).
    pub projection_dim: usize,
    /// Ridge regularization strength.
    pub ridge_lambda: f64,
    /// Base seed; layer, projection, and guess seeds derive from it.
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::with_hidden_size(50)
    }
}

impl ModelConfig {
    /// Reasonable defaults around a given hidden size.
    pub fn with_hidden_size(hidden_size: usize) -> Self {
        Self {
            num_layers: 3,
            hidden_size,
            connections: 1,
            spectral_radius: 0.9,
            input_scale_first: 0.5,
            input_scale_deep: 0.1,
            epsilon: 1e-3,
            max_iterations: 50,
            projection_dim: 2 * hidden_size,
            ridge_lambda: 1e-3,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 {
            return Err(Error::InvalidConfig("num_layers must be at least 1".into()));
        }
        if self.projection_dim == 0 {
            return Err(Error::InvalidConfig("projection_dim must be at least 1".into()));
        }
        if !(self.ridge_lambda >= 0.0 && self.ridge_lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "ridge_lambda must be finite and nonnegative, got {}",
                self.ridge_lambda
            )));
        }
        self.embedding().validate()?;
        // Layer-level ranges (hidden size, connections, scales, radius) are
        // revalidated by layer construction; check the cheap ones here for
        // early, clearer errors.
        if self.hidden_size == 0 {
            return Err(Error::InvalidConfig("hidden_size must be at least 1".into()));
        }
        if self.connections == 0 || self.connections > self.hidden_size {
            return Err(Error::InvalidConfig(format!(
                "connections must lie in 1..={}, got {}",
                self.hidden_size, self.connections
            )));
        }
        Ok(())
    }

    /// The stopping rule shared by every layer.
    pub fn embedding(&self) -> EmbeddingConfig {
        EmbeddingConfig { epsilon: self.epsilon, max_iterations: self.max_iterations }
    }

    /// Same configuration under a different base seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Random-search space plus the fixed parameters shared by all sampled
/// configurations.
///
/// Deserialization fills omitted fields from [`SearchSpace::default`], so
/// partial configuration tables work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpace {
    /// Configurations sampled per outer fold.
    pub num_configs: usize,
    /// Weight initializations averaged per configuration.
    pub guesses: usize,
    /// Candidate layer counts.
    pub layer_choices: Vec<usize>,
    /// Effective spectral radius range (open interval).
    pub rho_range: (f64, f64),
    /// First-layer input scale range (open interval).
    pub omega_first_range: (f64, f64),
    /// Deep-layer input scale range (open interval).
    pub omega_deep_range: (f64, f64),
    /// Ridge strengths scored jointly with every configuration.
    pub lambda_grid: Vec<f64>,
    /// Hidden units per layer.
    pub hidden_size: usize,
    /// Nonzeros per weight row.
    pub connections: usize,
    /// Fixed-point threshold.
    pub epsilon: f64,
    /// Fixed-point iteration cap.
    pub max_iterations: usize,
}

/// Ridge grid: one value per decade from 1e-8 to 1e3.
pub fn default_lambda_grid() -> Vec<f64> {
    (-8..=3).map(|e| 10f64.powi(e)).collect()
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            num_configs: 100,
            guesses: 20,
            layer_choices: vec![1, 2, 3, 4, 5],
            rho_range: (0.0, 1.0),
            omega_first_range: (0.0, 1.0),
            omega_deep_range: (0.0, 1.0),
            lambda_grid: default_lambda_grid(),
            hidden_size: 50,
            connections: 1,
            epsilon: 1e-3,
            max_iterations: 50,
        }
    }
}

impl SearchSpace {
    /// Defaults with the hidden size adjusted for the larger benchmark
    /// datasets (NCI1, COLLAB use 500 units; everything else 50).
    pub fn default_for(dataset_name: &str) -> Self {
        let hidden = match dataset_name {
            "NCI1" | "COLLAB" => 500,
            _ => 50,
        };
        Self { hidden_size: hidden, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_configs == 0 {
            return Err(Error::InvalidConfig("num_configs must be at least 1".into()));
        }
        if self.guesses == 0 {
            return Err(Error::InvalidConfig("guesses must be at least 1".into()));
        }
        if self.layer_choices.is_empty() {
            return Err(Error::InvalidConfig("layer_choices must not be empty".into()));
        }
        if self.layer_choices.contains(&0) {
            return Err(Error::InvalidConfig("layer counts must be at least 1".into()));
        }
        for (name, (lo, hi)) in [
            ("rho_range", self.rho_range),
            ("omega_first_range", self.omega_first_range),
            ("omega_deep_range", self.omega_deep_range),
        ] {
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi})"
                )));
            }
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidConfig("lambda_grid must not be empty".into()));
        }
        if self.lambda_grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidConfig("lambda_grid values must be >= 0".into()));
        }
        if self.connections == 0 || self.connections > self.hidden_size {
            return Err(Error::InvalidConfig(format!(
                "connections must lie in 1..={}, got {}",
                self.hidden_size, self.connections
            )));
        }
        Ok(())
    }

    /// Draws one configuration. Draw order (layers, radius, first scale,
    /// deep scale, base seed) is part of the reproducibility contract.
    /// Interval draws resample the measure-zero case of hitting the lower
    /// endpoint so open ranges stay open.
    fn sample_config(&self, rng: &mut ChaCha8Rng) -> ModelConfig {
        let num_layers = self.layer_choices[rng.gen_range(0..self.layer_choices.len())];
        let mut open_range = |lo: f64, hi: f64| loop {
            let v = rng.gen_range(lo..hi);
            if v > lo {
                return v;
            }
        };
        let spectral_radius = open_range(self.rho_range.0, self.rho_range.1);
        let input_scale_first = open_range(self.omega_first_range.0, self.omega_first_range.1);
        let input_scale_deep = open_range(self.omega_deep_range.0, self.omega_deep_range.1);
        ModelConfig {
            num_layers,
            hidden_size: self.hidden_size,
            connections: self.connections,
            spectral_radius,
            input_scale_first,
            input_scale_deep,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            projection_dim: 2 * self.hidden_size,
            ridge_lambda: self.lambda_grid[0],
            seed: rng.gen(),
        }
    }
}

/// Splits `targets` into `k` stratified folds: each fold receives an equal
/// share (within one) of every class. Returns index lists, each sorted
/// ascending; deterministic in `seed`.
pub fn stratified_folds(targets: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {k}")));
    }
    if targets.is_empty() {
        return Err(Error::InvalidConfig("cannot fold an empty index set".into()));
    }
    let num_classes = targets.iter().max().unwrap() + 1;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &t) in targets.iter().enumerate() {
        by_class[t].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::Stratification { class, count: members.len(), folds: k });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for members in &mut by_class {
        // Fisher-Yates shuffle, then deal round-robin.
        for i in (1..members.len()).rev() {
            let j = rng.gen_range(0..=i);
            members.swap(i, j);
        }
        for (pos, &idx) in members.iter().enumerate() {
            folds[pos % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Encoded targets restricted to a subset of graphs, plus the raw class
/// indices of that subset.
fn subset_targets(dataset: &Dataset, indices: &[usize]) -> (TargetMatrix, Vec<usize>) {
    let raw: Vec<usize> = indices.iter().map(|&i| dataset.targets()[i]).collect();
    let encoded = encode_raw(&raw, dataset.num_classes());
    (encoded, raw)
}

/// Embeds the selected graphs under one weight draw and stacks their
/// projected features column-wise (`P x |indices|`, in `indices` order).
fn features_for(dataset: &Dataset, indices: &[usize], cfg: &ModelConfig) -> Result<DMatrix<f64>> {
    let stack = build_stack(cfg, dataset.label_dim(), dataset.avg_max_degree())?;
    let w_proj = random_projection(
        cfg.projection_dim,
        cfg.hidden_size,
        seeds::derive(cfg.seed, seeds::stream::PROJECTION),
    );
    let embedding = cfg.embedding();
    let columns: Vec<_> = indices
        .par_iter()
        .map(|&i| {
            let run = crate::embedding::embed_graph(&stack, &dataset.graphs()[i], &embedding)?;
            pool_and_project(&run.states, &w_proj)
        })
        .collect::<Result<_>>()?;
    let mut features = DMatrix::zeros(cfg.projection_dim, indices.len());
    for (j, col) in columns.iter().enumerate() {
        features.set_column(j, col);
    }
    Ok(features)
}

/// Copies the selected columns of a feature matrix.
fn select_columns(features: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(features.nrows(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        out.set_column(j, &features.column(c));
    }
    out
}

/// Counts correct predictions of readout `w_out` on feature columns.
fn count_hits(
    w_out: &DMatrix<f64>,
    features: &DMatrix<f64>,
    raw_targets: &[usize],
    num_classes: usize,
) -> u64 {
    let decisions = w_out * augment_bias(features);
    let mut hits = 0u64;
    for (j, &target) in raw_targets.iter().enumerate() {
        if decide(&decisions.column(j).into_owned(), num_classes) == target {
            hits += 1;
        }
    }
    hits
}

/// Trains one model (one weight draw) on a subset of the dataset.
fn train_on_subset(
    dataset: &Dataset,
    indices: &[usize],
    cfg: &ModelConfig,
) -> Result<TrainedModel> {
    cfg.validate()?;
    let features = features_for(dataset, indices, cfg)?;
    let (targets, _) = subset_targets(dataset, indices);
    let w_out = fit_ridge(&features, &targets, cfg.ridge_lambda)?;
    let stack = build_stack(cfg, dataset.label_dim(), dataset.avg_max_degree())?;
    let w_proj = random_projection(
        cfg.projection_dim,
        cfg.hidden_size,
        seeds::derive(cfg.seed, seeds::stream::PROJECTION),
    );
    TrainedModel::new(stack, w_proj, w_out, cfg.embedding(), dataset.num_classes())
}

/// Trains a classifier on the whole dataset with the given configuration.
pub fn train_model(dataset: &Dataset, cfg: &ModelConfig) -> Result<TrainedModel> {
    let all: Vec<usize> = (0..dataset.len()).collect();
    train_on_subset(dataset, &all, cfg)
}

/// Scores one configuration on an explicit train/validation split: for each
/// of `guesses` weight draws (seeds derived from `cfg.seed`), fits the
/// readout at `cfg.ridge_lambda` on the training graphs and evaluates on
/// the validation graphs. Returns mean validation accuracy.
pub fn evaluate_config(
    cfg: &ModelConfig,
    train_idx: &[usize],
    val_idx: &[usize],
    dataset: &Dataset,
    guesses: usize,
) -> Result<f64> {
    cfg.validate()?;
    if guesses == 0 {
        return Err(Error::InvalidConfig("guesses must be at least 1".into()));
    }
    if train_idx.is_empty() || val_idx.is_empty() {
        return Err(Error::InvalidConfig("train and validation splits must be non-empty".into()));
    }
    let (train_targets, _) = subset_targets(dataset, train_idx);
    let (_, val_raw) = subset_targets(dataset, val_idx);
    let mut hits = 0u64;
    for g in 0..guesses {
        let cfg_g = cfg.with_seed(seeds::derive_indexed(cfg.seed, seeds::stream::GUESS, g as u64));
        let train_features = features_for(dataset, train_idx, &cfg_g)?;
        let val_features = features_for(dataset, val_idx, &cfg_g)?;
        let w_out = fit_ridge(&train_features, &train_targets, cfg_g.ridge_lambda)?;
        hits += count_hits(&w_out, &val_features, &val_raw, dataset.num_classes());
    }
    Ok(hits as f64 / (guesses * val_idx.len()) as f64)
}

/// Per-fold result of a nested cross-validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    /// Outer fold index, 0-based.
    pub fold: usize,
    /// Winning configuration (ridge strength filled in by selection).
    pub config: ModelConfig,
    /// Inner-selection accuracy of the winner.
    pub inner_accuracy: f64,
    /// Accuracy on the outer test split, averaged over retrain guesses.
    pub test_accuracy: f64,
    /// Mean wall-clock seconds to train one final model.
    pub train_seconds: f64,
    /// Mean wall-clock seconds to embed and score the outer test split.
    pub test_seconds: f64,
}

/// Full nested cross-validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub dataset: String,
    pub seed: u64,
    pub folds: Vec<FoldOutcome>,
}

impl CvReport {
    /// Mean outer test accuracy.
    pub fn mean_accuracy(&self) -> f64 {
        self.folds.iter().map(|f| f.test_accuracy).sum::<f64>() / self.folds.len() as f64
    }

    /// Sample standard deviation (n - 1) of outer test accuracies.
    pub fn std_accuracy(&self) -> f64 {
        if self.folds.len() < 2 {
            return 0.0;
        }
        let mean = self.mean_accuracy();
        let var = self.folds.iter().map(|f| (f.test_accuracy - mean).powi(2)).sum::<f64>()
            / (self.folds.len() - 1) as f64;
        var.sqrt()
    }

    /// Mean number of layers selected across folds.
    pub fn mean_layers(&self) -> f64 {
        self.folds.iter().map(|f| f.config.num_layers as f64).sum::<f64>() / self.folds.len() as f64
    }

    /// CSV rendering: one row per outer fold.
    ///
    /// Columns `L,H,C,rho,omega1,omega,lambda` name the selected number of
    /// layers, hidden units, connections per neuron, recurrent spectral
    /// radius, first-layer input scale, deeper-layer input scale, and ridge
    /// penalty. The two timing columns are the only fields that vary between
    /// reruns of an identical configuration.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "fold,L,H,C,rho,omega1,omega,lambda,test_accuracy,train_seconds,test_seconds\n",
        );
        for f in &self.folds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{:.3},{:.3}\n",
                f.fold,
                f.config.num_layers,
                f.config.hidden_size,
                f.config.connections,
                f.config.spectral_radius,
                f.config.input_scale_first,
                f.config.input_scale_deep,
                f.config.ridge_lambda,
                f.test_accuracy,
                f.train_seconds,
                f.test_seconds,
            ));
        }
        out
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "dataset: {}\nseed: {}\nouter folds: {}\n\n",
            self.dataset,
            self.seed,
            self.folds.len()
        ));
        for f in &self.folds {
            out.push_str(&format!(
                "fold {:2}: acc {:.4}  (L={} rho={:.3} w1={:.3} w={:.3} lambda={:.0e} \
                 inner {:.4}  train {:.2}s test {:.2}s)\n",
                f.fold,
                f.test_accuracy,
                f.config.num_layers,
                f.config.spectral_radius,
                f.config.input_scale_first,
                f.config.input_scale_deep,
                f.config.ridge_lambda,
                f.inner_accuracy,
                f.train_seconds,
                f.test_seconds,
            ));
        }
        out.push_str(&format!(
            "\nmean accuracy: {:.4} +- {:.4}\nmean layers:   {:.2}\n",
            self.mean_accuracy(),
            self.std_accuracy(),
            self.mean_layers()
        ));
        out
    }
}

/// Runs nested stratified cross-validation: `outer_k` outer folds, each
/// selecting hyperparameters by random search (`space`) scored with
/// `inner_k` inner folds of the outer training split, ridge strength chosen
/// jointly from `space.lambda_grid`. Ties go to the higher accuracy, then
/// the smaller ridge strength, then fewer layers, then sampling order.
pub fn nested_cv(
    dataset: &Dataset,
    space: &SearchSpace,
    outer_k: usize,
    inner_k: usize,
    seed: u64,
) -> Result<CvReport> {
    space.validate()?;
    if dataset.num_classes() < 2 {
        return Err(Error::InvalidConfig("benchmarking needs at least 2 classes".into()));
    }
    let outer = stratified_folds(
        dataset.targets(),
        outer_k,
        seeds::derive(seed, seeds::stream::OUTER_FOLDS),
    )?;

    let mut outcomes = Vec::with_capacity(outer_k);
    for fold in 0..outer_k {
        let test_idx = &outer[fold];
        let train_idx: Vec<usize> =
            (0..outer_k).filter(|&f| f != fold).flat_map(|f| outer[f].iter().copied()).collect();
        let mut train_idx = train_idx;
        train_idx.sort_unstable();

        // Inner folds are computed on the training subset's target vector;
        // their indices are positions into `train_idx`.
        let train_targets: Vec<usize> = train_idx.iter().map(|&i| dataset.targets()[i]).collect();
        let inner = stratified_folds(
            &train_targets,
            inner_k,
            seeds::derive_indexed(seed, seeds::stream::INNER_FOLDS, fold as u64),
        )?;

        // Sample the fold's candidate configurations.
        let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive_indexed(
            seed,
            seeds::stream::CONFIG_SAMPLING,
            fold as u64,
        ));
        let configs: Vec<ModelConfig> =
            (0..space.num_configs).map(|_| space.sample_config(&mut rng)).collect();

        let (winner, inner_accuracy) = select_config(dataset, &train_idx, &inner, &configs, space)?;

        // Fresh guesses for the final retrain, then one pass over the
        // untouched outer test split.
        let mut train_seconds = 0.0;
        let mut test_seconds = 0.0;
        let mut test_hits = 0u64;
        for g in 0..space.guesses {
            let cfg_g = winner.with_seed(seeds::derive_indexed2(
                seed,
                seeds::stream::FINAL_TRAIN,
                fold as u64,
                g as u64,
            ));
            let t0 = Instant::now();
            let model = train_on_subset(dataset, &train_idx, &cfg_g)?;
            train_seconds += t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            for &i in test_idx {
                if model.predict(&dataset.graphs()[i])? == dataset.targets()[i] {
                    test_hits += 1;
                }
            }
            test_seconds += t1.elapsed().as_secs_f64();
        }
        let guesses = space.guesses as f64;
        outcomes.push(FoldOutcome {
            fold,
            config: winner,
            inner_accuracy,
            test_accuracy: test_hits as f64 / (space.guesses * test_idx.len()) as f64,
            train_seconds: train_seconds / guesses,
            test_seconds: test_seconds / guesses,
        });
    }
    Ok(CvReport { dataset: dataset.name().to_string(), seed, folds: outcomes })
}

/// Scores every sampled configuration over all inner folds, guesses, and
/// ridge strengths, and returns the winner (with its ridge strength filled
/// in) plus its selection accuracy.
fn select_config(
    dataset: &Dataset,
    train_idx: &[usize],
    inner_folds: &[Vec<usize>],
    configs: &[ModelConfig],
    space: &SearchSpace,
) -> Result<(ModelConfig, f64)> {
    let grid = &space.lambda_grid;
    let tasks: Vec<(usize, usize)> =
        (0..configs.len()).flat_map(|c| (0..space.guesses).map(move |g| (c, g))).collect();

    // Hit counts per (config, lambda), merged in deterministic task order.
    let partials: Vec<(usize, Vec<u64>)> = tasks
        .par_iter()
        .map(|&(c, g)| -> Result<(usize, Vec<u64>)> {
            let cfg = &configs[c];
            let cfg_g =
                cfg.with_seed(seeds::derive_indexed(cfg.seed, seeds::stream::GUESS, g as u64));
            let features = features_for(dataset, train_idx, &cfg_g)?;
            let (_, raw) = subset_targets(dataset, train_idx);
            let mut hits = vec![0u64; grid.len()];
            for fold in inner_folds {
                let in_fold: Vec<bool> = {
                    let mut mask = vec![false; train_idx.len()];
                    for &p in fold {
                        mask[p] = true;
                    }
                    mask
                };
                let tr_pos: Vec<usize> = (0..train_idx.len()).filter(|&p| !in_fold[p]).collect();
                let tr_features = select_columns(&features, &tr_pos);
                let tr_raw: Vec<usize> = tr_pos.iter().map(|&p| raw[p]).collect();
                let tr_targets = encode_raw(&tr_raw, dataset.num_classes());
                let val_features = select_columns(&features, fold);
                let val_raw: Vec<usize> = fold.iter().map(|&p| raw[p]).collect();
                // One Gram matrix per fold, reused across the whole ridge
                // grid; identical arithmetic to fit_ridge for lambda > 0.
                let phi = augment_bias(&tr_features);
                let gram_base = &phi * phi.transpose();
                let rhs = &phi * tr_targets.values().transpose();
                for (li, &lambda) in grid.iter().enumerate() {
                    let w_out = if lambda > 0.0 {
                        let mut gram = gram_base.clone();
                        for i in 0..gram.nrows() {
                            gram[(i, i)] += lambda;
                        }
                        let chol = gram.cholesky().ok_or(Error::SingularSystem)?;
                        chol.solve(&rhs).transpose()
                    } else {
                        fit_ridge(&tr_features, &tr_targets, lambda)?
                    };
                    hits[li] += count_hits(&w_out, &val_features, &val_raw, dataset.num_classes());
                }
            }
            Ok((c, hits))
        })
        .collect::<Result<_>>()?;

    let mut per_config: Vec<Vec<u64>> = vec![vec![0u64; grid.len()]; configs.len()];
    for (c, hits) in partials {
        for (li, h) in hits.into_iter().enumerate() {
            per_config[c][li] += h;
        }
    }

    // Total validated examples per (config, lambda): all inner folds over
    // all guesses.
    let denom = (space.guesses * train_idx.len()) as u64;
    let mut best: Option<(usize, usize, u64)> = None; // (config, lambda, hits)
    for (c, hits) in per_config.iter().enumerate() {
        // Smallest lambda wins ties within a config (grid order).
        let (mut best_li, mut best_hits) = (0usize, hits[0]);
        for (li, &h) in hits.iter().enumerate().skip(1) {
            if h > best_hits {
                best_li = li;
                best_hits = h;
            }
        }
        let better = match best {
            None => true,
            Some((bc, _, bh)) => {
                best_hits > bh
                    || (best_hits == bh && configs[c].num_layers < configs[bc].num_layers)
            }
        };
        if better {
            best = Some((c, best_li, best_hits));
        }
    }
    let (c, li, hits) = best.expect("at least one configuration");
    let mut winner = configs[c].clone();
    winner.ridge_lambda = grid[li];
    Ok((winner, hits as f64 / denom as f64))
}

/// Encodes raw class indices the same way dataset targets are encoded.
fn encode_raw(raw: &[usize], num_classes: usize) -> TargetMatrix {
    crate::graph::encode_class_labels(raw, num_classes)
        .expect("subset targets are valid by construction")
}
