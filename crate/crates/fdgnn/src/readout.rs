//! Linear readout: the only trained part of the model.
//!
//! A graph's embedding is the sum of its final-layer vertex states, passed
//! through a fixed random projection and `tanh`:
//!
//! ```text
//! phi(g) = tanh(W_proj * sum_v x_L(v))
//! ```
//!
//! The readout weights solve a ridge regression against the encoded class
//! targets in closed form, with a constant all-ones feature appended for the
//! bias. The bias column is regularized along with everything else; an
//! exemption would replace the `lambda I` term by `lambda diag(1,..,1,0)`,
//! which changes results only marginally at the small `lambda` values that
//! win model selection.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embedding::{embed_graph, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, TargetMatrix};
use crate::reservoir::LayerWeights;

/// Draws a `projection_dim x hidden_size` matrix with uniform entries and
/// every row scaled to unit Euclidean norm.
pub fn random_projection(projection_dim: usize, hidden_size: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(projection_dim, hidden_size);
    for r in 0..projection_dim {
        loop {
            for c in 0..hidden_size {
                m[(r, c)] = rng.gen_range(-1.0..1.0);
            }
            let norm = m.row(r).norm();
            if norm > 0.0 {
                for c in 0..hidden_size {
                    m[(r, c)] /= norm;
                }
                break;
            }
        }
    }
    m
}

/// Sums vertex state columns into one embedding vector.
pub fn pool_states(states: &DMatrix<f64>) -> DVector<f64> {
    let mut pooled = DVector::zeros(states.nrows());
    for col in states.column_iter() {
        pooled += col;
    }
    pooled
}

/// Pools vertex states and applies the fixed projection:
/// `tanh(w_proj * sum_v states[:, v])`.
pub fn pool_and_project(states: &DMatrix<f64>, w_proj: &DMatrix<f64>) -> Result<DVector<f64>> {
    if w_proj.ncols() != states.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "projection expects {} state rows, got {}",
            w_proj.ncols(),
            states.nrows()
        )));
    }
    Ok((w_proj * pool_states(states)).map(f64::tanh))
}

/// Appends the all-ones bias row to a `P x M` feature matrix.
pub fn augment_bias(features: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(features.nrows() + 1, features.ncols());
    out.view_mut((0, 0), features.shape()).copy_from(features);
    out.row_mut(features.nrows()).fill(1.0);
    out
}

/// Solves the ridge regression `min_W ||W F - T||^2 + lambda ||W||^2` over
/// bias-augmented features `F` in closed form, returning `W` as
/// `Y x (P + 1)`.
///
/// `lambda = 0` falls back to the SVD pseudo-inverse (the minimum-norm
/// least-squares solution).
pub fn fit_ridge(
    features: &DMatrix<f64>,
    targets: &TargetMatrix,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    if features.ncols() != targets.values().ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature columns for {} targets",
            features.ncols(),
            targets.values().ncols()
        )));
    }
    if features.ncols() == 0 {
        return Err(Error::InvalidConfig("cannot fit a readout on zero examples".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "ridge lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("readout features".into()));
    }

    let phi = augment_bias(features);
    if lambda > 0.0 {
        let p1 = phi.nrows();
        let mut gram = &phi * phi.transpose();
        for i in 0..p1 {
            gram[(i, i)] += lambda;
        }
        let chol = gram.cholesky().ok_or(Error::SingularSystem)?;
        let rhs = &phi * targets.values().transpose(); // (P+1) x Y
        Ok(chol.solve(&rhs).transpose())
    } else {
        let svd = phi.clone().svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-12;
        let pinv = svd.pseudo_inverse(cutoff).map_err(|_| Error::SingularSystem)?;
        Ok(targets.values() * pinv)
    }
}

/// A fully assembled classifier: fixed layer stack, fixed projection, and
/// trained readout weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    stack: Vec<LayerWeights>,
    w_proj: DMatrix<f64>,
    w_out: DMatrix<f64>,
    embedding: EmbeddingConfig,
    num_classes: usize,
}

impl TrainedModel {
    /// Assembles a model, validating all shape relations.
    pub fn new(
        stack: Vec<LayerWeights>,
        w_proj: DMatrix<f64>,
        w_out: DMatrix<f64>,
        embedding: EmbeddingConfig,
        num_classes: usize,
    ) -> Result<Self> {
        embedding.validate()?;
        let last = stack
            .last()
            .ok_or_else(|| Error::InvalidConfig("model needs at least one layer".into()))?;
        if w_proj.ncols() != last.hidden_size() {
            return Err(Error::DimensionMismatch(format!(
                "projection expects {} state rows, layers produce {}",
                w_proj.ncols(),
                last.hidden_size()
            )));
        }
        if w_out.ncols() != w_proj.nrows() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "readout has {} columns for {} projected features plus bias",
                w_out.ncols(),
                w_proj.nrows()
            )));
        }
        if num_classes < 2 {
            return Err(Error::InvalidConfig("a classifier needs at least 2 classes".into()));
        }
        let expected_rows = if num_classes == 2 { 1 } else { num_classes };
        if w_out.nrows() != expected_rows {
            return Err(Error::DimensionMismatch(format!(
                "readout has {} output rows for {num_classes} classes (expected {expected_rows})",
                w_out.nrows()
            )));
        }
        for weights in &stack {
            if weights.hidden_size() != last.hidden_size() {
                return Err(Error::DimensionMismatch(
                    "all layers must share one hidden size".into(),
                ));
            }
        }
        Ok(Self { stack, w_proj, w_out, embedding, num_classes })
    }

    pub fn stack(&self) -> &[LayerWeights] {
        &self.stack
    }

    pub fn w_proj(&self) -> &DMatrix<f64> {
        &self.w_proj
    }

    pub fn w_out(&self) -> &DMatrix<f64> {
        &self.w_out
    }

    pub fn embedding_config(&self) -> &EmbeddingConfig {
        &self.embedding
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Projected embedding of a graph (the readout's input, without bias).
    pub fn features(&self, graph: &Graph) -> Result<DVector<f64>> {
        let result = embed_graph(&self.stack, graph, &self.embedding)?;
        pool_and_project(&result.states, &self.w_proj)
    }

    /// Raw readout outputs for a graph (one value for binary problems, one
    /// per class otherwise).
    pub fn decision_values(&self, graph: &Graph) -> Result<DVector<f64>> {
        let phi = self.features(graph)?.push(1.0);
        Ok(&self.w_out * phi)
    }

    /// Predicted class index.
    ///
    /// Binary: class 1 iff the single decision value is `>= 0` (a value of
    /// exactly zero resolves to class 1). Multi-class: `argmax`, ties to the
    /// lowest class index.
    pub fn predict(&self, graph: &Graph) -> Result<usize> {
        let values = self.decision_values(graph)?;
        Ok(decide(&values, self.num_classes))
    }
}

/// Turns decision values into a class index (see [`TrainedModel::predict`]).
pub fn decide(values: &DVector<f64>, num_classes: usize) -> usize {
    if num_classes == 2 {
        usize::from(values[0] >= 0.0)
    } else {
        let mut best = 0;
        for i in 1..values.len() {
            if values[i] > values[best] {
                best = i;
            }
        }
        best
    }
}
