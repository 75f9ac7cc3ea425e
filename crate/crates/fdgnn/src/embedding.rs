//! Fixed-point embedding of graphs by untrained recurrent layers.
//!
//! Each layer iterates its state equation over all vertices simultaneously:
//!
//! ```text
//! X_t = tanh(W_in * U  +  W_rec * X_{t-1} * A)
//! ```
//!
//! with `U` the per-vertex driving input (`I x N` vertex labels for the
//! first layer, the previous layer's states above it), `A` the adjacency
//! matrix, and `X_0 = 0`. Iteration stops when the Frobenius norm of the
//! state update drops to `epsilon` or after `max_iterations` steps. When the
//! recurrent weights are contractive relative to the graph's degree the
//! iteration converges to a unique fixed point regardless of the initial
//! state, which is what [`check_ges`] probes empirically.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::reservoir::LayerWeights;

/// Stopping rule for the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig {
    /// Convergence threshold on the Frobenius norm of the state update.
    pub epsilon: f64,
    /// Iteration cap per layer.
    pub max_iterations: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self { epsilon: 1e-3, max_iterations: 50 }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of iterating one layer on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerRun {
    /// Final states, `H x N`.
    pub states: DMatrix<f64>,
    /// Update steps actually performed.
    pub iterations: usize,
    /// Whether the update norm reached `epsilon` within the cap.
    pub converged: bool,
}

/// Final states plus per-layer iteration diagnostics for a whole stack.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    /// States of the deepest layer, `H x N`.
    pub states: DMatrix<f64>,
    /// Steps taken by each layer, first to last.
    pub iterations: Vec<usize>,
    /// Convergence flag of each layer.
    pub converged: Vec<bool>,
}

/// One synchronous state update: `tanh(W_in * input + W_rec * prev * A)`.
pub fn layer_step(
    weights: &LayerWeights,
    input: &DMatrix<f64>,
    graph: &Graph,
    prev_states: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    check_shapes(weights, input, graph)?;
    if prev_states.nrows() != weights.hidden_size() || prev_states.ncols() != graph.num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "previous states are {}x{}, expected {}x{}",
            prev_states.nrows(),
            prev_states.ncols(),
            weights.hidden_size(),
            graph.num_vertices()
        )));
    }
    let drive = weights.w_input().mul_dense(input)?;
    let mut propagated = DMatrix::zeros(weights.hidden_size(), graph.num_vertices());
    let mut next = DMatrix::zeros(weights.hidden_size(), graph.num_vertices());
    update_states(weights, &drive, graph, prev_states, &mut propagated, &mut next)?;
    Ok(next)
}

/// Iterates one layer from the zero state until the update norm reaches
/// `epsilon` or `max_iterations` steps have run.
pub fn iterate_layer(
    weights: &LayerWeights,
    input: &DMatrix<f64>,
    graph: &Graph,
    cfg: &EmbeddingConfig,
) -> Result<LayerRun> {
    let start = DMatrix::zeros(weights.hidden_size(), graph.num_vertices());
    iterate_layer_from(weights, input, graph, cfg, start)
}

/// As [`iterate_layer`] but from an arbitrary initial state.
pub fn iterate_layer_from(
    weights: &LayerWeights,
    input: &DMatrix<f64>,
    graph: &Graph,
    cfg: &EmbeddingConfig,
    initial: DMatrix<f64>,
) -> Result<LayerRun> {
    cfg.validate()?;
    check_shapes(weights, input, graph)?;
    let (h, n) = (weights.hidden_size(), graph.num_vertices());
    if initial.nrows() != h || initial.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial states are {}x{}, expected {h}x{n}",
            initial.nrows(),
            initial.ncols()
        )));
    }

    let drive = weights.w_input().mul_dense(input)?;
    if drive.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("layer input drive".into()));
    }

    let mut states = initial;
    let mut next = DMatrix::zeros(h, n);
    let mut propagated = DMatrix::zeros(h, n);
    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=cfg.max_iterations {
        let diff = update_states(weights, &drive, graph, &states, &mut propagated, &mut next)?;
        std::mem::swap(&mut states, &mut next);
        iterations = t;
        if diff <= cfg.epsilon {
            converged = true;
            break;
        }
    }
    if states.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("layer states".into()));
    }
    Ok(LayerRun { states, iterations, converged })
}

/// Runs the whole stack on a graph: the first layer is driven by the vertex
/// labels, each further layer by the states of the one below.
pub fn embed_graph(
    stack: &[LayerWeights],
    graph: &Graph,
    cfg: &EmbeddingConfig,
) -> Result<EmbeddingResult> {
    if stack.is_empty() {
        return Err(Error::InvalidConfig("layer stack is empty".into()));
    }
    let mut input = graph.labels().clone();
    let mut iterations = Vec::with_capacity(stack.len());
    let mut converged = Vec::with_capacity(stack.len());
    let mut states = None;
    for weights in stack {
        let run = iterate_layer(weights, &input, graph, cfg)?;
        iterations.push(run.iterations);
        converged.push(run.converged);
        input = run.states.clone();
        states = Some(run.states);
    }
    Ok(EmbeddingResult { states: states.expect("non-empty stack"), iterations, converged })
}

/// Empirically probes embedding stability: iterates the layer from
/// `random_starts` random initial states plus the zero state and reports
/// whether all final states agree pairwise within `10 * epsilon`
/// (Frobenius). A contractive layer always passes; an expanding one
/// separates starts or fails to settle.
///
/// Deterministic: the random starts come from a fixed internal seed.
pub fn check_ges(
    weights: &LayerWeights,
    graph: &Graph,
    input: &DMatrix<f64>,
    cfg: &EmbeddingConfig,
    random_starts: usize,
) -> Result<bool> {
    assert!(random_starts >= 2, "need at least two random starts");
    let (h, n) = (weights.hidden_size(), graph.num_vertices());
    let mut finals = Vec::with_capacity(random_starts + 1);
    finals.push(iterate_layer(weights, input, graph, cfg)?.states);
    for trial in 0..random_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6_0511_u64.wrapping_add(trial as u64));
        let start = DMatrix::from_fn(h, n, |_, _| rng.gen_range(-1.0..1.0));
        finals.push(iterate_layer_from(weights, input, graph, cfg, start)?.states);
    }
    let bound = 10.0 * cfg.epsilon;
    for i in 0..finals.len() {
        for j in (i + 1)..finals.len() {
            if (&finals[i] - &finals[j]).norm() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_shapes(weights: &LayerWeights, input: &DMatrix<f64>, graph: &Graph) -> Result<()> {
    if input.nrows() != weights.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} rows but the layer expects {}",
            input.nrows(),
            weights.input_size()
        )));
    }
    if input.ncols() != graph.num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} columns for a graph with {} vertices",
            input.ncols(),
            graph.num_vertices()
        )));
    }
    Ok(())
}

/// Computes `next = tanh(drive + (W_rec * states) * A)` and returns the
/// Frobenius norm of `next - states`. `propagated` is scratch for
/// `W_rec * states`.
fn update_states(
    weights: &LayerWeights,
    drive: &DMatrix<f64>,
    graph: &Graph,
    states: &DMatrix<f64>,
    propagated: &mut DMatrix<f64>,
    next: &mut DMatrix<f64>,
) -> Result<f64> {
    weights.w_recurrent().mul_dense_into(states, propagated)?;
    let h = weights.hidden_size();
    let n = graph.num_vertices();
    let prev = states.as_slice();
    let prop = propagated.as_slice();
    let drv = drive.as_slice();
    let out = next.as_mut_slice();
    let mut diff_sq = 0.0;
    for v in 0..n {
        let base = v * h;
        out[base..base + h].copy_from_slice(&drv[base..base + h]);
        for &u in graph.neighbors(v) {
            let nb = u * h;
            for i in 0..h {
                out[base + i] += prop[nb + i];
            }
        }
        for i in 0..h {
            let val = out[base + i].tanh();
            let d = val - prev[base + i];
            diff_sq += d * d;
            out[base + i] = val;
        }
    }
    Ok(diff_sq.sqrt())
}
