//! Initialization of untrained recurrent layers.
//!
//! A layer holds two fixed sparse matrices: an input-to-hidden map `W_in`
//! and a hidden-to-hidden recurrent map `W_rec`, both with exactly `C`
//! nonzeros per row. Entries are sampled uniformly and `W_rec` is rescaled
//! so that `spectral_radius(W_rec) * degree` hits a requested value below 1,
//! the contractivity margin that keeps fixed-point embeddings stable on
//! graphs whose maximum degree matches `degree`.
//!
//! Sampling order is part of the contract (it pins down reproducibility):
//! for each row of `W_rec` (rows in order), `C` distinct column positions
//! are drawn by partial Fisher-Yates, sorted ascending, then `C` values are
//! drawn uniform in [-1, 1) and assigned to the sorted positions; `W_in` is
//! drawn the same way afterwards from the same stream, with values scaled
//! by `input_scale`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseRowMatrix;
use crate::spectral::{spectral_radius_with_fallback, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};

/// How many consecutive seeds are tried when a sampled recurrent matrix has
/// spectral radius exactly zero (vanishingly rare, but possible).
const MAX_SAMPLE_ATTEMPTS: usize = 10;

/// Parameters for a single recurrent layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerConfig {
    /// Hidden state dimension `H`.
    pub hidden_size: usize,
    /// Dimension of the per-vertex driving input `U` (vertex label size for
    /// the first layer, `H` of the previous layer above it).
    pub input_size: usize,
    /// Nonzeros per row `C` in the recurrent matrix. The input matrix uses
    /// `min(C, input_size)` per row, since a row cannot hold more distinct
    /// columns than the input has dimensions.
    pub connections: usize,
    /// Requested effective spectral radius: after initialization,
    /// `spectral_radius(W_rec) * degree` equals this value. Must lie in
    /// (0, 1) for stable embeddings.
    pub spectral_radius: f64,
    /// Input weight scale: `W_in` entries are uniform in
    /// (-input_scale, input_scale). Must lie in (0, 1).
    pub input_scale: f64,
    /// Degree statistic `k` of the graphs this layer will run on (the
    /// dataset average of per-graph maximum degrees).
    pub degree: f64,
    /// Seed for this layer's weight sampling.
    pub seed: u64,
}

impl LayerConfig {
    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 {
            return Err(Error::InvalidConfig("hidden_size must be at least 1".into()));
        }
        if self.input_size == 0 {
            return Err(Error::InvalidConfig("input_size must be at least 1".into()));
        }
        if self.connections == 0 {
            return Err(Error::InvalidConfig("connections must be at least 1".into()));
        }
        if self.connections > self.hidden_size {
            return Err(Error::InvalidConfig(format!(
                "connections = {} exceeds hidden_size = {}",
                self.connections, self.hidden_size
            )));
        }
        if !(self.spectral_radius > 0.0 && self.spectral_radius < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "spectral_radius must lie in (0, 1), got {}",
                self.spectral_radius
            )));
        }
        if !(self.input_scale > 0.0 && self.input_scale < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "input_scale must lie in (0, 1), got {}",
                self.input_scale
            )));
        }
        if !(self.degree > 0.0 && self.degree.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "degree must be positive and finite, got {}",
                self.degree
            )));
        }
        Ok(())
    }
}

/// The fixed (never trained) weights of one recurrent layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    w_input: SparseRowMatrix,
    w_recurrent: SparseRowMatrix,
}

impl LayerWeights {
    /// Builds from explicit matrices, checking shape compatibility
    /// (`w_recurrent` square with as many rows as `w_input`).
    pub fn new(w_input: SparseRowMatrix, w_recurrent: SparseRowMatrix) -> Result<Self> {
        if w_recurrent.rows() != w_recurrent.cols() {
            return Err(Error::DimensionMismatch(format!(
                "recurrent matrix must be square, got {}x{}",
                w_recurrent.rows(),
                w_recurrent.cols()
            )));
        }
        if w_input.rows() != w_recurrent.rows() {
            return Err(Error::DimensionMismatch(format!(
                "input matrix has {} rows but recurrent matrix has {}",
                w_input.rows(),
                w_recurrent.rows()
            )));
        }
        Ok(Self { w_input, w_recurrent })
    }

    /// Input-to-hidden matrix, `H x U`.
    pub fn w_input(&self) -> &SparseRowMatrix {
        &self.w_input
    }

    /// Hidden-to-hidden matrix, `H x H`.
    pub fn w_recurrent(&self) -> &SparseRowMatrix {
        &self.w_recurrent
    }

    /// Hidden dimension `H`.
    pub fn hidden_size(&self) -> usize {
        self.w_recurrent.rows()
    }

    /// Driving input dimension `U`.
    pub fn input_size(&self) -> usize {
        self.w_input.cols()
    }
}

/// Samples and rescales the weights of one layer.
///
/// If the sampled recurrent matrix happens to have spectral radius exactly
/// zero the layer is resampled with the seed incremented, up to ten times.
pub fn init_layer(cfg: &LayerConfig) -> Result<LayerWeights> {
    cfg.validate()?;
    for attempt in 0..MAX_SAMPLE_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt as u64));
        let mut w_recurrent =
            sample_sparse(&mut rng, cfg.hidden_size, cfg.hidden_size, cfg.connections, 1.0)?;
        let rho_raw =
            spectral_radius_with_fallback(&w_recurrent, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)?;
        if rho_raw == 0.0 {
            continue;
        }
        w_recurrent.scale(cfg.spectral_radius / (cfg.degree * rho_raw));
        let w_input = sample_sparse(
            &mut rng,
            cfg.hidden_size,
            cfg.input_size,
            cfg.connections.min(cfg.input_size),
            cfg.input_scale,
        )?;
        return Ok(LayerWeights { w_input, w_recurrent });
    }
    Err(Error::DegenerateSample(MAX_SAMPLE_ATTEMPTS))
}

/// Builds the whole layer stack for a model configuration.
///
/// The first layer consumes `label_dim` input rows at the first-layer input
/// scale; every deeper layer consumes the previous layer's `H` state rows
/// at the deep input scale. Per-layer seeds derive from `cfg.seed`. The
/// input matrix of a layer can hold at most `input_size` nonzeros per row,
/// so its row sparsity is `min(connections, input_size)` (relevant for
/// unlabeled datasets, where the first layer's input is 1-dimensional).
pub fn build_stack(
    cfg: &crate::eval::ModelConfig,
    label_dim: usize,
    degree: f64,
) -> Result<Vec<LayerWeights>> {
    cfg.validate()?;
    if label_dim == 0 {
        return Err(Error::InvalidConfig("label_dim must be at least 1".into()));
    }
    let mut stack = Vec::with_capacity(cfg.num_layers);
    for i in 0..cfg.num_layers {
        let input_size = if i == 0 { label_dim } else { cfg.hidden_size };
        let layer_cfg = LayerConfig {
            hidden_size: cfg.hidden_size,
            input_size,
            connections: cfg.connections,
            spectral_radius: cfg.spectral_radius,
            input_scale: if i == 0 { cfg.input_scale_first } else { cfg.input_scale_deep },
            degree,
            seed: crate::seeds::derive_indexed(cfg.seed, crate::seeds::stream::LAYER, i as u64),
        };
        stack.push(init_layer(&layer_cfg)?);
    }
    Ok(stack)
}

/// Draws a `rows x cols` matrix with `nnz_per_row` entries per row, values
/// uniform in `[-scale, scale)`.
fn sample_sparse<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    nnz_per_row: usize,
    scale: f64,
) -> Result<SparseRowMatrix> {
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut positions = sample_distinct(rng, cols, nnz_per_row);
        positions.sort_unstable();
        entries
            .push(positions.into_iter().map(|c| (c, scale * rng.gen_range(-1.0..1.0))).collect());
    }
    SparseRowMatrix::from_rows(rows, cols, nnz_per_row, &entries)
}

/// Draws `amount` distinct indices from `0..n` by partial Fisher-Yates
/// (deterministic for a given RNG stream, unordered result).
pub(crate) fn sample_distinct<R: Rng>(rng: &mut R, n: usize, amount: usize) -> Vec<usize> {
    debug_assert!(amount <= n);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..amount {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    indices.truncate(amount);
    indices
}
