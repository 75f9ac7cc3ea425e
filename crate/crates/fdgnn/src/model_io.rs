//! Versioned on-disk model format.
//!
//! Models persist as a single JSON document with an explicit
//! `format_version`. Sparse layer matrices are stored as triplet lists,
//! dense matrices as row-major value arrays. Loading checks the version
//! before anything else and revalidates every shape relation, so a corrupt
//! or truncated file is reported as such rather than producing a broken
//! model.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::readout::TrainedModel;
use crate::reservoir::LayerWeights;
use crate::sparse::SparseRowMatrix;

/// Current file format version.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SparseRecord {
    rows: usize,
    cols: usize,
    nnz_per_row: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl SparseRecord {
    fn from_matrix(m: &SparseRowMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            nnz_per_row: m.nnz_per_row(),
            triplets: m.triplets().collect(),
        }
    }

    fn into_matrix(self) -> Result<SparseRowMatrix> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.rows];
        for (r, c, v) in self.triplets {
            if r >= self.rows {
                return Err(Error::ModelCorrupt(format!(
                    "sparse triplet row {r} outside 0..{}",
                    self.rows
                )));
            }
            rows[r].push((c, v));
        }
        SparseRowMatrix::from_rows(self.rows, self.cols, self.nnz_per_row, &rows)
            .map_err(|e| Error::ModelCorrupt(format!("sparse matrix: {e}")))
    }
}

#[derive(Serialize, Deserialize)]
struct DenseRecord {
    rows: usize,
    cols: usize,
    /// Row-major values, `rows * cols` of them.
    data: Vec<f64>,
}

impl DenseRecord {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    fn into_matrix(self) -> Result<DMatrix<f64>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::ModelCorrupt(format!(
                "dense matrix holds {} values for a {}x{} shape",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Serialize, Deserialize)]
struct LayerRecord {
    w_input: SparseRecord,
    w_recurrent: SparseRecord,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    format_version: u32,
    num_classes: usize,
    epsilon: f64,
    max_iterations: usize,
    layers: Vec<LayerRecord>,
    w_proj: DenseRecord,
    w_out: DenseRecord,
}

/// Minimal probe so the version can be checked even when the rest of the
/// layout is unknown.
#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

/// Writes a model as pretty-printed JSON.
pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let record = ModelRecord {
        format_version: FORMAT_VERSION,
        num_classes: model.num_classes(),
        epsilon: model.embedding_config().epsilon,
        max_iterations: model.embedding_config().max_iterations,
        layers: model
            .stack()
            .iter()
            .map(|l| LayerRecord {
                w_input: SparseRecord::from_matrix(l.w_input()),
                w_recurrent: SparseRecord::from_matrix(l.w_recurrent()),
            })
            .collect(),
        w_proj: DenseRecord::from_matrix(model.w_proj()),
        w_out: DenseRecord::from_matrix(model.w_out()),
    };
    let json = serde_json::to_string_pretty(&record)
        .map_err(|e| Error::ModelCorrupt(format!("serialize: {e}")))?;
    std::fs::write(path, json)?;
    Ok(())
}

/// Reads a model back, checking the format version first and revalidating
/// all shapes.
pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path)?;
    let probe: VersionProbe = serde_json::from_str(&text)
        .map_err(|e| Error::ModelCorrupt(format!("{}: {e}", path.display())))?;
    if probe.format_version != FORMAT_VERSION {
        return Err(Error::ModelVersion { found: probe.format_version, expected: FORMAT_VERSION });
    }
    let record: ModelRecord = serde_json::from_str(&text)
        .map_err(|e| Error::ModelCorrupt(format!("{}: {e}", path.display())))?;

    let mut stack = Vec::with_capacity(record.layers.len());
    for layer in record.layers {
        let weights =
            LayerWeights::new(layer.w_input.into_matrix()?, layer.w_recurrent.into_matrix()?)
                .map_err(|e| Error::ModelCorrupt(format!("layer weights: {e}")))?;
        stack.push(weights);
    }
    TrainedModel::new(
        stack,
        record.w_proj.into_matrix()?,
        record.w_out.into_matrix()?,
        EmbeddingConfig { epsilon: record.epsilon, max_iterations: record.max_iterations },
        record.num_classes,
    )
    .map_err(|e| match e {
        v @ Error::ModelVersion { .. } => v,
        other => Error::ModelCorrupt(format!("{}: {other}", path.display())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::readout::random_projection;
    use crate::reservoir::{init_layer, LayerConfig};

    fn sample_model() -> TrainedModel {
        let l1 = init_layer(&LayerConfig {
            hidden_size: 8,
            input_size: 2,
            connections: 2,
            spectral_radius: 0.7,
            input_scale: 0.3,
            degree: 2.0,
            seed: 5,
        })
        .unwrap();
        let l2 = init_layer(&LayerConfig {
            hidden_size: 8,
            input_size: 8,
            connections: 2,
            spectral_radius: 0.6,
            input_scale: 0.2,
            degree: 2.0,
            seed: 6,
        })
        .unwrap();
        let w_proj = random_projection(16, 8, 9);
        let w_out = DMatrix::from_fn(1, 17, |_, j| (j as f64 * 0.37).sin());
        TrainedModel::new(vec![l1, l2], w_proj, w_out, EmbeddingConfig::default(), 2).unwrap()
    }

    #[test]
    fn round_trip_preserves_everything() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("model.json");
        let model = sample_model();
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(model, loaded);

        // And behavior: identical predictions on a fresh graph.
        let g = Graph::new(
            4,
            &[(0, 1), (1, 2), (2, 3)],
            DMatrix::from_fn(2, 4, |i, j| f64::from(u8::from((i + j) % 2 == 0))),
        )
        .unwrap();
        assert_eq!(model.predict(&g).unwrap(), loaded.predict(&g).unwrap());
        assert_eq!(model.decision_values(&g).unwrap(), loaded.decision_values(&g).unwrap());
    }

    #[test]
    fn wrong_version_is_detected_before_shape_checks() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("model.json");
        save_model(&sample_model(), &path).unwrap();
        let doctored = std::fs::read_to_string(&path)
            .unwrap()
            .replace("\"format_version\": 1", "\"format_version\": 99");
        std::fs::write(&path, doctored).unwrap();
        match load_model(&path) {
            Err(Error::ModelVersion { found, expected }) => {
                assert_eq!((found, expected), (99, 1));
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("model.json");
        save_model(&sample_model(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelCorrupt(_))));
    }

    #[test]
    fn inconsistent_shapes_are_corrupt() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("model.json");
        save_model(&sample_model(), &path).unwrap();
        // Shrink the readout row: 17 values claimed, 16 present.
        let text = std::fs::read_to_string(&path).unwrap();
        let doctored = text.replace("\"cols\": 17", "\"cols\": 18");
        std::fs::write(&path, doctored).unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelCorrupt(_))));
    }

    #[test]
    fn missing_file_is_io() {
        assert!(matches!(load_model(Path::new("/nonexistent/model.json")), Err(Error::Io(_))));
    }
}
