//! Graphs, labeled datasets, and target encodings.
//!
//! Graphs are undirected, unweighted, without self-loops, stored as sorted
//! neighbor lists. Vertex labels are kept as a dense `I x N` matrix (one
//! column per vertex) because that is exactly the driving input of the first
//! recurrent layer; categorical labels become one-hot columns at parse time.

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One undirected graph with per-vertex label vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    /// `neighbors[v]` is sorted ascending, never contains `v`, and mirrors
    /// every edge (u in neighbors[v] iff v in neighbors[u]).
    neighbors: Vec<Vec<usize>>,
    /// Label matrix, `label_dim x num_vertices`.
    labels: DMatrix<f64>,
}

impl Graph {
    /// Builds a graph from an edge list and a label matrix.
    ///
    /// Edges may appear in either or both orientations and repeatedly;
    /// duplicates collapse. Self-loop pairs are ignored (the adjacency
    /// diagonal is zero by construction). Vertex indices must be in range
    /// and `labels` must provide one column per vertex.
    pub fn new(
        num_vertices: usize,
        edges: &[(usize, usize)],
        labels: DMatrix<f64>,
    ) -> Result<Self> {
        if labels.ncols() != num_vertices {
            return Err(Error::DimensionMismatch(format!(
                "label matrix has {} columns for {} vertices",
                labels.ncols(),
                num_vertices
            )));
        }
        if labels.nrows() == 0 {
            return Err(Error::DimensionMismatch("label matrix must have at least one row".into()));
        }
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); num_vertices];
        for &(u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::MalformedDataset(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{num_vertices}"
                )));
            }
            if u == v {
                continue;
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors, labels })
    }

    /// Builds a graph whose every vertex carries the constant label `[1]`.
    pub fn with_unit_labels(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(num_vertices, edges, DMatrix::from_element(1, num_vertices, 1.0))
    }

    pub fn num_vertices(&self) -> usize {
        self.neighbors.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertex label dimension `I`.
    pub fn label_dim(&self) -> usize {
        self.labels.nrows()
    }

    /// Label matrix, `I x N`.
    pub fn labels(&self) -> &DMatrix<f64> {
        &self.labels
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Largest vertex degree (0 for an edgeless graph).
    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every undirected edge once, as `(u, v)` with `u < v`, sorted.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(self.num_edges());
        for (u, list) in self.neighbors.iter().enumerate() {
            for &v in list {
                if u < v {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    /// Dense symmetric 0/1 adjacency matrix; for oracles and small checks.
    pub fn adjacency_dense(&self) -> DMatrix<f64> {
        let n = self.num_vertices();
        let mut a = DMatrix::zeros(n, n);
        for (u, list) in self.neighbors.iter().enumerate() {
            for &v in list {
                a[(u, v)] = 1.0;
            }
        }
        a
    }

    /// Relabels vertices: new vertex `perm[v]` is old vertex `v`. `perm`
    /// must be a permutation of `0..num_vertices`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_vertices();
        if perm.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} applied to {} vertices",
                perm.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidConfig("not a permutation".into()));
            }
            seen[p] = true;
        }
        let edges: Vec<(usize, usize)> =
            self.edge_pairs().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
        let mut labels = DMatrix::zeros(self.label_dim(), n);
        for (v, &target) in perm.iter().enumerate() {
            labels.set_column(target, &self.labels.column(v));
        }
        Self::new(n, &edges, labels)
    }
}

/// A named collection of graphs with integer class targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    targets: Vec<usize>,
    num_classes: usize,
    avg_max_degree: f64,
}

impl Dataset {
    /// Assembles a dataset, validating that it is non-empty, targets are in
    /// `0..num_classes`, and every graph shares one label dimension.
    pub fn new(
        name: impl Into<String>,
        graphs: Vec<Graph>,
        targets: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::MalformedDataset("dataset has no graphs".into()));
        }
        if graphs.len() != targets.len() {
            return Err(Error::MalformedDataset(format!(
                "{} graphs but {} targets",
                graphs.len(),
                targets.len()
            )));
        }
        if num_classes == 0 {
            return Err(Error::MalformedDataset("dataset has no classes".into()));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= num_classes) {
            return Err(Error::MalformedDataset(format!("target {bad} outside 0..{num_classes}")));
        }
        let dim = graphs[0].label_dim();
        if graphs.iter().any(|g| g.label_dim() != dim) {
            return Err(Error::MalformedDataset(
                "graphs disagree on vertex label dimension".into(),
            ));
        }
        let avg_max_degree =
            graphs.iter().map(|g| g.max_degree() as f64).sum::<f64>() / graphs.len() as f64;
        Ok(Self { name: name.into(), graphs, targets, num_classes, avg_max_degree })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    /// Class index of every graph, aligned with [`graphs`](Self::graphs).
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Number of graphs.
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Vertex label dimension shared by all graphs.
    pub fn label_dim(&self) -> usize {
        self.graphs[0].label_dim()
    }

    /// Mean over graphs of the per-graph maximum degree: the degree
    /// statistic `k` used when rescaling recurrent weights.
    pub fn avg_max_degree(&self) -> f64 {
        self.avg_max_degree
    }

    /// Largest degree over all graphs.
    pub fn global_max_degree(&self) -> usize {
        self.graphs.iter().map(Graph::max_degree).max().unwrap_or(0)
    }

    /// SHA-256 over a canonical rendering of structure, labels, and
    /// targets; identifies the exact data a run saw.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.name.as_bytes());
        hasher.update([0u8]);
        for (graph, target) in self.graphs.iter().zip(&self.targets) {
            hasher.update((graph.num_vertices() as u64).to_le_bytes());
            hasher.update((*target as u64).to_le_bytes());
            for (u, v) in graph.edge_pairs() {
                hasher.update((u as u64).to_le_bytes());
                hasher.update((v as u64).to_le_bytes());
            }
            for value in graph.labels().iter() {
                hasher.update(value.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Returns `(average per-graph maximum degree, global maximum degree)`.
pub fn degree_stats(dataset: &Dataset) -> (f64, usize) {
    (dataset.avg_max_degree(), dataset.global_max_degree())
}

/// Class targets encoded for the linear readout.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMatrix {
    values: DMatrix<f64>,
    num_classes: usize,
}

impl TargetMatrix {
    /// Encoded targets, `Y x M` (`Y = 1` for binary problems).
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Output rows `Y`.
    pub fn num_outputs(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

/// Encodes raw class indices: binary problems map classes {0, 1} to
/// {-1, +1} in a single output row; problems with three or more classes get
/// one-hot columns.
pub fn encode_class_labels(targets: &[usize], num_classes: usize) -> Result<TargetMatrix> {
    if num_classes < 2 {
        return Err(Error::InvalidConfig(format!(
            "target encoding needs at least 2 classes, got {num_classes}"
        )));
    }
    if let Some(&bad) = targets.iter().find(|&&t| t >= num_classes) {
        return Err(Error::InvalidConfig(format!("class index {bad} is outside 0..{num_classes}")));
    }
    let m = targets.len();
    let values = if num_classes == 2 {
        DMatrix::from_fn(1, m, |_, j| if targets[j] == 1 { 1.0 } else { -1.0 })
    } else {
        DMatrix::from_fn(num_classes, m, |i, j| if targets[j] == i { 1.0 } else { 0.0 })
    };
    Ok(TargetMatrix { values, num_classes })
}

/// Encodes a dataset's targets (see [`encode_class_labels`]).
pub fn encode_targets(dataset: &Dataset) -> Result<TargetMatrix> {
    encode_class_labels(dataset.targets(), dataset.num_classes())
}
