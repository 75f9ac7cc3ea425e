//! Synthetic graphs, datasets, and sparse matrices for examples and test
//! suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};
use crate::reservoir::sample_distinct;
use crate::sparse::SparseRowMatrix;

/// Simple cycle on `n >= 3` vertices (2-regular), unit vertex labels.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    circulant_graph(n, &[1])
}

/// Circulant graph: vertex `v` links to `v +- o (mod n)` for every offset
/// `o`. Offsets must lie in `1..=n/2`; distinct offsets are required.
/// Degree is `2 * |offsets|`, minus 1 if `n` is even and `n/2` is used
/// (that offset pairs antipodal vertices only once).
pub fn circulant_graph(n: usize, offsets: &[usize]) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!("circulant graph needs n >= 3, got {n}")));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &o in offsets {
        if o == 0 || o > n / 2 {
            return Err(Error::InvalidConfig(format!(
                "circulant offset {o} outside 1..={}",
                n / 2
            )));
        }
        if !seen.insert(o) {
            return Err(Error::InvalidConfig(format!("repeated circulant offset {o}")));
        }
    }
    let mut edges = Vec::new();
    for v in 0..n {
        for &o in offsets {
            edges.push((v, (v + o) % n));
        }
    }
    Graph::with_unit_labels(n, &edges)
}

/// A `k`-regular circulant graph on `n` vertices: even `k` uses offsets
/// `1..=k/2`; odd `k` additionally uses the antipodal offset `n/2` and
/// therefore requires even `n`.
pub fn k_regular_graph(n: usize, k: usize) -> Result<Graph> {
    if k == 0 || k >= n {
        return Err(Error::InvalidConfig(format!("no {k}-regular graph on {n} vertices")));
    }
    let mut offsets: Vec<usize> = (1..=k / 2).collect();
    if k % 2 == 1 {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "a {k}-regular graph on {n} vertices needs even n"
            )));
        }
        offsets.push(n / 2);
    }
    if offsets.iter().any(|&o| o > n / 2) {
        return Err(Error::InvalidConfig(format!("no {k}-regular circulant on {n} vertices")));
    }
    circulant_graph(n, &offsets)
}

/// Replaces a graph's vertex labels with all-zero vectors of the same
/// dimension (the label-free setting used in stability analyses).
pub fn with_zero_labels(graph: &Graph) -> Graph {
    Graph::new(
        graph.num_vertices(),
        &graph.edge_pairs(),
        DMatrix::zeros(graph.label_dim(), graph.num_vertices()),
    )
    .expect("same structure revalidates")
}

/// Erdos-Renyi graph `G(n, p)` with unit vertex labels; deterministic in
/// `seed`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_range(0.0..1.0) < p {
                edges.push((u, v));
            }
        }
    }
    Graph::with_unit_labels(n, &edges)
}

/// Random square sparse matrix with `nnz_per_row` entries per row, values
/// uniform in `[-scale, scale)`; deterministic in `seed`. Used to exercise
/// the spectral-radius estimator.
pub fn random_sparse_matrix(
    n: usize,
    nnz_per_row: usize,
    scale: f64,
    seed: u64,
) -> Result<SparseRowMatrix> {
    if nnz_per_row == 0 || nnz_per_row > n {
        return Err(Error::InvalidConfig(format!(
            "{nnz_per_row} nonzeros per row do not fit a {n}x{n} matrix"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut cols = sample_distinct(&mut rng, n, nnz_per_row);
        cols.sort_unstable();
        rows.push(
            cols.into_iter().map(|c| (c, scale * rng.gen_range(-1.0..1.0))).collect::<Vec<_>>(),
        );
    }
    SparseRowMatrix::from_rows(n, n, nnz_per_row, &rows)
}

/// Two-class synthetic benchmark: class 0 graphs are plain rings, class 1
/// graphs are rings with random chords (visibly denser). Ring sizes rotate
/// through `sizes`; deterministic in `seed`.
pub fn two_class_dataset(per_class: usize, sizes: &[usize], seed: u64) -> Result<Dataset> {
    if per_class == 0 || sizes.is_empty() {
        return Err(Error::InvalidConfig("need at least one graph per class".into()));
    }
    if sizes.iter().any(|&s| s < 4) {
        return Err(Error::InvalidConfig("ring sizes must be at least 4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(2 * per_class);
    let mut targets = Vec::with_capacity(2 * per_class);
    for i in 0..per_class {
        let n = sizes[i % sizes.len()];
        graphs.push(cycle_graph(n)?);
        targets.push(0);
    }
    for i in 0..per_class {
        let n = sizes[i % sizes.len()];
        let mut edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        let chords = (n / 2).max(1);
        for _ in 0..chords {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
        graphs.push(Graph::with_unit_labels(n, &edges)?);
        targets.push(1);
    }
    Dataset::new("synthetic-rings", graphs, targets, 2)
}
