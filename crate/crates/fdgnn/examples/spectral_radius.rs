//! Estimates spectral radii of sparse matrices and checks the estimates
//! against a dense eigen-decomposition.
//!
//! The interesting case is one nonzero per row: such a matrix is a weighted
//! functional graph whose dominant eigenvalues form equimodular root
//! families, so plain power iteration never settles. The windowed estimator
//! resolves them by fitting the minimal linear recurrence of the iterates.

use fdgnn::spectral::{dense_spectral_radius, spectral_radius};
use fdgnn::SparseRowMatrix;

fn main() -> fdgnn::Result<()> {
    // A 5-cycle with weights whose product is 0.9^5: every eigenvalue is a
    // 5th root of 0.9^5, so the radius is exactly 0.9.
    let n = 5;
    let weights = [0.5, 1.3, 0.7, 1.1, 0.9f64.powi(5) / (0.5 * 1.3 * 0.7 * 1.1)];
    let rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![((i + 1) % n, weights[i])]).collect();
    let cycle = SparseRowMatrix::from_rows(n, n, 1, &rows)?;
    let est = spectral_radius(&cycle, 1e-10, 10_000)?;
    println!("weighted 5-cycle: estimate {est:.12} (exact 0.9)");

    // Random sparse matrices at several densities, checked against the
    // dense oracle.
    for &(n, c) in &[(40usize, 1usize), (60, 2), (80, 4), (100, 8)] {
        let m = fdgnn::synth::random_sparse_matrix(n, c, 1.0, 7 + n as u64)?;
        let est = spectral_radius(&m, 1e-10, 10_000)?;
        let exact = dense_spectral_radius(&m.to_dense());
        println!(
            "random {n}x{n}, {c} nonzeros/row: estimate {est:.12}, dense {exact:.12}, \
             rel err {:.2e}",
            (est - exact).abs() / exact.max(1e-300)
        );
    }
    Ok(())
}
