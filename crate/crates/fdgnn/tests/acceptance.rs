//! Acceptance gate: one test per release criterion, each printing a
//! `[PASS]`/`[FAIL]` line (visible with `--nocapture`).
//!
//! The two benchmark criteria run reduced-but-honest searches (20 sampled
//! configurations, 5 guesses each, nested 10x10 stratified CV) on the
//! vendored datasets; everything else checks numerical contracts against
//! independent oracles.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fdgnn::embedding::layer_step;
use fdgnn::spectral::{dense_spectral_radius, spectral_radius};
use fdgnn::synth::{
    k_regular_graph, random_graph, random_sparse_matrix, two_class_dataset, with_zero_labels,
};
use fdgnn::{
    augment_bias, check_ges, fit_ridge, iterate_layer, nested_cv, parse_tudataset, train_model,
    CvReport, EmbeddingConfig, Graph, LayerConfig, LayerWeights, ModelConfig, SearchSpace,
};

fn data_root() -> PathBuf {
    match std::env::var_os("FDGNN_DATA_ROOT") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

/// The reduced search profile shared by the benchmark criteria.
fn reduced_space() -> SearchSpace {
    SearchSpace { num_configs: 20, guesses: 5, ..SearchSpace::default() }
}

fn run_benchmark(dataset_name: &str) -> CvReport {
    let dataset = parse_tudataset(&data_root(), dataset_name)
        .unwrap_or_else(|e| panic!("loading {dataset_name}: {e}"));
    nested_cv(&dataset, &reduced_space(), 10, 10, 42)
        .unwrap_or_else(|e| panic!("benchmark on {dataset_name}: {e}"))
}

/// Criterion 1 result, shared with criterion 9's determinism replay.
fn mutag_report() -> &'static CvReport {
    static REPORT: OnceLock<CvReport> = OnceLock::new();
    REPORT.get_or_init(|| run_benchmark("MUTAG"))
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {criterion}: {detail}");
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_1_mutag_accuracy() {
    let report = mutag_report();
    let mean = report.mean_accuracy();
    verdict(
        "criterion 1 (MUTAG reduced benchmark)",
        mean >= 0.80,
        &format!("mean accuracy {mean:.4} (threshold 0.80)"),
    );
}

#[test]
fn criterion_2_ptc_accuracy() {
    let report = run_benchmark("PTC_MR");
    let mean = report.mean_accuracy();
    verdict(
        "criterion 2 (PTC_MR reduced benchmark)",
        mean >= 0.55,
        &format!("mean accuracy {mean:.4} (threshold 0.55)"),
    );
}

/// Draws a connected-enough random graph with unit labels; the seed walk is
/// deterministic.
fn nonempty_random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut s = seed;
    loop {
        let g = random_graph(n, p, s).unwrap();
        if g.max_degree() > 0 {
            return g;
        }
        s += 1000;
    }
}

/// Scales the recurrent part of `layer` so its spectral norm times `k`
/// equals `target`.
fn with_norm_product(layer: &LayerWeights, k: f64, target: f64) -> LayerWeights {
    let norm = layer.w_recurrent().spectral_norm_dense();
    let mut rec = layer.w_recurrent().clone();
    rec.scale(target / (norm * k));
    LayerWeights::new(layer.w_input().clone(), rec).unwrap()
}

#[test]
fn criterion_3_sufficient_condition_implies_stability() {
    let cfg = EmbeddingConfig { epsilon: 1e-9, max_iterations: 200 };
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC3 + i);
        let n = rng.gen_range(6..24);
        let graph = nonempty_random_graph(n, 0.3, 7 * i + 1);
        let k = graph.max_degree() as f64;

        let base = fdgnn::init_layer(&LayerConfig {
            hidden_size: 12,
            input_size: graph.label_dim(),
            connections: rng.gen_range(1..4),
            spectral_radius: 0.5,
            input_scale: 0.4,
            degree: k,
            seed: i,
        })
        .unwrap();
        // The stability probe stops each trajectory once its own step falls
        // below epsilon, which leaves it about eps * q / (1 - q) away from
        // the fixed point at contraction factor q. The pairwise agreement
        // bound of 10 * eps therefore needs q a bit below 0.83; sample up
        // to 0.75 for margin.
        let target = rng.gen_range(0.1..0.75);
        let layer = with_norm_product(&base, k, target);

        // The iteration must forget its start state.
        let stable = check_ges(&layer, &graph, graph.labels(), &cfg, 3).unwrap();
        if !stable {
            verdict(
                "criterion 3 (sufficient stability condition)",
                false,
                &format!("pair {i}: |W|*k = {target:.3} < 1 but starts disagree"),
            );
        }

        // Per-step contraction: the gap between two trajectories shrinks at
        // least by the factor |W| * k at every step.
        let h = 12;
        let mut a = DMatrix::zeros(h, graph.num_vertices());
        let mut b = DMatrix::from_fn(h, graph.num_vertices(), |r, c| {
            ((r * 13 + c * 7 + i as usize) as f64).sin()
        });
        let mut gap = (&a - &b).norm();
        for _ in 0..30 {
            a = layer_step(&layer, graph.labels(), &graph, &a).unwrap();
            b = layer_step(&layer, graph.labels(), &graph, &b).unwrap();
            let next_gap = (&a - &b).norm();
            let excess = next_gap - (target * gap + 1e-12);
            worst_excess = worst_excess.max(excess);
            if excess > 0.0 {
                verdict(
                    "criterion 3 (sufficient stability condition)",
                    false,
                    &format!(
                        "pair {i}: gap {gap:.3e} -> {next_gap:.3e} exceeds factor {target:.3}"
                    ),
                );
            }
            gap = next_gap;
            if gap == 0.0 {
                break;
            }
        }
    }
    verdict(
        "criterion 3 (sufficient stability condition)",
        true,
        &format!("200 pairs stable, worst contraction excess {worst_excess:.2e}"),
    );
}

/// Scales the recurrent part of `layer` so its spectral radius times `k`
/// equals `target`; returns the layer and the dense radius after scaling.
fn with_radius_product(layer: &LayerWeights, k: f64, target: f64) -> (LayerWeights, f64) {
    let rho = dense_spectral_radius(&layer.w_recurrent().to_dense());
    let mut rec = layer.w_recurrent().clone();
    rec.scale(target / (rho * k));
    let scaled = LayerWeights::new(layer.w_input().clone(), rec).unwrap();
    let rho_scaled = dense_spectral_radius(&scaled.w_recurrent().to_dense());
    (scaled, rho_scaled)
}

fn kronecker(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

#[test]
fn criterion_4_supercritical_radius_destabilizes() {
    let h = 8;
    let n = 30;
    let cfg = EmbeddingConfig { epsilon: 1e-6, max_iterations: 500 };
    let mut summary = String::new();
    for &k in &[2usize, 3, 4] {
        let graph = with_zero_labels(&k_regular_graph(n, k).unwrap());
        let adjacency = graph.adjacency_dense();
        for &target in &[1.2, 1.5, 2.0] {
            let mut unstable = 0usize;
            for seed in 0..50u64 {
                let base = fdgnn::init_layer(&LayerConfig {
                    hidden_size: h,
                    input_size: 1,
                    connections: 1,
                    spectral_radius: 0.6,
                    input_scale: 0.3,
                    degree: k as f64,
                    seed: 10_000 * k as u64 + seed,
                })
                .unwrap();
                let (layer, rho_w) = with_radius_product(&base, k as f64, target);

                // Dense oracle on the update operator: the state update is
                // linearized by A (x) W, whose radius is rho(A) * rho(W) =
                // k * rho(W); confirm it exceeds one, and spot-check the
                // identity on the explicitly assembled product matrix.
                let product_radius = k as f64 * rho_w;
                assert!(
                    product_radius > 1.0,
                    "k={k} target={target} seed={seed}: oracle radius {product_radius}"
                );
                if seed < 3 {
                    let kron = dense_spectral_radius(&kronecker(
                        &adjacency,
                        &layer.w_recurrent().to_dense(),
                    ));
                    assert!(
                        (kron - product_radius).abs() <= 1e-8 * product_radius,
                        "Kronecker identity: {kron} vs {product_radius}"
                    );
                    assert!(kron > 1.0);
                }

                let stable = check_ges(&layer, &graph, graph.labels(), &cfg, 2).unwrap();
                if !stable {
                    unstable += 1;
                }
            }
            summary.push_str(&format!("k={k} rho*k={target}: {unstable}/50 unstable; "));
            if unstable < 45 {
                verdict(
                    "criterion 4 (supercritical radius destabilizes)",
                    false,
                    &format!("k={k} rho*k={target}: only {unstable}/50 seeds unstable (< 45)"),
                );
            }
        }
    }
    verdict("criterion 4 (supercritical radius destabilizes)", true, summary.trim_end());
}

#[test]
fn criterion_5_sparse_estimator_matches_dense() {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for i in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC5 + i);
        // One nonzero per row only below dimension 60: beyond that the
        // dominant cycle family can exceed any fixed fitting window.
        let c = rng.gen_range(1..=5usize);
        let n = if c == 1 { rng.gen_range(4..=60) } else { rng.gen_range(4..=100) };
        let c = c.min(n);
        let m = random_sparse_matrix(n, c, 1.0, 31 * i + 5).unwrap();

        let dense = dense_spectral_radius(&m.to_dense());
        let est = spectral_radius(&m, 1e-9, 50_000)
            .unwrap_or_else(|e| panic!("matrix {i} (n={n}, c={c}): {e}"));
        let rel = (est - dense).abs() / dense.max(1e-12);
        worst = worst.max(rel);
        count += 1;
        if rel > 1e-6 {
            verdict(
                "criterion 5 (sparse estimate vs dense oracle)",
                false,
                &format!("matrix {i} (n={n}, c={c}): rel error {rel:.2e}"),
            );
        }
    }
    verdict(
        "criterion 5 (sparse estimate vs dense oracle)",
        true,
        &format!("{count} matrices, worst relative error {worst:.2e}"),
    );
}

/// Conjugate-gradient solve of `(F F^T + lambda I) x = b`, one column at a
/// time — an iterative oracle fully independent of the closed form.
fn cg_solve(lhs: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(b.len());
    let mut r = b.clone();
    let mut d = r.clone();
    let mut rs = r.norm_squared();
    let stop = 1e-13 * b.norm().max(1e-300);
    for _ in 0..2000 {
        let ad = lhs * &d;
        let alpha = rs / d.dot(&ad);
        x += alpha * &d;
        r -= alpha * ad;
        let rs_new = r.norm_squared();
        if rs_new.sqrt() < stop {
            break;
        }
        d = &r * 1.0 + (rs_new / rs) * d;
        rs = rs_new;
    }
    x
}

#[test]
fn criterion_6_ridge_matches_iterative_solver() {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC6 + i);
        let p = rng.gen_range(2..20usize);
        let m = rng.gen_range(p + 1..p + 40);
        let classes = if i % 3 == 0 { 3 } else { 2 };
        let lambda = 10f64.powi(rng.gen_range(-5..3));

        let features = DMatrix::from_fn(p, m, |_, _| rng.gen_range(-1.0..1.0));
        let targets: Vec<usize> = (0..m).map(|j| j % classes).collect();
        let encoded = fdgnn::encode_class_labels(&targets, classes).unwrap();

        let closed = fit_ridge(&features, &encoded, lambda).unwrap();

        let phi = augment_bias(&features);
        let mut lhs = &phi * phi.transpose();
        for d in 0..p + 1 {
            lhs[(d, d)] += lambda;
        }
        let rhs = &phi * encoded.values().transpose();
        let mut iterative = DMatrix::zeros(closed.nrows(), closed.ncols());
        for row in 0..closed.nrows() {
            let col = cg_solve(&lhs, &rhs.column(row).into_owned());
            iterative.row_mut(row).copy_from(&col.transpose());
        }

        let rel = (&closed - &iterative).norm() / closed.norm().max(1e-12);
        worst = worst.max(rel);
        if rel > 1e-6 {
            verdict(
                "criterion 6 (closed form vs iterative ridge)",
                false,
                &format!("system {i} (p={p}, m={m}, lambda={lambda:.0e}): rel {rel:.2e}"),
            );
        }
    }
    verdict(
        "criterion 6 (closed form vs iterative ridge)",
        true,
        &format!("50 systems, worst relative difference {worst:.2e}"),
    );
}

#[test]
fn criterion_7_embedding_scales_linearly() {
    // Both graphs run exactly `max_iterations` fixed-point steps (epsilon is
    // unreachable), so the measured ratio isolates the per-size cost.
    let cfg = EmbeddingConfig { epsilon: 1e-300, max_iterations: 50 };
    let layer = fdgnn::init_layer(&LayerConfig {
        hidden_size: 50,
        input_size: 1,
        connections: 1,
        spectral_radius: 0.9,
        input_scale: 0.5,
        degree: 3.0,
        seed: 77,
    })
    .unwrap();

    let time_graph = |n: usize| {
        let g = k_regular_graph(n, 3).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..5 {
            let t = Instant::now();
            let run = iterate_layer(&layer, g.labels(), &g, &cfg).unwrap();
            assert_eq!(run.iterations, 50);
            best = best.min(t.elapsed().as_secs_f64());
        }
        best
    };

    let small = time_graph(200);
    let large = time_graph(2000);
    let ratio = large / small;
    verdict(
        "criterion 7 (near-linear vertex scaling)",
        ratio <= 14.0,
        &format!("10x vertices cost ratio {ratio:.2} (threshold 14, small {small:.4}s)"),
    );
}

#[test]
fn criterion_8_embeddings_are_permutation_invariant() {
    // A trained model supplies the full pipeline: stack, projection, and
    // readout.
    let dataset = two_class_dataset(10, &[8, 9, 10], 21).unwrap();
    let cfg = ModelConfig {
        num_layers: 2,
        hidden_size: 24,
        projection_dim: 48,
        seed: 5,
        ..ModelConfig::default()
    };
    let model = train_model(&dataset, &cfg).unwrap();

    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC8 + i);
        let n = rng.gen_range(5..20);
        let graph = nonempty_random_graph(n, 0.35, 13 * i + 3);

        // Fisher-Yates permutation from the same deterministic stream.
        let mut perm: Vec<usize> = (0..n).collect();
        for v in (1..n).rev() {
            let j = rng.gen_range(0..=v);
            perm.swap(v, j);
        }
        let shuffled = graph.permuted(&perm).unwrap();

        let fa = model.features(&graph).unwrap();
        let fb = model.features(&shuffled).unwrap();
        let diff = (&fa - &fb).amax();
        worst = worst.max(diff);
        if diff > 1e-12 {
            verdict(
                "criterion 8 (permutation-invariant embeddings)",
                false,
                &format!("pair {i}: feature difference {diff:.2e}"),
            );
        }
        let ca = model.predict(&graph).unwrap();
        let cb = model.predict(&shuffled).unwrap();
        if ca != cb {
            verdict(
                "criterion 8 (permutation-invariant embeddings)",
                false,
                &format!("pair {i}: classes {ca} vs {cb}"),
            );
        }
    }
    verdict(
        "criterion 8 (permutation-invariant embeddings)",
        true,
        &format!("100 pairs, worst feature difference {worst:.2e}"),
    );
}

/// Drops the two wall-clock columns from each CSV row.
fn strip_timing(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplitn(3, ',').nth(2).unwrap_or(l).to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_9_benchmark_is_deterministic() {
    let first = mutag_report().to_csv();
    let second = run_benchmark("MUTAG").to_csv();
    let same = strip_timing(&first) == strip_timing(&second);
    verdict(
        "criterion 9 (byte-identical reruns)",
        same,
        &format!(
            "two full MUTAG runs, CSV identical outside timing columns: {same} ({} bytes compared)",
            strip_timing(&first).len()
        ),
    );
}

/// Full-size search on MUTAG (100 configurations, 20 guesses): slow, so
/// ignored by default. Run with `cargo test --test acceptance -- --ignored`.
#[test]
#[ignore = "full-size search; roughly half an hour of CPU"]
fn full_mutag_search_lands_in_expected_band() {
    let dataset = parse_tudataset(&data_root(), "MUTAG").unwrap();
    let report = nested_cv(&dataset, &SearchSpace::default(), 10, 10, 42).unwrap();
    let mean = report.mean_accuracy();
    verdict(
        "full MUTAG search",
        (0.82..=0.93).contains(&mean),
        &format!("mean accuracy {mean:.4} (expected band 0.82..0.93)"),
    );
}
