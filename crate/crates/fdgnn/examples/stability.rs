//! Shows the stability conditions that make untrained recurrent layers
//! usable: when the recurrent weights are contractive enough for the graph's
//! degree, the fixed-point iteration forgets its starting state; scale the
//! weights past the critical point and different starting states stop
//! agreeing.
//!
//! Sufficient condition: spectral norm of the recurrent matrix times the
//! graph's max degree below one. Necessary condition: spectral radius times
//! degree below one — between the two the outcome depends on the graph.

use fdgnn::spectral::spectral_radius;
use fdgnn::synth::{k_regular_graph, with_zero_labels};
use fdgnn::{check_ges, init_layer, EmbeddingConfig, LayerConfig, LayerWeights};

fn main() -> fdgnn::Result<()> {
    let k = 3;
    let graph = with_zero_labels(&k_regular_graph(30, k)?);
    let cfg = EmbeddingConfig { epsilon: 1e-6, max_iterations: 500 };

    for &target in &[0.5, 0.9, 1.2, 2.0] {
        // Scale the recurrent matrix so that spectral radius times degree
        // equals `target`.
        let base = init_layer(&LayerConfig {
            hidden_size: 16,
            input_size: 1,
            connections: 1,
            spectral_radius: 0.6,
            input_scale: 0.3,
            degree: k as f64,
            seed: 11,
        })?;
        let mut recurrent = base.w_recurrent().clone();
        recurrent.scale(target / 0.6);
        let layer = LayerWeights::new(base.w_input().clone(), recurrent)?;

        let rho = spectral_radius(layer.w_recurrent(), 1e-10, 10_000)?;
        let norm = layer.w_recurrent().spectral_norm_dense();
        let stable = check_ges(&layer, &graph, graph.labels(), &cfg, 4)?;
        println!(
            "rho*k = {:.3}  |W|*k = {:.3}  starts agree: {stable}",
            rho * k as f64,
            norm * k as f64,
        );
    }
    Ok(())
}
