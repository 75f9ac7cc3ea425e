//! Embeds a graph with a stack of untrained recurrent layers and shows the
//! fixed-point iteration at work: per-layer convergence, pooled features,
//! and invariance of the embedding under vertex relabeling.

use fdgnn::synth::cycle_graph;
use fdgnn::{embed_graph, pool_and_project, random_projection, ModelConfig};

fn main() -> fdgnn::Result<()> {
    let graph = cycle_graph(12)?;

    let cfg = ModelConfig { num_layers: 3, hidden_size: 20, ..ModelConfig::default() };
    let stack = fdgnn::build_stack(&cfg, graph.label_dim(), graph.max_degree() as f64)?;
    let embedding = cfg.embedding();

    let result = embed_graph(&stack, &graph, &embedding)?;
    for i in 0..stack.len() {
        println!(
            "layer {i}: {} iterations, converged: {}",
            result.iterations[i], result.converged[i]
        );
    }
    println!("deepest state norm: {:.4}", result.states.norm());

    // Sum-pool the deepest layer and pass it through a fixed random
    // projection.
    let w_proj = random_projection(8, cfg.hidden_size, 99);
    let features = pool_and_project(&result.states, &w_proj)?;
    println!("projected features: {:?}", features.as_slice());

    // Relabeling the vertices permutes state columns but leaves the pooled
    // feature vector unchanged.
    let perm: Vec<usize> = (0..graph.num_vertices()).map(|v| (v + 5) % 12).collect();
    let shuffled = graph.permuted(&perm)?;
    let result2 = embed_graph(&stack, &shuffled, &embedding)?;
    let features2 = pool_and_project(&result2.states, &w_proj)?;
    let diff = (&features - &features2).norm();
    println!("feature difference after relabeling: {diff:.2e}");
    Ok(())
}
