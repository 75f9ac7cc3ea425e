//! Loads a graph-classification dataset from a directory of plain text
//! files and prints its shape.
//!
//! Usage: `cargo run --example load_dataset [NAME] [DATA_ROOT]`
//! Defaults to the MUTAG copy vendored under `data/` at the workspace root.

use std::path::PathBuf;

use fdgnn::{degree_stats, parse_tudataset};

fn main() -> fdgnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "MUTAG".to_string());
    let root = args.next().map(PathBuf::from).unwrap_or_else(default_data_root);

    let dataset = parse_tudataset(&root, &name)?;
    let (avg_max_degree, global_max) = degree_stats(&dataset);

    println!("dataset: {}", dataset.name());
    println!("graphs: {}", dataset.len());
    println!("classes: {}", dataset.num_classes());
    println!("vertex label dimension: {}", dataset.label_dim());
    println!("average max degree: {avg_max_degree:.3}");
    println!("global max degree: {global_max}");
    println!("content checksum: sha256:{}", dataset.checksum());

    // Class balance and a few per-graph shapes.
    let mut counts = vec![0usize; dataset.num_classes()];
    for &t in dataset.targets() {
        counts[t] += 1;
    }
    for (class, count) in counts.iter().enumerate() {
        println!("class {class}: {count} graphs");
    }
    for (i, g) in dataset.graphs().iter().take(3).enumerate() {
        println!(
            "graph {i}: {} vertices, {} edges, max degree {}",
            g.num_vertices(),
            g.num_edges(),
            g.max_degree()
        );
    }
    Ok(())
}

fn default_data_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}
