//! Golden checks for the vendored benchmark datasets: shapes, degree
//! statistics, class balances, and content checksums pinned to the exact
//! values of the committed files.

use std::path::PathBuf;

use fdgnn::{degree_stats, parse_tudataset, Dataset};

fn data_root() -> PathBuf {
    match std::env::var_os("FDGNN_DATA_ROOT") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

struct Golden {
    name: &'static str,
    graphs: usize,
    classes: usize,
    label_dim: usize,
    vertices: usize,
    edges: usize,
    degree_sum: usize,
    global_max_degree: usize,
    class_counts: &'static [usize],
    checksum: &'static str,
}

const GOLDEN: &[Golden] = &[
    Golden {
        name: "MUTAG",
        graphs: 188,
        classes: 2,
        label_dim: 7,
        vertices: 3371,
        edges: 3721,
        degree_sum: 565,
        global_max_degree: 4,
        class_counts: &[63, 125],
        checksum: "9c7a617f75d9cde19a3120ff3179be61f87506785572393113d75b21a590bb2e",
    },
    Golden {
        name: "PTC_MR",
        graphs: 344,
        classes: 2,
        label_dim: 18,
        vertices: 4915,
        edges: 5054,
        degree_sum: 1093,
        global_max_degree: 4,
        class_counts: &[192, 152],
        checksum: "791c512e89c84bcf28bad2254a755ac02430137ca659ef0a0df5ff7a3d9070d0",
    },
    Golden {
        name: "PROTEINS",
        graphs: 1113,
        classes: 2,
        label_dim: 3,
        vertices: 43471,
        edges: 81044,
        degree_sum: 6449,
        global_max_degree: 25,
        class_counts: &[663, 450],
        checksum: "d1597b94d5401ca5ba3f3e0874f6c90404a867029aea6b63ff9b66ab502be784",
    },
];

fn load(name: &str) -> Dataset {
    parse_tudataset(&data_root(), name)
        .unwrap_or_else(|e| panic!("loading {name} from {:?}: {e}", data_root()))
}

#[test]
fn golden_shapes_and_checksums() {
    for g in GOLDEN {
        let ds = load(g.name);
        assert_eq!(ds.len(), g.graphs, "{}: graph count", g.name);
        assert_eq!(ds.num_classes(), g.classes, "{}: classes", g.name);
        assert_eq!(ds.label_dim(), g.label_dim, "{}: label dim", g.name);

        let vertices: usize = ds.graphs().iter().map(|x| x.num_vertices()).sum();
        let edges: usize = ds.graphs().iter().map(|x| x.num_edges()).sum();
        assert_eq!(vertices, g.vertices, "{}: total vertices", g.name);
        assert_eq!(edges, g.edges, "{}: total edges", g.name);

        let (avg_max, global_max) = degree_stats(&ds);
        assert_eq!(avg_max, g.degree_sum as f64 / g.graphs as f64, "{}: avg max degree", g.name);
        assert_eq!(global_max, g.global_max_degree, "{}: global max degree", g.name);

        let mut counts = vec![0usize; ds.num_classes()];
        for &t in ds.targets() {
            counts[t] += 1;
        }
        assert_eq!(counts, g.class_counts, "{}: class balance", g.name);

        assert_eq!(ds.checksum(), g.checksum, "{}: content checksum", g.name);
    }
}

#[test]
fn vertex_labels_are_one_hot() {
    for g in GOLDEN {
        let ds = load(g.name);
        for graph in ds.graphs() {
            for v in 0..graph.num_vertices() {
                let col = graph.labels().column(v);
                let ones = col.iter().filter(|&&x| x == 1.0).count();
                let zeros = col.iter().filter(|&&x| x == 0.0).count();
                assert_eq!(ones, 1, "{}: column must have exactly one 1", g.name);
                assert_eq!(zeros, graph.label_dim() - 1, "{}: rest must be 0", g.name);
            }
        }
    }
}

#[test]
fn graphs_are_consistent_undirected_structures() {
    for g in GOLDEN {
        let ds = load(g.name);
        for graph in ds.graphs() {
            assert!(graph.num_vertices() > 0, "{}: empty graph", g.name);
            for v in 0..graph.num_vertices() {
                for &u in graph.neighbors(v) {
                    assert_ne!(u, v, "{}: self loop", g.name);
                    assert!(
                        graph.neighbors(u).contains(&v),
                        "{}: missing reverse edge {u}-{v}",
                        g.name
                    );
                }
            }
        }
    }
}

#[test]
fn reload_is_bit_identical() {
    let a = load("MUTAG");
    let b = load("MUTAG");
    assert_eq!(a.checksum(), b.checksum());
    assert_eq!(a.targets(), b.targets());
    for (x, y) in a.graphs().iter().zip(b.graphs()) {
        assert_eq!(x.labels(), y.labels());
    }
}
