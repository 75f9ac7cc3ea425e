//! Parser for the plain-text benchmark dataset layout.
//!
//! A dataset `NAME` lives in `root/NAME/` as line-oriented text files with a
//! shared `NAME_` prefix:
//!
//! * `NAME_A.txt` - one edge per line as `i, j` with 1-based global vertex
//!   ids (undirected edges usually appear in both orientations; duplicates
//!   collapse),
//! * `NAME_graph_indicator.txt` - line `v` holds the 1-based graph id of
//!   global vertex `v`,
//! * `NAME_graph_labels.txt` - line `g` holds the class label of graph `g`
//!   (arbitrary integers, remapped to `0..Y-1` by ascending value),
//! * `NAME_node_labels.txt` - optional; line `v` holds the categorical
//!   label of vertex `v`, one-hot encoded over the sorted distinct values.
//!   When absent every vertex gets the constant label `[1]`.
//!
//! Any other `NAME_*` files (edge labels, attributes) are ignored.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};

/// Loads dataset `name` from `root/name/`.
pub fn parse_tudataset(root: &Path, name: &str) -> Result<Dataset> {
    let dir = root.join(name);
    let path = |suffix: &str| dir.join(format!("{name}_{suffix}"));

    let indicator = read_int_lines(&path("graph_indicator.txt"))?;
    let graph_labels_raw = read_int_lines(&path("graph_labels.txt"))?;
    let edges_raw = read_edge_lines(&path("A.txt"))?;
    let node_labels_raw = {
        let p = path("node_labels.txt");
        if p.is_file() {
            Some(read_int_lines(&p)?)
        } else {
            None
        }
    };

    let num_vertices = indicator.len();
    if num_vertices == 0 {
        return Err(Error::MalformedDataset("graph indicator file is empty".into()));
    }
    let num_graphs = graph_labels_raw.len();
    if num_graphs == 0 {
        return Err(Error::MalformedDataset("graph labels file is empty".into()));
    }

    // Map each global vertex to (graph index, local index); graph ids must
    // cover 1..=num_graphs exactly.
    let mut local_of: Vec<(usize, usize)> = Vec::with_capacity(num_vertices);
    let mut sizes = vec![0usize; num_graphs];
    for (line, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid > num_graphs as i64 {
            return Err(Error::MalformedDataset(format!(
                "graph indicator line {}: graph id {gid} outside 1..={num_graphs}",
                line + 1
            )));
        }
        let g = (gid - 1) as usize;
        local_of.push((g, sizes[g]));
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::MalformedDataset(format!("graph {} has no vertices", g + 1)));
    }

    // Distribute edges to graphs, converting to local vertex indices.
    let mut edge_lists: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    for (line, &(i, j)) in edges_raw.iter().enumerate() {
        let check = |id: i64| -> Result<usize> {
            if id < 1 || id > num_vertices as i64 {
                Err(Error::MalformedDataset(format!(
                    "edge file line {}: vertex id {id} outside 1..={num_vertices}",
                    line + 1
                )))
            } else {
                Ok((id - 1) as usize)
            }
        };
        let (gu, lu) = local_of[check(i)?];
        let (gv, lv) = local_of[check(j)?];
        if gu != gv {
            return Err(Error::MalformedDataset(format!(
                "edge file line {}: edge ({i}, {j}) connects graph {} to graph {}",
                line + 1,
                gu + 1,
                gv + 1
            )));
        }
        edge_lists[gu].push((lu, lv));
    }

    // One-hot vocabulary over observed vertex labels (dataset-wide).
    let vocab: Option<Vec<i64>> = node_labels_raw.as_ref().map(|raw| {
        let mut v = raw.clone();
        v.sort_unstable();
        v.dedup();
        v
    });
    if let Some(raw) = &node_labels_raw {
        if raw.len() != num_vertices {
            return Err(Error::MalformedDataset(format!(
                "node labels file has {} lines for {num_vertices} vertices",
                raw.len()
            )));
        }
    }

    let mut graphs = Vec::with_capacity(num_graphs);
    for g in 0..num_graphs {
        let n = sizes[g];
        let labels = match (&vocab, &node_labels_raw) {
            (Some(vocab), Some(raw)) => {
                let mut m = DMatrix::zeros(vocab.len(), n);
                for (vertex, &(gg, local)) in local_of.iter().enumerate() {
                    if gg == g {
                        let row = vocab.binary_search(&raw[vertex]).expect("label in vocab");
                        m[(row, local)] = 1.0;
                    }
                }
                m
            }
            _ => DMatrix::from_element(1, n, 1.0),
        };
        graphs.push(Graph::new(n, &edge_lists[g], labels)?);
    }

    // Remap class labels by ascending raw value.
    let mut class_vocab = graph_labels_raw.clone();
    class_vocab.sort_unstable();
    class_vocab.dedup();
    let targets: Vec<usize> = graph_labels_raw
        .iter()
        .map(|l| class_vocab.binary_search(l).expect("label in vocab"))
        .collect();

    Dataset::new(name, graphs, targets, class_vocab.len())
}

/// Reads a file that must exist, mapping absence to a dedicated error.
fn read_existing(path: &PathBuf) -> Result<String> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.clone()));
    }
    Ok(std::fs::read_to_string(path)?)
}

/// Parses one integer per line, skipping blank lines.
fn read_int_lines(path: &PathBuf) -> Result<Vec<i64>> {
    let text = read_existing(path)?;
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(t.parse::<i64>().map_err(|_| {
            Error::MalformedDataset(format!(
                "{}: line {}: expected an integer, got {t:?}",
                path.display(),
                line_no + 1
            ))
        })?);
    }
    Ok(out)
}

/// Parses `i, j` pairs (comma-separated, whitespace tolerated), skipping
/// blank lines.
fn read_edge_lines(path: &PathBuf) -> Result<Vec<(i64, i64)>> {
    let text = read_existing(path)?;
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let bad = || {
            Error::MalformedDataset(format!(
                "{}: line {}: expected \"i, j\", got {t:?}",
                path.display(),
                line_no + 1
            ))
        };
        let mut fields = t.split(',');
        let (a, b) = (fields.next().ok_or_else(bad)?, fields.next().ok_or_else(bad)?);
        if fields.next().is_some() {
            return Err(bad());
        }
        let i = a.trim().parse::<i64>().map_err(|_| bad())?;
        let j = b.trim().parse::<i64>().map_err(|_| bad())?;
        out.push((i, j));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_dataset(dir: &Path, name: &str, files: &[(&str, &str)]) {
        let d = dir.join(name);
        std::fs::create_dir_all(&d).unwrap();
        for (suffix, content) in files {
            std::fs::write(d.join(format!("{name}_{suffix}")), content).unwrap();
        }
    }

    #[test]
    fn parses_a_triangle() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(
            tmp.path(),
            "tri",
            &[
                ("A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n"),
                ("graph_indicator.txt", "1\n1\n1\n"),
                ("graph_labels.txt", "1\n"),
            ],
        );
        let ds = parse_tudataset(tmp.path(), "tri").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.num_classes(), 1);
        assert_eq!(ds.label_dim(), 1);
        let g = &ds.graphs()[0];
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert!(g.labels().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn one_hot_node_labels_over_sorted_vocabulary() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(
            tmp.path(),
            "two",
            &[
                ("A.txt", "1, 2\n2, 1\n3, 4\n4, 3\n"),
                ("graph_indicator.txt", "1\n1\n2\n2\n"),
                ("graph_labels.txt", "-1\n1\n"),
                ("node_labels.txt", "3\n-1\n3\n7\n"),
            ],
        );
        let ds = parse_tudataset(tmp.path(), "two").unwrap();
        assert_eq!(ds.label_dim(), 3); // vocabulary {-1, 3, 7}
        assert_eq!(ds.targets(), &[0, 1]); // classes remapped ascending
        let g0 = &ds.graphs()[0];
        assert_eq!(g0.labels().column(0).as_slice(), &[0.0, 1.0, 0.0]); // 3
        assert_eq!(g0.labels().column(1).as_slice(), &[1.0, 0.0, 0.0]); // -1
        let g1 = &ds.graphs()[1];
        assert_eq!(g1.labels().column(1).as_slice(), &[0.0, 0.0, 1.0]); // 7
    }

    #[test]
    fn missing_file_is_named() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(tmp.path(), "gone", &[("A.txt", ""), ("graph_indicator.txt", "1\n")]);
        match parse_tudataset(tmp.path(), "gone") {
            Err(Error::MissingFile(p)) => {
                assert!(p.to_string_lossy().ends_with("gone_graph_labels.txt"))
            }
            other => panic!("expected MissingFile, got {other:?}"),
        }
    }

    #[test]
    fn cross_graph_edge_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(
            tmp.path(),
            "bad",
            &[
                ("A.txt", "1, 3\n"),
                ("graph_indicator.txt", "1\n1\n2\n"),
                ("graph_labels.txt", "0\n1\n"),
            ],
        );
        let err = parse_tudataset(tmp.path(), "bad").unwrap_err();
        assert!(matches!(err, Error::MalformedDataset(_)));
        assert!(err.to_string().contains("connects graph 1 to graph 2"));
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(
            tmp.path(),
            "oor",
            &[("A.txt", "1, 9\n"), ("graph_indicator.txt", "1\n1\n"), ("graph_labels.txt", "0\n")],
        );
        let err = parse_tudataset(tmp.path(), "oor").unwrap_err();
        assert!(err.to_string().contains("vertex id 9"));
    }

    #[test]
    fn gap_in_graph_ids_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(
            tmp.path(),
            "gap",
            &[("A.txt", ""), ("graph_indicator.txt", "1\n3\n"), ("graph_labels.txt", "0\n1\n2\n")],
        );
        assert!(parse_tudataset(tmp.path(), "gap").is_err());
    }

    #[test]
    fn tolerates_whitespace_and_crlf() {
        let tmp = tempfile::tempdir().unwrap();
        write_dataset(
            tmp.path(),
            "ws",
            &[
                ("A.txt", " 1 ,2\r\n2,  1\r\n\r\n"),
                ("graph_indicator.txt", "1\r\n1\r\n"),
                ("graph_labels.txt", " 4 \r\n"),
            ],
        );
        let ds = parse_tudataset(tmp.path(), "ws").unwrap();
        assert_eq!(ds.graphs()[0].num_edges(), 1);
    }
}
