//! End-to-end checks of the command-line interface: the benchmark, train,
//! predict, and inspect subcommands, the TOML configuration file, and the
//! exit-code contract (0 ok, 2 bad configuration, 3 bad dataset, 4 bad
//! model file).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fdgnn")
}

/// Writes a tiny two-class dataset (triangles vs 4-cycles) in the plain
/// text exchange format under `root/TINY`.
fn write_tiny_dataset(root: &Path) {
    let dir = root.join("TINY");
    std::fs::create_dir_all(&dir).unwrap();
    let mut edges = String::new();
    let mut indicator = String::new();
    let mut labels = String::new();
    let mut node_labels = String::new();
    let mut next = 1usize; // vertex ids are 1-based
    for g in 0..12 {
        let n = if g % 2 == 0 { 3 } else { 4 };
        for v in 0..n {
            let a = next + v;
            let b = next + (v + 1) % n;
            edges.push_str(&format!("{a}, {b}\n{b}, {a}\n"));
            indicator.push_str(&format!("{}\n", g + 1));
            node_labels.push_str(&format!("{}\n", v % 2));
        }
        labels.push_str(&format!("{}\n", g % 2));
        next += n;
    }
    std::fs::write(dir.join("TINY_A.txt"), edges).unwrap();
    std::fs::write(dir.join("TINY_graph_indicator.txt"), indicator).unwrap();
    std::fs::write(dir.join("TINY_graph_labels.txt"), labels).unwrap();
    std::fs::write(dir.join("TINY_node_labels.txt"), node_labels).unwrap();
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawning the binary")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fdgnn-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn inspect_dataset_prints_shape() {
    let root = tempdir("inspect");
    write_tiny_dataset(&root);
    let out = run(&["inspect", "--dataset", "TINY", "--data-root", root.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("graphs: 12"), "got: {text}");
    assert!(text.contains("classes: 2"), "got: {text}");
    assert!(text.contains("checksum: sha256:"), "got: {text}");
}

#[test]
fn benchmark_writes_deterministic_reports() {
    let root = tempdir("bench");
    write_tiny_dataset(&root);
    let out_a = tempdir("bench-out-a");
    let out_b = tempdir("bench-out-b");
    let base = [
        "benchmark",
        "--dataset",
        "TINY",
        "--data-root",
        root.to_str().unwrap(),
        "--configs",
        "3",
        "--guesses",
        "2",
        "--folds",
        "3",
        "--seed",
        "9",
    ];
    let mut args_a: Vec<&str> = base.to_vec();
    args_a.extend(["--out", out_a.to_str().unwrap()]);
    let mut args_b: Vec<&str> = base.to_vec();
    args_b.extend(["--out", out_b.to_str().unwrap()]);

    let ra = run(&args_a);
    assert!(ra.status.success(), "stderr: {}", String::from_utf8_lossy(&ra.stderr));
    let rb = run(&args_b);
    assert!(rb.status.success());

    let csv_a = std::fs::read_to_string(out_a.join("report.csv")).unwrap();
    let csv_b = std::fs::read_to_string(out_b.join("report.csv")).unwrap();
    assert!(csv_a.starts_with("fold,L,H,C,rho,omega1,omega,lambda,test_accuracy"), "got: {csv_a}");
    // Identical modulo the two wall-clock columns at the end of each row.
    let strip = |s: &str| {
        s.lines()
            .map(|l| l.rsplitn(3, ',').nth(2).unwrap_or(l).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&csv_a), strip(&csv_b));
    // Three data rows plus the header.
    assert_eq!(csv_a.lines().count(), 4);
}

#[test]
fn train_then_predict_round_trips() {
    let root = tempdir("train");
    write_tiny_dataset(&root);
    let model = root.join("model.json");

    // A config file exercising both tables; [model] drives `train`.
    let cfg = root.join("cfg.toml");
    std::fs::write(
        &cfg,
        "[model]\nnum_layers = 2\nhidden_size = 12\nprojection_dim = 24\nseed = 3\n",
    )
    .unwrap();

    let out = run(&[
        "train",
        "--dataset",
        "TINY",
        "--data-root",
        root.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(model.is_file());

    let pred = run(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--dataset",
        "TINY",
        "--data-root",
        root.to_str().unwrap(),
    ]);
    assert!(pred.status.success());
    let text = String::from_utf8(pred.stdout).unwrap();
    assert!(text.starts_with("graph,predicted_class\n"), "got: {text}");
    assert_eq!(text.lines().count(), 13); // header + 12 graphs

    let probe = run(&["inspect", "--model", model.to_str().unwrap()]);
    assert!(probe.status.success());
    let text = String::from_utf8(probe.stdout).unwrap();
    assert!(text.contains("layers: 2"), "got: {text}");
}

#[test]
fn bad_configuration_exits_2() {
    let root = tempdir("badcfg");
    write_tiny_dataset(&root);
    // Zero sampled configurations is rejected by validation.
    let out = run(&[
        "benchmark",
        "--dataset",
        "TINY",
        "--data-root",
        root.to_str().unwrap(),
        "--configs",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown TOML keys are rejected too.
    let cfg = root.join("bad.toml");
    std::fs::write(&cfg, "[model]\nno_such_field = 1\n").unwrap();
    let out = run(&[
        "train",
        "--dataset",
        "TINY",
        "--data-root",
        root.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        root.join("m.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown command-line flags are a usage error (clap's own code 2).
    let out = run(&["benchmark", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_dataset_exits_3() {
    let root = tempdir("badds");
    let out = run(&["inspect", "--dataset", "NOPE", "--data-root", root.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // A present but malformed dataset: an edge pointing outside any graph.
    let dir = root.join("BROKEN");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("BROKEN_A.txt"), "1, 99\n").unwrap();
    std::fs::write(dir.join("BROKEN_graph_indicator.txt"), "1\n1\n").unwrap();
    std::fs::write(dir.join("BROKEN_graph_labels.txt"), "0\n").unwrap();
    let out = run(&["inspect", "--dataset", "BROKEN", "--data-root", root.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_model_file_exits_4() {
    let root = tempdir("badmodel");
    write_tiny_dataset(&root);

    let missing = root.join("missing.json");
    let out = run(&["inspect", "--model", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let garbage = root.join("garbage.json");
    std::fs::write(&garbage, "{\"format_version\": 1, \"truncated").unwrap();
    let out = run(&["inspect", "--model", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let future = root.join("future.json");
    std::fs::write(&future, "{\"format_version\": 999}").unwrap();
    let out = run(&["inspect", "--model", future.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}
