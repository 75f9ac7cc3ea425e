//! Command-line front end: benchmark, train, predict, and inspect.
//!
//! Exit codes: 0 success, 2 configuration problems, 3 dataset problems,
//! 4 model-file problems, 1 anything else.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::info;
use serde::Deserialize;

use fdgnn::error::Error;
use fdgnn::{
    degree_stats, load_model, nested_cv, parse_tudataset, save_model, train_model, Dataset,
    ModelConfig, SearchSpace, TrainedModel,
};

#[derive(Parser)]
#[command(
    name = "fdgnn",
    version,
    about = "Graph classification with untrained recurrent layers and a closed-form readout"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the nested cross-validation benchmark on a dataset.
    Benchmark {
        /// Dataset name (directory under the data root).
        #[arg(long)]
        dataset: String,
        /// Directory holding dataset directories.
        #[arg(long, default_value = "data")]
        data_root: PathBuf,
        /// TOML configuration file (see README for the format).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Configurations sampled per outer fold (overrides the file).
        #[arg(long)]
        configs: Option<usize>,
        /// Weight initializations per configuration (overrides the file).
        #[arg(long)]
        guesses: Option<usize>,
        /// Outer and inner fold count.
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report.csv and report.txt (summary always prints).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one model on a whole dataset and save it.
    Train {
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "data")]
        data_root: PathBuf,
        /// TOML configuration file with a [model] table.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Base seed (overrides the file).
        #[arg(long)]
        seed: Option<u64>,
        /// Output model path (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict classes for every graph of a dataset with a saved model.
    Predict {
        /// Saved model (JSON).
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "data")]
        data_root: PathBuf,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print facts about a dataset or a saved model.
    Inspect {
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, default_value = "data")]
        data_root: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

/// Optional TOML configuration file: a [search] table for `benchmark`, a
/// [model] table for `train`. Omitted fields take defaults.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    search: Option<SearchSpace>,
    model: Option<ModelConfig>,
}

/// Error wrapper carrying the process exit code.
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    /// Default mapping from library errors to exit codes.
    fn general(e: Error) -> Self {
        let code = match &e {
            Error::InvalidConfig(_) => 2,
            Error::MissingFile(_) | Error::MalformedDataset(_) | Error::Stratification { .. } => 3,
            Error::ModelVersion { .. } | Error::ModelCorrupt(_) => 4,
            _ => 1,
        };
        Self::new(code, e.to_string())
    }

    /// Mapping for the model-loading phase, where even I/O problems are
    /// model-file problems.
    fn model(e: Error) -> Self {
        match e {
            Error::Io(e) => Self::new(4, format!("model file: {e}")),
            other => Self::general(other),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::general(e)
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp_millis()
        .init();
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match run(cli.command) {
        Ok(()) => {}
        Err(e) => {
            log::error!("{}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Benchmark { dataset, data_root, config, configs, guesses, folds, seed, out } => {
            benchmark(&dataset, &data_root, config.as_deref(), configs, guesses, folds, seed, out)
        }
        Command::Train { dataset, data_root, config, seed, out } => {
            train(&dataset, &data_root, config.as_deref(), seed, &out)
        }
        Command::Predict { model, dataset, data_root, out } => {
            predict(&model, &dataset, &data_root, out.as_deref())
        }
        Command::Inspect { dataset, data_root, model } => {
            inspect(dataset.as_deref(), &data_root, model.as_deref())
        }
    }
}

fn read_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::new(2, format!("config file {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::new(2, format!("config file {}: {e}", p.display())))
        }
    }
}

fn load_dataset(data_root: &Path, name: &str) -> Result<Dataset, CliError> {
    let t0 = Instant::now();
    let dataset = parse_tudataset(data_root, name).map_err(CliError::general)?;
    info!(
        "dataset {}: {} graphs, {} classes, label dim {}, checksum sha256:{} ({:.2}s)",
        dataset.name(),
        dataset.len(),
        dataset.num_classes(),
        dataset.label_dim(),
        dataset.checksum(),
        t0.elapsed().as_secs_f64()
    );
    Ok(dataset)
}

#[allow(clippy::too_many_arguments)]
fn benchmark(
    dataset_name: &str,
    data_root: &Path,
    config: Option<&Path>,
    configs: Option<usize>,
    guesses: Option<usize>,
    folds: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = read_file_config(config)?;
    let mut space = file.search.unwrap_or_else(|| SearchSpace::default_for(dataset_name));
    if let Some(c) = configs {
        space.num_configs = c;
    }
    if let Some(g) = guesses {
        space.guesses = g;
    }
    space.validate().map_err(|e| CliError::new(2, e.to_string()))?;
    let seed = seed.unwrap_or(42);
    info!("benchmark config: folds={folds} seed={seed} space={space:?}");

    let dataset = load_dataset(data_root, dataset_name)?;
    let t0 = Instant::now();
    let report = nested_cv(&dataset, &space, folds, folds, seed)?;
    info!("cross-validation finished in {:.2}s", t0.elapsed().as_secs_f64());

    print!("{}", report.to_text());
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::new(1, format!("output dir {}: {e}", dir.display())))?;
        let csv_path = dir.join("report.csv");
        let txt_path = dir.join("report.txt");
        std::fs::write(&csv_path, report.to_csv()).map_err(|e| CliError::new(1, e.to_string()))?;
        std::fs::write(&txt_path, report.to_text()).map_err(|e| CliError::new(1, e.to_string()))?;
        info!("wrote {} and {}", csv_path.display(), txt_path.display());
    }
    Ok(())
}

fn train(
    dataset_name: &str,
    data_root: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    let file = read_file_config(config)?;
    let mut cfg = file.model.unwrap_or_default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| CliError::new(2, e.to_string()))?;
    info!("train config: {cfg:?}");

    let dataset = load_dataset(data_root, dataset_name)?;
    let t0 = Instant::now();
    let model = train_model(&dataset, &cfg)?;
    info!("trained in {:.2}s", t0.elapsed().as_secs_f64());

    let t1 = Instant::now();
    let mut hits = 0usize;
    for (graph, &target) in dataset.graphs().iter().zip(dataset.targets()) {
        if model.predict(graph).map_err(CliError::general)? == target {
            hits += 1;
        }
    }
    info!(
        "training accuracy {:.4} ({:.2}s)",
        hits as f64 / dataset.len() as f64,
        t1.elapsed().as_secs_f64()
    );

    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::new(1, format!("output dir {}: {e}", parent.display())))?;
    }
    save_model(&model, out).map_err(CliError::general)?;
    info!("saved model to {}", out.display());
    println!("trained {dataset_name}: accuracy {:.4}", hits as f64 / dataset.len() as f64);
    Ok(())
}

fn predict(
    model_path: &Path,
    dataset_name: &str,
    data_root: &Path,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let model = load_model(model_path).map_err(CliError::model)?;
    let dataset = load_dataset(data_root, dataset_name)?;
    let expected_dim = model.stack()[0].input_size();
    if expected_dim != dataset.label_dim() {
        return Err(CliError::new(
            2,
            format!(
                "model expects vertex labels of dimension {expected_dim}, dataset {} has {}",
                dataset.name(),
                dataset.label_dim()
            ),
        ));
    }

    let t0 = Instant::now();
    let mut lines = String::from("graph,predicted_class\n");
    let mut hits = 0usize;
    for (i, graph) in dataset.graphs().iter().enumerate() {
        let class = model.predict(graph).map_err(CliError::general)?;
        if class == dataset.targets()[i] {
            hits += 1;
        }
        lines.push_str(&format!("{i},{class}\n"));
    }
    info!(
        "predicted {} graphs in {:.2}s (accuracy against stored labels: {:.4})",
        dataset.len(),
        t0.elapsed().as_secs_f64(),
        hits as f64 / dataset.len() as f64
    );
    match out {
        Some(path) => {
            std::fs::write(path, lines).map_err(|e| CliError::new(1, e.to_string()))?;
            info!("wrote {}", path.display());
        }
        None => print!("{lines}"),
    }
    Ok(())
}

fn inspect(
    dataset_name: Option<&str>,
    data_root: &Path,
    model_path: Option<&Path>,
) -> Result<(), CliError> {
    match (dataset_name, model_path) {
        (Some(name), None) => {
            let dataset = load_dataset(data_root, name)?;
            let (avg_max, global_max) = degree_stats(&dataset);
            let vertices: usize = dataset.graphs().iter().map(|g| g.num_vertices()).sum();
            let edges: usize = dataset.graphs().iter().map(|g| g.num_edges()).sum();
            let mut class_counts = vec![0usize; dataset.num_classes()];
            for &t in dataset.targets() {
                class_counts[t] += 1;
            }
            println!("dataset: {}", dataset.name());
            println!("graphs: {}", dataset.len());
            println!("classes: {}", dataset.num_classes());
            println!("class balance: {class_counts:?}");
            println!("vertex label dim: {}", dataset.label_dim());
            println!("total vertices: {vertices}");
            println!("total edges: {edges}");
            println!("avg max degree: {avg_max}");
            println!("global max degree: {global_max}");
            println!("checksum: sha256:{}", dataset.checksum());
            Ok(())
        }
        (None, Some(path)) => {
            let model = load_model(path).map_err(CliError::model)?;
            print_model(&model);
            Ok(())
        }
        _ => Err(CliError::new(2, "inspect needs exactly one of --dataset or --model")),
    }
}

fn print_model(model: &TrainedModel) {
    println!("format version: {}", fdgnn::model_io::FORMAT_VERSION);
    println!("layers: {}", model.stack().len());
    for (i, layer) in model.stack().iter().enumerate() {
        println!(
            "  layer {i}: hidden {}, input {}, {} nonzeros/row (recurrent)",
            layer.hidden_size(),
            layer.input_size(),
            layer.w_recurrent().nnz_per_row()
        );
    }
    println!("projection: {}x{}", model.w_proj().nrows(), model.w_proj().ncols());
    println!("readout: {}x{}", model.w_out().nrows(), model.w_out().ncols());
    println!("classes: {}", model.num_classes());
    println!(
        "fixed point: epsilon {}, max {} iterations",
        model.embedding_config().epsilon,
        model.embedding_config().max_iterations
    );
}
