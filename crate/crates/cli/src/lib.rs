//! `qbayes` command-line driver: dataset generation, QMAP training,
//! prediction, QPDE prediction and experiment sweeps.

pub mod angle;
pub mod record;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qbayes::config::{Method, RunConfig, SweepKind};
use qbayes::data::{apply_rescale, generate, read_csv, write_csv, Dataset};
use qbayes::encoding::LabeledSample;
use qbayes::inference::{amplitude_table, label_distribution_for_state};
use qbayes::training::experiment::{
    accuracy, initial_params, prepare_splits, qmap_predict_all, qpde_predict_all, run_experiment_sweep,
};
use qbayes::training::{qmap_train, Prediction, SamplingDistribution};
use qbayes::Encoded;

use crate::angle::{parse_angle, parse_angle_list};
use crate::record::{Metrics, ModelFile, PointRecord, ResultRecord, WavefunctionDump, SCHEMA_VERSION};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qbayes::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_degenerate() => EXIT_DEGENERATE,
            CliError::Core(e) if e.is_data() => EXIT_DATA,
            CliError::Core(qbayes::Error::InvalidArgument(_) | qbayes::Error::InvalidParameter(_)) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io { .. } | CliError::Json(_) => EXIT_FAILURE,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

#[derive(Debug, Parser)]
#[command(name = "qbayes", version, about = "Quantum Bayesian classifier experiments")]
pub struct Cli {
    /// JSON run configuration; command-line flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for data generation, initialization, SPSA and QPDE sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shots per swap test; 0 uses exact overlaps.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Maximum worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Qmap,
    Qpde,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Depth,
    Samples,
    Interval,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistributionArg {
    Uniform,
    Gaussian,
    Laplacian,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded train and test CSV files.
    Generate {
        /// Training samples per class.
        #[arg(long)]
        n_train: Option<usize>,
        /// Test samples per class.
        #[arg(long)]
        n_test: Option<usize>,
    },
    /// Train the ansatz by SPSA ascent on the posterior measure.
    Train {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        iterations: Option<usize>,
        /// Rotation layers per branch.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        eta_decay: Option<f64>,
        /// Number of parallel ansatz branches.
        #[arg(long)]
        hidden: Option<usize>,
        /// Min-max rescale features onto [0, 2pi) using the training split.
        #[arg(long)]
        rescale: bool,
    },
    /// Classify test points with a trained model.
    Predict {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        /// Point to classify, e.g. `4.272566,5.08938`; repeatable. Replaces the test CSV.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Include the amplitude table of each measured state.
        #[arg(long)]
        dump_wavefunction: bool,
    },
    /// Predict by posterior-weighted sampling of ansatz angles.
    Qpde {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        /// Sampling box width, e.g. `0.2pi`.
        #[arg(long, value_parser = parse_angle)]
        interval: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum)]
        distribution: Option<DistributionArg>,
        /// Keep every weighted term in the record.
        #[arg(long)]
        record_terms: bool,
        #[arg(long)]
        rescale: bool,
    },
    /// Repeat train/test over a grid of one setting and write a long-format CSV.
    Sweep {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Comma-separated grid values; angles accept `0.2pi` literals.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
}

/// Loads the configuration file (if any) and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.set_all_seeds(seed);
    }
    if let Some(shots) = cli.shots {
        cfg.set_shots(shots);
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(out) = &cli.out {
        cfg.paths.out_dir = out.clone();
    }
    match &cli.command {
        Command::Generate { n_train, n_test } => {
            set(&mut cfg.generator.n_train_per_class, *n_train);
            set(&mut cfg.generator.n_test_per_class, *n_test);
        }
        Command::Train { train, model, iterations, depth, eta, eta_decay, hidden, rescale } => {
            set_path(&mut cfg.paths.train_csv, train);
            set_path(&mut cfg.paths.model, model);
            set(&mut cfg.spsa.iterations, *iterations);
            set(&mut cfg.ansatz.layers, *depth);
            set(&mut cfg.spsa.eta, *eta);
            set(&mut cfg.spsa.eta_decay, *eta_decay);
            set(&mut cfg.ansatz.n_hidden, *hidden);
            cfg.rescale |= rescale;
        }
        Command::Predict { model, test, points, dump_wavefunction } => {
            set_path(&mut cfg.paths.model, model);
            set_path(&mut cfg.paths.test_csv, test);
            if !points.is_empty() {
                cfg.predict.points = points.iter().map(|p| parse_point(p)).collect::<CliResult<_>>()?;
            }
            cfg.predict.dump_wavefunction |= dump_wavefunction;
        }
        Command::Qpde { train, test, samples, interval, depth, distribution, record_terms, rescale } => {
            set_path(&mut cfg.paths.train_csv, train);
            set_path(&mut cfg.paths.test_csv, test);
            set(&mut cfg.qpde.n_samples, *samples);
            set(&mut cfg.qpde.interval, *interval);
            set(&mut cfg.qpde.depth, *depth);
            if let Some(d) = distribution {
                cfg.qpde.distribution = match d {
                    DistributionArg::Uniform => SamplingDistribution::Uniform,
                    DistributionArg::Gaussian => SamplingDistribution::Gaussian,
                    DistributionArg::Laplacian => SamplingDistribution::Laplacian,
                };
            }
            cfg.qpde.record_terms |= record_terms;
            cfg.rescale |= rescale;
        }
        Command::Sweep { kind, method, grid, repetitions } => {
            if let Some(k) = kind {
                cfg.sweep.kind = match k {
                    KindArg::Depth => SweepKind::Depth,
                    KindArg::Samples => SweepKind::Samples,
                    KindArg::Interval => SweepKind::Interval,
                };
            }
            if let Some(m) = method {
                cfg.sweep.method = match m {
                    MethodArg::Qmap => Method::Qmap,
                    MethodArg::Qpde => Method::Qpde,
                };
            }
            if let Some(g) = grid {
                cfg.sweep.grid = parse_angle_list(g).map_err(CliError::Usage)?;
            }
            set(&mut cfg.sweep.repetitions, *repetitions);
        }
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, value: &Option<PathBuf>) {
    if value.is_some() {
        *slot = value.clone();
    }
}

fn parse_point(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("invalid point {text:?}"))))
        .collect()
}

/// Runs a parsed command line and returns the paths it wrote.
pub fn execute(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let cfg = resolve_config(cli)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Generate { .. } => cmd_generate(&cfg),
        Command::Train { .. } => cmd_train(&cfg),
        Command::Predict { .. } => cmd_predict(&cfg),
        Command::Qpde { .. } => cmd_qpde(&cfg),
        Command::Sweep { .. } => cmd_sweep(&cfg),
    })
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(format!("cannot create {}", dir.display())))
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => ensure_dir(p),
        _ => Ok(()),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(format!("cannot write {}", path.display())))
}

fn write_record(cfg: &RunConfig, command: &str, metrics: Metrics, started: Instant) -> CliResult<PathBuf> {
    let path = cfg.paths.out_dir.join(format!("{command}_result.json"));
    let record = ResultRecord {
        schema_version: SCHEMA_VERSION,
        library_version: qbayes::VERSION.to_string(),
        command: command.to_string(),
        config: cfg.clone(),
        metrics,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&path, &record)?;
    Ok(path)
}

fn load_dataset(path: &Path) -> CliResult<Dataset> {
    Ok(read_csv(path)?)
}

fn point_records(data: &Dataset, predictions: &[Prediction]) -> Vec<PointRecord> {
    data.samples
        .iter()
        .zip(predictions)
        .map(|(s, p)| PointRecord {
            x: s.x.clone(),
            label: s.label,
            predicted: p.label,
            p0: p.p0,
            p1: p.p1,
            terms: p.per_sample_terms.clone(),
        })
        .collect()
}

fn labeled_accuracy(data: &Dataset, predictions: &[Prediction]) -> CliResult<Option<f64>> {
    if data.samples.iter().all(|s| s.label.is_some()) {
        Ok(Some(accuracy(predictions, data)?))
    } else {
        Ok(None)
    }
}

pub fn cmd_generate(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let (train, test) = generate(&cfg.generator)?;
    let (train_path, test_path) = (cfg.paths.train_csv(), cfg.paths.test_csv());
    for (data, path) in [(&train, &train_path), (&test, &test_path)] {
        ensure_parent(path)?;
        write_csv(data, path)?;
        println!("{}", path.display());
    }
    Ok(vec![train_path, test_path])
}

pub fn cmd_train(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let started = Instant::now();
    let raw = load_dataset(&cfg.paths.train_csv())?;
    let (train, _) = prepare_splits(cfg, raw.clone(), raw)?;
    let data = Encoded::new(&cfg.feature_map, &train.samples)?;
    let model = qmap_train(&data, &initial_params(cfg)?, &cfg.spsa, cfg.overlap_form)?;
    let train_acc = accuracy(&qmap_predict_all(&model, &train)?, &train)?;
    log::info!("training accuracy {train_acc:.4}");

    let model_path = cfg.paths.model();
    write_json(&model_path, &ModelFile::from_model(&model, train.rescale.clone(), cfg))?;
    let metrics = Metrics {
        train_accuracy: Some(train_acc),
        evaluations: Some(model.evaluations),
        trace: Some(model.trace.clone()),
        files: vec![model_path.display().to_string()],
        ..Default::default()
    };
    let record = write_record(cfg, "train", metrics, started)?;
    println!("{}", model_path.display());
    println!("{}", record.display());
    Ok(vec![model_path, record])
}

pub fn cmd_predict(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let started = Instant::now();
    let model_path = cfg.paths.model();
    if !model_path.exists() {
        return Err(CliError::Usage(format!(
            "model file {} not found; run `qbayes train` first",
            model_path.display()
        )));
    }
    let text = fs::read_to_string(&model_path).map_err(io_err(format!("cannot read {}", model_path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Core(qbayes::Error::Data(format!("invalid model file: {e}"))))?;
    let model = file.to_model()?;

    let raw = if cfg.predict.points.is_empty() {
        load_dataset(&cfg.paths.test_csv())?
    } else {
        Dataset::new(cfg.predict.points.iter().map(|x| LabeledSample::unlabeled(x.clone())).collect())?
    };
    let test = if file.rescale.is_identity() { raw } else { apply_rescale(&raw, &file.rescale)? };
    let predictions = qmap_predict_all(&model, &test)?;

    let wavefunctions = if cfg.predict.dump_wavefunction {
        let w = qbayes::ansatz::build_weight_state(&model.params)?;
        let dumps = test
            .samples
            .iter()
            .map(|s| {
                let d = label_distribution_for_state(&model.spec, &s.x, &w)?;
                Ok(WavefunctionDump { x: s.x.clone(), norm: d.state.norm(), amplitudes: amplitude_table(&d.state) })
            })
            .collect::<qbayes::Result<Vec<_>>>()?;
        Some(dumps)
    } else {
        None
    };
    let metrics = Metrics {
        accuracy: labeled_accuracy(&test, &predictions)?,
        predictions: Some(point_records(&test, &predictions)),
        wavefunctions,
        ..Default::default()
    };
    if let Some(a) = metrics.accuracy {
        println!("accuracy {a:.4}");
    }
    let record = write_record(cfg, "predict", metrics, started)?;
    println!("{}", record.display());
    Ok(vec![record])
}

pub fn cmd_qpde(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let started = Instant::now();
    let train = load_dataset(&cfg.paths.train_csv())?;
    let test = load_dataset(&cfg.paths.test_csv())?;
    let (train, test) = prepare_splits(cfg, train, test)?;
    let predictions = qpde_predict_all(cfg, &train, &test)?;
    let metrics = Metrics {
        accuracy: labeled_accuracy(&test, &predictions)?,
        predictions: Some(point_records(&test, &predictions)),
        ..Default::default()
    };
    if let Some(a) = metrics.accuracy {
        println!("accuracy {a:.4}");
    }
    let record = write_record(cfg, "qpde", metrics, started)?;
    println!("{}", record.display());
    Ok(vec![record])
}

pub fn cmd_sweep(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let started = Instant::now();
    ensure_dir(&cfg.paths.out_dir)?;
    let csv_path = cfg.paths.out_dir.join("sweep.csv");
    let file = File::create(&csv_path).map_err(io_err(format!("cannot write {}", csv_path.display())))?;
    let mut writer =
        csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| qbayes::Error::Io(std::io::Error::other(e));
    writer.write_record(["sweep_var", "repetition", "accuracy"]).map_err(csv_err)?;
    writer.flush().map_err(qbayes::Error::Io)?;

    let s = &cfg.sweep;
    let table = run_experiment_sweep(s.kind, s.method, &s.grid, s.repetitions, cfg, |rows| {
        for r in rows {
            writer
                .write_record([
                    qbayes::data::format_sig12(r.sweep_var),
                    r.repetition.to_string(),
                    qbayes::data::format_sig12(r.accuracy),
                ])
                .map_err(csv_err)?;
        }
        writer.flush()?;
        Ok(())
    })?;
    drop(writer);
    for summary in &table.summaries {
        println!("{} mean {:.4} std {:.4}", summary.sweep_var, summary.mean, summary.std);
    }
    let metrics =
        Metrics { sweep: Some(table.summaries), files: vec![csv_path.display().to_string()], ..Default::default() };
    let record = write_record(cfg, "sweep", metrics, started)?;
    println!("{}", csv_path.display());
    println!("{}", record.display());
    Ok(vec![csv_path, record])
}

/// Logging to stderr, level from `QBAYES_LOG` (default `warn`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("QBAYES_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Strips `wall_clock_seconds` from a result document, for comparisons.
pub fn without_wall_clock(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines().filter(|l| !l.trim_start().starts_with("\"wall_clock_seconds\"")) {
        out.push_str(line);
        out.push('\n');
    }
    out
}
