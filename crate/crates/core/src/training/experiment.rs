//! Seeded train/test repetitions and parameter sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzParams;
use crate::config::{Method, RunConfig, SweepKind};
use crate::data::{apply_rescale, generate, rescale, Dataset};
use crate::encoding::Label;
use crate::error::{Error, Result};
use crate::inference::EncodedDataset;
use crate::training::qmap::{qmap_classify, qmap_train, Prediction, TrainedModel};
use crate::training::qpde::qpde_predict_batch;

/// RNG stream for initial ansatz angles.
pub const INIT_STREAM: u64 = 2;

/// Train and test splits after optional rescaling.
pub fn prepare_data(config: &RunConfig) -> Result<(Dataset, Dataset)> {
    let (train, test) = generate(&config.generator)?;
    prepare_splits(config, train, test)
}

pub fn prepare_splits(config: &RunConfig, train: Dataset, test: Dataset) -> Result<(Dataset, Dataset)> {
    train.check_training()?;
    if config.rescale {
        let train = rescale(&train)?;
        let test = apply_rescale(&test, &train.rescale)?;
        Ok((train, test))
    } else {
        Ok((train, test))
    }
}

/// Initial angles for QMAP training, uniform on `[0, init_range)`.
pub fn initial_params(config: &RunConfig) -> Result<AnsatzParams<f64>> {
    let n = config.feature_map.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(INIT_STREAM);
    AnsatzParams::random(
        n,
        config.ansatz.n_hidden,
        config.ansatz.layers,
        config.ansatz.entangler.edges(n)?,
        config.ansatz.init_range,
        &mut rng,
    )
}

pub fn train_model(config: &RunConfig, train: &Dataset) -> Result<TrainedModel<f64>> {
    let data = EncodedDataset::new(&config.feature_map, &train.samples)?;
    qmap_train(&data, &initial_params(config)?, &config.spsa, config.overlap_form)
}

pub fn qmap_predict_all(model: &TrainedModel<f64>, test: &Dataset) -> Result<Vec<Prediction>> {
    test.samples.par_iter().map(|s| qmap_classify(model, &s.x)).collect()
}

pub fn qpde_predict_all(config: &RunConfig, train: &Dataset, test: &Dataset) -> Result<Vec<Prediction>> {
    let data = EncodedDataset::<f64>::new(&config.feature_map, &train.samples)?;
    let edges = config.ansatz.entangler.edges(config.feature_map.n_qubits())?;
    qpde_predict_batch(&data, &test.points(), &edges, &config.qpde, config.overlap_form)
}

/// Fraction of labeled points whose prediction matches.
pub fn accuracy(predictions: &[Prediction], test: &Dataset) -> Result<f64> {
    let labels: Vec<Label> = test
        .samples
        .iter()
        .map(|s| s.label.ok_or_else(|| Error::Data("accuracy needs labeled test points".into())))
        .collect::<Result<_>>()?;
    if labels.is_empty() || labels.len() != predictions.len() {
        return Err(Error::Data("prediction and label counts differ".into()));
    }
    let hits = predictions.iter().zip(&labels).filter(|(p, l)| p.label == **l).count();
    Ok(hits as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub repetition: usize,
    pub accuracy: f64,
    /// Posterior-measure trace (QMAP only).
    pub trace: Option<Vec<f64>>,
}

/// One seeded repetition: fresh data, then QMAP train+classify or QPDE.
pub fn run_repetition(config: &RunConfig, method: Method, repetition: usize) -> Result<RepetitionResult> {
    let cfg = config.for_repetition(repetition);
    let (train, test) = prepare_data(&cfg)?;
    match method {
        Method::Qmap => {
            let model = train_model(&cfg, &train)?;
            let acc = accuracy(&qmap_predict_all(&model, &test)?, &test)?;
            Ok(RepetitionResult { repetition, accuracy: acc, trace: Some(model.trace) })
        }
        Method::Qpde => {
            let acc = accuracy(&qpde_predict_all(&cfg, &train, &test)?, &test)?;
            Ok(RepetitionResult { repetition, accuracy: acc, trace: None })
        }
    }
}

/// Runs `repetitions` repetitions (in parallel, merged by index).
pub fn run_repetitions(config: &RunConfig, method: Method, repetitions: usize) -> Result<Vec<RepetitionResult>> {
    (0..repetitions).into_par_iter().map(|r| run_repetition(config, method, r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_var: f64,
    pub repetition: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub sweep_var: f64,
    pub mean: f64,
    /// Sample standard deviation across repetitions.
    pub std: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<SweepSummary>,
}

/// Applies one grid value to a copy of `base`.
pub fn apply_sweep_value(base: &RunConfig, kind: SweepKind, method: Method, value: f64) -> Result<RunConfig> {
    let mut cfg = base.clone();
    let as_count = |v: f64| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 && v.is_finite() {
            Ok(v as usize)
        } else {
            Err(Error::InvalidArgument(format!("sweep value {v} must be a positive integer")))
        }
    };
    match (kind, method) {
        (SweepKind::Depth, Method::Qmap) => cfg.ansatz.layers = as_count(value)?,
        (SweepKind::Depth, Method::Qpde) => cfg.qpde.depth = as_count(value)?,
        (SweepKind::Samples, Method::Qpde) => cfg.qpde.n_samples = as_count(value)?,
        (SweepKind::Interval, Method::Qpde) => {
            if !(value > 0.0) {
                return Err(Error::InvalidArgument(format!("interval {value} must be positive")));
            }
            cfg.qpde.interval = value;
        }
        (k, Method::Qmap) => {
            return Err(Error::InvalidArgument(format!("{k:?} sweeps apply to QPDE only")));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Sweeps `kind` over `grid`. Each grid value runs `repetitions` seeded
/// repetitions; `on_value` receives that value's rows as soon as they are
/// complete, so callers can flush partial tables before an error.
pub fn run_experiment_sweep(
    kind: SweepKind,
    method: Method,
    grid: &[f64],
    repetitions: usize,
    base: &RunConfig,
    mut on_value: impl FnMut(&[SweepRow]) -> Result<()>,
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    if repetitions == 0 {
        return Err(Error::InvalidArgument("sweep needs at least one repetition".into()));
    }
    let mut table = SweepTable::default();
    for &value in grid {
        let cfg = apply_sweep_value(base, kind, method, value)?;
        let results = run_repetitions(&cfg, method, repetitions)?;
        let rows: Vec<SweepRow> = results
            .iter()
            .map(|r| SweepRow { sweep_var: value, repetition: r.repetition, accuracy: r.accuracy })
            .collect();
        on_value(&rows)?;
        let accs: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let std = if accs.len() > 1 {
            (accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (accs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        log::info!("sweep {kind:?} = {value}: mean accuracy {mean:.4} (std {std:.4})");
        table.summaries.push(SweepSummary { sweep_var: value, mean, std });
        table.rows.extend(rows);
    }
    Ok(table)
}
