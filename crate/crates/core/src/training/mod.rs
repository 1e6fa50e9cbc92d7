//! QMAP training, QPDE prediction and experiment sweeps.

pub mod experiment;
pub mod qmap;
pub mod qpde;
pub mod spsa;

pub use experiment::{run_experiment_sweep, run_repetitions, RepetitionResult, SweepRow, SweepSummary, SweepTable};
pub use qmap::{qmap_classify, qmap_train, PosteriorObjective, Prediction, PredictionTerm, TrainedModel};
pub use qpde::{qpde_predict, qpde_predict_batch, QpdeConfig, SamplingDistribution};
pub use spsa::{spsa_gradient, spsa_maximize, CountingObjective, Objective, QuadraticObjective, SpsaConfig};
