//! Model file and result record formats.

use serde::{Deserialize, Serialize};

use qbayes::ansatz::AnsatzParams;
use qbayes::config::RunConfig;
use qbayes::data::RescaleRecord;
use qbayes::encoding::{FeatureMapSpec, Label};
use qbayes::inference::{AmplitudeRow, OverlapForm};
use qbayes::training::{PredictionTerm, SpsaConfig, SweepSummary, TrainedModel};

/// Bumped whenever a field of [`ResultRecord`] or [`ModelFile`] changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub init: u64,
    pub generator: u64,
    pub spsa: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub library_version: String,
    /// `[n_hidden, layers, n_qubits, 2]`; the last axis is (y, z).
    pub theta_shape: [usize; 4],
    pub theta: Vec<f64>,
    pub entangler_edges: Vec<(usize, usize)>,
    pub feature_map: FeatureMapSpec,
    pub rescale: RescaleRecord,
    pub spsa: SpsaConfig,
    pub overlap_form: OverlapForm,
    pub seeds: Seeds,
    pub trace: Vec<f64>,
}

impl ModelFile {
    pub fn from_model(model: &TrainedModel<f64>, rescale: RescaleRecord, config: &RunConfig) -> Self {
        let p = &model.params;
        Self {
            schema_version: SCHEMA_VERSION,
            library_version: qbayes::VERSION.to_string(),
            theta_shape: [p.n_hidden, p.layers, p.n_qubits, 2],
            theta: p.theta.clone(),
            entangler_edges: p.entangler_edges.clone(),
            feature_map: model.spec.clone(),
            rescale,
            spsa: model.spsa.clone(),
            overlap_form: model.overlap_form,
            seeds: Seeds { init: config.seed, generator: config.generator.seed, spsa: config.spsa.seed },
            trace: model.trace.clone(),
        }
    }

    pub fn to_model(&self) -> qbayes::Result<TrainedModel<f64>> {
        let [n_hidden, layers, n_qubits, axes] = self.theta_shape;
        if axes != 2 {
            return Err(qbayes::Error::Data(format!("theta_shape axis length must be 2, got {axes}")));
        }
        let params = AnsatzParams {
            n_qubits,
            n_hidden,
            layers,
            theta: self.theta.clone(),
            entangler_edges: self.entangler_edges.clone(),
        };
        params.validate().map_err(|e| qbayes::Error::Data(format!("model file: {e}")))?;
        if n_qubits != self.feature_map.n_qubits() {
            return Err(qbayes::Error::Data("model ansatz width does not match its feature map".into()));
        }
        Ok(TrainedModel {
            params,
            spec: self.feature_map.clone(),
            trace: self.trace.clone(),
            spsa: self.spsa.clone(),
            overlap_form: self.overlap_form,
            evaluations: 2 * self.trace.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    pub predicted: Label,
    pub p0: f64,
    pub p1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<PredictionTerm>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionDump {
    pub x: Vec<f64>,
    pub norm: f64,
    pub amplitudes: Vec<AmplitudeRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictions: Option<Vec<PointRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavefunctions: Option<Vec<WavefunctionDump>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepSummary>>,
    /// Files written by the command.
    pub files: Vec<String>,
}

/// One JSON document per command run. Everything except
/// `wall_clock_seconds` is a function of `config` alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub library_version: String,
    pub command: String,
    pub config: RunConfig,
    pub metrics: Metrics,
    pub wall_clock_seconds: f64,
}
