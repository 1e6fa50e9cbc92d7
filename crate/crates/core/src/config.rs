//! Run configuration shared by the library entry points and the CLI.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ansatz::{bipartite_edges, complete_edges};
use crate::data::GeneratorSpec;
use crate::encoding::FeatureMapSpec;
use crate::error::{Error, Result};
use crate::inference::OverlapForm;
use crate::training::{QpdeConfig, SpsaConfig};

/// Entangler graph of the ansatz over the feature register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerSpec {
    /// Every pair of qubits.
    Complete,
    /// Nearest neighbours `(q, q + 1)`.
    Chain,
    /// No entangling gates.
    None,
    /// Every listed qubit coupled to every other qubit.
    Bipartite {
        hidden: Vec<usize>,
    },
    Custom(Vec<(usize, usize)>),
}

impl EntanglerSpec {
    pub fn edges(&self, n_qubits: usize) -> Result<Vec<(usize, usize)>> {
        let edges = match self {
            EntanglerSpec::Complete => complete_edges(n_qubits),
            EntanglerSpec::Chain => (1..n_qubits).map(|q| (q - 1, q)).collect(),
            EntanglerSpec::None => Vec::new(),
            EntanglerSpec::Bipartite { hidden } => {
                if let Some(h) = hidden.iter().find(|h| **h >= n_qubits) {
                    return Err(Error::InvalidParameter(format!("hidden qubit {h} out of range")));
                }
                let visible: Vec<usize> = (0..n_qubits).filter(|q| !hidden.contains(q)).collect();
                bipartite_edges(hidden, &visible)
            }
            EntanglerSpec::Custom(edges) => edges.clone(),
        };
        crate::ansatz::build_entangler::<f64>(&edges, n_qubits)?;
        Ok(edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnsatzConfig {
    /// Number of parallel branches.
    pub n_hidden: usize,
    /// Rotation layers per branch (QMAP depth).
    pub layers: usize,
    pub entangler: EntanglerSpec,
    /// Initial angles are drawn uniformly from `[0, init_range)`.
    pub init_range: f64,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self { n_hidden: 1, layers: 10, entangler: EntanglerSpec::Complete, init_range: TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Qmap,
    Qpde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Depth,
    Samples,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub method: Method,
    pub grid: Vec<f64>,
    pub repetitions: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kind: SweepKind::Depth,
            method: Method::Qmap,
            grid: vec![5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            repetitions: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub out_dir: PathBuf,
    /// Defaults to `<out_dir>/train.csv`.
    pub train_csv: Option<PathBuf>,
    /// Defaults to `<out_dir>/test.csv`.
    pub test_csv: Option<PathBuf>,
    /// Defaults to `<out_dir>/model.json`.
    pub model: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self { out_dir: PathBuf::from("out"), train_csv: None, test_csv: None, model: None }
    }
}

impl PathsConfig {
    pub fn train_csv(&self) -> PathBuf {
        self.train_csv.clone().unwrap_or_else(|| self.out_dir.join("train.csv"))
    }

    pub fn test_csv(&self) -> PathBuf {
        self.test_csv.clone().unwrap_or_else(|| self.out_dir.join("test.csv"))
    }

    pub fn model(&self) -> PathBuf {
        self.model.clone().unwrap_or_else(|| self.out_dir.join("model.json"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PredictConfig {
    /// Explicit points to classify instead of the test CSV.
    pub points: Vec<Vec<f64>>,
    /// Include the measured feature-register state of every point.
    pub dump_wavefunction: bool,
}

/// Every setting of a run; embedded in each output so the run can be
/// repeated from the output alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Seed for ansatz initialization.
    pub seed: u64,
    /// Worker thread cap; `None` uses all cores.
    pub threads: Option<usize>,
    pub generator: GeneratorSpec,
    pub feature_map: FeatureMapSpec,
    pub ansatz: AnsatzConfig,
    pub spsa: SpsaConfig,
    pub qpde: QpdeConfig,
    pub overlap_form: OverlapForm,
    /// Min-max rescale features onto `[0, 2 pi)` using the training split.
    pub rescale: bool,
    pub sweep: SweepConfig,
    pub predict: PredictConfig,
    pub paths: PathsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: None,
            generator: GeneratorSpec::default(),
            feature_map: FeatureMapSpec::default(),
            ansatz: AnsatzConfig::default(),
            spsa: SpsaConfig::default(),
            qpde: QpdeConfig::default(),
            overlap_form: OverlapForm::Absolute,
            rescale: false,
            sweep: SweepConfig::default(),
            predict: PredictConfig::default(),
            paths: PathsConfig::default(),
        }
    }
}

impl RunConfig {
    /// Sets every seed (initialization, data, SPSA, QPDE) to `seed`.
    pub fn set_all_seeds(&mut self, seed: u64) {
        self.seed = seed;
        self.generator.seed = seed;
        self.spsa.seed = seed;
        self.qpde.seed = seed;
    }

    /// Sets the swap-test shot count for training and QPDE (0 = exact).
    pub fn set_shots(&mut self, shots: u64) {
        self.spsa.shots = shots;
        self.qpde.shots = shots;
    }

    /// Config of repetition `r`: every seed offset by `r`.
    pub fn for_repetition(&self, r: usize) -> Self {
        let mut c = self.clone();
        let r = r as u64;
        c.seed = self.seed.wrapping_add(r);
        c.generator.seed = self.generator.seed.wrapping_add(r);
        c.spsa.seed = self.spsa.seed.wrapping_add(r);
        c.qpde.seed = self.qpde.seed.wrapping_add(r);
        c
    }

    pub fn validate(&self) -> Result<()> {
        self.feature_map.validate()?;
        self.ansatz.entangler.edges(self.feature_map.n_qubits())?;
        if self.ansatz.n_hidden == 0 || self.ansatz.layers == 0 {
            return Err(Error::InvalidParameter("ansatz needs at least one branch and one layer".into()));
        }
        if !(self.ansatz.init_range > 0.0) {
            return Err(Error::InvalidParameter("init_range must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        self.spsa.validate()?;
        self.qpde.validate()?;
        if self.sweep.repetitions == 0 {
            return Err(Error::InvalidParameter("sweep needs at least one repetition".into()));
        }
        Ok(())
    }
}
