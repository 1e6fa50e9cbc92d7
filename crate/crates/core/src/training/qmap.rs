//! Maximum a posteriori training of the ansatz angles.

use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzParams;
use crate::encoding::{FeatureMapSpec, Label};
use crate::error::Result;
use crate::inference::{
    label_distribution_for_state, posterior_measure, EncodedDataset, Estimator, InferenceConfig, OverlapForm,
};
use crate::scalar::Real;
use crate::training::spsa::{spsa_maximize, CountingObjective, Objective, SpsaConfig};

/// Posterior measure as a function of the flattened angle vector.
pub struct PosteriorObjective<'a, T: Real> {
    pub data: &'a EncodedDataset<T>,
    pub template: &'a AnsatzParams<T>,
    pub inference: InferenceConfig,
}

impl<T: Real> Objective<T> for PosteriorObjective<'_, T> {
    fn evaluate(&self, theta: &[T], eval_seed: u64) -> Result<f64> {
        let params = self.template.with_theta(theta.to_vec())?;
        Ok(posterior_measure(self.data, &params, &self.inference, eval_seed)?.value)
    }
}

pub fn inference_config(shots: u64, overlap_form: OverlapForm) -> InferenceConfig {
    InferenceConfig {
        estimator: if shots == 0 { Estimator::Exact } else { Estimator::SwapTest },
        shots: shots.max(1),
        overlap_form,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel<T> {
    pub params: AnsatzParams<T>,
    pub spec: FeatureMapSpec,
    /// Posterior measure per iteration (mean of the two perturbed evaluations).
    pub trace: Vec<f64>,
    pub spsa: SpsaConfig,
    pub overlap_form: OverlapForm,
    pub evaluations: usize,
}

pub fn qmap_train<T: Real>(
    data: &EncodedDataset<T>,
    initial: &AnsatzParams<T>,
    config: &SpsaConfig,
    overlap_form: OverlapForm,
) -> Result<TrainedModel<T>> {
    initial.validate()?;
    let objective = CountingObjective::new(PosteriorObjective {
        data,
        template: initial,
        inference: inference_config(config.shots, overlap_form),
    });
    let run = spsa_maximize(&objective, &initial.theta, config)?;
    Ok(TrainedModel {
        params: initial.with_theta(run.theta)?,
        spec: data.spec().clone(),
        trace: run.trace,
        spsa: config.clone(),
        overlap_form,
        evaluations: objective.count(),
    })
}

/// A single QPDE aggregation term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionTerm {
    pub weight: f64,
    pub p0: f64,
    pub p1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    /// Probability of label `-1`.
    pub p0: f64,
    /// Probability of label `+1`.
    pub p1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_sample_terms: Option<Vec<PredictionTerm>>,
}

impl Prediction {
    /// `-1` iff `p0 > p1`; an exact tie goes to `+1`.
    pub fn from_scores(s0: f64, s1: f64) -> Self {
        let total = s0 + s1;
        let (p0, p1) = if total > 0.0 { (s0 / total, s1 / total) } else { (0.5, 0.5) };
        if p0 == p1 {
            log::warn!("label probabilities tie at {p0}; assigning +1");
        }
        let label = if p0 > p1 { Label::Minus } else { Label::Plus };
        Self { label, p0, p1, per_sample_terms: None }
    }
}

/// Classifies with the label distribution of the trained weight state.
pub fn qmap_classify<T: Real>(model: &TrainedModel<T>, x_star: &[f64]) -> Result<Prediction> {
    let w = crate::ansatz::build_weight_state(&model.params)?;
    classify_with_state(&model.spec, &w, x_star)
}

pub fn classify_with_state<T: Real>(
    spec: &FeatureMapSpec,
    w: &crate::sim::StateVector<T>,
    x_star: &[f64],
) -> Result<Prediction> {
    let dist = label_distribution_for_state(spec, x_star, w)?;
    Ok(Prediction::from_scores(dist.p_minus().to_f64_lossy(), dist.p_plus().to_f64_lossy()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::complete_edges;
    use crate::encoding::LabeledSample;
    use crate::sim::{Gate, StateVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (FeatureMapSpec, Vec<LabeledSample>) {
        let spec = FeatureMapSpec::default();
        let samples = vec![
            LabeledSample::new(vec![4.3, 5.1], Label::Plus),
            LabeledSample::new(vec![4.4, 5.0], Label::Plus),
            LabeledSample::new(vec![5.1, 3.4], Label::Minus),
            LabeledSample::new(vec![5.0, 3.3], Label::Minus),
        ];
        (spec, samples)
    }

    #[test]
    fn zero_step_returns_initial_params() {
        let (spec, samples) = toy();
        let data = EncodedDataset::<f64>::new(&spec, &samples).unwrap();
        let init = AnsatzParams::random(3, 1, 2, complete_edges(3), 6.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let cfg = SpsaConfig { iterations: 1, eta: 0.0, ..Default::default() };
        let model = qmap_train(&data, &init, &cfg, OverlapForm::Absolute).unwrap();
        assert_eq!(model.params, init);
        assert_eq!(model.trace.len(), 1);
        assert_eq!(model.evaluations, 2);
    }

    #[test]
    fn training_is_deterministic() {
        let (spec, samples) = toy();
        let data = EncodedDataset::<f64>::new(&spec, &samples).unwrap();
        let init = AnsatzParams::random(3, 1, 2, complete_edges(3), 6.0, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let cfg = SpsaConfig { iterations: 5, ..Default::default() };
        let a = qmap_train(&data, &init, &cfg, OverlapForm::Absolute).unwrap();
        let b = qmap_train(&data, &init, &cfg, OverlapForm::Absolute).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forced_label_zero_classifies_minus() {
        let spec = FeatureMapSpec::default();
        // |+>|+>|0>: the label register is |0>, and the data part overlaps
        // every feature state.
        let mut w = StateVector::<f64>::zero(3).unwrap();
        w.apply_gate_mut(&Gate::H(0)).unwrap();
        w.apply_gate_mut(&Gate::H(1)).unwrap();
        let p = classify_with_state(&spec, &w, &[1.0, 2.0]).unwrap();
        assert_eq!(p.label, Label::Minus);
        assert!((p.p0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tie_goes_to_plus() {
        let p = Prediction::from_scores(0.3, 0.3);
        assert_eq!(p.label, Label::Plus);
        assert!((p.p0 + p.p1 - 1.0).abs() < 1e-12);
        assert_eq!(Prediction::from_scores(0.6, 0.4).label, Label::Minus);
    }
}
