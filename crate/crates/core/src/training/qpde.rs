//! Predictive distribution by Monte-Carlo sampling of ansatz angles,
//! weighted by the posterior measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{branch_states, weight_state_from_branches, AnsatzParams};
use crate::error::{Error, Result};
use crate::inference::{
    derive_seed, label_distribution_for_state, likelihood_from_branches, EncodedDataset, OverlapForm,
};
use crate::scalar::Real;
use crate::training::qmap::{inference_config, Prediction, PredictionTerm};

/// RNG stream for angle samples.
pub const SAMPLING_STREAM: u64 = 3;

/// Angle sampling density. Gaussian and Laplacian are centered on the middle
/// of the interval with scale a quarter of its width, unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingDistribution {
    Uniform,
    Gaussian,
    Laplacian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QpdeConfig {
    pub n_samples: usize,
    /// Width of the angle box `[0, interval)` in radians.
    pub interval: f64,
    pub depth: usize,
    pub n_hidden: usize,
    pub distribution: SamplingDistribution,
    pub seed: u64,
    /// 0 selects exact overlaps, otherwise shots per swap test.
    pub shots: u64,
    /// Keep every `(weight, p0, p1)` term in the predictions.
    pub record_terms: bool,
}

impl Default for QpdeConfig {
    fn default() -> Self {
        Self {
            n_samples: 40,
            interval: 0.2 * std::f64::consts::PI,
            depth: 5,
            n_hidden: 1,
            distribution: SamplingDistribution::Uniform,
            seed: 0,
            shots: 0,
            record_terms: false,
        }
    }
}

impl QpdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("QPDE needs at least one sample".into()));
        }
        if !(self.interval > 0.0) || !self.interval.is_finite() {
            return Err(Error::InvalidParameter(format!("interval must be positive, got {}", self.interval)));
        }
        if self.depth == 0 || self.n_hidden == 0 {
            return Err(Error::InvalidParameter("QPDE ansatz needs depth and n_hidden of at least 1".into()));
        }
        Ok(())
    }
}

fn draw_angle<R: Rng + ?Sized>(config: &QpdeConfig, rng: &mut R) -> f64 {
    let mid = 0.5 * config.interval;
    let scale = 0.25 * config.interval;
    match config.distribution {
        SamplingDistribution::Uniform => rng.random::<f64>() * config.interval,
        SamplingDistribution::Gaussian => Normal::new(mid, scale).expect("positive scale").sample(rng),
        SamplingDistribution::Laplacian => {
            let e: f64 = Exp1.sample(rng);
            if rng.random::<bool>() {
                mid + scale * e
            } else {
                mid - scale * e
            }
        }
    }
}

/// The `n_samples` angle draws, in draw order.
pub fn sample_params<T: Real>(
    config: &QpdeConfig,
    n_qubits: usize,
    edges: &[(usize, usize)],
) -> Result<Vec<AnsatzParams<T>>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(SAMPLING_STREAM);
    let template = AnsatzParams::<T>::zeros(n_qubits, config.n_hidden, config.depth, edges.to_vec())?;
    (0..config.n_samples)
        .map(|_| {
            let theta = (0..template.n_params()).map(|_| T::lit(draw_angle(config, &mut rng))).collect();
            template.with_theta(theta)
        })
        .collect()
}

/// Aggregates `p(t) ∝ sum_l w_l p_l(t)` over given angle samples, with
/// `w_l` the posterior measure at sample `l`.
pub fn qpde_from_params<T: Real>(
    data: &EncodedDataset<T>,
    points: &[Vec<f64>],
    samples: &[AnsatzParams<T>],
    config: &QpdeConfig,
    overlap_form: OverlapForm,
) -> Result<Vec<Prediction>> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("QPDE needs at least one sample".into()));
    }
    let inference = inference_config(config.shots, overlap_form);
    let spec = data.spec();
    let terms = samples
        .par_iter()
        .enumerate()
        .map(|(l, params)| {
            let branches = branch_states(params)?;
            let w = weight_state_from_branches(&branches)?;
            let seed = derive_seed(config.seed, l as u64);
            let lik = likelihood_from_branches(data, &branches, &inference, seed)?;
            let est = match inference.estimator {
                crate::inference::Estimator::Exact => crate::inference::overlap_exact(&lik.state, &w)?,
                crate::inference::Estimator::SwapTest => {
                    crate::inference::swap_test(&lik.state, &w, inference.shots, derive_seed(seed, u64::MAX))?
                }
            };
            let weight = est.squared.clamp(0.0, 1.0);
            let dists = points
                .iter()
                .map(|x| {
                    let d = label_distribution_for_state(spec, x, &w)?;
                    let (a, b) = (d.p_minus().to_f64_lossy(), d.p_plus().to_f64_lossy());
                    let s = a + b;
                    Ok(if s > 0.0 { (a / s, b / s) } else { (0.5, 0.5) })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((weight, dists))
        })
        .collect::<Result<Vec<_>>>()?;

    let total: f64 = terms.iter().map(|t| t.0).sum();
    if !(total > 0.0) {
        return Err(Error::DegeneratePosterior("every sampled posterior weight is zero".into()));
    }
    Ok((0..points.len())
        .map(|i| {
            let (mut s0, mut s1) = (0.0, 0.0);
            for (w, d) in &terms {
                s0 += w * d[i].0;
                s1 += w * d[i].1;
            }
            let mut p = Prediction::from_scores(s0, s1);
            if config.record_terms {
                p.per_sample_terms =
                    Some(terms.iter().map(|(w, d)| PredictionTerm { weight: *w, p0: d[i].0, p1: d[i].1 }).collect());
            }
            p
        })
        .collect())
}

pub fn qpde_predict_batch<T: Real>(
    data: &EncodedDataset<T>,
    points: &[Vec<f64>],
    edges: &[(usize, usize)],
    config: &QpdeConfig,
    overlap_form: OverlapForm,
) -> Result<Vec<Prediction>> {
    let samples = sample_params::<T>(config, data.spec().n_qubits(), edges)?;
    qpde_from_params(data, points, &samples, config, overlap_form)
}

pub fn qpde_predict<T: Real>(
    data: &EncodedDataset<T>,
    x_star: &[f64],
    edges: &[(usize, usize)],
    config: &QpdeConfig,
    overlap_form: OverlapForm,
) -> Result<Prediction> {
    let mut out = qpde_predict_batch(data, &[x_star.to_vec()], edges, config, overlap_form)?;
    Ok(out.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_weight_state, complete_edges};
    use crate::encoding::{FeatureMapSpec, Label, LabeledSample};
    use crate::training::qmap::classify_with_state;

    fn data() -> EncodedDataset<f64> {
        let samples = vec![
            LabeledSample::new(vec![4.3, 5.1], Label::Plus),
            LabeledSample::new(vec![5.1, 3.4], Label::Minus),
            LabeledSample::new(vec![4.2, 5.0], Label::Plus),
        ];
        EncodedDataset::new(&FeatureMapSpec::default(), &samples).unwrap()
    }

    #[test]
    fn single_sample_matches_map_classifier() {
        let d = data();
        let cfg = QpdeConfig { n_samples: 1, depth: 2, seed: 4, interval: 6.0, ..Default::default() };
        let edges = complete_edges(3);
        let x = vec![4.5, 4.0];
        let p = qpde_predict(&d, &x, &edges, &cfg, OverlapForm::Absolute).unwrap();
        let theta = sample_params::<f64>(&cfg, 3, &edges).unwrap().remove(0);
        let q = classify_with_state(d.spec(), &build_weight_state(&theta).unwrap(), &x).unwrap();
        assert_eq!(p.label, q.label);
        assert!((p.p0 - q.p0).abs() < 1e-12);
    }

    #[test]
    fn terms_are_recorded_and_bounded() {
        let d = data();
        let cfg = QpdeConfig { n_samples: 6, depth: 2, record_terms: true, ..Default::default() };
        let p = qpde_predict(&d, &[4.5, 4.0], &complete_edges(3), &cfg, OverlapForm::Absolute).unwrap();
        let terms = p.per_sample_terms.as_ref().unwrap();
        assert_eq!(terms.len(), 6);
        assert!(terms.iter().all(|t| (0.0..=1.0).contains(&t.weight)));
        assert!((p.p0 + p.p1 - 1.0).abs() < 1e-9);
        // Recombine by hand.
        let s0: f64 = terms.iter().map(|t| t.weight * t.p0).sum();
        let s1: f64 = terms.iter().map(|t| t.weight * t.p1).sum();
        assert!((p.p0 - s0 / (s0 + s1)).abs() < 1e-12);
    }

    #[test]
    fn samples_stay_in_box_and_are_seeded() {
        let cfg = QpdeConfig { n_samples: 5, ..Default::default() };
        let a = sample_params::<f64>(&cfg, 3, &[]).unwrap();
        let b = sample_params::<f64>(&cfg, 3, &[]).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(p.theta.iter().all(|t| (0.0..cfg.interval).contains(t)));
        }
        for dist in [SamplingDistribution::Gaussian, SamplingDistribution::Laplacian] {
            let c = QpdeConfig { distribution: dist, n_samples: 200, ..Default::default() };
            let s = sample_params::<f64>(&c, 3, &[]).unwrap();
            let all: Vec<f64> = s.iter().flat_map(|p| p.theta.clone()).collect();
            let mean = all.iter().sum::<f64>() / all.len() as f64;
            assert!((mean - c.interval / 2.0).abs() < 0.05 * c.interval);
        }
    }

    #[test]
    fn config_errors() {
        assert!(QpdeConfig { n_samples: 0, ..Default::default() }.validate().is_err());
        assert!(QpdeConfig { interval: 0.0, ..Default::default() }.validate().is_err());
    }
}
