//! Likelihood state, posterior measure and overlap estimation.
//!
//! The likelihood state is assembled classically from stored overlaps
//! `K(x_l, w_p) = |<Phi(x_l)|w_p>|`: each training feature state is weighted by
//! `P(x_l|w) = prod_p exp(-K(x_l, w_p))` and the weighted sum is normalized by
//! its Euclidean norm. The posterior measure is `|<L|w>|^2`.

use num_complex::Complex;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{branch_states, weight_state_from_branches, AnsatzParams};
use crate::encoding::{
    build_data_state, build_feature_state_test, build_feature_state_train, FeatureMapSpec, LabeledSample,
};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::{measure_probabilities, Circuit, Gate, StateVector};

/// Widest swap-test register (`2n + 1` qubits) that is simulated gate by gate;
/// wider pairs use the closed-form ancilla distribution.
pub const SWAP_CIRCUIT_MAX_QUBITS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Exact,
    SwapTest,
}

/// How the per-sample kernel is formed from the amplitude overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapForm {
    /// `|<Phi|w>|`
    Absolute,
    /// `|<Phi|w>|^2`
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InferenceConfig {
    pub estimator: Estimator,
    /// Shots per swap test; ignored by the exact estimator.
    pub shots: u64,
    pub overlap_form: OverlapForm,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self { estimator: Estimator::Exact, shots: 10_000, overlap_form: OverlapForm::Absolute }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.estimator == Estimator::SwapTest && self.shots == 0 {
            return Err(Error::InvalidArgument("swap-test estimator needs at least one shot".into()));
        }
        Ok(())
    }
}

/// Estimate of `|<a|b>|`. Statistics are reported in double precision
/// whatever the simulation scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub value: f64,
    pub method: Estimator,
    pub shots: u64,
    pub std_error: f64,
    /// Estimated `|<a|b>|^2`.
    pub squared: f64,
    /// Standard error of `squared`.
    pub squared_std_error: f64,
    /// Set when `2 p0 - 1` fell below zero and was clamped.
    pub clamped: bool,
}

pub fn overlap_exact<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<OverlapEstimate> {
    let value = a.inner(b)?.norm().to_f64_lossy().min(1.0);
    Ok(OverlapEstimate {
        value,
        method: Estimator::Exact,
        shots: 0,
        std_error: 0.0,
        squared: value * value,
        squared_std_error: 0.0,
        clamped: false,
    })
}

/// Probability of ancilla outcome 0 in the swap test on `a`, `b`.
///
/// Small registers are simulated as `H(anc)`, controlled-SWAP of every qubit
/// pair, `H(anc)`; larger ones use `(1 + |<a|b>|^2) / 2`.
pub fn swap_test_p0<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    let n = a.n_qubits();
    let total = 2 * n + 1;
    if total > SWAP_CIRCUIT_MAX_QUBITS {
        let ov = a.inner(b)?.norm_sqr().to_f64_lossy();
        return Ok(((1.0 + ov) / 2.0).clamp(0.5, 1.0));
    }
    let mut state = StateVector::<T>::zero(1)?.tensor(a)?.tensor(b)?;
    let swaps: Vec<Gate<T>> = (0..n).flat_map(|q| Gate::swap(1 + q, 1 + n + q)).collect();
    let circuit =
        Circuit::from_gates(total, vec![Gate::H(0), Gate::Controlled { controls: vec![0], body: swaps }, Gate::H(0)])?;
    state.apply_circuit_mut(&circuit)?;
    let p = measure_probabilities(&state, &[0])?;
    Ok(p[0].to_f64_lossy().clamp(0.0, 1.0))
}

/// Sampled swap test. The ancilla-0 count is binomial with `shots` trials;
/// `value = sqrt(max(0, 2 p0_hat - 1))`.
///
/// `std_error` propagates the binomial error of `p0_hat` through the square
/// root; near zero the propagation is floored at the resolution of the
/// squared estimate.
pub fn swap_test<T: Real>(a: &StateVector<T>, b: &StateVector<T>, shots: u64, seed: u64) -> Result<OverlapEstimate> {
    if shots == 0 {
        return Err(Error::InvalidArgument("swap test needs at least one shot".into()));
    }
    let p0 = swap_test_p0(a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros = Binomial::new(shots, p0)
        .map_err(|e| Error::InvalidParameter(format!("swap-test probability {p0}: {e}")))?
        .sample(&mut rng);
    Ok(swap_estimate_from_counts(zeros, shots))
}

pub(crate) fn swap_estimate_from_counts(zeros: u64, shots: u64) -> OverlapEstimate {
    let n = shots as f64;
    let p_hat = zeros as f64 / n;
    let sd_p = (p_hat * (1.0 - p_hat) / n).sqrt();
    let raw = 2.0 * p_hat - 1.0;
    let clamped = raw < 0.0;
    let squared = raw.max(0.0);
    let squared_std_error = 2.0 * sd_p;
    let value = squared.sqrt();
    // d sqrt(s) = ds / (2 sqrt(s)), with s floored at its own standard error.
    let floor = squared.max(squared_std_error).max(1.0 / n);
    let std_error = squared_std_error / (2.0 * floor.sqrt());
    OverlapEstimate { value, method: Estimator::SwapTest, shots, std_error, squared, squared_std_error, clamped }
}

/// Child seed for sampled evaluations, decorrelated from the streams that
/// data generation and initialization draw from the same base seed.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Training feature states, encoded once and reused across objective
/// evaluations.
#[derive(Debug, Clone)]
pub struct EncodedDataset<T: Real> {
    spec: FeatureMapSpec,
    states: Vec<StateVector<T>>,
}

impl<T: Real> EncodedDataset<T> {
    pub fn new(spec: &FeatureMapSpec, samples: &[LabeledSample]) -> Result<Self> {
        spec.validate()?;
        if samples.is_empty() {
            return Err(Error::Data("training set is empty".into()));
        }
        if let Some(i) = samples.iter().position(|s| s.label.is_none()) {
            return Err(Error::Data(format!("training sample {i} has no label")));
        }
        let states = samples
            .par_iter()
            .with_min_len(64)
            .map(|s| build_feature_state_train(spec, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spec: spec.clone(), states })
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    pub fn states(&self) -> &[StateVector<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn check_params(&self, params: &AnsatzParams<T>) -> Result<()> {
        if params.n_qubits != self.spec.n_qubits() {
            return Err(Error::Dimension { expected: self.spec.n_qubits(), found: params.n_qubits });
        }
        Ok(())
    }
}

/// `|P(Phi(D)|w)>` together with its per-sample weights.
#[derive(Debug, Clone)]
pub struct LikelihoodState<T: Real> {
    pub state: StateVector<T>,
    /// `P(x_l|w)`, each in `(0, 1]`.
    pub per_sample_weights: Vec<T>,
    /// Euclidean norm of the weighted sum before normalization.
    pub normalizer: T,
}

/// Builds the likelihood state from the branch outputs `w_p = W(theta_p)|0>`.
pub fn likelihood_from_branches<T: Real>(
    data: &EncodedDataset<T>,
    branches: &[StateVector<T>],
    config: &InferenceConfig,
    seed: u64,
) -> Result<LikelihoodState<T>> {
    config.validate()?;
    let n_branches = branches.len() as u64;
    let weights = data
        .states
        .par_iter()
        .with_min_len(64)
        .enumerate()
        .map(|(l, phi)| {
            let mut exponent = 0.0f64;
            for (p, w) in branches.iter().enumerate() {
                let est = match config.estimator {
                    Estimator::Exact => overlap_exact(phi, w)?,
                    Estimator::SwapTest => {
                        swap_test(phi, w, config.shots, derive_seed(seed, l as u64 * n_branches + p as u64))?
                    }
                };
                exponent += match config.overlap_form {
                    OverlapForm::Absolute => est.value,
                    OverlapForm::Squared => est.squared,
                };
            }
            Ok(T::lit((-exponent).exp()))
        })
        .collect::<Result<Vec<T>>>()?;

    let dim = data.states[0].dim();
    let zero = Complex::new(T::zero(), T::zero());
    let mut acc = vec![zero; dim];
    for (phi, wt) in data.states.iter().zip(&weights) {
        for (a, b) in acc.iter_mut().zip(phi.amplitudes()) {
            *a = *a + b.scale(*wt);
        }
    }
    let normalizer = acc.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    if !(normalizer > T::lit(1e-12)) {
        return Err(Error::DegenerateLikelihood("weighted feature states sum to zero".into()));
    }
    let inv = T::one() / normalizer;
    let state = StateVector::from_amplitudes(acc.into_iter().map(|a| a.scale(inv)).collect())?;
    Ok(LikelihoodState { state, per_sample_weights: weights, normalizer })
}

pub fn build_likelihood_state<T: Real>(
    data: &EncodedDataset<T>,
    params: &AnsatzParams<T>,
    config: &InferenceConfig,
    seed: u64,
) -> Result<LikelihoodState<T>> {
    data.check_params(params)?;
    likelihood_from_branches(data, &branch_states(params)?, config, seed)
}

/// `Tr(rho(Phi(D)|w) rho(w)) = |<L|w>|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorMeasure {
    pub value: f64,
    pub std_error: f64,
    pub method: Estimator,
}

/// Posterior measure for an explicit weight state (e.g. Haar-random).
pub fn posterior_measure_for_state<T: Real>(
    data: &EncodedDataset<T>,
    w: &StateVector<T>,
    config: &InferenceConfig,
    seed: u64,
) -> Result<PosteriorMeasure> {
    let branches = std::slice::from_ref(w);
    let lik = likelihood_from_branches(data, branches, config, seed)?;
    final_overlap(&lik.state, w, config, seed)
}

pub fn posterior_measure<T: Real>(
    data: &EncodedDataset<T>,
    params: &AnsatzParams<T>,
    config: &InferenceConfig,
    seed: u64,
) -> Result<PosteriorMeasure> {
    data.check_params(params)?;
    let branches = branch_states(params)?;
    let w = weight_state_from_branches(&branches)?;
    let lik = likelihood_from_branches(data, &branches, config, seed)?;
    final_overlap(&lik.state, &w, config, seed)
}

fn final_overlap<T: Real>(
    lik: &StateVector<T>,
    w: &StateVector<T>,
    config: &InferenceConfig,
    seed: u64,
) -> Result<PosteriorMeasure> {
    let est = match config.estimator {
        Estimator::Exact => overlap_exact(lik, w)?,
        Estimator::SwapTest => swap_test(lik, w, config.shots, derive_seed(seed, u64::MAX))?,
    };
    Ok(PosteriorMeasure { value: est.squared.clamp(0.0, 1.0), std_error: est.squared_std_error, method: est.method })
}

/// Label-register distribution for a test point.
#[derive(Debug, Clone)]
pub struct LabelDistribution<T: Real> {
    /// Born probabilities over the `2^label_qubits` label outcomes.
    pub probabilities: Vec<T>,
    /// Feature-register state whose label register was measured.
    pub state: StateVector<T>,
    /// `||(<Phi(x*)| (x) I) |w>||^2`; zero means no information about `x*`.
    pub projection: T,
}

impl<T: Real> LabelDistribution<T> {
    pub fn p_minus(&self) -> T {
        self.probabilities[0]
    }

    pub fn p_plus(&self) -> T {
        self.probabilities[1]
    }
}

/// Label distribution of the test point under the weight state `w`.
///
/// The test feature state `|Phi(x*)>_te` spans `|Phi(x*)> (x) |t>` for all
/// label values `t`; the weight state is projected onto that span, and the
/// label register of the normalized projection is measured, giving
/// `p(t) ∝ |<Phi(x*), t|w>|^2`. When the projection vanishes the test state
/// itself is measured, which yields the uniform distribution.
pub fn label_distribution_for_state<T: Real>(
    spec: &FeatureMapSpec,
    x_star: &[f64],
    w: &StateVector<T>,
) -> Result<LabelDistribution<T>> {
    if w.n_qubits() != spec.n_qubits() {
        return Err(Error::Dimension { expected: spec.n_qubits(), found: w.n_qubits() });
    }
    let data = build_data_state::<T>(spec, x_star)?;
    let n_labels = 1usize << spec.label_qubits;
    let zero = Complex::new(T::zero(), T::zero());
    let mut coeffs = vec![zero; n_labels];
    for (i, d) in data.amplitudes().iter().enumerate() {
        let dc = d.conj();
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c = *c + dc * w.amplitudes()[i * n_labels + j];
        }
    }
    let projection: T = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let state = if projection > T::lit(1e-24) {
        let inv = T::one() / projection.sqrt();
        let mut amps = Vec::with_capacity(w.dim());
        for d in data.amplitudes() {
            for c in &coeffs {
                amps.push(*d * c.scale(inv));
            }
        }
        StateVector::from_amplitudes(amps)?
    } else {
        log::warn!("weight state has no component along the test point; label distribution is uniform");
        build_feature_state_test(spec, x_star)?
    };
    let probabilities = measure_probabilities(&state, &spec.label_register())?;
    Ok(LabelDistribution { probabilities, state, projection })
}

pub fn likelihood_label_distribution<T: Real>(
    spec: &FeatureMapSpec,
    x_star: &[f64],
    params: &AnsatzParams<T>,
) -> Result<LabelDistribution<T>> {
    let w = crate::ansatz::build_weight_state(params)?;
    label_distribution_for_state(spec, x_star, &w)
}

/// One row of a wavefunction dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    pub index: usize,
    pub bits: String,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub phase: f64,
}

pub fn amplitude_table<T: Real>(state: &StateVector<T>) -> Vec<AmplitudeRow> {
    let n = state.n_qubits();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(index, a)| {
            let re = a.re.to_f64_lossy();
            let im = a.im.to_f64_lossy();
            AmplitudeRow { index, bits: format!("{index:0n$b}"), re, im, magnitude: re.hypot(im), phase: im.atan2(re) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_weight_state, complete_edges};
    use crate::encoding::Label;
    use rand::Rng;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_samples(n: usize, seed: u64) -> Vec<LabeledSample> {
        let mut r = rng(seed);
        (0..n)
            .map(|i| {
                let label = if i % 2 == 0 { Label::Plus } else { Label::Minus };
                LabeledSample::new(vec![r.random::<f64>() * 2.0 * PI, r.random::<f64>() * 2.0 * PI], label)
            })
            .collect()
    }

    #[test]
    fn exact_overlap_trivial_cases() {
        let a = StateVector::<f64>::basis(3, 2).unwrap();
        assert_eq!(overlap_exact(&a, &a).unwrap().value, 1.0);
        let b = StateVector::<f64>::basis(3, 5).unwrap();
        let e = overlap_exact(&a, &b).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.std_error, 0.0);
        assert!(overlap_exact(&a, &StateVector::zero(2).unwrap()).is_err());
    }

    #[test]
    fn exact_overlap_matches_naive_sum() {
        let mut r = rng(3);
        let a = StateVector::<f64>::haar_random(6, &mut r).unwrap();
        let b = StateVector::<f64>::haar_random(6, &mut r).unwrap();
        let (mut re, mut im) = (0.0, 0.0);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            re += x.re * y.re + x.im * y.im;
            im += x.re * y.im - x.im * y.re;
        }
        let naive = (re * re + im * im).sqrt();
        assert!((overlap_exact(&a, &b).unwrap().value - naive).abs() < 1e-12);
    }

    #[test]
    fn swap_circuit_p0_matches_closed_form() {
        let mut r = rng(4);
        for n in 1..=4 {
            let a = StateVector::<f64>::haar_random(n, &mut r).unwrap();
            let b = StateVector::<f64>::haar_random(n, &mut r).unwrap();
            let ov = a.inner(&b).unwrap().norm_sqr();
            assert!((swap_test_p0(&a, &b).unwrap() - (1.0 + ov) / 2.0).abs() < 1e-12);
        }
        let a = StateVector::<f64>::basis(2, 0).unwrap();
        assert!((swap_test_p0(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        let b = StateVector::<f64>::basis(2, 3).unwrap();
        assert!((swap_test_p0(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn swap_test_identical_states_is_exact() {
        let a = StateVector::<f64>::haar_random(3, &mut rng(5)).unwrap();
        let e = swap_test(&a, &a, 1000, 1).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(!e.clamped);
        assert!(swap_test(&a, &a, 0, 1).is_err());
    }

    #[test]
    fn swap_estimate_clamps_below_half() {
        let e = swap_estimate_from_counts(40, 100);
        assert!(e.clamped);
        assert_eq!(e.value, 0.0);
        assert!(e.std_error > 0.0);
    }

    #[test]
    fn swap_test_p0_is_unbiased() {
        let mut r = rng(6);
        let a = StateVector::<f64>::haar_random(3, &mut r).unwrap();
        let b = StateVector::<f64>::haar_random(3, &mut r).unwrap();
        let p0 = swap_test_p0(&a, &b).unwrap();
        let shots = 1000u64;
        let mean: f64 =
            (0..1000u64).map(|s| (swap_test(&a, &b, shots, s).unwrap().squared + 1.0) / 2.0).sum::<f64>() / 1000.0;
        // squared = 2 p0_hat - 1 unless clamped; p0 is well above 1/2 here.
        assert!(p0 > 0.52);
        let sigma = (p0 * (1.0 - p0) / shots as f64).sqrt();
        assert!((mean - p0).abs() < 3.0 * sigma / (1000f64).sqrt(), "mean {mean} vs {p0}");
    }

    #[test]
    fn single_sample_likelihood_is_feature_state() {
        let spec = FeatureMapSpec::default();
        let samples = random_samples(1, 7);
        let data = EncodedDataset::<f64>::new(&spec, &samples).unwrap();
        let params = AnsatzParams::random(3, 1, 2, complete_edges(3), 2.0 * PI, &mut rng(1)).unwrap();
        let lik = build_likelihood_state(&data, &params, &InferenceConfig::default(), 0).unwrap();
        assert!(lik.state.max_deviation(&data.states()[0]).unwrap() < 1e-12);
        assert!(lik.per_sample_weights[0] > 0.0 && lik.per_sample_weights[0] <= 1.0);
    }

    #[test]
    fn duplicate_samples_collapse() {
        let spec = FeatureMapSpec::default();
        let s = random_samples(1, 8).pop().unwrap();
        let data = EncodedDataset::<f64>::new(&spec, &[s.clone(), s]).unwrap();
        let params = AnsatzParams::random(3, 1, 2, complete_edges(3), 2.0 * PI, &mut rng(2)).unwrap();
        let lik = build_likelihood_state(&data, &params, &InferenceConfig::default(), 0).unwrap();
        assert!(lik.state.max_deviation(&data.states()[0]).unwrap() < 1e-12);
    }

    #[test]
    fn likelihood_matches_dense_assembly() {
        let spec = FeatureMapSpec::default();
        let samples = random_samples(3, 9);
        let data = EncodedDataset::<f64>::new(&spec, &samples).unwrap();
        let params = AnsatzParams::random(3, 1, 3, complete_edges(3), 2.0 * PI, &mut rng(3)).unwrap();
        let w = build_weight_state(&params).unwrap();
        let lik = build_likelihood_state(&data, &params, &InferenceConfig::default(), 0).unwrap();
        // Independent assembly in plain (re, im) arithmetic.
        let mut acc = [(0.0f64, 0.0f64); 8];
        for phi in data.states() {
            let (mut re, mut im) = (0.0, 0.0);
            for (x, y) in phi.amplitudes().iter().zip(w.amplitudes()) {
                re += x.re * y.re + x.im * y.im;
                im += x.re * y.im - x.im * y.re;
            }
            let weight = (-(re * re + im * im).sqrt()).exp();
            for (a, x) in acc.iter_mut().zip(phi.amplitudes()) {
                a.0 += weight * x.re;
                a.1 += weight * x.im;
            }
        }
        let norm = acc.iter().map(|a| a.0 * a.0 + a.1 * a.1).sum::<f64>().sqrt();
        for (a, b) in acc.iter().zip(lik.state.amplitudes()) {
            assert!((a.0 / norm - b.re).abs() < 1e-12 && (a.1 / norm - b.im).abs() < 1e-12);
        }
        assert!((lik.state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn likelihood_is_permutation_invariant() {
        let spec = FeatureMapSpec::default();
        let samples = random_samples(6, 10);
        let mut reversed = samples.clone();
        reversed.reverse();
        let params = AnsatzParams::random(3, 2, 2, complete_edges(3), 2.0 * PI, &mut rng(4)).unwrap();
        let cfg = InferenceConfig::default();
        let a =
            build_likelihood_state(&EncodedDataset::<f64>::new(&spec, &samples).unwrap(), &params, &cfg, 0).unwrap();
        let b =
            build_likelihood_state(&EncodedDataset::<f64>::new(&spec, &reversed).unwrap(), &params, &cfg, 0).unwrap();
        assert!(a.state.max_deviation(&b.state).unwrap() < 1e-12);
    }

    #[test]
    fn dataset_errors() {
        let spec = FeatureMapSpec::default();
        assert!(matches!(EncodedDataset::<f64>::new(&spec, &[]), Err(Error::Data(_))));
        let unlabeled = [LabeledSample::unlabeled(vec![0.1, 0.2])];
        assert!(matches!(EncodedDataset::<f64>::new(&spec, &unlabeled), Err(Error::Data(_))));
    }

    #[test]
    fn posterior_is_one_for_self_overlap() {
        let spec = FeatureMapSpec::default();
        let samples = random_samples(1, 11);
        let data = EncodedDataset::<f64>::new(&spec, &samples).unwrap();
        let w = data.states()[0].clone();
        let f = posterior_measure_for_state(&data, &w, &InferenceConfig::default(), 0).unwrap();
        assert!((f.value - 1.0).abs() < 1e-12);
        // Flipping the label qubit makes the weight state orthogonal.
        let flipped = crate::sim::apply_gate(&w, &Gate::X(2)).unwrap();
        let f = posterior_measure_for_state(&data, &flipped, &InferenceConfig::default(), 0).unwrap();
        assert!(f.value < 1e-20);
    }

    #[test]
    fn posterior_bounded_and_swap_close() {
        let spec = FeatureMapSpec::default();
        let data = EncodedDataset::<f64>::new(&spec, &random_samples(5, 12)).unwrap();
        let params = AnsatzParams::random(3, 1, 3, complete_edges(3), 2.0 * PI, &mut rng(5)).unwrap();
        let exact = posterior_measure(&data, &params, &InferenceConfig::default(), 0).unwrap();
        assert!((0.0..=1.0).contains(&exact.value));
        let cfg = InferenceConfig { estimator: Estimator::SwapTest, shots: 200_000, ..Default::default() };
        let sampled = posterior_measure(&data, &params, &cfg, 42).unwrap();
        assert!((sampled.value - exact.value).abs() < 0.05, "{} vs {}", sampled.value, exact.value);
        let again = posterior_measure(&data, &params, &cfg, 42).unwrap();
        assert_eq!(sampled, again);
    }

    #[test]
    fn label_distribution_sums_to_one_and_reads_weight_label() {
        let spec = FeatureMapSpec::default();
        let x = [4.0, 2.5];
        // Weight state equal to the +1 training state puts all mass on +1.
        let w = build_feature_state_train::<f64>(&spec, &LabeledSample::new(x.to_vec(), Label::Plus)).unwrap();
        let d = label_distribution_for_state(&spec, &x, &w).unwrap();
        assert!((d.p_plus() - 1.0).abs() < 1e-12);
        assert!((d.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((d.state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn label_distribution_of_balanced_weight_is_uniform() {
        let spec = FeatureMapSpec::default();
        let x = [1.0, 2.0];
        let w = build_feature_state_test::<f64>(&spec, &x).unwrap();
        let d = label_distribution_for_state(&spec, &x, &w).unwrap();
        assert!((d.p_minus() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn label_distribution_matches_direct_overlaps() {
        let spec = FeatureMapSpec::default();
        let params = AnsatzParams::random(3, 1, 4, complete_edges(3), 2.0 * PI, &mut rng(6)).unwrap();
        let w = build_weight_state(&params).unwrap();
        let x = [3.3, 0.7];
        let d = likelihood_label_distribution(&spec, &x, &params).unwrap();
        let minus = crate::encoding::build_feature_state_indexed::<f64>(&spec, &x, 0).unwrap();
        let plus = crate::encoding::build_feature_state_indexed::<f64>(&spec, &x, 1).unwrap();
        let a = minus.inner(&w).unwrap().norm_sqr();
        let b = plus.inner(&w).unwrap().norm_sqr();
        assert!((d.p_minus() - a / (a + b)).abs() < 1e-12);
        assert!((d.projection - (a + b)).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_weight_gives_uniform_fallback() {
        let spec = FeatureMapSpec::default();
        let x = [1.0, 2.0];
        // The data state is Phi(x); its orthogonal complement on the data
        // register, tensored with any label, has zero projection.
        let data = build_data_state::<f64>(&spec, &x).unwrap();
        let mut perp = vec![Complex::new(0.0, 0.0); 4];
        perp[0] = data.amplitudes()[1].conj();
        perp[1] = -data.amplitudes()[0].conj();
        let perp = StateVector::normalized(perp).unwrap();
        let w = perp.tensor(&StateVector::basis(1, 0).unwrap()).unwrap();
        let d = label_distribution_for_state(&spec, &x, &w).unwrap();
        assert!(d.projection < 1e-20);
        assert!((d.p_plus() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn amplitude_table_rows() {
        let s = StateVector::<f64>::basis(3, 5).unwrap();
        let t = amplitude_table(&s);
        assert_eq!(t.len(), 8);
        assert_eq!(t[5].bits, "101");
        assert_eq!(t[5].magnitude, 1.0);
    }
}
