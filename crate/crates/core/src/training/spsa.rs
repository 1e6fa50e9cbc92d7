//! Two-point simultaneous-perturbation gradient ascent.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// RNG stream for perturbation directions, separate from data and
/// initialization streams drawn from the same seed.
pub const PERTURBATION_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaConfig {
    pub iterations: usize,
    /// Initial step length.
    pub eta: f64,
    /// Step length is multiplied by this factor after every iteration.
    pub eta_decay: f64,
    /// `c_k = 1 / k^ck_exponent`.
    pub ck_exponent: f64,
    pub seed: u64,
    /// 0 selects exact overlaps, otherwise shots per swap test.
    pub shots: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self { iterations: 140, eta: 1.0, eta_decay: 0.98, ck_exponent: 0.6, seed: 0, shots: 0 }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("SPSA needs at least one iteration".into()));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta must be non-negative, got {}", self.eta)));
        }
        if !(self.eta_decay > 0.0 && self.eta_decay <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta_decay must lie in (0, 1], got {}", self.eta_decay)));
        }
        if !(self.ck_exponent > 0.0 && self.ck_exponent <= 1.0) {
            return Err(Error::InvalidParameter(format!("ck_exponent must lie in (0, 1], got {}", self.ck_exponent)));
        }
        Ok(())
    }

    pub fn ck(&self, k: usize) -> f64 {
        (k as f64).powf(-self.ck_exponent)
    }

    pub fn eta_at(&self, k: usize) -> f64 {
        self.eta * self.eta_decay.powi(k as i32 - 1)
    }
}

/// A scalar objective to maximize. `eval_seed` drives any sampling inside
/// the evaluation (swap tests); exact objectives ignore it.
pub trait Objective<T: Real>: Sync {
    fn evaluate(&self, theta: &[T], eval_seed: u64) -> Result<f64>;
}

/// Wraps an objective and counts evaluations.
pub struct CountingObjective<O> {
    inner: O,
    count: AtomicUsize,
}

impl<O> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, count: AtomicUsize::new(0) }
    }

    pub fn count(&self) -> usize {
        self.count.load(Ordering::SeqCst)
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<T: Real, O: Objective<T>> Objective<T> for CountingObjective<O> {
    fn evaluate(&self, theta: &[T], eval_seed: u64) -> Result<f64> {
        self.count.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(theta, eval_seed)
    }
}

/// `f(theta) = -||theta - optimum||^2`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    pub optimum: Vec<f64>,
}

impl<T: Real> Objective<T> for QuadraticObjective {
    fn evaluate(&self, theta: &[T], _eval_seed: u64) -> Result<f64> {
        if theta.len() != self.optimum.len() {
            return Err(Error::Dimension { expected: self.optimum.len(), found: theta.len() });
        }
        Ok(-theta.iter().zip(&self.optimum).map(|(t, o)| (t.to_f64_lossy() - o).powi(2)).sum::<f64>())
    }
}

#[derive(Debug, Clone)]
pub struct SpsaGradient<T> {
    pub gradient: Vec<T>,
    pub delta: Vec<T>,
    pub f_plus: f64,
    pub f_minus: f64,
}

pub(crate) fn eval_seed(seed: u64, k: usize, side: u64) -> u64 {
    crate::inference::derive_seed(seed, 2 * k as u64 + side)
}

/// `g_k = (f(theta + c_k Delta) - f(theta - c_k Delta)) / (2 c_k) * Delta`
/// with i.i.d. `+-1` entries in `Delta`. Exactly two objective evaluations.
pub fn spsa_gradient<T: Real, O: Objective<T>, R: Rng + ?Sized>(
    objective: &O,
    theta: &[T],
    config: &SpsaConfig,
    k: usize,
    rng: &mut R,
) -> Result<SpsaGradient<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("SPSA iteration index starts at 1".into()));
    }
    let ck = config.ck(k);
    let delta: Vec<T> = (0..theta.len()).map(|_| if rng.random::<bool>() { T::one() } else { -T::one() }).collect();
    let c = T::lit(ck);
    let plus: Vec<T> = theta.iter().zip(&delta).map(|(t, d)| *t + c * *d).collect();
    let minus: Vec<T> = theta.iter().zip(&delta).map(|(t, d)| *t - c * *d).collect();
    let (f_plus, f_minus) = rayon::join(
        || objective.evaluate(&plus, eval_seed(config.seed, k, 0)),
        || objective.evaluate(&minus, eval_seed(config.seed, k, 1)),
    );
    let (f_plus, f_minus) = (f_plus?, f_minus?);
    let scale = T::lit((f_plus - f_minus) / (2.0 * ck));
    let gradient = delta.iter().map(|d| scale * *d).collect();
    Ok(SpsaGradient { gradient, delta, f_plus, f_minus })
}

#[derive(Debug, Clone)]
pub struct SpsaRun<T> {
    pub theta: Vec<T>,
    /// Mean of the two perturbed evaluations at each iteration.
    pub trace: Vec<f64>,
}

/// Runs `config.iterations` ascent steps `theta <- theta + eta_k g_k`.
pub fn spsa_maximize<T: Real, O: Objective<T>>(objective: &O, theta0: &[T], config: &SpsaConfig) -> Result<SpsaRun<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(PERTURBATION_STREAM);
    let mut theta = theta0.to_vec();
    let mut trace = Vec::with_capacity(config.iterations);
    for k in 1..=config.iterations {
        let g = spsa_gradient(objective, &theta, config, k, &mut rng)?;
        let eta = T::lit(config.eta_at(k));
        for (t, gi) in theta.iter_mut().zip(&g.gradient) {
            *t = *t + eta * *gi;
        }
        trace.push(0.5 * (g.f_plus + g.f_minus));
        log::debug!("spsa iteration {k}: objective {:.6}", trace[k - 1]);
    }
    Ok(SpsaRun { theta, trace })
}
