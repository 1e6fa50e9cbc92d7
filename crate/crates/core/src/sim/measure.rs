use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::state::{qubit_mask, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_subset(n_qubits: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("measured qubit subset is empty".into()));
    }
    for (i, q) in subset.iter().enumerate() {
        if *q >= n_qubits {
            return Err(Error::InvalidArgument(format!("qubit {q} out of range for {n_qubits} qubits")));
        }
        if subset[..i].contains(q) {
            return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Marginal Born-rule distribution over the outcomes of `subset`.
///
/// Outcome index bits follow the order of `subset`: `subset[0]` is the most
/// significant bit of the outcome.
pub fn measure_probabilities<T: Real>(state: &StateVector<T>, subset: &[usize]) -> Result<Vec<T>> {
    let n = state.n_qubits();
    check_subset(n, subset)?;
    let masks: Vec<usize> = subset.iter().map(|q| qubit_mask(n, *q)).collect();
    let k = subset.len();
    let mut probs = vec![T::zero(); 1 << k];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let outcome = masks
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, m)| if i & m != 0 { acc | (1 << (k - 1 - j)) } else { acc });
        probs[outcome] = probs[outcome] + a.norm_sqr();
    }
    Ok(probs)
}

/// Draws `shots` i.i.d. outcomes from `probs` and returns the count per outcome.
///
/// Counts are drawn as a chain of conditional binomials, which is an exact
/// multinomial sampler. `probs` need not be normalized.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut remaining_mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if !(remaining_mass > 0.0) || !remaining_mass.is_finite() {
        return Err(Error::InvalidArgument("outcome distribution has no mass".into()));
    }
    let mut remaining = shots;
    let mut counts = vec![0u64; probs.len()];
    for (i, p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        let cond = if i + 1 == probs.len() { 1.0 } else { (p / remaining_mass).clamp(0.0, 1.0) };
        let draw = if cond >= 1.0 {
            remaining
        } else if cond <= 0.0 {
            0
        } else {
            Binomial::new(remaining, cond)
                .map_err(|e| Error::InvalidArgument(format!("binomial sampler: {e}")))?
                .sample(rng)
        };
        counts[i] = draw;
        remaining -= draw;
        remaining_mass -= p;
    }
    Ok(counts)
}

/// Simulated projective measurement of `subset`, repeated `shots` times.
///
/// Uses a ChaCha8 stream seeded from `seed`, so results are reproducible
/// across platforms.
pub fn sample_measurements<T: Real>(
    state: &StateVector<T>,
    subset: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let probs: Vec<f64> = measure_probabilities(state, subset)?.into_iter().map(Real::to_f64_lossy).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_counts(&probs, shots, &mut rng)
}
