//! Dense statevector simulation.

mod gate;
mod kernel;
mod measure;
pub mod oracle;
mod state;

pub use gate::{Circuit, Gate};
pub use kernel::{apply_circuit, apply_gate};
pub use measure::{measure_probabilities, sample_counts, sample_measurements};
pub use oracle::oracle_apply;
pub use state::{qubit_mask, StateVector, MAX_QUBITS};

use crate::error::Result;
use crate::scalar::Real;
use num_complex::Complex;

/// `<a|b>`.
pub fn inner_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Complex<T>> {
    a.inner(b)
}
