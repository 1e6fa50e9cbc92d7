//! Quantum Bayesian classifier: a statevector simulator, data encoding,
//! parallel ansatz, likelihood-state inference and training loops.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by the experiment drivers.

// `!(x > 0.0)` guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod config;
pub mod data;
pub mod encoding;
pub mod error;
pub mod inference;
pub mod scalar;
pub mod sim;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Real;

pub type State = sim::StateVector<f64>;
pub type Circ = sim::Circuit<f64>;
pub type GateF64 = sim::Gate<f64>;
pub type Params = ansatz::AnsatzParams<f64>;
pub type Model = training::TrainedModel<f64>;
pub type Encoded = inference::EncodedDataset<f64>;

/// Crate version, recorded in every result file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
