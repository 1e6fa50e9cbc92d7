//! Feature-map encoding of classical samples into feature states.
//!
//! The feature register holds `data_qubits` data qubits (indices
//! `0..data_qubits`) followed by `label_qubits` label qubits. The data part is
//! prepared by `(U_phi H^m)^r |0>^m` with
//! `U_phi(x) = exp(i sum_S phi_S(x) prod_{i in S} Z_i)` over subsets of size
//! one and two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::{Circuit, Gate, StateVector};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+1")]
    Plus,
}

impl Label {
    pub fn from_sign(value: i64) -> Option<Self> {
        match value {
            -1 => Some(Label::Minus),
            1 => Some(Label::Plus),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Minus => -1,
            Label::Plus => 1,
        }
    }

    /// Label-register basis index: `-1 -> 0`, `+1 -> 1`.
    pub fn register_index(self) -> usize {
        match self {
            Label::Minus => 0,
            Label::Plus => 1,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Minus => "-1",
            Label::Plus => "+1",
        })
    }
}

/// Real feature vector with an optional label (absent for points to predict).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub label: Option<Label>,
}

impl LabeledSample {
    pub fn new(x: Vec<f64>, label: Label) -> Self {
        Self { x, label: Some(label) }
    }

    pub fn unlabeled(x: Vec<f64>) -> Self {
        Self { x, label: None }
    }
}

/// Single-qubit coefficient `phi_i(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SingleTerm {
    /// `phi_i(x) = x_i`
    #[default]
    Linear,
    /// `phi_i(x) = 0`
    Zero,
}

/// Pair coefficient `phi_{ij}(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairTerm {
    /// `phi_{ij}(x) = (pi - x_i)(pi - x_j)`
    #[default]
    ShiftedProduct,
    /// `phi_{ij}(x) = x_i x_j`
    Product,
    /// No pair terms.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureMapSpec {
    pub data_qubits: usize,
    pub label_qubits: usize,
    pub single: SingleTerm,
    pub pair: PairTerm,
    pub repetitions: usize,
}

impl Default for FeatureMapSpec {
    fn default() -> Self {
        Self {
            data_qubits: 2,
            label_qubits: 1,
            single: SingleTerm::Linear,
            pair: PairTerm::ShiftedProduct,
            repetitions: 2,
        }
    }
}

impl FeatureMapSpec {
    pub fn new(data_qubits: usize, label_qubits: usize) -> Self {
        Self { data_qubits, label_qubits, ..Self::default() }
    }

    /// Total width of the feature register.
    pub fn n_qubits(&self) -> usize {
        self.data_qubits + self.label_qubits
    }

    /// Indices of the label qubits.
    pub fn label_register(&self) -> Vec<usize> {
        (self.data_qubits..self.n_qubits()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.data_qubits == 0 || self.label_qubits == 0 {
            return Err(Error::Encoding("feature map needs at least one data and one label qubit".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Encoding("feature map needs at least one repetition".into()));
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        self.validate()?;
        if x.len() != self.data_qubits {
            return Err(Error::Encoding(format!(
                "feature vector has {} entries, feature map expects {}",
                x.len(),
                self.data_qubits
            )));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Encoding(format!("non-finite feature value {v}")));
        }
        Ok(())
    }

    pub fn phi_single<T: Real>(&self, x: &[T], i: usize) -> T {
        match self.single {
            SingleTerm::Linear => x[i],
            SingleTerm::Zero => T::zero(),
        }
    }

    pub fn phi_pair<T: Real>(&self, x: &[T], i: usize, j: usize) -> T {
        match self.pair {
            PairTerm::ShiftedProduct => (T::PI() - x[i]) * (T::PI() - x[j]),
            PairTerm::Product => x[i] * x[j],
            PairTerm::Zero => T::zero(),
        }
    }
}

/// `U_phi(x)` as Rz and Zz gates on the data qubits of the feature register.
///
/// `exp(i phi Z) = Rz(-2 phi)` and `exp(i phi Z(x)Z) = Zz(-2 phi)`.
pub fn build_phase_circuit<T: Real>(spec: &FeatureMapSpec, x_data: &[f64]) -> Result<Circuit<T>> {
    spec.check_input(x_data)?;
    let x: Vec<T> = x_data.iter().map(|v| T::lit(*v)).collect();
    let two = T::lit(2.0);
    let m = spec.data_qubits;
    let mut gates = Vec::with_capacity(m + m * (m - 1) / 2);
    for i in 0..m {
        gates.push(Gate::Rz(i, -two * spec.phi_single(&x, i)));
    }
    if spec.pair != PairTerm::Zero {
        for i in 0..m {
            for j in i + 1..m {
                gates.push(Gate::Zz(i, j, -two * spec.phi_pair(&x, i, j)));
            }
        }
    }
    Circuit::from_gates(spec.n_qubits(), gates)
}

/// `U_{x_data} = (U_phi H^m)^r` on the data qubits.
pub fn build_data_circuit<T: Real>(spec: &FeatureMapSpec, x_data: &[f64]) -> Result<Circuit<T>> {
    let phase = build_phase_circuit::<T>(spec, x_data)?;
    let mut circuit = Circuit::new(spec.n_qubits());
    for _ in 0..spec.repetitions {
        for q in 0..spec.data_qubits {
            circuit.push(Gate::H(q))?;
        }
        circuit.append(&phase)?;
    }
    Ok(circuit)
}

/// Training feature state with the label register set to the basis state
/// `label_index` (binary string, first label qubit most significant).
pub fn build_feature_state_indexed<T: Real>(
    spec: &FeatureMapSpec,
    x_data: &[f64],
    label_index: usize,
) -> Result<StateVector<T>> {
    let mut circuit = build_data_circuit::<T>(spec, x_data)?;
    let l = spec.label_qubits;
    if label_index >= 1 << l {
        return Err(Error::Encoding(format!("label index {label_index} does not fit {l} label qubits")));
    }
    for k in 0..l {
        if label_index >> (l - 1 - k) & 1 == 1 {
            circuit.push(Gate::X(spec.data_qubits + k))?;
        }
    }
    let mut state = StateVector::zero(spec.n_qubits())?;
    state.apply_circuit_mut(&circuit)?;
    Ok(state)
}

/// `|Phi(x)>_tr`: data register encoded, label register `|0>` for `-1` and
/// `|0..01>` for `+1`.
pub fn build_feature_state_train<T: Real>(spec: &FeatureMapSpec, sample: &LabeledSample) -> Result<StateVector<T>> {
    let label = sample.label.ok_or_else(|| Error::Encoding("training feature state needs a labeled sample".into()))?;
    build_feature_state_indexed(spec, &sample.x, label.register_index())
}

/// `|Phi(x)>_te`: data register encoded, label register in uniform superposition.
pub fn build_feature_state_test<T: Real>(spec: &FeatureMapSpec, x_data: &[f64]) -> Result<StateVector<T>> {
    let mut circuit = build_data_circuit::<T>(spec, x_data)?;
    for q in spec.label_register() {
        circuit.push(Gate::H(q))?;
    }
    let mut state = StateVector::zero(spec.n_qubits())?;
    state.apply_circuit_mut(&circuit)?;
    Ok(state)
}

/// Data-register state `U_{x_data}|0>^m` on its own.
pub fn build_data_state<T: Real>(spec: &FeatureMapSpec, x_data: &[f64]) -> Result<StateVector<T>> {
    let data_only = FeatureMapSpec { label_qubits: 0, ..spec.clone() };
    spec.check_input(x_data)?;
    let phase = {
        let full = build_phase_circuit::<T>(spec, x_data)?;
        Circuit::from_gates(data_only.data_qubits, full.gates().to_vec())?
    };
    let mut state = StateVector::zero(data_only.data_qubits)?;
    for _ in 0..spec.repetitions {
        for q in 0..spec.data_qubits {
            state.apply_gate_mut(&Gate::H(q))?;
        }
        state.apply_circuit_mut(&phase)?;
    }
    Ok(state)
}
