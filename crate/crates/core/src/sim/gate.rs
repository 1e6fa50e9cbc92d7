use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gate set of the simulator.
///
/// Rotation conventions (angles in radians):
/// * `Ry(t) = exp(-i t Y / 2)`
/// * `Rz(t) = exp(-i t Z / 2) = diag(e^{-it/2}, e^{it/2})`
/// * `Zz(t) = exp(-i t Z(x)Z / 2)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate<T> {
    H(usize),
    X(usize),
    Ry(usize, T),
    Rz(usize, T),
    Cz(usize, usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Zz(usize, usize, T),
    /// Applies `body` on the subspace where every control qubit is `|1>`.
    Controlled {
        controls: Vec<usize>,
        body: Vec<Gate<T>>,
    },
}

impl<T: Real> Gate<T> {
    /// Every qubit the gate reads or writes, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cz(a, b) | Gate::Zz(a, b, _) => vec![*a, *b],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Controlled { controls, body } => {
                let mut qs = controls.clone();
                for g in body {
                    qs.extend(g.qubits());
                }
                qs
            }
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check_index = |q: usize| {
            if q >= n_qubits {
                Err(Error::InvalidGate(format!("qubit {q} out of range for {n_qubits} qubits")))
            } else {
                Ok(())
            }
        };
        let check_angle = |t: T| {
            if t.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("non-finite rotation angle {t}")))
            }
        };
        match self {
            Gate::H(q) | Gate::X(q) => check_index(*q),
            Gate::Ry(q, t) | Gate::Rz(q, t) => {
                check_index(*q)?;
                check_angle(*t)
            }
            Gate::Cz(a, b) | Gate::Cnot { control: a, target: b } => {
                check_index(*a)?;
                check_index(*b)?;
                distinct(*a, *b)
            }
            Gate::Zz(a, b, t) => {
                check_index(*a)?;
                check_index(*b)?;
                distinct(*a, *b)?;
                check_angle(*t)
            }
            Gate::Controlled { controls, body } => {
                if controls.is_empty() {
                    return Err(Error::InvalidGate("controlled gate without controls".into()));
                }
                for (i, c) in controls.iter().enumerate() {
                    check_index(*c)?;
                    if controls[..i].contains(c) {
                        return Err(Error::InvalidGate(format!("repeated control qubit {c}")));
                    }
                }
                for g in body {
                    g.validate(n_qubits)?;
                    if let Some(q) = g.qubits().into_iter().find(|q| controls.contains(q)) {
                        return Err(Error::InvalidGate(format!("controlled body acts on control qubit {q}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Gate::H(_) | Gate::X(_) | Gate::Cz(..) | Gate::Cnot { .. } => self.clone(),
            Gate::Ry(q, t) => Gate::Ry(*q, -*t),
            Gate::Rz(q, t) => Gate::Rz(*q, -*t),
            Gate::Zz(a, b, t) => Gate::Zz(*a, *b, -*t),
            Gate::Controlled { controls, body } => {
                Gate::Controlled { controls: controls.clone(), body: body.iter().rev().map(Gate::adjoint).collect() }
            }
        }
    }

    /// SWAP as three CNOTs.
    pub fn swap(a: usize, b: usize) -> Vec<Self> {
        vec![
            Gate::Cnot { control: a, target: b },
            Gate::Cnot { control: b, target: a },
            Gate::Cnot { control: a, target: b },
        ]
    }
}

fn distinct(a: usize, b: usize) -> Result<()> {
    if a == b {
        Err(Error::InvalidGate(format!("two-qubit gate acts twice on qubit {a}")))
    } else {
        Ok(())
    }
}

/// Ordered gate list on a fixed register size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit<T> {
    n_qubits: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    /// Builds a circuit, validating every gate against the register size.
    pub fn from_gates(n_qubits: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        for g in &gates {
            g.validate(n_qubits)?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other`, which must act on the same register size.
    pub fn append(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, found: other.n_qubits });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Reversed circuit of adjoint gates.
    pub fn adjoint(&self) -> Self {
        Self { n_qubits: self.n_qubits, gates: self.gates.iter().rev().map(Gate::adjoint).collect() }
    }
}
