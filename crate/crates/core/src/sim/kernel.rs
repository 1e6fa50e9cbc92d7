//! In-place stride kernels. Every kernel takes a control mask and only
//! touches basis indices whose masked bits are all set, which is how
//! controlled subcircuits are realized without building larger matrices.

use num_complex::Complex;

use super::gate::{Circuit, Gate};
use super::state::{qubit_mask, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

type Mat2<T> = [[Complex<T>; 2]; 2];

pub(crate) fn hadamard<T: Real>() -> Mat2<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = T::zero();
    [[Complex::new(s, z), Complex::new(s, z)], [Complex::new(s, z), Complex::new(-s, z)]]
}

pub(crate) fn ry<T: Real>(theta: T) -> Mat2<T> {
    let half = theta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let z = T::zero();
    [[Complex::new(c, z), Complex::new(-s, z)], [Complex::new(s, z), Complex::new(c, z)]]
}

/// Diagonal of `Rz(theta)`.
pub(crate) fn rz_phases<T: Real>(theta: T) -> [Complex<T>; 2] {
    let half = theta / T::lit(2.0);
    [Complex::from_polar(T::one(), -half), Complex::from_polar(T::one(), half)]
}

fn apply_mat2<T: Real>(amps: &mut [Complex<T>], bit: usize, ctrl: usize, m: &Mat2<T>) {
    let dim = amps.len();
    // Enumerate indices with `bit` cleared in blocks of 2*bit.
    let mut base = 0;
    while base < dim {
        for i in base..base + bit {
            if i & ctrl != ctrl {
                continue;
            }
            let j = i | bit;
            let a0 = amps[i];
            let a1 = amps[j];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += bit << 1;
    }
}

fn apply_x<T: Real>(amps: &mut [Complex<T>], bit: usize, ctrl: usize) {
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + bit {
            if i & ctrl == ctrl {
                amps.swap(i, i | bit);
            }
        }
        base += bit << 1;
    }
}

fn apply_diag<T: Real, F: Fn(usize) -> Complex<T>>(amps: &mut [Complex<T>], ctrl: usize, phase: F) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & ctrl == ctrl {
            *a = *a * phase(i);
        }
    }
}

fn apply_with_mask<T: Real>(amps: &mut [Complex<T>], n: usize, gate: &Gate<T>, ctrl: usize) {
    match gate {
        Gate::H(q) => apply_mat2(amps, qubit_mask(n, *q), ctrl, &hadamard()),
        Gate::X(q) => apply_x(amps, qubit_mask(n, *q), ctrl),
        Gate::Ry(q, t) => apply_mat2(amps, qubit_mask(n, *q), ctrl, &ry(*t)),
        Gate::Rz(q, t) => {
            let bit = qubit_mask(n, *q);
            let [p0, p1] = rz_phases(*t);
            apply_diag(amps, ctrl, |i| if i & bit == 0 { p0 } else { p1 });
        }
        Gate::Cz(a, b) => {
            let both = qubit_mask(n, *a) | qubit_mask(n, *b);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & ctrl == ctrl && i & both == both {
                    *amp = -*amp;
                }
            }
        }
        Gate::Cnot { control, target } => apply_x(amps, qubit_mask(n, *target), ctrl | qubit_mask(n, *control)),
        Gate::Zz(a, b, t) => {
            let (ba, bb) = (qubit_mask(n, *a), qubit_mask(n, *b));
            let [even, odd] = rz_phases(*t);
            apply_diag(amps, ctrl, |i| if ((i & ba != 0) as u8 ^ (i & bb != 0) as u8) == 0 { even } else { odd });
        }
        Gate::Controlled { controls, body } => {
            let mask = controls.iter().fold(ctrl, |m, c| m | qubit_mask(n, *c));
            for g in body {
                apply_with_mask(amps, n, g, mask);
            }
        }
    }
}

impl<T: Real> StateVector<T> {
    /// Applies one gate in place.
    pub fn apply_gate_mut(&mut self, gate: &Gate<T>) -> Result<()> {
        let n = self.n_qubits();
        gate.validate(n)?;
        apply_with_mask(self.amplitudes_mut(), n, gate, 0);
        Ok(())
    }

    /// Applies every gate of `circuit` in order, in place.
    pub fn apply_circuit_mut(&mut self, circuit: &Circuit<T>) -> Result<()> {
        let n = self.n_qubits();
        if circuit.n_qubits() != n {
            return Err(Error::Dimension { expected: n, found: circuit.n_qubits() });
        }
        // Gates were validated when the circuit was built.
        for g in circuit.gates() {
            apply_with_mask(self.amplitudes_mut(), n, g, 0);
        }
        Ok(())
    }
}

/// Returns `U|state>` for the gate's unitary `U`.
pub fn apply_gate<T: Real>(state: &StateVector<T>, gate: &Gate<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply_gate_mut(gate)?;
    Ok(out)
}

/// Returns the state after applying every gate of `circuit` in order.
pub fn apply_circuit<T: Real>(state: &StateVector<T>, circuit: &Circuit<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply_circuit_mut(circuit)?;
    Ok(out)
}
