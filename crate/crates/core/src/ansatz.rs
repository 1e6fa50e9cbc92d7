//! Parallel hardware-efficient ansatz.
//!
//! Each branch `W(theta^(p))` alternates local rotation layers
//! `U_loc^(t) = (x)_m exp(i theta^z_{m,t} Z/2) exp(i theta^y_{m,t} Y/2)`
//! with a CZ entangler layer between consecutive rotation layers:
//! `W = U_loc^(l) U_ent ... U_loc^(2) U_ent U_loc^(1)`.
//! The weight state is the normalized sum of all branch outputs on `|0...0>`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::{Circuit, Gate, StateVector};

/// Rotation axis of a local layer entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Y = 0,
    Z = 1,
}

/// Rotation angles `theta[p][t][m][axis]` plus the entangler graph.
///
/// Angles are stored as the exponent coefficient: a stored `theta` yields
/// `exp(i theta sigma / 2)`, i.e. the simulator gate `R(-theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams<T> {
    pub n_qubits: usize,
    pub n_hidden: usize,
    pub layers: usize,
    /// Row-major over `(branch, layer, qubit, axis)`.
    pub theta: Vec<T>,
    pub entangler_edges: Vec<(usize, usize)>,
}

impl<T: Real> AnsatzParams<T> {
    pub fn zeros(
        n_qubits: usize,
        n_hidden: usize,
        layers: usize,
        entangler_edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let params = Self {
            n_qubits,
            n_hidden,
            layers,
            theta: vec![T::zero(); n_hidden * layers * n_qubits * 2],
            entangler_edges,
        };
        params.validate()?;
        Ok(params)
    }

    /// Angles drawn i.i.d. uniform from `[0, range)`.
    pub fn random<R: Rng + ?Sized>(
        n_qubits: usize,
        n_hidden: usize,
        layers: usize,
        entangler_edges: Vec<(usize, usize)>,
        range: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut params = Self::zeros(n_qubits, n_hidden, layers, entangler_edges)?;
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::InvalidParameter(format!("sampling range must be positive, got {range}")));
        }
        for v in &mut params.theta {
            *v = T::lit(rng.random::<f64>() * range);
        }
        Ok(params)
    }

    pub fn with_theta(&self, theta: Vec<T>) -> Result<Self> {
        if theta.len() != self.theta.len() {
            return Err(Error::InvalidParameter(format!(
                "theta has {} entries, ansatz expects {}",
                theta.len(),
                self.theta.len()
            )));
        }
        let out = Self { theta, ..self.clone() };
        out.validate()?;
        Ok(out)
    }

    pub fn n_params(&self) -> usize {
        self.theta.len()
    }

    pub fn index(&self, branch: usize, layer: usize, qubit: usize, axis: Axis) -> usize {
        ((branch * self.layers + layer) * self.n_qubits + qubit) * 2 + axis as usize
    }

    pub fn angle(&self, branch: usize, layer: usize, qubit: usize, axis: Axis) -> T {
        self.theta[self.index(branch, layer, qubit, axis)]
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_hidden == 0 || self.layers == 0 {
            return Err(Error::InvalidParameter("ansatz needs at least one qubit, one branch and one layer".into()));
        }
        let expected = self.n_hidden * self.layers * self.n_qubits * 2;
        if self.theta.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "theta has {} entries, shape implies {expected}",
                self.theta.len()
            )));
        }
        if let Some(v) = self.theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite angle {v}")));
        }
        validate_edges(&self.entangler_edges, self.n_qubits)
    }
}

fn validate_edges(edges: &[(usize, usize)], n_qubits: usize) -> Result<()> {
    for &(i, j) in edges {
        if i == j {
            return Err(Error::InvalidParameter(format!("entangler self-loop on qubit {i}")));
        }
        if i >= n_qubits || j >= n_qubits {
            return Err(Error::InvalidParameter(format!(
                "entangler edge ({i}, {j}) out of range for {n_qubits} qubits"
            )));
        }
    }
    Ok(())
}

/// All pairs `(i, j)`, `i < j`, over `0..n`.
pub fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Complete bipartite graph between `hidden` and `visible` qubits, with the
/// hidden qubit as control.
pub fn bipartite_edges(hidden: &[usize], visible: &[usize]) -> Vec<(usize, usize)> {
    hidden.iter().flat_map(|h| visible.iter().map(move |v| (*h, *v))).collect()
}

/// `U_ent = prod_{(i,j) in E} CZ(i, j)`.
pub fn build_entangler<T: Real>(edges: &[(usize, usize)], n_qubits: usize) -> Result<Circuit<T>> {
    validate_edges(edges, n_qubits)?;
    Circuit::from_gates(n_qubits, edges.iter().map(|&(i, j)| Gate::Cz(i, j)).collect())
}

/// Circuit of branch `W(theta^(p))`.
pub fn build_branch_circuit<T: Real>(params: &AnsatzParams<T>, branch: usize) -> Result<Circuit<T>> {
    params.validate()?;
    if branch >= params.n_hidden {
        return Err(Error::InvalidParameter(format!(
            "branch {branch} out of range for {} hidden nodes",
            params.n_hidden
        )));
    }
    let entangler = build_entangler::<T>(&params.entangler_edges, params.n_qubits)?;
    let mut circuit = Circuit::new(params.n_qubits);
    for t in 0..params.layers {
        if t > 0 {
            circuit.append(&entangler)?;
        }
        for m in 0..params.n_qubits {
            circuit.push(Gate::Ry(m, -params.angle(branch, t, m, Axis::Y)))?;
            circuit.push(Gate::Rz(m, -params.angle(branch, t, m, Axis::Z)))?;
        }
    }
    Ok(circuit)
}

/// `W(theta^(p))|0...0>` for every branch.
pub fn branch_states<T: Real>(params: &AnsatzParams<T>) -> Result<Vec<StateVector<T>>> {
    (0..params.n_hidden)
        .map(|p| {
            let circuit = build_branch_circuit(params, p)?;
            let mut s = StateVector::zero(params.n_qubits)?;
            s.apply_circuit_mut(&circuit)?;
            Ok(s)
        })
        .collect()
}

fn sum_states<T: Real>(states: &[StateVector<T>]) -> Result<Vec<Complex<T>>> {
    let dim = states[0].dim();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); dim];
    for s in states {
        for (a, b) in acc.iter_mut().zip(s.amplitudes()) {
            *a = *a + b;
        }
    }
    Ok(acc)
}

/// Normalized `|w> = sum_p W(theta^(p))|0> / ||...||`.
pub fn build_weight_state<T: Real>(params: &AnsatzParams<T>) -> Result<StateVector<T>> {
    let branches = branch_states(params)?;
    weight_state_from_branches(&branches)
}

pub(crate) fn weight_state_from_branches<T: Real>(branches: &[StateVector<T>]) -> Result<StateVector<T>> {
    if branches.len() == 1 {
        return Ok(branches[0].clone());
    }
    let acc = sum_states(branches)?;
    let norm: T = acc.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    if !(norm > T::lit(1e-12)) {
        return Err(Error::DegenerateAnsatz("branch outputs cancel to a zero vector".into()));
    }
    StateVector::normalized(acc).map_err(|_| Error::DegenerateAnsatz("branch sum is not normalizable".into()))
}

/// Output of the ancilla-controlled construction of the weight state.
#[derive(Debug, Clone)]
pub struct LcuOutcome<T: Real> {
    pub state: StateVector<T>,
    pub success_probability: T,
}

/// Simulates the ancilla circuit that realizes `sum_p W(theta^(p))`.
///
/// With `a = ceil(log2 N_h)` ancillas (most significant qubits) the circuit
/// prepares the ancillas, applies `sum_p |p><p| (x) W(theta^(p))` as
/// multi-controlled branch circuits, un-prepares the ancillas and
/// post-selects them on `|0...0>`. For power-of-two `N_h` the preparation is
/// `H^a`; otherwise the ancillas are prepared uniformly over the first `N_h`
/// basis states so padded indices carry no branch.
pub fn lcu_weight_state<T: Real>(params: &AnsatzParams<T>) -> Result<LcuOutcome<T>> {
    params.validate()?;
    let n_hidden = params.n_hidden;
    let ancillas = n_hidden.next_power_of_two().trailing_zeros() as usize;
    let n = params.n_qubits;
    let total = ancillas + n;

    let mut circuit = Circuit::new(total);
    for p in 0..n_hidden {
        let branch = build_branch_circuit(params, p)?;
        let shifted = shift_gates(branch.gates(), ancillas);
        if ancillas == 0 {
            for g in shifted {
                circuit.push(g)?;
            }
            continue;
        }
        let flips: Vec<usize> = (0..ancillas).filter(|k| (p >> (ancillas - 1 - k)) & 1 == 0).collect();
        for &k in &flips {
            circuit.push(Gate::X(k))?;
        }
        circuit.push(Gate::Controlled { controls: (0..ancillas).collect(), body: shifted })?;
        for &k in &flips {
            circuit.push(Gate::X(k))?;
        }
    }

    let dim_sys = 1usize << n;
    let uniform = n_hidden.is_power_of_two();
    let mut state = StateVector::<T>::zero(total)?;
    if uniform {
        for k in 0..ancillas {
            state.apply_gate_mut(&Gate::H(k))?;
        }
    } else {
        let amp = T::one() / T::lit(n_hidden as f64).sqrt();
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << total];
        for p in 0..n_hidden {
            amps[p * dim_sys] = Complex::new(amp, T::zero());
        }
        state = StateVector::from_amplitudes(amps)?;
    }
    state.apply_circuit_mut(&circuit)?;

    let projected: Vec<Complex<T>> = if uniform {
        for k in 0..ancillas {
            state.apply_gate_mut(&Gate::H(k))?;
        }
        state.amplitudes()[..dim_sys].to_vec()
    } else {
        // <u| on the ancillas, u uniform over the first N_h basis states.
        let amp = T::one() / T::lit(n_hidden as f64).sqrt();
        let mut acc = vec![Complex::new(T::zero(), T::zero()); dim_sys];
        for p in 0..n_hidden {
            for (i, a) in acc.iter_mut().enumerate() {
                *a = *a + state.amplitudes()[p * dim_sys + i].scale(amp);
            }
        }
        acc
    };
    let success_probability: T = projected.iter().map(|a| a.norm_sqr()).sum();
    if !(success_probability > T::lit(1e-24)) {
        return Err(Error::DegenerateAnsatz("post-selection has zero success probability".into()));
    }
    let state = StateVector::normalized(projected)?;
    Ok(LcuOutcome { state, success_probability })
}

fn shift_gates<T: Real>(gates: &[Gate<T>], offset: usize) -> Vec<Gate<T>> {
    gates
        .iter()
        .map(|g| match g {
            Gate::H(q) => Gate::H(q + offset),
            Gate::X(q) => Gate::X(q + offset),
            Gate::Ry(q, t) => Gate::Ry(q + offset, *t),
            Gate::Rz(q, t) => Gate::Rz(q + offset, *t),
            Gate::Cz(a, b) => Gate::Cz(a + offset, b + offset),
            Gate::Cnot { control, target } => Gate::Cnot { control: control + offset, target: target + offset },
            Gate::Zz(a, b, t) => Gate::Zz(a + offset, b + offset, *t),
            Gate::Controlled { controls, body } => Gate::Controlled {
                controls: controls.iter().map(|c| c + offset).collect(),
                body: shift_gates(body, offset),
            },
        })
        .collect()
}

/// `theta + delta * direction` with `direction` entries in `{-1, +1}`.
pub fn perturbed_params<T: Real>(params: &AnsatzParams<T>, delta: T, direction: &[T]) -> Result<AnsatzParams<T>> {
    if direction.len() != params.theta.len() {
        return Err(Error::InvalidParameter(format!(
            "direction has {} entries, ansatz has {}",
            direction.len(),
            params.theta.len()
        )));
    }
    if direction.iter().any(|d| *d != T::one() && *d != -T::one()) {
        return Err(Error::InvalidParameter("perturbation direction entries must be +1 or -1".into()));
    }
    let theta = params.theta.iter().zip(direction).map(|(t, d)| *t + delta * *d).collect();
    params.with_theta(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply_circuit, oracle::circuit_unitary, oracle_apply};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn zero_params_no_edges_is_identity() {
        let p = AnsatzParams::<f64>::zeros(4, 1, 3, vec![]).unwrap();
        let w = build_weight_state(&p).unwrap();
        assert_eq!(w, StateVector::zero(4).unwrap());
    }

    #[test]
    fn single_qubit_rotation_matches_matrix_exponential() {
        // exp(i (pi/4) Y) by its power series, applied to |0>.
        let mut p = AnsatzParams::<f64>::zeros(1, 1, 1, vec![]).unwrap();
        p.theta[0] = PI / 2.0;
        let w = build_weight_state(&p).unwrap();
        let a = PI / 4.0;
        // (iaY)^k: Y^2 = I, so the series splits into cos(a) I + i sin(a) Y
        // evaluated term by term.
        let (mut even, mut odd, mut term, mut k) = (0.0, 0.0, 1.0f64, 0u32);
        while term.abs() > 1e-18 || k < 4 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                even += sign * term;
            } else {
                odd += sign * term;
            }
            k += 1;
            term *= a / k as f64;
        }
        // i * odd * Y|0> = i * odd * (i|1>) = -odd |1>
        assert!((w.amplitudes()[0].re - even).abs() < 1e-12);
        assert!((w.amplitudes()[1].re + odd).abs() < 1e-12);
        assert!(w.amplitudes()[1].im.abs() < 1e-15);
    }

    #[test]
    fn entangler_empty_and_single_edge() {
        let c = build_entangler::<f64>(&[], 3).unwrap();
        assert!(c.is_empty());
        let c = build_entangler::<f64>(&[(0, 1)], 2).unwrap();
        let out = apply_circuit(&StateVector::basis(2, 3).unwrap(), &c).unwrap();
        assert_eq!(out.amplitudes()[3].re, -1.0);
        assert!(matches!(build_entangler::<f64>(&[(1, 1)], 2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bipartite_entangler_is_product_of_cz_diagonals() {
        let edges = bipartite_edges(&[0], &[1, 2, 3]);
        assert_eq!(edges.len(), 3);
        let u = circuit_unitary(&build_entangler::<f64>(&edges, 4).unwrap()).unwrap();
        for i in 0..16usize {
            let bits: Vec<usize> = (0..4).map(|q| (i >> (3 - q)) & 1).collect();
            let parity = edges.iter().map(|&(a, b)| bits[a] * bits[b]).sum::<usize>();
            let expected = if parity % 2 == 0 { 1.0 } else { -1.0 };
            for j in 0..16 {
                let v = u.get(i, j);
                if i == j {
                    assert!((v.re - expected).abs() < 1e-15 && v.im.abs() < 1e-15);
                } else {
                    assert_eq!(v.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn branch_circuit_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = AnsatzParams::<f64>::random(4, 2, 3, complete_edges(4), 2.0 * PI, &mut rng).unwrap();
        let c = build_branch_circuit(&p, 1).unwrap();
        let zero = StateVector::zero(4).unwrap();
        let a = apply_circuit(&zero, &c).unwrap();
        let b = oracle_apply(&zero, &c).unwrap();
        assert!(a.max_deviation(&b).unwrap() < 1e-9);
        assert!(matches!(build_branch_circuit(&p, 2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn single_branch_weight_state_is_branch_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = AnsatzParams::<f64>::random(3, 1, 4, complete_edges(3), 2.0 * PI, &mut rng).unwrap();
        let w = build_weight_state(&p).unwrap();
        let direct = apply_circuit(&StateVector::zero(3).unwrap(), &build_branch_circuit(&p, 0).unwrap()).unwrap();
        assert_eq!(w, direct);
    }

    #[test]
    fn duplicated_branch_gives_same_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let one = AnsatzParams::<f64>::random(3, 1, 2, complete_edges(3), 2.0 * PI, &mut rng).unwrap();
        let mut theta = one.theta.clone();
        theta.extend_from_slice(&one.theta);
        let two = AnsatzParams { n_hidden: 2, theta, ..one.clone() };
        let a = build_weight_state(&one).unwrap();
        let b = build_weight_state(&two).unwrap();
        assert!(a.max_deviation(&b).unwrap() < 1e-12);
    }

    #[test]
    fn cancelling_branches_are_degenerate() {
        // Branch 2: Ry(2 pi) = -I on qubit 0, so the sum is zero.
        let mut p = AnsatzParams::<f64>::zeros(1, 2, 1, vec![]).unwrap();
        let idx = p.index(1, 0, 0, Axis::Y);
        p.theta[idx] = 2.0 * PI;
        assert!(matches!(build_weight_state(&p), Err(Error::DegenerateAnsatz(_))));
        assert!(matches!(lcu_weight_state(&p), Err(Error::DegenerateAnsatz(_))));
    }

    #[test]
    fn lcu_single_branch_always_succeeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = AnsatzParams::<f64>::random(3, 1, 3, complete_edges(3), 2.0 * PI, &mut rng).unwrap();
        let out = lcu_weight_state(&p).unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-12);
        assert!(out.state.max_deviation(&build_weight_state(&p).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn lcu_orthogonal_branches_succeed_half_the_time() {
        // Branch 0 leaves |0>, branch 1 rotates to |1> up to sign: Ry(-pi)|0> = -|1>.
        let mut p = AnsatzParams::<f64>::zeros(1, 2, 1, vec![]).unwrap();
        let idx = p.index(1, 0, 0, Axis::Y);
        p.theta[idx] = PI;
        let out = lcu_weight_state(&p).unwrap();
        // ||(psi1 + psi2)/2||^2 with <psi1|psi2> = 0
        assert!((out.success_probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lcu_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n_hidden in [2usize, 3, 4] {
            let p = AnsatzParams::<f64>::random(3, n_hidden, 2, complete_edges(3), 2.0 * PI, &mut rng).unwrap();
            let out = lcu_weight_state(&p).unwrap();
            let direct = build_weight_state(&p).unwrap();
            assert!(out.state.max_deviation(&direct).unwrap() < 1e-9, "n_hidden = {n_hidden}");
            let sum = sum_states(&branch_states(&p).unwrap()).unwrap();
            let expected = sum.iter().map(|a| a.norm_sqr()).sum::<f64>() / (n_hidden * n_hidden) as f64;
            assert!((out.success_probability - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbation_shifts_every_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = AnsatzParams::<f64>::random(2, 1, 2, vec![(0, 1)], 1.0, &mut rng).unwrap();
        let ones = vec![1.0; p.n_params()];
        assert_eq!(perturbed_params(&p, 0.0, &ones).unwrap(), p);
        let q = perturbed_params(&p, 0.25, &ones).unwrap();
        for (a, b) in p.theta.iter().zip(&q.theta) {
            assert!((b - a - 0.25).abs() < 1e-15);
        }
        assert!(perturbed_params(&p, 0.1, &ones[1..]).is_err());
        let mut bad = ones.clone();
        bad[0] = 0.5;
        assert!(perturbed_params(&p, 0.1, &bad).is_err());
    }
}
