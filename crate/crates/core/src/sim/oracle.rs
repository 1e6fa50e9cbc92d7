//! Dense-matrix reference simulator used to cross-check the stride kernels.
//!
//! Every gate is expanded to its full `2^n x 2^n` unitary from Pauli
//! matrices and projectors via Kronecker products. Nothing here shares code
//! with the kernels in `kernel.rs`.

use num_complex::Complex;

use super::gate::{Circuit, Gate};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register the oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex<T>]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut out = Self::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out.data[(i * other.dim + k) * d + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn max_deviation(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

fn eye2<T: Real>() -> DenseMatrix<T> {
    DenseMatrix::identity(2)
}

fn pauli_x<T: Real>() -> DenseMatrix<T> {
    DenseMatrix::from_rows(&[&[c(0., 0.), c(1., 0.)], &[c(1., 0.), c(0., 0.)]])
}

fn pauli_y<T: Real>() -> DenseMatrix<T> {
    DenseMatrix::from_rows(&[&[c(0., 0.), c(0., -1.)], &[c(0., 1.), c(0., 0.)]])
}

fn pauli_z<T: Real>() -> DenseMatrix<T> {
    DenseMatrix::from_rows(&[&[c(1., 0.), c(0., 0.)], &[c(0., 0.), c(-1., 0.)]])
}

fn proj1<T: Real>() -> DenseMatrix<T> {
    DenseMatrix::from_rows(&[&[c(0., 0.), c(0., 0.)], &[c(0., 0.), c(1., 0.)]])
}

fn hadamard<T: Real>() -> DenseMatrix<T> {
    pauli_x::<T>().add(&pauli_z()).scale(Complex::new(T::FRAC_1_SQRT_2(), T::zero()))
}

/// `exp(-i theta P / 2) = cos(theta/2) I - i sin(theta/2) P` for an involutory `P`.
fn pauli_rotation<T: Real>(pauli: &DenseMatrix<T>, theta: T) -> DenseMatrix<T> {
    let half = theta / T::lit(2.0);
    DenseMatrix::identity(pauli.dim())
        .scale(Complex::new(half.cos(), T::zero()))
        .add(&pauli.scale(Complex::new(T::zero(), -half.sin())))
}

/// Kronecker product over the whole register with `ops[q]` on listed qubits
/// and identity elsewhere (qubit 0 leftmost).
fn embed<T: Real>(n: usize, ops: &[(usize, DenseMatrix<T>)]) -> DenseMatrix<T> {
    let mut out = DenseMatrix::identity(1);
    for q in 0..n {
        let factor = ops.iter().find(|(idx, _)| *idx == q).map(|(_, m)| m.clone()).unwrap_or_else(eye2);
        out = out.kron(&factor);
    }
    out
}

/// Full `2^n x 2^n` unitary of one gate.
pub fn gate_matrix<T: Real>(gate: &Gate<T>, n: usize) -> Result<DenseMatrix<T>> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("dense oracle supports at most {ORACLE_MAX_QUBITS} qubits, got {n}")));
    }
    gate.validate(n)?;
    let dim = 1usize << n;
    Ok(match gate {
        Gate::H(q) => embed(n, &[(*q, hadamard())]),
        Gate::X(q) => embed(n, &[(*q, pauli_x())]),
        Gate::Ry(q, t) => embed(n, &[(*q, pauli_rotation(&pauli_y(), *t))]),
        Gate::Rz(q, t) => embed(n, &[(*q, pauli_rotation(&pauli_z(), *t))]),
        Gate::Cz(a, b) => {
            let both = embed(n, &[(*a, proj1()), (*b, proj1())]);
            DenseMatrix::identity(dim).add(&both.scale(c(-2.0, 0.0)))
        }
        Gate::Cnot { control, target } => {
            let p1 = embed(n, &[(*control, proj1())]);
            let flip = embed(n, &[(*control, proj1()), (*target, pauli_x())]);
            DenseMatrix::identity(dim).add(&p1.scale(c(-1.0, 0.0))).add(&flip)
        }
        Gate::Zz(a, b, t) => pauli_rotation(&embed(n, &[(*a, pauli_z()), (*b, pauli_z())]), *t),
        Gate::Controlled { controls, body } => {
            let ops: Vec<_> = controls.iter().map(|q| (*q, proj1())).collect();
            let p = embed(n, &ops);
            let mut u = DenseMatrix::identity(dim);
            for g in body {
                u = gate_matrix(g, n)?.matmul(&u);
            }
            // I - P + P U
            DenseMatrix::identity(dim).add(&p.scale(c(-1.0, 0.0))).add(&p.matmul(&u))
        }
    })
}

/// Dense unitary of a whole circuit.
pub fn circuit_unitary<T: Real>(circuit: &Circuit<T>) -> Result<DenseMatrix<T>> {
    let n = circuit.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("dense oracle supports at most {ORACLE_MAX_QUBITS} qubits, got {n}")));
    }
    let mut u = DenseMatrix::identity(1 << n);
    for g in circuit.gates() {
        u = gate_matrix(g, n)?.matmul(&u);
    }
    Ok(u)
}

/// Applies `circuit` by dense matrix-vector products, one gate at a time.
pub fn oracle_apply<T: Real>(state: &StateVector<T>, circuit: &Circuit<T>) -> Result<StateVector<T>> {
    let n = state.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("dense oracle supports at most {ORACLE_MAX_QUBITS} qubits, got {n}")));
    }
    if circuit.n_qubits() != n {
        return Err(Error::Dimension { expected: n, found: circuit.n_qubits() });
    }
    let mut v = state.amplitudes().to_vec();
    for g in circuit.gates() {
        v = gate_matrix(g, n)?.matvec(&v);
    }
    StateVector::from_amplitudes(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::apply_gate;

    #[test]
    fn single_hadamard_matches_kernel() {
        let s = StateVector::<f64>::zero(1).unwrap();
        let c = Circuit::from_gates(1, vec![Gate::H(0)]).unwrap();
        let a = oracle_apply(&s, &c).unwrap();
        let b = apply_gate(&s, &Gate::H(0)).unwrap();
        assert!(a.max_deviation(&b).unwrap() < 1e-15);
    }

    #[test]
    fn empty_circuit_is_identity_matrix() {
        let c = Circuit::<f64>::new(3);
        let u = circuit_unitary(&c).unwrap();
        assert_eq!(u, DenseMatrix::identity(8));
    }

    #[test]
    fn gate_matrices_are_unitary() {
        let gates = vec![
            Gate::H(1),
            Gate::Ry(0, 0.37f64),
            Gate::Rz(2, -1.2),
            Gate::Cz(0, 2),
            Gate::Cnot { control: 2, target: 0 },
            Gate::Zz(1, 2, 0.9),
            Gate::Controlled { controls: vec![0], body: vec![Gate::Ry(1, 0.4), Gate::Cnot { control: 1, target: 2 }] },
        ];
        for g in gates {
            let u = gate_matrix(&g, 3).unwrap();
            let prod = u.adjoint().matmul(&u);
            assert!(prod.max_deviation(&DenseMatrix::identity(8)) < 1e-14, "{g:?}");
        }
    }

    #[test]
    fn refuses_large_registers() {
        let s = StateVector::<f64>::zero(11).unwrap();
        let c = Circuit::new(11);
        assert!(matches!(oracle_apply(&s, &c), Err(Error::ResourceLimit(_))));
    }
}
