use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 26;

/// Index bit that carries `qubit` in an `n_qubits` register.
///
/// Qubit 0 is the most significant bit of the basis index, so the basis
/// state `|q0 q1 ... q_{n-1}>` has index `q0 * 2^(n-1) + ... + q_{n-1}`.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Pure state of `n_qubits` qubits as a dense amplitude array of length `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps an amplitude array as given. The length must be a power of two;
    /// the norm is not touched.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("amplitude array length {dim} is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_register(n_qubits)?;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let mut state = Self::from_amplitudes(amplitudes)?;
        let norm = state.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector".into()));
        }
        state.scale(T::one() / norm);
        Ok(state)
    }

    /// Haar-random pure state, drawn as a normalized complex Gaussian vector.
    pub fn haar_random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_register(n_qubits)?;
        let amplitudes = (0..1usize << n_qubits)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::normalized(amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub(crate) fn scale(&mut self, factor: T) {
        for a in &mut self.amplitudes {
            *a = a.scale(factor);
        }
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|self> (x) |other>`, with `self` occupying the leading (most significant) qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_register(self.n_qubits + other.n_qubits)?;
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        Ok(Self { n_qubits: self.n_qubits + other.n_qubits, amplitudes })
    }

    /// Largest absolute amplitude difference against another state of equal size.
    pub fn max_deviation(&self, other: &Self) -> Result<T> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max))
    }

    /// Euclidean distance `|| |self> - |other> ||`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt())
    }
}

pub(crate) fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("register must have at least one qubit".into()));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "{n_qubits} qubits exceeds the dense simulator limit of {MAX_QUBITS}"
        )));
    }
    Ok(())
}
