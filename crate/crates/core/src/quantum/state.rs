use num_complex::Complex64;

use super::QuantumError;

const ZERO_NORM: f64 = 1e-12;

pub type Matrix2 = [[Complex64; 2]; 2];

/// Pure state of `n` qubits.
///
/// Basis index `i` maps to qubit values big-endian: qubit 0 is the most
/// significant bit of `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩
    pub fn zero(qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { qubits, amplitudes }
    }

    /// Wraps raw amplitudes; they must already have unit norm.
    pub fn from_amplitudes(qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amplitudes.len() != 1 << qubits {
            return Err(QuantumError::DimensionMismatch {
                expected: 1 << qubits,
                found: amplitudes.len(),
            });
        }
        let state = Self { qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<(), QuantumError> {
        if qubit >= self.qubits {
            return Err(QuantumError::IndexOutOfRange {
                qubit,
                qubits: self.qubits,
            });
        }
        Ok(())
    }

    /// Applies a 2×2 unitary to one qubit.
    pub fn apply_single(&mut self, qubit: usize, u: &Matrix2) {
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | mask];
            self.amplitudes[i] = u[0][0] * a0 + u[0][1] * a1;
            self.amplitudes[i | mask] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let c = self.mask(control);
        let t = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    /// ⟨Z_q⟩ = Σ|a_i|²·(±1 by bit q of i).
    pub fn pauli_z_expectation(&self, qubit: usize) -> Result<f64, QuantumError> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }
}

/// Loads `x / ‖x‖₂` into the first `x.len()` amplitudes, zero-padding the
/// rest.
pub fn amplitude_encode(x: &[f64], qubits: usize) -> Result<StateVector, QuantumError> {
    let capacity = 1usize << qubits;
    if x.len() > capacity {
        return Err(QuantumError::TooLong {
            len: x.len(),
            capacity,
        });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm >= ZERO_NORM) {
        return Err(QuantumError::ZeroVector);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); capacity];
    for (a, v) in amplitudes.iter_mut().zip(x) {
        *a = Complex64::new(v / norm, 0.0);
    }
    Ok(StateVector { qubits, amplitudes })
}

pub fn pauli_z_expectation(psi: &StateVector, qubit: usize) -> Result<f64, QuantumError> {
    psi.pauli_z_expectation(qubit)
}
