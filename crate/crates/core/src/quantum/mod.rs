//! Exact statevector simulation of the quantum layer.
//!
//! Pipeline: unrolled weight matrix → amplitude encoding → RY/CNOT-ring
//! ansatz → per-qubit RZ·RY·RX readout → mean ⟨Z⟩ → affine map to eV.

mod circuit;
mod state;

pub use circuit::{Circuit, Gate};
pub use state::{amplitude_encode, pauli_z_expectation, Matrix2, StateVector};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gnn::LayoutBlock;

pub const DEFAULT_QUBITS: usize = 5;
pub const DEFAULT_LAYERS: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("cannot amplitude-encode a zero vector")]
    ZeroVector,
    #[error("vector of length {len} does not fit in {capacity} amplitudes")]
    TooLong { len: usize, capacity: usize },
    #[error("qubit {qubit} out of range for a {qubits}-qubit register")]
    IndexOutOfRange { qubit: usize, qubits: usize },
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state norm² is {0}, expected 1")]
    NotNormalized(f64),
}

/// Trainable circuit parameters.
///
/// Flat layout: `ansatz_thetas` (L·n, layer-major), `readout_angles`
/// (n × [rx, ry, rz]), `scale`, `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    pub qubits: usize,
    pub layers: usize,
    pub ansatz_thetas: Vec<f64>,
    pub readout_angles: Vec<[f64; 3]>,
    pub scale: f64,
    pub offset: f64,
}

impl QuantumParams {
    pub fn zeros(qubits: usize, layers: usize) -> Self {
        Self {
            qubits,
            layers,
            ansatz_thetas: vec![0.0; qubits * layers],
            readout_angles: vec![[0.0; 3]; qubits],
            scale: 0.0,
            offset: 0.0,
        }
    }

    pub fn flat_len(qubits: usize, layers: usize) -> usize {
        layers * qubits + 3 * qubits + 2
    }

    pub fn layout(qubits: usize, layers: usize) -> Vec<LayoutBlock> {
        let blocks = [
            ("ansatz_thetas", layers * qubits),
            ("readout_angles", 3 * qubits),
            ("scale", 1),
            ("offset", 1),
        ];
        let mut offset = 0;
        blocks
            .into_iter()
            .map(|(name, len)| {
                let b = LayoutBlock {
                    name: name.into(),
                    offset,
                    len,
                };
                offset += len;
                b
            })
            .collect()
    }

    pub fn from_flat(flat: &[f64], qubits: usize, layers: usize) -> Result<Self, QuantumError> {
        let expected = Self::flat_len(qubits, layers);
        if flat.len() != expected {
            return Err(QuantumError::DimensionMismatch {
                expected,
                found: flat.len(),
            });
        }
        let (thetas, rest) = flat.split_at(layers * qubits);
        let (angles, rest) = rest.split_at(3 * qubits);
        Ok(Self {
            qubits,
            layers,
            ansatz_thetas: thetas.to_vec(),
            readout_angles: angles.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
            scale: rest[0],
            offset: rest[1],
        })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = self.ansatz_thetas.clone();
        out.extend(self.readout_angles.iter().flatten());
        out.push(self.scale);
        out.push(self.offset);
        out
    }

    /// Gate list applied after amplitude loading.
    pub fn circuit(&self) -> Circuit {
        let mut c = Circuit::ansatz(self.qubits, &self.ansatz_thetas);
        c.extend(Circuit::readout(self.qubits, &self.readout_angles));
        c
    }
}

pub fn apply_ansatz(mut psi: StateVector, thetas: &[f64]) -> Result<StateVector, QuantumError> {
    let n = psi.qubits();
    if n == 0 || thetas.len() % n != 0 {
        return Err(QuantumError::DimensionMismatch {
            expected: n,
            found: thetas.len(),
        });
    }
    Circuit::ansatz(n, thetas).apply(&mut psi);
    Ok(psi)
}

pub fn apply_readout(mut psi: StateVector, angles: &[[f64; 3]]) -> Result<StateVector, QuantumError> {
    if angles.len() != psi.qubits() {
        return Err(QuantumError::DimensionMismatch {
            expected: psi.qubits(),
            found: angles.len(),
        });
    }
    Circuit::readout(psi.qubits(), angles).apply(&mut psi);
    Ok(psi)
}

/// Mean single-qubit ⟨Z⟩ of the circuit output for an already encoded state.
pub fn mean_z(psi: &StateVector) -> f64 {
    let n = psi.qubits();
    (0..n)
        .map(|q| psi.pauli_z_expectation(q).expect("qubit in range"))
        .sum::<f64>()
        / n as f64
}

/// Energy prediction for a weight matrix: `scale · mean⟨Z⟩ + offset`.
pub fn circuit_predict<const N: usize>(
    w: &[[f64; N]; N],
    qp: &QuantumParams,
) -> Result<f64, QuantumError> {
    let unrolled: Vec<f64> = w.iter().flatten().copied().collect();
    predict_vector(&unrolled, qp)
}

/// Like [`circuit_predict`] for an already unrolled vector.
pub fn predict_vector(x: &[f64], qp: &QuantumParams) -> Result<f64, QuantumError> {
    let psi = amplitude_encode(x, qp.qubits)?;
    let psi = apply_ansatz(psi, &qp.ansatz_thetas)?;
    let psi = apply_readout(psi, &qp.readout_angles)?;
    Ok(qp.scale * mean_z(&psi) + qp.offset)
}
