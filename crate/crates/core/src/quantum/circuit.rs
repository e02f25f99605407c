use std::fmt;

use num_complex::Complex64;

use super::state::{Matrix2, StateVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// 2×2 unitary of a rotation gate; `None` for CNOT.
    pub fn matrix(&self) -> Option<Matrix2> {
        let theta = match *self {
            Gate::Rx(_, t) | Gate::Ry(_, t) | Gate::Rz(_, t) => t,
            Gate::Cnot { .. } => return None,
        };
        let (s, c) = (theta / 2.0).sin_cos();
        let re = |x: f64| Complex64::new(x, 0.0);
        let im = |x: f64| Complex64::new(0.0, x);
        Some(match self {
            Gate::Rx(..) => [[re(c), im(-s)], [im(-s), re(c)]],
            Gate::Ry(..) => [[re(c), re(-s)], [re(s), re(c)]],
            _ => [[Complex64::new(c, -s), re(0.0)], [re(0.0), Complex64::new(c, s)]],
        })
    }

    pub fn apply(&self, psi: &mut StateVector) {
        match *self {
            Gate::Cnot { control, target } => psi.apply_cnot(control, target),
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => {
                psi.apply_single(q, &self.matrix().expect("rotation gate"))
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rx(q, t) => write!(f, "rx q{q} {t:.12}"),
            Gate::Ry(q, t) => write!(f, "ry q{q} {t:.12}"),
            Gate::Rz(q, t) => write!(f, "rz q{q} {t:.12}"),
            Gate::Cnot { control, target } => write!(f, "cx q{control} q{target}"),
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            gates: Vec::new(),
        }
    }

    /// Hardware-efficient ansatz: per layer an RY on every qubit followed by
    /// a CNOT ring q → (q+1) mod n. `thetas` is layer-major.
    pub fn ansatz(qubits: usize, thetas: &[f64]) -> Self {
        let mut c = Self::new(qubits);
        for layer in thetas.chunks(qubits) {
            for (q, &t) in layer.iter().enumerate() {
                c.gates.push(Gate::Ry(q, t));
            }
            if qubits > 1 {
                for q in 0..qubits {
                    c.gates.push(Gate::Cnot {
                        control: q,
                        target: (q + 1) % qubits,
                    });
                }
            }
        }
        c
    }

    /// Readout rotations: for each qubit with angles `[x, y, z]`, RZ(z) then
    /// RY(y) then RX(x), i.e. the operator RX·RY·RZ.
    pub fn readout(qubits: usize, angles: &[[f64; 3]]) -> Self {
        let mut c = Self::new(qubits);
        for (q, &[x, y, z]) in angles.iter().enumerate() {
            c.gates.push(Gate::Rz(q, z));
            c.gates.push(Gate::Ry(q, y));
            c.gates.push(Gate::Rx(q, x));
        }
        c
    }

    pub fn extend(&mut self, other: Circuit) {
        self.gates.extend(other.gates);
    }

    pub fn apply(&self, psi: &mut StateVector) {
        for g in &self.gates {
            g.apply(psi);
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
