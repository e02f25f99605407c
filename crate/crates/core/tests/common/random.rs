//! Seeded random instances shared by the integration and acceptance suites.

use hyqgnn::featurize::{Edge, FeaturizedGraph};
use hyqgnn::quantum::Gate;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracles::{cnot, on_qubit, rx, ry, rz, Dense};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn gates(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Gate> {
    (0..count)
        .map(|_| {
            let q = rng.random_range(0..n);
            let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI) * 2.0;
            let kinds = if n > 1 { 4 } else { 3 };
            match rng.random_range(0..kinds) {
                0 => Gate::Rx(q, t),
                1 => Gate::Ry(q, t),
                2 => Gate::Rz(q, t),
                _ => {
                    let target = (q + rng.random_range(1..n)) % n;
                    Gate::Cnot { control: q, target }
                }
            }
        })
        .collect()
}

/// Dense unitary of one gate, built from the oracle primitives.
pub fn gate_unitary(g: &Gate, n: usize) -> Dense {
    match *g {
        Gate::Rx(q, t) => on_qubit(&rx(t), q, n),
        Gate::Ry(q, t) => on_qubit(&ry(t), q, n),
        Gate::Rz(q, t) => on_qubit(&rz(t), q, n),
        Gate::Cnot { control, target } => cnot(control, target, n),
    }
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Random five-node graph; each of the ten pairs is kept with probability
/// `keep`.
pub fn graph(rng: &mut ChaCha8Rng, keep: f64) -> FeaturizedGraph {
    let mut node_features = [[0.0; 7]; 5];
    for row in &mut node_features {
        for x in row.iter_mut() {
            *x = rng.random_range(-2.0..2.0);
        }
    }
    let mut edges = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            if rng.random_bool(keep) {
                edges.push(Edge {
                    i,
                    j,
                    features: [
                        rng.random_range(0.1..2.0),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(0.0..2.0),
                        rng.random_range(0.0..2.0),
                    ],
                });
            }
        }
    }
    FeaturizedGraph {
        node_features,
        edges,
        target: None,
    }
}

pub fn edge_tuples(g: &FeaturizedGraph) -> Vec<(usize, usize, [f64; 4])> {
    g.edges.iter().map(|e| (e.i, e.j, e.features)).collect()
}
