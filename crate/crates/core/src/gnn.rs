//! Forward-only GENConv layer.
//!
//! One round of edge-aware message passing with softmax aggregation and
//! message normalization, reduced to one scalar per node and per edge. The
//! scalars form the symmetric weight matrix fed to the quantum layer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::featurize::{FeaturizedGraph, NUM_EDGE_FEATURES, NUM_NODES, NUM_NODE_FEATURES};

pub const DEFAULT_HIDDEN: usize = 8;
pub const DEFAULT_EPS: f64 = 1e-7;
const NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GnnError {
    #[error("empty neighborhood")]
    EmptyNeighborhood,
    #[error("parameter vector has length {found}, layout for hidden size {hidden} needs {expected}")]
    LayoutMismatch {
        hidden: usize,
        expected: usize,
        found: usize,
    },
}

/// Fully connected layer, weights stored row-major as `outputs × inputs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    pub fn param_count(inputs: usize, outputs: usize) -> usize {
        inputs * outputs + outputs
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.inputs);
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }

    fn read(inputs: usize, outputs: usize, flat: &[f64]) -> Self {
        let (w, b) = flat.split_at(inputs * outputs);
        Self {
            inputs,
            outputs,
            weights: w.to_vec(),
            bias: b.to_vec(),
        }
    }

    fn write(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.weights);
        out.extend_from_slice(&self.bias);
    }
}

/// Named block of a flat parameter vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutBlock {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

/// Trainable GENConv parameters.
///
/// Flat layout, in order: `edge_encoder` (H×4 weights, H biases),
/// `node_encoder` (H×7, H), `beta`, `s`, `update_dense` (H×H, H),
/// `node_head` (1×H, 1), `edge_head` (1×4, 1). Total H² + 15H + 8.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConvParams {
    pub hidden: usize,
    pub edge_encoder: Dense,
    pub node_encoder: Dense,
    /// Softmax inverse temperature.
    pub beta: f64,
    /// Message scaling factor.
    pub s: f64,
    pub update_dense: Dense,
    pub node_head: Dense,
    pub edge_head: Dense,
}

impl GenConvParams {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            hidden,
            edge_encoder: Dense::zeros(NUM_EDGE_FEATURES, hidden),
            node_encoder: Dense::zeros(NUM_NODE_FEATURES, hidden),
            beta: 0.0,
            s: 0.0,
            update_dense: Dense::zeros(hidden, hidden),
            node_head: Dense::zeros(hidden, 1),
            edge_head: Dense::zeros(NUM_EDGE_FEATURES, 1),
        }
    }

    pub fn layout(hidden: usize) -> Vec<LayoutBlock> {
        let sizes = [
            ("edge_encoder", Dense::param_count(NUM_EDGE_FEATURES, hidden)),
            ("node_encoder", Dense::param_count(NUM_NODE_FEATURES, hidden)),
            ("beta", 1),
            ("s", 1),
            ("update_dense", Dense::param_count(hidden, hidden)),
            ("node_head", Dense::param_count(hidden, 1)),
            ("edge_head", Dense::param_count(NUM_EDGE_FEATURES, 1)),
        ];
        let mut offset = 0;
        sizes
            .into_iter()
            .map(|(name, len)| {
                let block = LayoutBlock {
                    name: name.to_string(),
                    offset,
                    len,
                };
                offset += len;
                block
            })
            .collect()
    }

    pub fn flat_len(hidden: usize) -> usize {
        hidden * hidden + 15 * hidden + 8
    }

    pub fn from_flat(flat: &[f64], hidden: usize) -> Result<Self, GnnError> {
        let expected = Self::flat_len(hidden);
        if flat.len() != expected {
            return Err(GnnError::LayoutMismatch {
                hidden,
                expected,
                found: flat.len(),
            });
        }
        let mut rest = flat;
        let mut take = |n: usize| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            head
        };
        let edge_encoder = Dense::read(NUM_EDGE_FEATURES, hidden, take(5 * hidden));
        let node_encoder = Dense::read(NUM_NODE_FEATURES, hidden, take(8 * hidden));
        let beta = take(1)[0];
        let s = take(1)[0];
        let update_dense = Dense::read(hidden, hidden, take(hidden * hidden + hidden));
        let node_head = Dense::read(hidden, 1, take(hidden + 1));
        let edge_head = Dense::read(NUM_EDGE_FEATURES, 1, take(NUM_EDGE_FEATURES + 1));
        Ok(Self {
            hidden,
            edge_encoder,
            node_encoder,
            beta,
            s,
            update_dense,
            node_head,
            edge_head,
        })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::flat_len(self.hidden));
        self.edge_encoder.write(&mut out);
        self.node_encoder.write(&mut out);
        out.push(self.beta);
        out.push(self.s);
        self.update_dense.write(&mut out);
        self.node_head.write(&mut out);
        self.edge_head.write(&mut out);
        out
    }
}

/// One scalar per node and per edge, distilled by the layer.
#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateGraph {
    pub node_scalars: [f64; NUM_NODES],
    /// `(i, j, value)` with `i < j`, in the input graph's edge order.
    pub edge_scalars: Vec<(usize, usize, f64)>,
}

/// `relu(h_u + e_uv) + eps`, elementwise.
pub fn message(h_u: &[f64], e_uv: &[f64], eps: f64) -> Vec<f64> {
    h_u.iter()
        .zip(e_uv)
        .map(|(h, e)| (h + e).max(0.0) + eps)
        .collect()
}

/// Softmax-weighted sum over neighbors, independently per coordinate.
///
/// `beta = 0` is the mean; large `beta` approaches the elementwise max.
pub fn softmax_aggregate(messages: &[Vec<f64>], beta: f64) -> Result<Vec<f64>, GnnError> {
    let first = messages.first().ok_or(GnnError::EmptyNeighborhood)?;
    let dim = first.len();
    let mut out = vec![0.0; dim];
    for (k, slot) in out.iter_mut().enumerate() {
        let peak = messages
            .iter()
            .map(|m| beta * m[k])
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for m in messages {
            let w = (beta * m[k] - peak).exp();
            num += w * m[k];
            den += w;
        }
        *slot = num / den;
    }
    Ok(out)
}

/// Vertex update `relu(dense(h + s·‖h‖·m/‖m‖))`. A message with norm below
/// 1e-12 contributes nothing.
pub fn message_norm_update(h_v: &[f64], m_v: &[f64], s: f64, update_dense: &Dense) -> Vec<f64> {
    let h_norm = l2(h_v);
    let m_norm = l2(m_v);
    let input: Vec<f64> = if m_norm < NORM_FLOOR {
        h_v.to_vec()
    } else {
        let factor = s * h_norm / m_norm;
        h_v.iter().zip(m_v).map(|(h, m)| h + factor * m).collect()
    };
    update_dense
        .apply(&input)
        .into_iter()
        .map(|x| x.max(0.0))
        .collect()
}

pub fn genconv_forward(g: &FeaturizedGraph, p: &GenConvParams) -> IntermediateGraph {
    genconv_forward_eps(g, p, DEFAULT_EPS)
}

/// Forward pass from a flat parameter vector.
pub fn genconv_forward_flat(
    g: &FeaturizedGraph,
    flat: &[f64],
    hidden: usize,
) -> Result<IntermediateGraph, GnnError> {
    Ok(genconv_forward(g, &GenConvParams::from_flat(flat, hidden)?))
}

pub fn genconv_forward_eps(g: &FeaturizedGraph, p: &GenConvParams, eps: f64) -> IntermediateGraph {
    let hidden: Vec<Vec<f64>> = g
        .node_features
        .iter()
        .map(|x| p.node_encoder.apply(x))
        .collect();
    let encoded_edges: Vec<Vec<f64>> = g
        .edges
        .iter()
        .map(|e| p.edge_encoder.apply(&e.features))
        .collect();

    let mut node_scalars = [0.0; NUM_NODES];
    for (v, scalar) in node_scalars.iter_mut().enumerate() {
        let messages: Vec<Vec<f64>> = g
            .edges
            .iter()
            .zip(&encoded_edges)
            .filter_map(|(e, enc)| {
                let u = if e.i == v {
                    e.j
                } else if e.j == v {
                    e.i
                } else {
                    return None;
                };
                Some(message(&hidden[u], enc, eps))
            })
            .collect();
        let aggregated = softmax_aggregate(&messages, p.beta)
            .unwrap_or_else(|_| vec![0.0; p.hidden]);
        let updated = message_norm_update(&hidden[v], &aggregated, p.s, &p.update_dense);
        *scalar = p.node_head.apply(&updated)[0];
    }

    let edge_scalars = g
        .edges
        .iter()
        .map(|e| (e.i, e.j, p.edge_head.apply(&e.features)[0]))
        .collect();
    IntermediateGraph {
        node_scalars,
        edge_scalars,
    }
}

/// Symmetric matrix with node scalars on the diagonal and edge scalars off
/// it; absent edges are 0.
pub fn assemble_weight_matrix(ig: &IntermediateGraph) -> [[f64; NUM_NODES]; NUM_NODES] {
    let mut w = [[0.0; NUM_NODES]; NUM_NODES];
    for (i, &x) in ig.node_scalars.iter().enumerate() {
        w[i][i] = x;
    }
    for &(i, j, x) in &ig.edge_scalars {
        w[i][j] = x;
        w[j][i] = x;
    }
    w
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
