//! Trainable models over standardized graphs.

use serde::{Deserialize, Serialize};

use super::{HarnessError, ModelKind};
use crate::featurize::{FeaturizedGraph, NUM_EDGE_FEATURES, NUM_NODES, NUM_NODE_FEATURES};
use crate::gnn::{assemble_weight_matrix, genconv_forward, GenConvParams, LayoutBlock};
use crate::quantum::{circuit_predict, QuantumParams, DEFAULT_QUBITS};

const AFFINE_INPUTS: usize = NUM_NODES * NUM_NODES;

/// Per-column z-scoring of node and edge features, fitted on training
/// graphs. Columns with zero spread are centered only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub node_mean: [f64; NUM_NODE_FEATURES],
    pub node_std: [f64; NUM_NODE_FEATURES],
    pub edge_mean: [f64; NUM_EDGE_FEATURES],
    pub edge_std: [f64; NUM_EDGE_FEATURES],
}

impl FeatureScaler {
    pub fn identity() -> Self {
        Self {
            node_mean: [0.0; NUM_NODE_FEATURES],
            node_std: [1.0; NUM_NODE_FEATURES],
            edge_mean: [0.0; NUM_EDGE_FEATURES],
            edge_std: [1.0; NUM_EDGE_FEATURES],
        }
    }

    pub fn fit(graphs: &[FeaturizedGraph]) -> Self {
        let nodes: Vec<&[f64; NUM_NODE_FEATURES]> =
            graphs.iter().flat_map(|g| g.node_features.iter()).collect();
        let edges: Vec<&[f64; NUM_EDGE_FEATURES]> = graphs
            .iter()
            .flat_map(|g| g.edges.iter().map(|e| &e.features))
            .collect();
        let (node_mean, node_std) = column_stats(&nodes);
        let (edge_mean, edge_std) = column_stats(&edges);
        Self {
            node_mean,
            node_std,
            edge_mean,
            edge_std,
        }
    }

    pub fn apply(&self, g: &FeaturizedGraph) -> FeaturizedGraph {
        let mut out = g.clone();
        for row in &mut out.node_features {
            for (k, x) in row.iter_mut().enumerate() {
                *x = (*x - self.node_mean[k]) / self.node_std[k];
            }
        }
        for e in &mut out.edges {
            for (k, x) in e.features.iter_mut().enumerate() {
                *x = (*x - self.edge_mean[k]) / self.edge_std[k];
            }
        }
        out
    }
}

fn column_stats<const K: usize>(rows: &[&[f64; K]]) -> ([f64; K], [f64; K]) {
    let mut mean = [0.0; K];
    let mut std = [1.0; K];
    if rows.is_empty() {
        return (mean, std);
    }
    let n = rows.len() as f64;
    for k in 0..K {
        mean[k] = rows.iter().map(|r| r[k]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / n;
        if var > 0.0 {
            std[k] = var.sqrt();
        }
    }
    (mean, std)
}

/// Parsed parameters of a hybrid or classical model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub genconv: GenConvParams,
    pub head: Head,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Head {
    Quantum(QuantumParams),
    /// `bias + Σ weights[k]·W_k` over the row-major unrolled weight matrix.
    Affine { weights: Vec<f64>, bias: f64 },
}

impl ModelParams {
    pub fn dim(kind: ModelKind, hidden: usize, layers: usize) -> Result<usize, HarnessError> {
        let head = match kind {
            ModelKind::Hybrid => QuantumParams::flat_len(DEFAULT_QUBITS, layers),
            ModelKind::Classical => AFFINE_INPUTS + 1,
            ModelKind::Gbdt => {
                return Err(HarnessError::Config("gbdt has no flat parameter vector".into()))
            }
        };
        Ok(GenConvParams::flat_len(hidden) + head)
    }

    /// Named blocks of the flat vector, GENConv first.
    pub fn layout(kind: ModelKind, hidden: usize, layers: usize) -> Result<Vec<LayoutBlock>, HarnessError> {
        let mut blocks = GenConvParams::layout(hidden);
        let base = GenConvParams::flat_len(hidden);
        match kind {
            ModelKind::Hybrid => {
                for b in QuantumParams::layout(DEFAULT_QUBITS, layers) {
                    blocks.push(LayoutBlock {
                        offset: b.offset + base,
                        ..b
                    });
                }
            }
            ModelKind::Classical => {
                blocks.push(LayoutBlock {
                    name: "affine_head.weights".into(),
                    offset: base,
                    len: AFFINE_INPUTS,
                });
                blocks.push(LayoutBlock {
                    name: "affine_head.bias".into(),
                    offset: base + AFFINE_INPUTS,
                    len: 1,
                });
            }
            ModelKind::Gbdt => return Err(HarnessError::Config("gbdt has no layout".into())),
        }
        Ok(blocks)
    }

    pub fn from_flat(
        flat: &[f64],
        kind: ModelKind,
        hidden: usize,
        layers: usize,
    ) -> Result<Self, HarnessError> {
        let dim = Self::dim(kind, hidden, layers)?;
        if flat.len() != dim {
            return Err(HarnessError::Config(format!(
                "parameter vector has length {}, model expects {dim}",
                flat.len()
            )));
        }
        let split = GenConvParams::flat_len(hidden);
        let genconv = GenConvParams::from_flat(&flat[..split], hidden)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let rest = &flat[split..];
        let head = match kind {
            ModelKind::Hybrid => Head::Quantum(
                QuantumParams::from_flat(rest, DEFAULT_QUBITS, layers)
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
            ),
            _ => Head::Affine {
                weights: rest[..AFFINE_INPUTS].to_vec(),
                bias: rest[AFFINE_INPUTS],
            },
        };
        Ok(Self { genconv, head })
    }

    /// Standardized-target prediction for an already standardized graph.
    /// `None` when the quantum encoding rejects the weight matrix.
    pub fn predict(&self, g: &FeaturizedGraph) -> Option<f64> {
        let w = assemble_weight_matrix(&genconv_forward(g, &self.genconv));
        let y = match &self.head {
            Head::Quantum(qp) => circuit_predict(&w, qp).ok()?,
            Head::Affine { weights, bias } => {
                bias + w.iter().flatten().zip(weights).map(|(x, k)| x * k).sum::<f64>()
            }
        };
        y.is_finite().then_some(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::Edge;

    #[test]
    fn dimensions_at_defaults() {
        assert_eq!(ModelParams::dim(ModelKind::Hybrid, 8, 2).unwrap(), 192 + 27);
        assert_eq!(ModelParams::dim(ModelKind::Classical, 8, 2).unwrap(), 192 + 26);
        for kind in [ModelKind::Hybrid, ModelKind::Classical] {
            let layout = ModelParams::layout(kind, 8, 2).unwrap();
            let last = layout.last().unwrap();
            assert_eq!(last.offset + last.len, ModelParams::dim(kind, 8, 2).unwrap());
        }
    }

    #[test]
    fn zero_parameters_fail_encoding_but_not_the_affine_head() {
        let g = FeaturizedGraph {
            node_features: [[1.0; 7]; 5],
            edges: vec![Edge {
                i: 0,
                j: 1,
                features: [1.0; 4],
            }],
            target: None,
        };
        let hybrid = ModelParams::from_flat(&vec![0.0; 219], ModelKind::Hybrid, 8, 2).unwrap();
        assert_eq!(hybrid.predict(&g), None);
        let classical = ModelParams::from_flat(&vec![0.0; 218], ModelKind::Classical, 8, 2).unwrap();
        assert_eq!(classical.predict(&g), Some(0.0));
    }

    #[test]
    fn scaler_standardizes_training_columns() {
        let mk = |x: f64| FeaturizedGraph {
            node_features: [[x; 7]; 5],
            edges: vec![Edge {
                i: 0,
                j: 2,
                features: [x + 1.0, 2.0, x, x],
            }],
            target: None,
        };
        let graphs = vec![mk(1.0), mk(3.0)];
        let s = FeatureScaler::fit(&graphs);
        assert_eq!(s.node_mean[0], 2.0);
        assert_eq!(s.node_std[0], 1.0);
        assert_eq!(s.edge_std[1], 1.0);
        let z = s.apply(&graphs[1]);
        assert_eq!(z.node_features[3][4], 1.0);
        assert_eq!(z.edges[0].features[1], 0.0);
    }
}
