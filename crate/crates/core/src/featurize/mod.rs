//! Chemical descriptors and graph assembly.

mod ewald;
mod graph;

pub use ewald::{
    auto_splitting, ewald_energies, ewald_site_energies, EwaldConfig, EwaldEnergies,
    COULOMB_CONSTANT,
};
pub use graph::{
    build_graph, build_graph_with_cutoff, column_names, featurize_structure, flatten_graph,
    read_graphs_json, write_dataset_csv, write_graphs_json, Edge, FeaturizedGraph, EDGE_FEATURES,
    NODE_FEATURES, NODE_LABELS, NUM_EDGE_FEATURES, NUM_NODES, NUM_NODE_FEATURES, NUM_PAIRS,
    ROW_WIDTH,
};

use thiserror::Error;

use crate::elements::ElementError;
use crate::structure::StructureError;

#[derive(Debug, Error)]
pub enum FeaturizeError {
    #[error("structure carries net charge {0}")]
    ChargeNotNeutral(i32),
    #[error("Ewald cutoffs failed to converge after {steps} growth steps")]
    ConvergenceFailure { steps: usize },
    #[error("degenerate geometry: interatomic distance {0} Å")]
    DegenerateGeometry(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Off-diagonal Coulomb-matrix element Z_i·Z_j / d.
pub fn coulomb_offdiagonal(z_i: f64, z_j: f64, distance: f64) -> Result<f64, FeaturizeError> {
    if !(distance > 0.0) {
        return Err(FeaturizeError::DegenerateGeometry(distance));
    }
    Ok(z_i * z_j / distance)
}
