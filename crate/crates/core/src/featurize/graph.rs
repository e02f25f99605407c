//! Crystal graph construction and tabular flattening.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{coulomb_offdiagonal, ewald_site_energies, EwaldConfig, FeaturizeError};
use crate::elements::lookup_element_properties;
use crate::structure::{min_image_distance, CrystalStructure};

pub const NUM_NODES: usize = 5;
pub const NUM_NODE_FEATURES: usize = 7;
pub const NUM_EDGE_FEATURES: usize = 4;
/// Unordered site pairs of a five-node graph.
pub const NUM_PAIRS: usize = NUM_NODES * (NUM_NODES - 1) / 2;
pub const ROW_WIDTH: usize = NUM_NODES * NUM_NODE_FEATURES + NUM_PAIRS * NUM_EDGE_FEATURES;

pub const NODE_LABELS: [&str; NUM_NODES] = ["A", "B", "O1", "O2", "O3"];
pub const NODE_FEATURES: [&str; NUM_NODE_FEATURES] = [
    "atomic_number",
    "ewald_energy",
    "electronegativity",
    "electron_affinity",
    "first_ionization",
    "cationic_radius",
    "anionic_radius",
];
pub const EDGE_FEATURES: [&str; NUM_EDGE_FEATURES] = [
    "inverse_distance",
    "coulomb",
    "delta_electronegativity",
    "delta_electron_affinity",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub features: [f64; NUM_EDGE_FEATURES],
}

/// Five-node perovskite graph. Nodes are ordered A, B, O1, O2, O3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeaturizedGraph {
    pub node_features: [[f64; NUM_NODE_FEATURES]; NUM_NODES],
    pub edges: Vec<Edge>,
    #[serde(rename = "target_ev", default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
}

impl FeaturizedGraph {
    pub fn validate(&self) -> Result<(), FeaturizeError> {
        let mut seen = [[false; NUM_NODES]; NUM_NODES];
        for e in &self.edges {
            if e.i >= e.j || e.j >= NUM_NODES {
                return Err(FeaturizeError::InvalidGraph(format!(
                    "edge ({}, {}) must satisfy i < j < {NUM_NODES}",
                    e.i, e.j
                )));
            }
            if seen[e.i][e.j] {
                return Err(FeaturizeError::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.i, e.j
                )));
            }
            seen[e.i][e.j] = true;
            if !(e.features[0] > 0.0) {
                return Err(FeaturizeError::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive inverse distance",
                    e.i, e.j
                )));
            }
            if e.features.iter().any(|x| !x.is_finite()) {
                return Err(FeaturizeError::InvalidGraph(format!(
                    "edge ({}, {}) has non-finite features",
                    e.i, e.j
                )));
            }
        }
        if self.node_features.iter().flatten().any(|x| !x.is_finite()) {
            return Err(FeaturizeError::InvalidGraph("non-finite node feature".into()));
        }
        Ok(())
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().find(|e| e.i == i && e.j == j)
    }
}

/// Builds the complete five-node graph of an ABO3 structure whose
/// oxidation states are already assigned.
pub fn build_graph(
    structure: &CrystalStructure,
    cfg: &EwaldConfig,
) -> Result<FeaturizedGraph, FeaturizeError> {
    build_graph_with_cutoff(structure, cfg, None)
}

/// Like [`build_graph`], dropping edges longer than `cutoff` Å.
pub fn build_graph_with_cutoff(
    structure: &CrystalStructure,
    cfg: &EwaldConfig,
    cutoff: Option<f64>,
) -> Result<FeaturizedGraph, FeaturizeError> {
    let order = structure.perovskite_order()?;
    let ewald = ewald_site_energies(structure, cfg)?;

    let mut props = Vec::with_capacity(NUM_NODES);
    let mut node_features = [[0.0; NUM_NODE_FEATURES]; NUM_NODES];
    for (node, &site) in order.iter().enumerate() {
        let p = lookup_element_properties(&structure.sites[site].element)?;
        node_features[node] = [
            p.atomic_number as f64,
            ewald[site],
            p.electronegativity,
            p.electron_affinity,
            p.first_ionization,
            p.cationic_radius,
            p.anionic_radius,
        ];
        props.push(p);
    }

    let mut edges = Vec::with_capacity(NUM_PAIRS);
    for i in 0..NUM_NODES {
        for j in i + 1..NUM_NODES {
            let d = min_image_distance(
                &structure.lattice,
                structure.sites[order[i]].frac,
                structure.sites[order[j]].frac,
            );
            if d <= 0.0 {
                return Err(FeaturizeError::DegenerateGeometry(d));
            }
            if cutoff.is_some_and(|c| d > c) {
                continue;
            }
            let (a, b) = (props[i], props[j]);
            edges.push(Edge {
                i,
                j,
                features: [
                    1.0 / d,
                    coulomb_offdiagonal(a.atomic_number as f64, b.atomic_number as f64, d)?,
                    (a.electronegativity - b.electronegativity).abs(),
                    (a.electron_affinity - b.electron_affinity).abs(),
                ],
            });
        }
    }

    Ok(FeaturizedGraph {
        node_features,
        edges,
        target: structure.target_energy,
    })
}

/// Assigns ABO3 oxidation states on a copy of `structure` and builds its graph.
pub fn featurize_structure(
    structure: &CrystalStructure,
    cfg: &EwaldConfig,
    cutoff: Option<f64>,
) -> Result<FeaturizedGraph, FeaturizeError> {
    let mut charged = structure.clone();
    charged.assign_perovskite_oxidation_states()?;
    build_graph_with_cutoff(&charged, cfg, cutoff)
}

/// Column names of [`flatten_graph`] rows, e.g. `first_ionization(A)` or
/// `coulomb(B-O2)`.
pub fn column_names() -> Vec<String> {
    let mut names = Vec::with_capacity(ROW_WIDTH);
    for label in NODE_LABELS {
        for feature in NODE_FEATURES {
            names.push(format!("{feature}({label})"));
        }
    }
    for i in 0..NUM_NODES {
        for j in i + 1..NUM_NODES {
            for feature in EDGE_FEATURES {
                names.push(format!("{feature}({}-{})", NODE_LABELS[i], NODE_LABELS[j]));
            }
        }
    }
    names
}

/// Node features (node-major) followed by edge features for all ten pairs in
/// lexicographic order. Pruned edges contribute zeros.
pub fn flatten_graph(g: &FeaturizedGraph) -> Vec<f64> {
    let mut row: Vec<f64> = g.node_features.iter().flatten().copied().collect();
    for i in 0..NUM_NODES {
        for j in i + 1..NUM_NODES {
            match g.edge(i, j) {
                Some(e) => row.extend_from_slice(&e.features),
                None => row.extend_from_slice(&[0.0; NUM_EDGE_FEATURES]),
            }
        }
    }
    row
}

/// CSV with the flattened columns plus `target_ev` (empty when unknown).
pub fn write_dataset_csv(
    path: impl AsRef<Path>,
    graphs: &[FeaturizedGraph],
) -> Result<(), FeaturizeError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = column_names();
    header.push("target_ev".into());
    writer.write_record(&header)?;
    for g in graphs {
        let mut record: Vec<String> = flatten_graph(g).iter().map(|x| x.to_string()).collect();
        record.push(g.target.map(|t| t.to_string()).unwrap_or_default());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_graphs_json(
    path: impl AsRef<Path>,
    graphs: &[FeaturizedGraph],
) -> Result<(), FeaturizeError> {
    fs::write(path, serde_json::to_string_pretty(graphs)?)?;
    Ok(())
}

/// Reads graphs without requiring targets; see `harness::load_dataset` for
/// the training-set reader.
pub fn read_graphs_json(path: impl AsRef<Path>) -> Result<Vec<FeaturizedGraph>, FeaturizeError> {
    let text = fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let graphs: Vec<FeaturizedGraph> = serde_json::from_str(&text)?;
    for g in &graphs {
        g.validate()?;
    }
    Ok(graphs)
}
