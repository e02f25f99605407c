//! Hybrid quantum-classical graph neural network for perovskite formation
//! energies.
//!
//! The pipeline turns an ABO3 crystal structure into a five-node graph
//! ([`featurize`]), distills it with a GENConv layer ([`gnn`]), amplitude
//! encodes the resulting weight matrix into a five-qubit circuit
//! ([`quantum`]) and trains everything with gradient-free search
//! ([`optimize`]). A boosted-tree baseline ([`baseline`]) works on the
//! flattened graphs. [`harness`] ties it together.

pub mod baseline;
pub mod elements;
pub mod featurize;
pub mod gnn;
pub mod harness;
pub mod optimize;
pub mod plot;
pub mod quantum;
pub mod structure;

pub use elements::{lookup_element_properties, ElementProperties};
pub use featurize::{build_graph, flatten_graph, EwaldConfig, FeaturizedGraph};
pub use structure::{min_image_distance, CrystalStructure, Lattice, Site};
