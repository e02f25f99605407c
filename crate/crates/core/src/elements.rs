//! Bundled element-property table.
//!
//! The table lives in `data/elements.csv` and is compiled into the binary.
//! It covers H through Bi. Radii are Shannon crystal radii (coordination VI
//! where tabulated); a radius of 0 means the element has no stable ion of
//! that sign.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const ELEMENT_TABLE: &str = include_str!("../data/elements.csv");

/// Version tag of the bundled table. Bump when any value changes.
pub const ELEMENT_TABLE_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElementError {
    #[error("unknown element symbol `{0}`")]
    UnknownElement(String),
}

/// Tabulated per-element descriptors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementProperties {
    pub symbol: String,
    pub atomic_number: u32,
    /// Pauling scale, 0 when undefined (light noble gases).
    pub electronegativity: f64,
    /// eV
    pub electron_affinity: f64,
    /// eV
    pub first_ionization: f64,
    /// Å
    pub cationic_radius: f64,
    /// Å
    pub anionic_radius: f64,
    /// Common oxidation states, most common first.
    pub oxidation_states: Vec<i32>,
}

#[derive(Deserialize)]
struct Row {
    symbol: String,
    z: u32,
    electronegativity: f64,
    electron_affinity: f64,
    first_ionization: f64,
    cationic_radius: f64,
    anionic_radius: f64,
    oxidation_states: String,
}

fn table() -> &'static HashMap<String, ElementProperties> {
    static TABLE: OnceLock<HashMap<String, ElementProperties>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(ELEMENT_TABLE.as_bytes());
        reader
            .deserialize::<Row>()
            .map(|row| {
                let row = row.expect("bundled element table is well formed");
                let oxidation_states = row
                    .oxidation_states
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().expect("oxidation state is an integer"))
                    .collect();
                let props = ElementProperties {
                    symbol: row.symbol.clone(),
                    atomic_number: row.z,
                    electronegativity: row.electronegativity,
                    electron_affinity: row.electron_affinity,
                    first_ionization: row.first_ionization,
                    cationic_radius: row.cationic_radius,
                    anionic_radius: row.anionic_radius,
                    oxidation_states,
                };
                (row.symbol, props)
            })
            .collect()
    })
}

/// Returns the table row for `symbol` (case-sensitive, e.g. "Sr").
pub fn lookup_element_properties(symbol: &str) -> Result<&'static ElementProperties, ElementError> {
    table()
        .get(symbol)
        .ok_or_else(|| ElementError::UnknownElement(symbol.to_string()))
}

/// All bundled elements, ordered by atomic number.
pub fn all_elements() -> Vec<&'static ElementProperties> {
    let mut all: Vec<_> = table().values().collect();
    all.sort_by_key(|e| e.atomic_number);
    all
}
