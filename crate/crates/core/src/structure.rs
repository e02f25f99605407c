//! Crystal structures and periodic geometry.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::{lookup_element_properties, ElementError};

pub type Vec3 = [f64; 3];

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("lattice is singular or left-handed (det = {0})")]
    InvalidLattice(f64),
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("cannot assign oxidation states: {0}")]
    ChargeAssignment(String),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error("structure file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cell vectors in Å, one per row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Lattice {
    rows: [[f64; 3]; 3],
}

impl Lattice {
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self, StructureError> {
        let lattice = Self { rows };
        let det = lattice.volume();
        if !(det.is_finite() && det > 0.0) {
            return Err(StructureError::InvalidLattice(det));
        }
        Ok(lattice)
    }

    pub fn cubic(a: f64) -> Result<Self, StructureError> {
        Self::new([[a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, a]])
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.rows
    }

    /// Signed volume (determinant), positive for a valid lattice.
    pub fn volume(&self) -> f64 {
        let [a, b, c] = self.rows;
        dot(a, cross(b, c))
    }

    pub fn to_cartesian(&self, frac: Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (f, row) in frac.iter().zip(&self.rows) {
            for k in 0..3 {
                out[k] += f * row[k];
            }
        }
        out
    }

    /// Reciprocal vectors b_i with a_i · b_j = 2π δ_ij.
    pub fn reciprocal(&self) -> [[f64; 3]; 3] {
        let [a, b, c] = self.rows;
        let scale = 2.0 * std::f64::consts::PI / self.volume();
        [
            scale_vec(cross(b, c), scale),
            scale_vec(cross(c, a), scale),
            scale_vec(cross(a, b), scale),
        ]
    }

    /// Same cell with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, StructureError> {
        let mut rows = self.rows;
        rows.iter_mut().flatten().for_each(|x| *x *= factor);
        Self::new(rows)
    }
}

impl TryFrom<[[f64; 3]; 3]> for Lattice {
    type Error = StructureError;
    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self, Self::Error> {
        Self::new(rows)
    }
}

impl From<Lattice> for [[f64; 3]; 3] {
    fn from(l: Lattice) -> Self {
        l.rows
    }
}

/// Minimum-image Cartesian distance between two fractional positions.
///
/// The fractional difference is first reduced to [-0.5, 0.5] per axis, then
/// the 27 images with offsets in {-1, 0, 1}³ are searched.
pub fn min_image_distance(lattice: &Lattice, a: Vec3, b: Vec3) -> f64 {
    let mut d = [0.0; 3];
    for k in 0..3 {
        let x = b[k] - a[k];
        d[k] = x - x.round();
    }
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            for k in -1..=1 {
                let shifted = [d[0] + i as f64, d[1] + j as f64, d[2] + k as f64];
                let r = norm(lattice.to_cartesian(shifted));
                best = best.min(r);
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub element: String,
    pub frac: Vec3,
    /// Units of e. Zero until assigned.
    #[serde(default)]
    pub oxidation_state: i32,
}

impl Site {
    /// Builds a site, wrapping the fractional coordinates into [0, 1).
    pub fn new(element: impl Into<String>, frac: Vec3, oxidation_state: i32) -> Self {
        Self {
            element: element.into(),
            frac: wrap_frac(frac),
            oxidation_state,
        }
    }
}

pub fn wrap_frac(frac: Vec3) -> Vec3 {
    frac.map(|x| {
        let w = x.rem_euclid(1.0);
        // rem_euclid of a tiny negative number rounds up to exactly 1.0
        if w >= 1.0 {
            0.0
        } else {
            w
        }
    })
}

/// Role of a site in an ABO3 perovskite cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteRole {
    A,
    B,
    O,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrystalStructure {
    pub lattice: Lattice,
    pub sites: Vec<Site>,
    #[serde(rename = "target_ev", default, skip_serializing_if = "Option::is_none")]
    pub target_energy: Option<f64>,
}

impl CrystalStructure {
    pub fn new(lattice: Lattice, sites: Vec<Site>, target_energy: Option<f64>) -> Self {
        let sites = sites
            .into_iter()
            .map(|s| Site::new(s.element, s.frac, s.oxidation_state))
            .collect();
        Self {
            lattice,
            sites,
            target_energy,
        }
    }

    pub fn total_charge(&self) -> i32 {
        self.sites.iter().map(|s| s.oxidation_state).sum()
    }

    /// Site indices in canonical perovskite order: A, B, then the three O
    /// sites in input order.
    ///
    /// The A site is the cation with the larger cationic radius; on a tie the
    /// earlier site wins.
    pub fn perovskite_order(&self) -> Result<[usize; 5], StructureError> {
        if self.sites.len() != 5 {
            return Err(StructureError::InvalidComposition(format!(
                "expected 5 sites for ABO3, found {}",
                self.sites.len()
            )));
        }
        let mut cations = Vec::new();
        let mut oxygens = Vec::new();
        for (i, site) in self.sites.iter().enumerate() {
            lookup_element_properties(&site.element)?;
            if site.element == "O" {
                oxygens.push(i);
            } else {
                cations.push(i);
            }
        }
        if cations.len() != 2 || oxygens.len() != 3 {
            return Err(StructureError::InvalidComposition(format!(
                "expected one A, one B and three O sites, found {} cations and {} O",
                cations.len(),
                oxygens.len()
            )));
        }
        let radius = |i: usize| {
            lookup_element_properties(&self.sites[i].element)
                .map(|p| p.cationic_radius)
                .unwrap_or(0.0)
        };
        let (a, b) = if radius(cations[1]) > radius(cations[0]) {
            (cations[1], cations[0])
        } else {
            (cations[0], cations[1])
        };
        Ok([a, b, oxygens[0], oxygens[1], oxygens[2]])
    }

    /// Assigns ABO3 oxidation states: O = -2, B takes its most common state
    /// among +3/+4/+5, A balances the cell and must land in +1..=+3.
    pub fn assign_perovskite_oxidation_states(&mut self) -> Result<(), StructureError> {
        let [a, b, ..] = self.perovskite_order()?;
        let b_props = lookup_element_properties(&self.sites[b].element)?;
        let b_charge = b_props
            .oxidation_states
            .iter()
            .copied()
            .find(|q| (3..=5).contains(q))
            .ok_or_else(|| {
                StructureError::ChargeAssignment(format!(
                    "B-site {} has no common +3/+4/+5 state",
                    b_props.symbol
                ))
            })?;
        let a_charge = 6 - b_charge;
        if !(1..=3).contains(&a_charge) {
            return Err(StructureError::ChargeAssignment(format!(
                "A-site {} would need charge {a_charge}",
                self.sites[a].element
            )));
        }
        for site in &mut self.sites {
            site.oxidation_state = if site.element == "O" { -2 } else { 0 };
        }
        self.sites[a].oxidation_state = a_charge;
        self.sites[b].oxidation_state = b_charge;
        Ok(())
    }

    pub fn role_of(&self, index: usize) -> Result<SiteRole, StructureError> {
        let order = self.perovskite_order()?;
        Ok(match order.iter().position(|&i| i == index) {
            Some(0) => SiteRole::A,
            Some(1) => SiteRole::B,
            _ => SiteRole::O,
        })
    }
}

const REFERENCE_STRUCTURES: &str = include_str!("../data/reference_structures.json");

/// Bundled reference structures with charges assigned: `NaCl` (conventional
/// rock-salt cell, a = 5.6402 Å), `CsCl` (a = 4.123 Å) and `SrTiO3`
/// (cubic, a = 3.905 Å).
pub fn reference_structure(name: &str) -> Option<CrystalStructure> {
    let all: std::collections::HashMap<String, CrystalStructure> =
        serde_json::from_str(REFERENCE_STRUCTURES).expect("bundled structures parse");
    all.get(name)
        .map(|s| CrystalStructure::new(s.lattice, s.sites.clone(), s.target_energy))
}

/// Reads a JSON list of structures.
pub fn read_structures(path: impl AsRef<Path>) -> Result<Vec<CrystalStructure>, StructureError> {
    let text = fs::read_to_string(path)?;
    parse_structures(&text)
}

pub fn parse_structures(text: &str) -> Result<Vec<CrystalStructure>, StructureError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let raw: Vec<CrystalStructure> = serde_json::from_str(text)?;
    Ok(raw
        .into_iter()
        .map(|s| CrystalStructure::new(s.lattice, s.sites, s.target_energy))
        .collect())
}

pub fn write_structures(
    path: impl AsRef<Path>,
    structures: &[CrystalStructure],
) -> Result<(), StructureError> {
    fs::write(path, serde_json::to_string_pretty(structures)?)?;
    Ok(())
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale_vec(a: Vec3, s: f64) -> Vec3 {
    a.map(|x| x * s)
}
