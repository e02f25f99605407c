//! Deterministic synthetic ABO3 dataset.
//!
//! Cubic perovskites built from charge-balanced A/B pairs, with jittered
//! lattice constants and small oxygen displacements. The target is a smooth
//! nonlinear function of tabulated descriptors plus Gaussian noise; it leans
//! hardest on the first ionization energy of the A site.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::elements::lookup_element_properties;
use crate::featurize::{featurize_structure, EwaldConfig, FeaturizeError, FeaturizedGraph};
use crate::structure::{CrystalStructure, Lattice, Site};

pub const DEFAULT_SYNTHETIC_SIZE: usize = 246;

const PAIRS: &[(&[&str], &[&str])] = &[
    (&["Na", "K", "Rb", "Cs"], &["V", "Nb", "Ta", "Sb"]),
    (
        &["Ca", "Sr", "Ba", "Pb"],
        &["Ti", "Zr", "Hf", "Sn", "Ge", "Mn", "Ru", "Ir", "Mo", "W"],
    ),
    (
        &["La", "Pr", "Nd", "Sm", "Eu", "Gd", "Y", "Bi"],
        &["Al", "Sc", "Cr", "Fe", "Co", "Ni", "Ga", "In", "Rh"],
    ),
];

const OXYGEN_RADIUS: f64 = 1.26;
const NOISE_EV: f64 = 0.05;

/// Goldschmidt tolerance factor from tabulated radii.
pub fn tolerance_factor(a: &str, b: &str) -> f64 {
    let ra = lookup_element_properties(a).map(|p| p.cationic_radius).unwrap_or(0.0);
    let rb = lookup_element_properties(b).map(|p| p.cationic_radius).unwrap_or(0.0);
    (ra + OXYGEN_RADIUS) / (std::f64::consts::SQRT_2 * (rb + OXYGEN_RADIUS))
}

/// Noise-free synthetic formation energy (eV/atom) of an A/B pair with
/// lattice constant `a_lat`.
pub fn synthetic_energy(a: &str, b: &str, a_lat: f64) -> f64 {
    let pa = lookup_element_properties(a).expect("synthetic A site is tabulated");
    let pb = lookup_element_properties(b).expect("synthetic B site is tabulated");
    let t = tolerance_factor(a, b);
    let ideal = 2.0 * (pb.cationic_radius + OXYGEN_RADIUS);
    -2.2 + 0.45 * (pa.first_ionization - 5.5)
        + 0.35 * (pb.electronegativity - 1.7).tanh()
        + 4.0 * (t - 0.97).powi(2)
        - 0.08 * (pb.first_ionization - 7.0)
        + 0.6 * (a_lat - ideal).powi(2)
}

/// `n` structures with `target_ev` set, identical for identical seeds.
pub fn synthetic_structures(n: usize, seed: u64) -> Vec<CrystalStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, NOISE_EV).expect("positive noise scale");
    let weights: Vec<usize> = PAIRS.iter().map(|(a, b)| a.len() * b.len()).collect();
    let total: usize = weights.iter().sum();
    (0..n)
        .map(|_| {
            let mut pick = rng.random_range(0..total);
            let mut family = 0;
            while pick >= weights[family] {
                pick -= weights[family];
                family += 1;
            }
            let (a_sites, b_sites) = PAIRS[family];
            let a = *a_sites.choose(&mut rng).expect("nonempty");
            let b = *b_sites.choose(&mut rng).expect("nonempty");
            let rb = lookup_element_properties(b).expect("tabulated").cationic_radius;
            let a_lat = 2.0 * (rb + OXYGEN_RADIUS) * (1.0 + rng.random_range(-0.03..0.03));
            let mut jitter = || rng.random_range(-0.015..0.015);
            let sites = vec![
                Site::new(a, [0.0, 0.0, 0.0], 0),
                Site::new(b, [0.5, 0.5, 0.5], 0),
                Site::new("O", [0.5 + jitter(), 0.5 + jitter(), 0.0 + jitter()], 0),
                Site::new("O", [0.5 + jitter(), 0.0 + jitter(), 0.5 + jitter()], 0),
                Site::new("O", [0.0 + jitter(), 0.5 + jitter(), 0.5 + jitter()], 0),
            ];
            let target = synthetic_energy(a, b, a_lat) + noise.sample(&mut rng);
            let lattice = Lattice::cubic(a_lat).expect("positive lattice constant");
            CrystalStructure::new(lattice, sites, Some(target))
        })
        .collect()
}

/// Featurized synthetic dataset.
pub fn synthetic_dataset(n: usize, seed: u64) -> Result<Vec<FeaturizedGraph>, FeaturizeError> {
    let cfg = EwaldConfig::default();
    synthetic_structures(n, seed)
        .iter()
        .map(|s| featurize_structure(s, &cfg, None))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_pair_is_charge_balanced() {
        for (a_sites, b_sites) in PAIRS {
            for a in *a_sites {
                for b in *b_sites {
                    let mut s = CrystalStructure::new(
                        Lattice::cubic(4.0).unwrap(),
                        vec![
                            Site::new(*a, [0.0; 3], 0),
                            Site::new(*b, [0.5; 3], 0),
                            Site::new("O", [0.5, 0.5, 0.0], 0),
                            Site::new("O", [0.5, 0.0, 0.5], 0),
                            Site::new("O", [0.0, 0.5, 0.5], 0),
                        ],
                        None,
                    );
                    s.assign_perovskite_oxidation_states()
                        .unwrap_or_else(|e| panic!("{a}{b}O3: {e}"));
                    assert_eq!(s.total_charge(), 0);
                    assert_eq!(s.perovskite_order().unwrap()[0], 0, "{a} must be the A site");
                }
            }
        }
    }

    #[test]
    fn generation_is_seeded() {
        let a = synthetic_structures(12, 3);
        assert_eq!(a, synthetic_structures(12, 3));
        assert_ne!(a, synthetic_structures(12, 4));
        assert!(a.iter().all(|s| s.target_energy.is_some()));
    }

    #[test]
    fn dataset_featurizes() {
        let graphs = synthetic_dataset(6, 1).unwrap();
        assert_eq!(graphs.len(), 6);
        for g in &graphs {
            g.validate().unwrap();
            assert_eq!(g.edges.len(), 10);
        }
    }
}
