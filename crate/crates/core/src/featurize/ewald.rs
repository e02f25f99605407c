//! Ewald summation of point-charge electrostatics with a per-site split.
//!
//! The periodic Coulomb sum is split with erfc/erf into a real-space part,
//! a reciprocal-space part and a self term. Pair contributions are shared
//! half and half between both endpoints, so the per-site energies add up to
//! the total lattice energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FeaturizeError;
use crate::structure::{dot, norm, CrystalStructure, Lattice, Vec3};

/// e²/(4πε₀) in eV·Å.
pub const COULOMB_CONSTANT: f64 = 14.399645;

const MAX_GROWTH_STEPS: usize = 12;
const GROWTH_FACTOR: f64 = 1.2;
const MAX_IMAGES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EwaldConfig {
    pub relative_accuracy: f64,
    /// Gaussian splitting parameter α in Å⁻¹; `None` selects it from the
    /// density as √π·(N/V²)^(1/6).
    pub splitting_parameter: Option<f64>,
}

impl Default for EwaldConfig {
    fn default() -> Self {
        Self {
            relative_accuracy: 1e-5,
            splitting_parameter: None,
        }
    }
}

impl EwaldConfig {
    pub fn with_splitting(mut self, alpha: f64) -> Self {
        self.splitting_parameter = Some(alpha);
        self
    }

    fn validate(&self) -> Result<(), FeaturizeError> {
        if !(self.relative_accuracy > 0.0 && self.relative_accuracy < 1.0) {
            return Err(FeaturizeError::InvalidConfig(format!(
                "relative_accuracy {} outside (0, 1)",
                self.relative_accuracy
            )));
        }
        if let Some(a) = self.splitting_parameter {
            if !(a.is_finite() && a > 0.0) {
                return Err(FeaturizeError::InvalidConfig(format!(
                    "splitting parameter {a} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Energies in eV.
#[derive(Clone, Debug, PartialEq)]
pub struct EwaldEnergies {
    pub site_energies: Vec<f64>,
    /// Total computed independently from the structure factor and unique
    /// pair enumeration.
    pub total: f64,
    pub real: f64,
    pub reciprocal: f64,
    pub self_energy: f64,
    pub alpha: f64,
    pub real_cutoff: f64,
    pub reciprocal_cutoff: f64,
}

/// Default splitting parameter for `n` sites in volume `volume`.
pub fn auto_splitting(n: usize, volume: f64) -> f64 {
    PI.sqrt() * (n as f64 / (volume * volume)).powf(1.0 / 6.0)
}

/// Per-site Ewald energies for a charge-neutral structure.
pub fn ewald_site_energies(
    structure: &CrystalStructure,
    cfg: &EwaldConfig,
) -> Result<Vec<f64>, FeaturizeError> {
    Ok(ewald_energies(structure, cfg)?.site_energies)
}

/// Full Ewald breakdown. Cutoffs start at the standard accuracy-driven
/// estimate and grow until the site energies stop changing by more than
/// `relative_accuracy` of the self-energy scale.
pub fn ewald_energies(
    structure: &CrystalStructure,
    cfg: &EwaldConfig,
) -> Result<EwaldEnergies, FeaturizeError> {
    cfg.validate()?;
    let charge = structure.total_charge();
    if charge != 0 {
        return Err(FeaturizeError::ChargeNotNeutral(charge));
    }
    let lattice = &structure.lattice;
    let n = structure.sites.len();
    let alpha = cfg
        .splitting_parameter
        .unwrap_or_else(|| auto_splitting(n, lattice.volume()));
    let charges: Vec<f64> = structure
        .sites
        .iter()
        .map(|s| s.oxidation_state as f64)
        .collect();
    if charges.iter().all(|&q| q == 0.0) {
        return Ok(EwaldEnergies {
            site_energies: vec![0.0; n],
            total: 0.0,
            real: 0.0,
            reciprocal: 0.0,
            self_energy: 0.0,
            alpha,
            real_cutoff: 0.0,
            reciprocal_cutoff: 0.0,
        });
    }
    let positions: Vec<Vec3> = structure.sites.iter().map(|s| s.frac).collect();
    for i in 0..n {
        for j in 0..i {
            let d = crate::structure::min_image_distance(lattice, positions[i], positions[j]);
            if d < 1e-8 {
                return Err(FeaturizeError::DegenerateGeometry(d));
            }
        }
    }

    let scale = charges.iter().map(|q| q * q).sum::<f64>() * alpha / PI.sqrt();
    let tolerance = cfg.relative_accuracy * scale * COULOMB_CONSTANT;
    let mut p = (-cfg.relative_accuracy.ln()).sqrt();
    let mut current = evaluate(lattice, &positions, &charges, alpha, p / alpha, 2.0 * alpha * p)?;
    for _ in 0..MAX_GROWTH_STEPS {
        p *= GROWTH_FACTOR;
        let next = evaluate(lattice, &positions, &charges, alpha, p / alpha, 2.0 * alpha * p)?;
        let change = current
            .site_energies
            .iter()
            .zip(&next.site_energies)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = next;
        if change <= tolerance {
            return Ok(current);
        }
    }
    Err(FeaturizeError::ConvergenceFailure {
        steps: MAX_GROWTH_STEPS,
    })
}

fn evaluate(
    lattice: &Lattice,
    frac: &[Vec3],
    charges: &[f64],
    alpha: f64,
    real_cutoff: f64,
    reciprocal_cutoff: f64,
) -> Result<EwaldEnergies, FeaturizeError> {
    let n = frac.len();
    let recip = lattice.reciprocal();
    let cart: Vec<Vec3> = frac.iter().map(|&f| lattice.to_cartesian(f)).collect();

    // Real space: lattice translations within reach of the cutoff.
    let real_range: [i64; 3] = std::array::from_fn(|k| {
        (real_cutoff * norm(recip[k]) / (2.0 * PI)).ceil() as i64 + 1
    });
    let image_count: usize = real_range.iter().map(|&r| (2 * r + 1) as usize).product();
    if image_count > MAX_IMAGES {
        return Err(FeaturizeError::ConvergenceFailure { steps: 0 });
    }
    let translations = lattice_points(lattice.rows(), real_range);

    let mut site_real = vec![0.0; n];
    let mut total_real = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut d = [0.0; 3];
            for k in 0..3 {
                let x = frac[j][k] - frac[i][k];
                d[k] = x - x.round();
            }
            let base = lattice.to_cartesian(d);
            let mut pair = 0.0;
            for t in &translations {
                let r = norm([base[0] + t[0], base[1] + t[1], base[2] + t[2]]);
                if r < 1e-10 || r > real_cutoff {
                    continue;
                }
                pair += libm::erfc(alpha * r) / r;
            }
            let e = 0.5 * charges[i] * charges[j] * pair;
            site_real[i] += e;
            // Unique-pair bookkeeping for the independent total.
            if j > i {
                total_real += 2.0 * e;
            } else if j == i {
                total_real += e;
            }
        }
    }

    // Reciprocal space.
    let recip_range: [i64; 3] = std::array::from_fn(|k| {
        (reciprocal_cutoff * norm(lattice.rows()[k]) / (2.0 * PI)).ceil() as i64
    });
    let volume = lattice.volume();
    let prefactor = 2.0 * PI / volume;
    let mut site_recip = vec![0.0; n];
    let mut total_recip = 0.0;
    let mut phases = vec![(0.0, 0.0); n];
    for kv in lattice_points(&recip, recip_range) {
        let k2 = dot(kv, kv);
        if k2 < 1e-20 || k2 > reciprocal_cutoff * reciprocal_cutoff {
            continue;
        }
        let weight = prefactor * (-k2 / (4.0 * alpha * alpha)).exp() / k2;
        let (mut s_re, mut s_im) = (0.0, 0.0);
        for (phase, (r, q)) in phases.iter_mut().zip(cart.iter().zip(charges)) {
            let (sin, cos) = dot(kv, *r).sin_cos();
            *phase = (cos, sin);
            s_re += q * cos;
            s_im += q * sin;
        }
        for (e, ((cos, sin), q)) in site_recip.iter_mut().zip(phases.iter().zip(charges)) {
            *e += weight * q * (cos * s_re + sin * s_im);
        }
        total_recip += weight * (s_re * s_re + s_im * s_im);
    }

    let self_terms: Vec<f64> = charges
        .iter()
        .map(|q| -alpha / PI.sqrt() * q * q)
        .collect();
    let total_self: f64 = self_terms.iter().sum();

    let site_energies = (0..n)
        .map(|i| COULOMB_CONSTANT * (site_real[i] + site_recip[i] + self_terms[i]))
        .collect();
    Ok(EwaldEnergies {
        site_energies,
        total: COULOMB_CONSTANT * (total_real + total_recip + total_self),
        real: COULOMB_CONSTANT * total_real,
        reciprocal: COULOMB_CONSTANT * total_recip,
        self_energy: COULOMB_CONSTANT * total_self,
        alpha,
        real_cutoff,
        reciprocal_cutoff,
    })
}

fn lattice_points(basis: &[[f64; 3]; 3], range: [i64; 3]) -> Vec<Vec3> {
    let mut out = Vec::new();
    for a in -range[0]..=range[0] {
        for b in -range[1]..=range[1] {
            for c in -range[2]..=range[2] {
                let mut v = [0.0; 3];
                for (m, row) in [a, b, c].iter().zip(basis) {
                    for k in 0..3 {
                        v[k] += *m as f64 * row[k];
                    }
                }
                out.push(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Site;

    fn rock_salt(a: f64) -> CrystalStructure {
        let mut sites = Vec::new();
        for f in [[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]] {
            sites.push(Site::new("Na", f, 1));
            sites.push(Site::new("Cl", [f[0] + 0.5, f[1], f[2]], -1));
        }
        CrystalStructure::new(Lattice::cubic(a).unwrap(), sites, None)
    }

    #[test]
    fn neutral_atoms_have_no_energy() {
        let mut s = rock_salt(5.64);
        s.sites.iter_mut().for_each(|x| x.oxidation_state = 0);
        let e = ewald_site_energies(&s, &EwaldConfig::default()).unwrap();
        assert_eq!(e, vec![0.0; 8]);
    }

    #[test]
    fn charged_cell_is_rejected() {
        let mut s = rock_salt(5.64);
        s.sites[0].oxidation_state = 2;
        assert!(matches!(
            ewald_site_energies(&s, &EwaldConfig::default()),
            Err(FeaturizeError::ChargeNotNeutral(1))
        ));
    }

    #[test]
    fn bad_config_is_rejected() {
        let s = rock_salt(5.64);
        let cfg = EwaldConfig {
            relative_accuracy: 1.5,
            splitting_parameter: None,
        };
        assert!(matches!(
            ewald_energies(&s, &cfg),
            Err(FeaturizeError::InvalidConfig(_))
        ));
        let cfg = EwaldConfig::default().with_splitting(-1.0);
        assert!(ewald_energies(&s, &cfg).is_err());
    }

    #[test]
    fn equivalent_sites_share_energy() {
        let e = ewald_energies(&rock_salt(5.6402), &EwaldConfig::default()).unwrap();
        for pair in e.site_energies.chunks(2) {
            assert!((pair[0] - e.site_energies[0]).abs() < 1e-9);
            assert!((pair[1] - e.site_energies[1]).abs() < 1e-9);
        }
        let sum: f64 = e.site_energies.iter().sum();
        assert!((sum - e.total).abs() <= 1e-10 * e.total.abs());
    }

    #[test]
    fn scaling_lattice_scales_energy_inversely() {
        let base = ewald_energies(&rock_salt(5.0), &EwaldConfig::default()).unwrap();
        let big = ewald_energies(&rock_salt(7.5), &EwaldConfig::default()).unwrap();
        assert!((big.total * 1.5 - base.total).abs() < 1e-4 * base.total.abs());
    }
}
