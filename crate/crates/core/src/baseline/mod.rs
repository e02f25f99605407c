//! Gradient-boosted regression trees over flattened graph rows.
//!
//! Plain least-squares boosting: each tree fits the current residuals and
//! is added with shrinkage. Feature importance is the squared-error
//! reduction accumulated over every split on that feature.

mod tree;

pub use tree::{best_split, RegressionTree, SplitCandidate, TreeNode};

use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plot::bar_chart_svg;
use tree::TreeParams;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("all targets are equal")]
    DegenerateData,
    #[error("row has {found} columns, model expects {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("need at least {needed} rows, found {found}")]
    InsufficientRows { needed: usize, found: usize },
    #[error("non-finite value in row {0}")]
    NonFinite(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: 3,
            learning_rate: 0.1,
            min_samples_leaf: 2,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.n_trees < 1 {
            return Err(BaselineError::InvalidConfig("n_trees must be ≥ 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(BaselineError::InvalidConfig(
                "learning_rate must lie in (0, 1]".into(),
            ));
        }
        if self.max_depth < 1 {
            return Err(BaselineError::InvalidConfig("max_depth must be ≥ 1".into()));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(BaselineError::InvalidConfig(
                "subsample must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub width: usize,
    pub base_prediction: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
    /// Accumulated squared-error gain per feature.
    pub importances: Vec<f64>,
}

impl GbdtModel {
    pub fn predict(&self, row: &[f64]) -> Result<f64, BaselineError> {
        if row.len() != self.width {
            return Err(BaselineError::WidthMismatch {
                expected: self.width,
                found: row.len(),
            });
        }
        Ok(self.base_prediction
            + self
                .trees
                .iter()
                .map(|t| self.learning_rate * t.predict(row))
                .sum::<f64>())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BaselineError> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BaselineError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Fits a boosted ensemble. Constant targets yield a tree-less model that
/// predicts the constant, with all importances zero.
pub fn fit(rows: &[Vec<f64>], targets: &[f64], cfg: &GbdtConfig) -> Result<GbdtModel, BaselineError> {
    cfg.validate()?;
    let needed = 2 * cfg.min_samples_leaf.max(1);
    if rows.len() < needed || targets.len() != rows.len() {
        return Err(BaselineError::InsufficientRows {
            needed,
            found: rows.len().min(targets.len()),
        });
    }
    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(BaselineError::WidthMismatch {
                expected: width,
                found: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) || !targets[i].is_finite() {
            return Err(BaselineError::NonFinite(i));
        }
    }
    let n = rows.len();
    let base_prediction = targets.iter().sum::<f64>() / n as f64;
    let mut model = GbdtModel {
        width,
        base_prediction,
        learning_rate: cfg.learning_rate,
        trees: Vec::new(),
        importances: vec![0.0; width],
    };
    if targets.iter().all(|&t| t == targets[0]) {
        model.base_prediction = targets[0];
        return Ok(model);
    }

    let params = TreeParams {
        max_depth: cfg.max_depth,
        min_samples_leaf: cfg.min_samples_leaf.max(1),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sample_size = ((cfg.subsample * n as f64).round() as usize).clamp(needed.min(n), n);
    let mut predictions = vec![base_prediction; n];
    let mut residuals = vec![0.0; n];
    for _ in 0..cfg.n_trees {
        for i in 0..n {
            residuals[i] = targets[i] - predictions[i];
        }
        let index: Vec<usize> = if sample_size < n {
            let mut idx = sample(&mut rng, n, sample_size).into_vec();
            idx.sort_unstable();
            idx
        } else {
            (0..n).collect()
        };
        let tree = RegressionTree::fit(rows, &residuals, &index, &params, &mut model.importances);
        for (p, row) in predictions.iter_mut().zip(rows) {
            *p += cfg.learning_rate * tree.predict(row);
        }
        model.trees.push(tree);
    }
    Ok(model)
}

pub fn predict(model: &GbdtModel, row: &[f64]) -> Result<f64, BaselineError> {
    model.predict(row)
}

/// `(name, share)` sorted by descending share; shares sum to 1 unless every
/// gain is zero, in which case all shares are 0. Ties keep column order.
pub fn feature_importances(model: &GbdtModel, names: &[String]) -> Vec<(String, f64)> {
    let total: f64 = model.importances.iter().sum();
    let mut ranked: Vec<(usize, f64)> = model
        .importances
        .iter()
        .map(|&g| if total > 0.0 { g / total } else { 0.0 })
        .enumerate()
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
        .into_iter()
        .map(|(i, share)| {
            let name = names.get(i).cloned().unwrap_or_else(|| format!("f{i}"));
            (name, share)
        })
        .collect()
}

pub fn write_importance_csv(
    path: impl AsRef<Path>,
    ranked: &[(String, f64)],
) -> Result<(), BaselineError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["rank", "feature", "importance"])?;
    for (i, (name, share)) in ranked.iter().enumerate() {
        w.write_record([(i + 1).to_string(), name.clone(), format!("{share:.10}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Bar chart of the `top` most important features.
pub fn importance_svg(ranked: &[(String, f64)], top: usize) -> String {
    let shown: Vec<(String, f64)> = ranked.iter().take(top).cloned().collect();
    bar_chart_svg(&shown, "Feature importance (gain share)")
}
