//! End-to-end orchestration: dataset ingestion, splitting, the training
//! loop, R² evaluation, parity plots and run persistence.

mod artifacts;
mod model;
mod synthetic;
mod train;

pub use artifacts::{load_checkpoint, predict_with_checkpoint, write_run_artifacts, Checkpoint, Report};
pub use model::{FeatureScaler, ModelParams};
pub use synthetic::{
    synthetic_dataset, synthetic_energy, synthetic_structures, tolerance_factor,
    DEFAULT_SYNTHETIC_SIZE,
};
pub use train::{run_baseline, train, BaselineRun, RunArtifacts};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{BaselineError, GbdtConfig};
use crate::featurize::{FeaturizeError, FeaturizedGraph};
use crate::gnn::DEFAULT_HIDDEN;
use crate::optimize::DEFAULT_BUDGET;
use crate::plot::parity_svg;
use crate::quantum::DEFAULT_LAYERS;

/// Environment variable capping the worker threads used per iteration.
pub const THREADS_ENV: &str = "HYQGNN_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("record {index}: {message}")]
    SchemaError { index: usize, message: String },
    #[error("need {needed} records for the requested split, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("training targets are constant; standardization is undefined")]
    ConstantTarget,
    #[error("predictions have zero variance")]
    DegeneratePrediction,
    #[error("need at least 3 pairs, found {0}")]
    TooFewPairs(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Featurize(#[from] FeaturizeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hybrid,
    Classical,
    Gbdt,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Hybrid => "hybrid",
            ModelKind::Classical => "classical",
            ModelKind::Gbdt => "gbdt",
        })
    }
}

impl FromStr for ModelKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hybrid" => Ok(ModelKind::Hybrid),
            "classical" => Ok(ModelKind::Classical),
            "gbdt" => Ok(ModelKind::Gbdt),
            other => Err(HarnessError::Config(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    /// Train, validation and test counts.
    pub split_sizes: [usize; 3],
    pub budget: usize,
    pub seed: u64,
    pub hidden: usize,
    pub layers: usize,
    pub dataset: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub gbdt: GbdtConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Hybrid,
            split_sizes: [196, 25, 25],
            budget: DEFAULT_BUDGET,
            seed: 0,
            hidden: DEFAULT_HIDDEN,
            layers: DEFAULT_LAYERS,
            dataset: None,
            output_dir: None,
            gbdt: GbdtConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.split_sizes.contains(&0) {
            return Err(HarnessError::Config("split sizes must all be positive".into()));
        }
        if self.budget == 0 {
            return Err(HarnessError::Config("budget must be positive".into()));
        }
        if self.hidden == 0 {
            return Err(HarnessError::Config("hidden size must be positive".into()));
        }
        self.gbdt.validate()?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

/// Reads a featurized dataset for training; every record must carry a
/// target. An empty or whitespace-only file is an empty dataset.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<FeaturizedGraph>, HarnessError> {
    parse_dataset(&fs::read_to_string(path)?)
}

pub fn parse_dataset(text: &str) -> Result<Vec<FeaturizedGraph>, HarnessError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let parse_error = |e: serde_json::Error| HarnessError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let records: Vec<serde_json::Value> = serde_json::from_str(text).map_err(parse_error)?;
    records
        .into_iter()
        .enumerate()
        .map(|(index, value)| {
            let graph: FeaturizedGraph =
                serde_json::from_value(value).map_err(|e| HarnessError::SchemaError {
                    index,
                    message: e.to_string(),
                })?;
            graph.validate().map_err(|e| HarnessError::SchemaError {
                index,
                message: e.to_string(),
            })?;
            match graph.target {
                Some(t) if t.is_finite() => Ok(graph),
                Some(_) => Err(HarnessError::SchemaError {
                    index,
                    message: "target_ev is not finite".into(),
                }),
                None => Err(HarnessError::SchemaError {
                    index,
                    message: "missing target_ev".into(),
                }),
            }
        })
        .collect()
}

/// Seeded shuffle followed by contiguous slicing into train, validation
/// and test sets. Records beyond the requested total are left out.
pub fn split_dataset<T: Clone>(
    data: &[T],
    sizes: [usize; 3],
    seed: u64,
) -> Result<(Vec<T>, Vec<T>, Vec<T>), HarnessError> {
    let needed: usize = sizes.iter().sum();
    if needed > data.len() {
        return Err(HarnessError::InsufficientData {
            needed,
            found: data.len(),
        });
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let take = |range: std::ops::Range<usize>| order[range].iter().map(|&i| data[i].clone()).collect();
    let (a, b) = (sizes[0], sizes[0] + sizes[1]);
    Ok((take(0..a), take(a..b), take(b..needed)))
}

/// Fit-based and identity-line coefficients of determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct R2Report {
    /// R² of the least-squares line through (true, predicted); equals the
    /// squared Pearson correlation.
    pub fit: f64,
    /// 1 − SS_res/SS_tot with predicted used as-is.
    pub identity: f64,
    /// Fitted line `predicted = slope·true + intercept`.
    pub slope: f64,
    pub intercept: f64,
}

pub fn evaluate_r2(true_vals: &[f64], predicted: &[f64]) -> Result<f64, HarnessError> {
    Ok(r2_report(true_vals, predicted)?.fit)
}

pub fn r2_report(true_vals: &[f64], predicted: &[f64]) -> Result<R2Report, HarnessError> {
    let n = true_vals.len().min(predicted.len());
    if n < 3 || true_vals.len() != predicted.len() {
        return Err(HarnessError::TooFewPairs(n));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mt, mp) = (mean(true_vals), mean(predicted));
    let (mut stt, mut spp, mut stp) = (0.0, 0.0, 0.0);
    for (&t, &p) in true_vals.iter().zip(predicted) {
        stt += (t - mt) * (t - mt);
        spp += (p - mp) * (p - mp);
        stp += (t - mt) * (p - mp);
    }
    if !(spp > 0.0) {
        return Err(HarnessError::DegeneratePrediction);
    }
    if !(stt > 0.0) {
        return Err(HarnessError::ConstantTarget);
    }
    let ss_res: f64 = true_vals
        .iter()
        .zip(predicted)
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    let slope = stp / stt;
    Ok(R2Report {
        fit: (stp * stp / (stt * spp)).min(1.0),
        identity: 1.0 - ss_res / stt,
        slope,
        intercept: mp - slope * mt,
    })
}

/// Writes a parity SVG to `path` and the raw pairs to a `.csv` sidecar
/// next to it. Returns the sidecar path.
pub fn emit_parity_plot(pairs: &[(f64, f64)], path: impl AsRef<Path>) -> Result<PathBuf, HarnessError> {
    if pairs.is_empty() {
        return Err(HarnessError::TooFewPairs(0));
    }
    let path = path.as_ref();
    let (t, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let (fit, annotation) = match r2_report(&t, &p) {
        Ok(r) => (
            Some((r.slope, r.intercept)),
            format!("R² = {:.3} (fit), {:.3} (identity), n = {}", r.fit, r.identity, pairs.len()),
        ),
        Err(_) => (None, format!("R² = n/a, n = {}", pairs.len())),
    };
    fs::write(path, parity_svg(pairs, fit, &annotation))?;
    let sidecar = path.with_extension("csv");
    let mut w = csv::Writer::from_path(&sidecar)?;
    w.write_record(["true_ev", "predicted_ev"])?;
    for (t, p) in pairs {
        w.write_record([format!("{t:e}"), format!("{p:e}")])?;
    }
    w.flush()?;
    Ok(sidecar)
}

/// Reads `(true, predicted)` pairs from a parity CSV sidecar.
pub fn read_parity_csv(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let mut pairs = Vec::new();
    for (index, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<f64, HarnessError> {
            rec.get(k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| HarnessError::SchemaError {
                    index,
                    message: format!("column {k} is not a number"),
                })
        };
        pairs.push((field(0)?, field(1)?));
    }
    Ok(pairs)
}
