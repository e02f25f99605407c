//! Run directory layout:
//!
//! ```text
//! config.toml      run configuration snapshot
//! loss.csv         iteration,candidate_loss,best_loss (training MSE)
//! val.csv          iteration,val_loss,best_val_loss
//! checkpoint.json  best parameters, layout, feature and target scaling
//! manifest.txt     parameter layout, one block per line
//! parity.svg       test-set parity plot (parity.csv holds the raw pairs)
//! report.json      r2_fit, r2_identity and run summary
//! circuit.txt      best quantum circuit (hybrid runs only)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::model::{FeatureScaler, Head, ModelParams};
use super::{emit_parity_plot, HarnessError, ModelKind, RunArtifacts};
use crate::featurize::FeaturizedGraph;
use crate::gnn::LayoutBlock;
use crate::optimize::Algorithm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: ModelKind,
    pub hidden: usize,
    pub layers: usize,
    pub algorithm: Algorithm,
    pub best_iteration: usize,
    pub best_params: Vec<f64>,
    pub layout: Vec<LayoutBlock>,
    pub scaler: FeatureScaler,
    pub target_mean: f64,
    pub target_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: ModelKind,
    pub algorithm: Algorithm,
    pub budget: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub best_iteration: usize,
    pub initial_val_mse: f64,
    pub best_val_mse: f64,
    pub final_train_mse: f64,
    pub n_test: usize,
    pub r2_fit: Option<f64>,
    pub r2_identity: Option<f64>,
}

impl Checkpoint {
    pub fn from_run(run: &RunArtifacts) -> Result<Self, HarnessError> {
        let cfg = &run.config;
        Ok(Self {
            model: cfg.model,
            hidden: cfg.hidden,
            layers: cfg.layers,
            algorithm: run.algorithm,
            best_iteration: run.best_iteration,
            best_params: run.best_params.clone(),
            layout: ModelParams::layout(cfg.model, cfg.hidden, cfg.layers)?,
            scaler: run.scaler.clone(),
            target_mean: run.target_mean,
            target_std: run.target_std,
        })
    }
}

impl Report {
    pub fn from_run(run: &RunArtifacts) -> Self {
        Self {
            model: run.config.model,
            algorithm: run.algorithm,
            budget: run.config.budget,
            seed: run.config.seed,
            evaluations: run.loss_history.len(),
            best_iteration: run.best_iteration,
            initial_val_mse: run.val_history.first().copied().unwrap_or(f64::NAN),
            best_val_mse: run.val_history[run.best_iteration],
            final_train_mse: run.best_loss_history().last().copied().unwrap_or(f64::NAN),
            n_test: run.test_predictions.len(),
            r2_fit: run.r2.map(|r| r.fit),
            r2_identity: run.r2.map(|r| r.identity),
        }
    }
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint, HarnessError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Predictions in eV; graphs whose encoding fails get the training mean.
pub fn predict_with_checkpoint(
    ckpt: &Checkpoint,
    graphs: &[FeaturizedGraph],
) -> Result<Vec<f64>, HarnessError> {
    let model = ModelParams::from_flat(&ckpt.best_params, ckpt.model, ckpt.hidden, ckpt.layers)?;
    Ok(graphs
        .iter()
        .map(|g| model.predict(&ckpt.scaler.apply(g)).unwrap_or(0.0) * ckpt.target_std + ckpt.target_mean)
        .collect())
}

fn write_series(path: &Path, header: [&str; 3], values: &[f64], best: &[f64]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for (i, (v, b)) in values.iter().zip(best).enumerate() {
        w.write_record([(i + 1).to_string(), format!("{v:e}"), format!("{b:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Persists a run into `dir`, creating it if needed. Returns the paths
/// written.
pub fn write_run_artifacts(run: &RunArtifacts, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let path = |name: &str| dir.join(name);
    let mut written = Vec::new();

    fs::write(path("config.toml"), run.config.to_toml())?;
    written.push(path("config.toml"));
    write_series(
        &path("loss.csv"),
        ["iteration", "candidate_loss", "best_loss"],
        &run.loss_history,
        &run.best_loss_history(),
    )?;
    written.push(path("loss.csv"));
    write_series(
        &path("val.csv"),
        ["iteration", "val_loss", "best_val_loss"],
        &run.val_history,
        &run.best_val_history(),
    )?;
    written.push(path("val.csv"));

    let ckpt = Checkpoint::from_run(run)?;
    fs::write(path("checkpoint.json"), serde_json::to_string_pretty(&ckpt)?)?;
    written.push(path("checkpoint.json"));

    let mut manifest = format!(
        "model {}\nhidden {}\nlayers {}\nparameters {}\n",
        ckpt.model,
        ckpt.hidden,
        ckpt.layers,
        ckpt.best_params.len()
    );
    for b in &ckpt.layout {
        let _ = writeln!(manifest, "{} {} {}", b.name, b.offset, b.len);
    }
    fs::write(path("manifest.txt"), manifest)?;
    written.push(path("manifest.txt"));

    let sidecar = emit_parity_plot(&run.test_predictions, path("parity.svg"))?;
    written.push(path("parity.svg"));
    written.push(sidecar);

    fs::write(path("report.json"), serde_json::to_string_pretty(&Report::from_run(run))?)?;
    written.push(path("report.json"));

    let params = ModelParams::from_flat(&run.best_params, ckpt.model, ckpt.hidden, ckpt.layers)?;
    if let Head::Quantum(qp) = &params.head {
        fs::write(path("circuit.txt"), qp.circuit().to_string())?;
        written.push(path("circuit.txt"));
    }
    Ok(written)
}
