//! The ask/tell training loop and the boosted-tree run.

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use super::model::{FeatureScaler, ModelParams};
use super::{r2_report, split_dataset, HarnessError, ModelKind, R2Report, RunConfig, THREADS_ENV};
use crate::baseline::{self, GbdtModel};
use crate::featurize::{column_names, flatten_graph, FeaturizedGraph};
use crate::optimize::{Algorithm, OptimizerState, PENALTY_LOSS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunArtifacts {
    pub config: RunConfig,
    pub algorithm: Algorithm,
    /// Training MSE (standardized targets) of each evaluated candidate.
    pub loss_history: Vec<f64>,
    /// Validation MSE of the same candidates.
    pub val_history: Vec<f64>,
    /// Zero-based iteration whose candidate has the lowest validation MSE.
    pub best_iteration: usize,
    pub best_params: Vec<f64>,
    /// `(true, predicted)` in eV.
    pub test_predictions: Vec<(f64, f64)>,
    /// `None` when the test predictions are degenerate.
    pub r2: Option<R2Report>,
    pub scaler: FeatureScaler,
    pub target_mean: f64,
    pub target_std: f64,
}

impl RunArtifacts {
    /// Running minimum of the training loss.
    pub fn best_loss_history(&self) -> Vec<f64> {
        running_min(&self.loss_history)
    }

    pub fn best_val_history(&self) -> Vec<f64> {
        running_min(&self.val_history)
    }
}

fn running_min(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(f64::INFINITY, |best, &x| {
            *best = best.min(x);
            Some(*best)
        })
        .collect()
}

pub(crate) fn thread_pool() -> Result<ThreadPool, HarnessError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| HarnessError::Config(format!("{THREADS_ENV} must be a thread count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Mean squared error against standardized targets, or the penalty when
/// any prediction fails. Predictions run in parallel; the sum is sequential
/// so the result does not depend on the thread count.
fn mse(pool: &ThreadPool, model: &ModelParams, graphs: &[FeaturizedGraph], targets: &[f64]) -> f64 {
    let predictions: Vec<Option<f64>> =
        pool.install(|| graphs.par_iter().map(|g| model.predict(g)).collect());
    let mut sum = 0.0;
    for (p, t) in predictions.into_iter().zip(targets) {
        match p {
            Some(p) => sum += (p - t) * (p - t),
            None => return PENALTY_LOSS,
        }
    }
    let loss = sum / targets.len() as f64;
    if loss.is_finite() {
        loss
    } else {
        PENALTY_LOSS
    }
}

fn targets_of(graphs: &[FeaturizedGraph]) -> Result<Vec<f64>, HarnessError> {
    graphs
        .iter()
        .enumerate()
        .map(|(index, g)| {
            g.target.ok_or_else(|| HarnessError::SchemaError {
                index,
                message: "missing target_ev".into(),
            })
        })
        .collect()
}

/// Splits `data`, standardizes features and targets on the training part,
/// and runs the gradient-free loop for `config.budget` evaluations. The
/// returned parameters are those with the lowest validation MSE.
pub fn train(config: &RunConfig, data: &[FeaturizedGraph]) -> Result<RunArtifacts, HarnessError> {
    config.validate()?;
    if config.model == ModelKind::Gbdt {
        return Err(HarnessError::Config(
            "train handles hybrid and classical models; use run_baseline for gbdt".into(),
        ));
    }
    let (train_set, val_set, test_set) = split_dataset(data, config.split_sizes, config.seed)?;
    let train_targets = targets_of(&train_set)?;
    let val_targets = targets_of(&val_set)?;
    let test_targets = targets_of(&test_set)?;

    let n = train_targets.len() as f64;
    let target_mean = train_targets.iter().sum::<f64>() / n;
    let target_var = train_targets.iter().map(|t| (t - target_mean).powi(2)).sum::<f64>() / n;
    if !(target_var > 0.0) {
        return Err(HarnessError::ConstantTarget);
    }
    let target_std = target_var.sqrt();
    let standardize = |v: &[f64]| -> Vec<f64> { v.iter().map(|t| (t - target_mean) / target_std).collect() };
    let (train_z, val_z) = (standardize(&train_targets), standardize(&val_targets));

    let scaler = FeatureScaler::fit(&train_set);
    let scale_all = |gs: &[FeaturizedGraph]| -> Vec<FeaturizedGraph> { gs.iter().map(|g| scaler.apply(g)).collect() };
    let (train_g, val_g, test_g) = (scale_all(&train_set), scale_all(&val_set), scale_all(&test_set));

    let dim = ModelParams::dim(config.model, config.hidden, config.layers)?;
    let parse = |flat: &[f64]| ModelParams::from_flat(flat, config.model, config.hidden, config.layers);
    let pool = thread_pool()?;
    let mut optimizer = OptimizerState::new(dim, config.budget, config.seed);
    let mut loss_history = Vec::with_capacity(config.budget);
    let mut val_history = Vec::with_capacity(config.budget);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    while let Ok(candidate) = optimizer.ask() {
        let model = parse(&candidate)?;
        let loss = mse(&pool, &model, &train_g, &train_z);
        let val = mse(&pool, &model, &val_g, &val_z);
        optimizer
            .tell(&candidate, loss)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if best.as_ref().is_none_or(|(b, _, _)| val < *b) {
            best = Some((val, loss_history.len(), candidate));
        }
        loss_history.push(loss);
        val_history.push(val);
    }
    let (_, best_iteration, best_params) = best.expect("budget is positive");

    let model = parse(&best_params)?;
    let test_predictions: Vec<(f64, f64)> = test_g
        .iter()
        .zip(&test_targets)
        .map(|(g, &t)| (t, model.predict(g).unwrap_or(0.0) * target_std + target_mean))
        .collect();
    let (t, p): (Vec<f64>, Vec<f64>) = test_predictions.iter().copied().unzip();
    Ok(RunArtifacts {
        config: config.clone(),
        algorithm: optimizer.algorithm(),
        loss_history,
        val_history,
        best_iteration,
        best_params,
        test_predictions,
        r2: r2_report(&t, &p).ok(),
        scaler,
        target_mean,
        target_std,
    })
}

/// Boosted-tree fit on the flattened training rows, evaluated on the test
/// split. The validation split is unused.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineRun {
    pub model: GbdtModel,
    pub test_predictions: Vec<(f64, f64)>,
    pub r2: Option<R2Report>,
    /// `(column, share)` in descending order.
    pub importances: Vec<(String, f64)>,
}

pub fn run_baseline(config: &RunConfig, data: &[FeaturizedGraph]) -> Result<BaselineRun, HarnessError> {
    config.validate()?;
    let (train_set, _, test_set) = split_dataset(data, config.split_sizes, config.seed)?;
    let rows: Vec<Vec<f64>> = train_set.iter().map(flatten_graph).collect();
    let model = baseline::fit(&rows, &targets_of(&train_set)?, &config.gbdt)?;
    let test_predictions = test_set
        .iter()
        .zip(targets_of(&test_set)?)
        .map(|(g, t)| Ok((t, model.predict(&flatten_graph(g))?)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let (t, p): (Vec<f64>, Vec<f64>) = test_predictions.iter().copied().unzip();
    let importances = baseline::feature_importances(&model, &column_names());
    Ok(BaselineRun {
        model,
        test_predictions,
        r2: r2_report(&t, &p).ok(),
        importances,
    })
}
