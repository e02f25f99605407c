//! Gradient-free optimization with an ask/tell interface.
//!
//! Two engines are available: a (1+1) evolution strategy with 1/5th-success
//! step-size control, and DE/rand/1/bin differential evolution. The
//! selection rule picks one from the evaluation budget per dimension.
//! Both start from the all-zeros vector with unit search scale.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Loss substituted for NaN and infinite values.
pub const PENALTY_LOSS: f64 = 1e12;
pub const DEFAULT_BUDGET: usize = 2000;
/// Budget per dimension at which the selector switches to DE.
pub const SELECTION_RATIO: usize = 50;

const DE_WEIGHT: f64 = 0.8;
const DE_CROSSOVER: f64 = 0.9;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("candidate has dimension {found}, optimizer expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    OnePlusOneEs,
    DifferentialEvolution,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::OnePlusOneEs => "one-plus-one-es",
            Algorithm::DifferentialEvolution => "differential-evolution",
        })
    }
}

impl FromStr for Algorithm {
    type Err = OptimizeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-plus-one-es" => Ok(Algorithm::OnePlusOneEs),
            "differential-evolution" => Ok(Algorithm::DifferentialEvolution),
            other => Err(OptimizeError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// (1+1)-ES when `budget / dim < 50`, differential evolution otherwise.
pub fn select_algorithm(dim: usize, budget: usize) -> Algorithm {
    // budget/dim < 50  ⇔  budget < 50·dim, without rounding
    if budget < SELECTION_RATIO * dim.max(1) {
        Algorithm::OnePlusOneEs
    } else {
        Algorithm::DifferentialEvolution
    }
}

/// DE population size for a dimension: 4 + 3·⌊ln dim⌋.
pub fn de_population(dim: usize) -> usize {
    4 + 3 * (dim.max(1) as f64).ln().floor() as usize
}

#[derive(Clone, Debug)]
enum Engine {
    OnePlusOne {
        sigma: f64,
        parent: Vec<f64>,
        parent_loss: Option<f64>,
    },
    DiffEvo {
        population: Vec<Vec<f64>>,
        losses: Vec<f64>,
        /// Next population slot handed out by `ask`.
        cursor: usize,
    },
}

#[derive(Clone, Debug)]
struct Pending {
    candidate: Vec<f64>,
    slot: usize,
}

/// Ask/tell optimizer state. Single writer.
#[derive(Clone, Debug)]
pub struct OptimizerState {
    dim: usize,
    budget: usize,
    best_params: Vec<f64>,
    best_loss: f64,
    eval_count: usize,
    asked: usize,
    rng_seed: u64,
    algorithm: Algorithm,
    rng: ChaCha8Rng,
    engine: Engine,
    pending: VecDeque<Pending>,
}

impl OptimizerState {
    /// State with the algorithm picked by [`select_algorithm`].
    pub fn new(dim: usize, budget: usize, seed: u64) -> Self {
        Self::with_algorithm(dim, budget, seed, select_algorithm(dim, budget))
    }

    pub fn with_algorithm(dim: usize, budget: usize, seed: u64, algorithm: Algorithm) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let engine = match algorithm {
            Algorithm::OnePlusOneEs => Engine::OnePlusOne {
                sigma: 1.0,
                parent: vec![0.0; dim],
                parent_loss: None,
            },
            Algorithm::DifferentialEvolution => {
                let size = de_population(dim);
                let mut population = vec![vec![0.0; dim]];
                for _ in 1..size {
                    population.push(gaussian(&mut rng, dim));
                }
                Engine::DiffEvo {
                    population,
                    losses: vec![f64::INFINITY; size],
                    cursor: 0,
                }
            }
        };
        Self {
            dim,
            budget,
            best_params: vec![0.0; dim],
            best_loss: f64::INFINITY,
            eval_count: 0,
            asked: 0,
            rng_seed: seed,
            algorithm,
            rng,
            engine,
            pending: VecDeque::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn budget(&self) -> usize {
        self.budget
    }
    pub fn best_params(&self) -> &[f64] {
        &self.best_params
    }
    pub fn best_loss(&self) -> f64 {
        self.best_loss
    }
    pub fn eval_count(&self) -> usize {
        self.eval_count
    }
    pub fn seed(&self) -> u64 {
        self.rng_seed
    }
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// Current ES step size, if this is an ES.
    pub fn sigma(&self) -> Option<f64> {
        match &self.engine {
            Engine::OnePlusOne { sigma, .. } => Some(*sigma),
            Engine::DiffEvo { .. } => None,
        }
    }

    /// Next candidate to evaluate.
    pub fn ask(&mut self) -> Result<Vec<f64>, OptimizeError> {
        if self.asked >= self.budget {
            return Err(OptimizeError::BudgetExhausted(self.budget));
        }
        let dim = self.dim;
        let (candidate, slot) = match &mut self.engine {
            Engine::OnePlusOne {
                sigma,
                parent,
                parent_loss,
            } => {
                if parent_loss.is_none() && self.asked == 0 {
                    (parent.clone(), 0)
                } else {
                    let step = *sigma;
                    let c = parent
                        .iter()
                        .map(|p| p + step * self.rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    (c, 0)
                }
            }
            Engine::DiffEvo {
                population,
                losses,
                cursor,
            } => {
                let size = population.len();
                let target = *cursor % size;
                *cursor += 1;
                if losses[target].is_infinite() && self.asked < size {
                    (population[target].clone(), target)
                } else {
                    let [a, b, c] = distinct_others(&mut self.rng, size, target);
                    let forced = self.rng.random_range(0..dim.max(1));
                    let trial = (0..dim)
                        .map(|j| {
                            if j == forced || self.rng.random::<f64>() < DE_CROSSOVER {
                                population[a][j] + DE_WEIGHT * (population[b][j] - population[c][j])
                            } else {
                                population[target][j]
                            }
                        })
                        .collect();
                    (trial, target)
                }
            }
        };
        self.asked += 1;
        self.pending.push_back(Pending {
            candidate: candidate.clone(),
            slot,
        });
        Ok(candidate)
    }

    /// Reports the loss of a candidate. Non-finite losses count as
    /// [`PENALTY_LOSS`].
    pub fn tell(&mut self, candidate: &[f64], loss: f64) -> Result<(), OptimizeError> {
        if candidate.len() != self.dim {
            return Err(OptimizeError::DimensionMismatch {
                expected: self.dim,
                found: candidate.len(),
            });
        }
        let loss = if loss.is_finite() { loss } else { PENALTY_LOSS };
        self.eval_count += 1;
        if loss < self.best_loss {
            self.best_loss = loss;
            self.best_params = candidate.to_vec();
        }
        let slot = self
            .pending
            .iter()
            .position(|p| p.candidate == candidate)
            .and_then(|i| self.pending.remove(i))
            .map(|p| p.slot);
        let Some(slot) = slot else {
            // not produced by ask: only the argmin bookkeeping applies
            return Ok(());
        };
        match &mut self.engine {
            Engine::OnePlusOne {
                sigma,
                parent,
                parent_loss,
            } => match parent_loss {
                None => *parent_loss = Some(loss),
                Some(current) => {
                    if loss < *current {
                        *parent = candidate.to_vec();
                        *current = loss;
                        *sigma *= (1.0f64 / 3.0).exp();
                    } else {
                        *sigma *= (-1.0f64 / 12.0).exp();
                    }
                }
            },
            Engine::DiffEvo {
                population, losses, ..
            } => {
                if loss <= losses[slot] || losses[slot].is_infinite() {
                    population[slot] = candidate.to_vec();
                    losses[slot] = loss;
                }
            }
        }
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Three distinct population indices, all different from `target`.
fn distinct_others(rng: &mut ChaCha8Rng, size: usize, target: usize) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let i = rng.random_range(0..size);
        if i != target && !picked[..k].contains(&i) {
            picked[k] = i;
            k += 1;
        }
    }
    picked
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub candidate_loss: f64,
    pub best_loss: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeResult {
    pub best_params: Vec<f64>,
    pub best_loss: f64,
    pub history: Vec<HistoryEntry>,
    pub algorithm: Algorithm,
}

/// Runs ask/tell to the full budget with the selected algorithm.
pub fn minimize<F>(objective: F, dim: usize, budget: usize, seed: u64) -> MinimizeResult
where
    F: FnMut(&[f64]) -> f64,
{
    minimize_with(objective, OptimizerState::new(dim, budget, seed))
}

pub fn minimize_with<F>(mut objective: F, mut state: OptimizerState) -> MinimizeResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut history = Vec::with_capacity(state.budget());
    while let Ok(candidate) = state.ask() {
        let loss = objective(&candidate);
        let loss = if loss.is_finite() { loss } else { PENALTY_LOSS };
        state
            .tell(&candidate, loss)
            .expect("candidate dimension comes from the optimizer");
        history.push(HistoryEntry {
            candidate_loss: loss,
            best_loss: state.best_loss(),
        });
    }
    MinimizeResult {
        best_params: state.best_params().to_vec(),
        best_loss: state.best_loss(),
        history,
        algorithm: state.algorithm(),
    }
}

/// `iteration,candidate_loss,best_loss`, iterations counted from 1.
pub fn write_history_csv(path: impl AsRef<Path>, history: &[HistoryEntry]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "candidate_loss", "best_loss"])?;
    for (i, h) in history.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            format!("{:e}", h.candidate_loss),
            format!("{:e}", h.best_loss),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Standard test objectives.
pub mod benchmarks {
    /// Σxᵢ², minimum 0 at the origin.
    pub fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    /// Sphere centred at `0.5 − 0.05·i`, so the zero start is not optimal.
    pub fn shifted_sphere(x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - 0.5 + 0.05 * i as f64).powi(2))
            .sum()
    }

    /// Minimum 0 at (1, …, 1).
    pub fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    /// Multimodal; minimum 0 at the origin.
    pub fn rastrigin(x: &[f64]) -> f64 {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    }

    pub const ALL: [(&str, fn(&[f64]) -> f64); 4] = [
        ("sphere", sphere),
        ("shifted_sphere", shifted_sphere),
        ("rosenbrock", rosenbrock),
        ("rastrigin", rastrigin),
    ];
}
