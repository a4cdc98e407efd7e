//! Metrics, median-of-folds cross-validation and Monte Carlo replication.

use rand::seq::SliceRandom;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::exec::{seeded_rng, Execution};
use crate::models::{Dataset, Model};
use crate::stats::{mean, median, std_dev};

/// Mean squared prediction error.
pub fn mse(model: &Model, data: &Dataset) -> Result<f64> {
    check(model, data)?;
    let total: f64 = data
        .rows()
        .zip(data.targets())
        .map(|(z, y)| (model.predict(z) - y).powi(2))
        .sum();
    Ok(total / data.len() as f64)
}

/// Fraction of rows whose label equals `sign(<beta, z>)`, with `sign(0) = +1`.
pub fn accuracy(model: &Model, data: &Dataset) -> Result<f64> {
    check(model, data)?;
    let correct = data
        .rows()
        .zip(data.targets())
        .filter(|(z, &y)| {
            let label = if model.predict(z) >= 0.0 { 1.0 } else { -1.0 };
            label == y
        })
        .count();
    Ok(correct as f64 / data.len() as f64)
}

fn check(model: &Model, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(invalid("cannot score an empty dataset"));
    }
    if model.beta.len() != data.n_features() {
        return Err(invalid(format!(
            "model has {} coefficients, data has {} features",
            model.beta.len(),
            data.n_features()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CVReport {
    pub fold_scores: Vec<f64>,
    pub median_score: f64,
    /// Row indices of each fold, ascending within a fold.
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
}

/// Splits `0..n` into `m` folds whose sizes differ by at most one, after a
/// seeded shuffle.
pub fn fold_assignment(n: usize, m: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if m < 2 || m > n {
        return Err(invalid(format!("fold count must be in 2..={n}, got {m}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seeded_rng(seed));
    let mut folds = vec![Vec::with_capacity(n / m + 1); m];
    for (pos, i) in idx.into_iter().enumerate() {
        folds[pos % m].push(i);
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Cross-validation scored by the median over folds.
///
/// `score(train, test)` fits on the complement of a fold and scores on the
/// fold. Folds run under `exec`.
pub fn robust_cv_median<F>(data: &Dataset, m: usize, seed: u64, exec: Execution, score: F) -> Result<CVReport>
where
    F: Fn(&Dataset, &Dataset) -> Result<f64> + Sync + Send,
{
    let folds = fold_assignment(data.len(), m, seed)?;
    let results = exec.map_indexed(m, |j| {
        let mut in_fold = vec![false; data.len()];
        folds[j].iter().for_each(|&i| in_fold[i] = true);
        let train: Vec<usize> = (0..data.len()).filter(|&i| !in_fold[i]).collect();
        score(&data.subset(&train), &data.subset(&folds[j]))
    });
    let fold_scores = results
        .into_iter()
        .enumerate()
        .map(|(run, r)| r.map_err(|e| Error::RunFailed { run, source: Box::new(e) }))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CVReport {
        median_score: median(&fold_scores).expect("m >= 2"),
        fold_scores,
        folds,
        seed,
    })
}

/// [`robust_cv_median`] with test MSE as the fold score.
pub fn robust_cv_mse<F>(data: &Dataset, m: usize, seed: u64, exec: Execution, fit: F) -> Result<CVReport>
where
    F: Fn(&Dataset) -> Result<Model> + Sync + Send,
{
    robust_cv_median(data, m, seed, exec, |train, test| mse(&fit(train)?, test))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub label: String,
    /// SHA-256 of the label, run count and base seed.
    pub digest: String,
    pub base_seed: u64,
    pub per_run: Vec<f64>,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
}

impl MonteCarloSummary {
    pub fn from_runs(label: &str, base_seed: u64, per_run: Vec<f64>) -> Result<Self> {
        if per_run.is_empty() {
            return Err(invalid("at least one run is required"));
        }
        let mut hasher = Sha256::new();
        hasher.update(format!("{label}|runs={}|base_seed={base_seed}", per_run.len()));
        let digest = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(Self {
            label: label.to_string(),
            digest,
            base_seed,
            median: median(&per_run).expect("nonempty"),
            mean: mean(&per_run).expect("nonempty"),
            std: std_dev(&per_run).expect("nonempty"),
            per_run,
        })
    }
}

/// Runs `experiment(base_seed + i)` for `i < runs` and summarizes the metric.
/// The first failing run, by index, aborts with its index attached.
pub fn monte_carlo<F>(label: &str, runs: usize, base_seed: u64, exec: Execution, experiment: F) -> Result<MonteCarloSummary>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    if runs == 0 {
        return Err(invalid("at least one run is required"));
    }
    let per_run = exec
        .map_indexed(runs, |i| experiment(base_seed.wrapping_add(i as u64)))
        .into_iter()
        .enumerate()
        .map(|(run, r)| r.map_err(|e| Error::RunFailed { run, source: Box::new(e) }))
        .collect::<Result<Vec<f64>>>()?;
    MonteCarloSummary::from_runs(label, base_seed, per_run)
}
