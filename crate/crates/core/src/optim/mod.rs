//! Gradient descent on the robust risk estimate over linear models.
//!
//! * [`fit_algorithm1`]: one fixed partition, robust risk solved by modified
//!   weights, descent along the gradient of the implicit root.
//! * [`fit_algorithm3`]: permutation-invariant variant; every step draws a
//!   fresh partition, re-estimates the risk by permutation SGD and descends
//!   along that partition's active-block gradient.
//! * [`fit_algorithm4`]: median-of-means gradient baseline, descending along
//!   the gradient of the median block.
//!
//! With Huber's score the gradient of the robust risk is the average of the
//! per-block gradient means over *active* blocks, those whose loss mean lies
//! within `delta / sqrt(n)` of the robust estimate.

mod baseline;
mod two_stage;

pub use baseline::{fit_empirical_gd, fit_ols};
pub use two_stage::{fit_two_stage, fit_two_stage_detailed, split_halves, TwoStageReport};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec::seeded_rng;
use crate::models::{Dataset, LossKind, Model};
use crate::robust_mean::{
    block_means_into, mad_delta, permutation_sgd, robust_mean_fixed, robust_mean_of_blocks,
    BlockPartition, RobustMeanConfig, RobustMeanResult,
};
use crate::stats::{lower_median_index, median, norm};

/// How the scale `delta` is chosen during a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DeltaMode {
    Fixed(f64),
    /// Start at `initial`; for the first `burn_in` iterations replace delta by
    /// the MAD estimate of the current block means, then freeze it.
    MadBurnIn { burn_in: usize, initial: f64 },
}

impl DeltaMode {
    fn initial(self) -> f64 {
        match self {
            DeltaMode::Fixed(d) => d,
            DeltaMode::MadBurnIn { initial, .. } => initial,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimConfig {
    pub loss: LossKind,
    pub eta: f64,
    pub max_iter: usize,
    pub k: usize,
    pub delta_mode: DeltaMode,
    pub seed: u64,
    /// Starting coefficients; zeros when `None`.
    pub beta0: Option<Vec<f64>>,
    /// Stop once `|beta_{t+1} - beta_t| <= tol`.
    pub tol: Option<f64>,
    /// Permutation-SGD steps per outer iteration of Algorithm 3.
    pub inner_iters: usize,
    pub mw_tol: f64,
    pub mw_max_iter: usize,
}

impl OptimConfig {
    pub fn new(loss: LossKind, k: usize, delta_mode: DeltaMode) -> Self {
        Self {
            loss,
            eta: 0.05,
            max_iter: 500,
            k,
            delta_mode,
            seed: 0,
            beta0: None,
            tol: None,
            inner_iters: 25,
            mw_tol: 1e-10,
            mw_max_iter: 500,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_beta0(mut self, beta0: Vec<f64>) -> Self {
        self.beta0 = Some(beta0);
        self
    }

    pub fn validate(&self, data: &Dataset) -> Result<()> {
        data.check_for(self.loss)?;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid(format!("step size must be positive, got {}", self.eta)));
        }
        if self.k == 0 || self.k > data.len() {
            return Err(invalid(format!(
                "block count k = {} must be in 1..={}",
                self.k,
                data.len()
            )));
        }
        match self.delta_mode {
            DeltaMode::Fixed(d) if !(d > 0.0 && d.is_finite()) => {
                return Err(invalid(format!("delta must be positive, got {d}")))
            }
            DeltaMode::MadBurnIn { burn_in, initial } if burn_in == 0 || !(initial > 0.0) => {
                return Err(invalid("MAD burn-in needs m >= 1 and a positive initial delta"))
            }
            _ => {}
        }
        if self.inner_iters == 0 {
            return Err(invalid("inner_iters must be at least 1"));
        }
        if let Some(beta) = &self.beta0 {
            if beta.len() != data.n_features() {
                return Err(invalid(format!(
                    "beta0 has {} coefficients, data has {} features",
                    beta.len(),
                    data.n_features()
                )));
            }
        }
        Ok(())
    }

    fn start(&self, data: &Dataset) -> Model {
        Model::new(
            self.beta0.clone().unwrap_or_else(|| vec![0.0; data.n_features()]),
            self.loss,
        )
    }

    fn mean_config(&self, delta: f64) -> RobustMeanConfig {
        RobustMeanConfig {
            mw_tol: self.mw_tol,
            mw_max_iter: self.mw_max_iter,
            ..RobustMeanConfig::new(self.k, delta)
        }
    }
}

/// One row of a fit trajectory, describing the iterate *before* its update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterRecord {
    pub iteration: usize,
    pub robust_loss: f64,
    pub grad_norm: f64,
    pub delta: Option<f64>,
    pub active_blocks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub beta: Vec<f64>,
    pub loss: LossKind,
    pub trajectory: Vec<IterRecord>,
    pub delta_final: Option<f64>,
    /// Iterations that made no step because no block was active.
    pub skipped: usize,
}

impl FitReport {
    pub fn model(&self) -> Model {
        Model::new(self.beta.clone(), self.loss)
    }
}

/// Current delta plus the MAD burn-in bookkeeping.
struct DeltaSchedule {
    mode: DeltaMode,
    current: f64,
}

impl DeltaSchedule {
    fn new(mode: DeltaMode) -> Self {
        Self {
            mode,
            current: mode.initial(),
        }
    }

    fn in_burn_in(&self, t: usize) -> bool {
        matches!(self.mode, DeltaMode::MadBurnIn { burn_in, .. } if t < burn_in)
    }

    /// Sets delta for iteration `t + 1` from the block means seen at `t`.
    fn advance(&mut self, t: usize, block_means: &[f64]) -> Result<()> {
        if self.in_burn_in(t) {
            self.current = mad_delta(block_means)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Scratch {
    losses: Vec<f64>,
    derivs: Vec<f64>,
    means: Vec<f64>,
    grad: Vec<f64>,
}

impl Scratch {
    fn new(d: usize) -> Self {
        Self {
            grad: vec![0.0; d],
            ..Default::default()
        }
    }

    fn evaluate(&mut self, model: &Model, data: &Dataset, t: usize) -> Result<()> {
        model.losses_and_derivatives(data, &mut self.losses, &mut self.derivs);
        if self.losses.iter().any(|l| !l.is_finite()) || model.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Diverged { iteration: t });
        }
        Ok(())
    }
}

/// Averages the per-block gradient means over blocks whose mean is within
/// `scale` of `estimate`, writing into `grad`. Returns the active count.
fn active_gradient(
    data: &Dataset,
    derivs: &[f64],
    partition: &BlockPartition,
    means: &[f64],
    estimate: f64,
    scale: f64,
    grad: &mut [f64],
) -> usize {
    grad.fill(0.0);
    let mut count = 0usize;
    for (group, &m) in partition.groups().zip(means) {
        if (m - estimate).abs() <= scale {
            count += 1;
            accumulate(data, derivs, group, grad);
        }
    }
    if count > 0 {
        let denom = (count * partition.block_size()) as f64;
        grad.iter_mut().for_each(|g| *g /= denom);
    }
    count
}

fn accumulate(data: &Dataset, derivs: &[f64], group: &[usize], grad: &mut [f64]) {
    for &i in group {
        let w = derivs[i];
        for (g, z) in grad.iter_mut().zip(data.row(i)) {
            *g += z * w;
        }
    }
}

/// Robust risk estimate of `model` on a fixed partition.
pub fn robust_loss_at(
    model: &Model,
    data: &Dataset,
    partition: &BlockPartition,
    config: &RobustMeanConfig,
) -> Result<RobustMeanResult> {
    let losses = model.per_sample_loss(data)?;
    robust_mean_fixed(&losses, partition, config)
}

/// Gradient in `beta` of [`robust_loss_at`].
pub fn robust_gradient(
    model: &Model,
    data: &Dataset,
    partition: &BlockPartition,
    config: &RobustMeanConfig,
) -> Result<Vec<f64>> {
    let derivs = model.loss_derivatives(data)?;
    let rm = robust_loss_at(model, data, partition, config)?;
    let scale = config.delta / (partition.block_size() as f64).sqrt();
    let mut grad = vec![0.0; data.n_features()];
    let count = active_gradient(data, &derivs, partition, &rm.block_means, rm.estimate, scale, &mut grad);
    if count == 0 {
        return Err(Error::DegenerateGradient {
            iteration: None,
            delta: config.delta,
        });
    }
    Ok(grad)
}

/// The shuffled partition Algorithm 1 draws for `seed`.
pub fn algorithm1_partition(n_samples: usize, k: usize, seed: u64) -> Result<BlockPartition> {
    BlockPartition::shuffled(n_samples, k, &mut seeded_rng(seed))
}

/// Algorithm 1: gradient descent on the robust risk over one fixed, randomly
/// drawn partition.
pub fn fit_algorithm1(data: &Dataset, config: &OptimConfig) -> Result<FitReport> {
    config.validate(data)?;
    let partition = algorithm1_partition(data.len(), config.k, config.seed)?;
    descend_fixed_partition(data, &partition, config)
}

/// Algorithm 1 on a caller-supplied partition.
pub fn fit_fixed_partition(
    data: &Dataset,
    partition: &BlockPartition,
    config: &OptimConfig,
) -> Result<FitReport> {
    config.validate(data)?;
    if partition.n_samples() != data.len() {
        return Err(invalid("partition does not cover the dataset"));
    }
    descend_fixed_partition(data, partition, config)
}

fn descend_fixed_partition(
    data: &Dataset,
    partition: &BlockPartition,
    config: &OptimConfig,
) -> Result<FitReport> {
    let mut model = config.start(data);
    let mut schedule = DeltaSchedule::new(config.delta_mode);
    let mut scratch = Scratch::new(data.n_features());
    let mut trajectory = Vec::with_capacity(config.max_iter);
    let mut skipped = 0;
    let root_n = (partition.block_size() as f64).sqrt();

    for t in 0..config.max_iter {
        scratch.evaluate(&model, data, t)?;
        block_means_into(&scratch.losses, partition, &mut scratch.means);
        let delta = schedule.current;
        let rm = robust_mean_of_blocks(
            scratch.means.clone(),
            partition.block_size(),
            &config.mean_config(delta),
        )?;
        let active = active_gradient(
            data,
            &scratch.derivs,
            partition,
            &scratch.means,
            rm.estimate,
            delta / root_n,
            &mut scratch.grad,
        );
        let burn_in = schedule.in_burn_in(t);
        schedule.advance(t, &scratch.means)?;
        trajectory.push(IterRecord {
            iteration: t,
            robust_loss: rm.estimate,
            grad_norm: norm(&scratch.grad),
            delta: Some(delta),
            active_blocks: active,
        });
        if active == 0 {
            if burn_in {
                skipped += 1;
                continue;
            }
            return Err(Error::DegenerateGradient {
                iteration: Some(t),
                delta,
            });
        }
        if take_step(&mut model.beta, &scratch.grad, config) {
            break;
        }
    }
    Ok(FitReport {
        beta: model.beta,
        loss: config.loss,
        trajectory,
        delta_final: Some(schedule.current),
        skipped,
    })
}

/// `beta -= eta * grad`; returns true when the early-stop tolerance is met.
fn take_step(beta: &mut [f64], grad: &[f64], config: &OptimConfig) -> bool {
    let mut step_sq = 0.0;
    for (b, g) in beta.iter_mut().zip(grad) {
        let s = config.eta * g;
        *b -= s;
        step_sq += s * s;
    }
    config.tol.is_some_and(|tol| step_sq.sqrt() <= tol)
}

/// Blocks of size `floor(N / k)` over a permutation, `floor(N / n)` of them.
fn permutation_partition(data: &Dataset, k: usize) -> Result<BlockPartition> {
    BlockPartition::with_block_size(data.len(), data.len() / k)
}

/// Algorithm 3: stochastic descent for the permutation-invariant estimator.
///
/// Each iteration draws a uniform permutation, estimates the
/// permutation-invariant risk with `inner_iters` permutation-SGD steps
/// warm-started at the previous estimate (the median of the drawn blocks'
/// loss means on the first iteration), and steps along
/// the drawn partition's active-block gradient. Iterations without an
/// active block are skipped and counted.
pub fn fit_algorithm3(data: &Dataset, config: &OptimConfig) -> Result<FitReport> {
    config.validate(data)?;
    let mut rng = seeded_rng(config.seed);
    let mut outer = permutation_partition(data, config.k)?;
    let mut inner = outer.clone();
    let mut model = config.start(data);
    let mut schedule = DeltaSchedule::new(config.delta_mode);
    let mut scratch = Scratch::new(data.n_features());
    let mut trajectory = Vec::with_capacity(config.max_iter);
    let mut skipped = 0;
    let root_n = (outer.block_size() as f64).sqrt();
    let mut previous: Option<f64> = None;

    for t in 0..config.max_iter {
        scratch.evaluate(&model, data, t)?;
        outer.reshuffle(&mut rng);
        block_means_into(&scratch.losses, &outer, &mut scratch.means);
        let delta = schedule.current;
        let start = previous.unwrap_or_else(|| median(&scratch.means).expect("k >= 1"));
        let inner_config = RobustMeanConfig {
            sgd_iters: config.inner_iters,
            ..config.mean_config(delta)
        };
        let estimate =
            permutation_sgd(&scratch.losses, &mut inner, &inner_config, Some(start), &mut rng)?.estimate;
        previous = Some(estimate);
        let active = active_gradient(
            data,
            &scratch.derivs,
            &outer,
            &scratch.means,
            estimate,
            delta / root_n,
            &mut scratch.grad,
        );
        schedule.advance(t, &scratch.means)?;
        trajectory.push(IterRecord {
            iteration: t,
            robust_loss: estimate,
            grad_norm: norm(&scratch.grad),
            delta: Some(delta),
            active_blocks: active,
        });
        if active == 0 {
            skipped += 1;
            continue;
        }
        if take_step(&mut model.beta, &scratch.grad, config) {
            break;
        }
    }
    Ok(FitReport {
        beta: model.beta,
        loss: config.loss,
        trajectory,
        delta_final: Some(schedule.current),
        skipped,
    })
}

/// Algorithm 4: median-of-means gradient descent. Each iteration draws a
/// uniform permutation and steps along the mean gradient of the block whose
/// loss mean is the (lower) median. `delta_mode` is ignored.
pub fn fit_algorithm4(data: &Dataset, config: &OptimConfig) -> Result<FitReport> {
    config.validate(data)?;
    let mut rng = seeded_rng(config.seed);
    let mut partition = permutation_partition(data, config.k)?;
    let mut model = config.start(data);
    let mut scratch = Scratch::new(data.n_features());
    let mut trajectory = Vec::with_capacity(config.max_iter);
    let n = partition.block_size() as f64;

    for t in 0..config.max_iter {
        scratch.evaluate(&model, data, t)?;
        partition.reshuffle(&mut rng);
        block_means_into(&scratch.losses, &partition, &mut scratch.means);
        let j = lower_median_index(&scratch.means).expect("k >= 1");
        scratch.grad.fill(0.0);
        accumulate(data, &scratch.derivs, partition.group(j), &mut scratch.grad);
        scratch.grad.iter_mut().for_each(|g| *g /= n);
        trajectory.push(IterRecord {
            iteration: t,
            robust_loss: scratch.means[j],
            grad_norm: norm(&scratch.grad),
            delta: None,
            active_blocks: 1,
        });
        if take_step(&mut model.beta, &scratch.grad, config) {
            break;
        }
    }
    Ok(FitReport {
        beta: model.beta,
        loss: config.loss,
        trajectory,
        delta_final: None,
        skipped: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn linear_data(seed: u64, n: usize) -> Dataset {
        let mut rng = seeded_rng(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let z: f64 = rng.random_range(-3.0..3.0);
            let e: f64 = StandardNormal.sample(&mut rng);
            rows.push(vec![z, 1.0]);
            y.push(2.0 * z - 1.0 + 0.5 * e);
        }
        Dataset::from_rows(&rows, y).unwrap()
    }

    #[test]
    fn zero_iterations_return_start() {
        let data = linear_data(1, 50);
        let cfg = OptimConfig::new(LossKind::Quadratic, 5, DeltaMode::Fixed(1.0))
            .with_max_iter(0)
            .with_beta0(vec![0.3, -0.2]);
        for fit in [fit_algorithm1, fit_algorithm3, fit_algorithm4] {
            let r = fit(&data, &cfg).unwrap();
            assert_eq!(r.beta, vec![0.3, -0.2]);
            assert!(r.trajectory.is_empty());
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let data = linear_data(1, 20);
        let base = OptimConfig::new(LossKind::Quadratic, 5, DeltaMode::Fixed(1.0));
        assert!(fit_algorithm1(&data, &base.clone().with_eta(0.0)).is_err());
        assert!(fit_algorithm1(&data, &OptimConfig { k: 0, ..base.clone() }).is_err());
        assert!(fit_algorithm1(&data, &OptimConfig { k: 21, ..base.clone() }).is_err());
        assert!(fit_algorithm1(&data, &OptimConfig { delta_mode: DeltaMode::Fixed(-1.0), ..base.clone() }).is_err());
        assert!(fit_algorithm3(
            &data,
            &OptimConfig {
                delta_mode: DeltaMode::MadBurnIn { burn_in: 0, initial: 0.1 },
                ..base.clone()
            }
        )
        .is_err());
        assert!(fit_algorithm1(&data, &base.clone().with_beta0(vec![1.0])).is_err());
        // logistic loss on real-valued targets
        assert!(fit_algorithm1(&data, &OptimConfig { loss: LossKind::Logistic, ..base }).is_err());
    }

    #[test]
    fn perfect_fit_has_zero_loss_and_gradient() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 * 0.1, 1.0]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 3.0 * r[0] - 2.0).collect();
        let data = Dataset::from_rows(&rows, y).unwrap();
        let model = Model::new(vec![3.0, -2.0], LossKind::Quadratic);
        let p = BlockPartition::consecutive(40, 8).unwrap();
        let cfg = RobustMeanConfig::new(8, 0.7);
        let rm = robust_loss_at(&model, &data, &p, &cfg).unwrap();
        assert!(rm.estimate.abs() < 1e-20);
        let g = robust_gradient(&model, &data, &p, &cfg).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn huge_delta_gradient_is_full_batch() {
        let data = linear_data(3, 60);
        let model = Model::new(vec![0.5, 0.1], LossKind::Quadratic);
        let p = BlockPartition::consecutive(60, 6).unwrap();
        let g = robust_gradient(&model, &data, &p, &RobustMeanConfig::new(6, 1e9)).unwrap();
        let mut expected = [0.0; 2];
        for (z, &y) in data.rows().zip(data.targets()) {
            let r = 2.0 * (0.5 * z[0] + 0.1 * z[1] - y);
            expected[0] += r * z[0] / 60.0;
            expected[1] += r * z[1] / 60.0;
        }
        for j in 0..2 {
            assert!((g[j] - expected[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_gradient_is_reported() {
        // two blocks far apart: the root lies in a flat region
        let data = Dataset::from_rows(&[vec![1.0], vec![1.0]], vec![0.0, 10.0]).unwrap();
        let model = Model::new(vec![0.0], LossKind::Quadratic);
        let p = BlockPartition::consecutive(2, 2).unwrap();
        let err = robust_gradient(&model, &data, &p, &RobustMeanConfig::new(2, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateGradient { iteration: None, .. }));

        let cfg = OptimConfig::new(LossKind::Quadratic, 2, DeltaMode::Fixed(1.0)).with_max_iter(3);
        let err = fit_fixed_partition(&data, &p, &cfg).unwrap_err();
        assert!(matches!(err, Error::DegenerateGradient { iteration: Some(0), .. }));
        // Algorithm 3 skips instead
        let r = fit_algorithm3(&data, &OptimConfig { k: 2, ..cfg }).unwrap();
        assert_eq!(r.skipped, 3);
    }

    #[test]
    fn clean_quadratic_with_huge_delta_reaches_ols() {
        let data = linear_data(7, 200);
        let cfg = OptimConfig::new(LossKind::Quadratic, 10, DeltaMode::Fixed(1e9))
            .with_eta(0.05)
            .with_max_iter(3000);
        let r = fit_algorithm1(&data, &cfg).unwrap();
        let ols = fit_ols(&data).unwrap();
        for j in 0..2 {
            assert!((r.beta[j] - ols.beta[j]).abs() < 1e-3, "{:?} vs {:?}", r.beta, ols.beta);
        }
    }

    #[test]
    fn identical_rows_move_like_plain_gradient_descent() {
        let data = Dataset::from_rows(&vec![vec![1.5, 1.0]; 30], vec![2.0; 30]).unwrap();
        let cfg = OptimConfig::new(LossKind::Quadratic, 5, DeltaMode::Fixed(0.5))
            .with_eta(0.1)
            .with_max_iter(20);
        let mut beta = [0.0f64, 0.0];
        for _ in 0..20 {
            let r = 2.0 * (beta[0] * 1.5 + beta[1] - 2.0);
            beta[0] -= 0.1 * r * 1.5;
            beta[1] -= 0.1 * r;
        }
        for fit in [fit_algorithm1, fit_algorithm3, fit_algorithm4] {
            let report = fit(&data, &cfg).unwrap();
            for j in 0..2 {
                assert!((report.beta[j] - beta[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_block_algorithm4_is_full_batch_gd() {
        let data = linear_data(5, 40);
        let cfg = OptimConfig::new(LossKind::Quadratic, 1, DeltaMode::Fixed(1.0))
            .with_eta(0.02)
            .with_max_iter(15);
        let report = fit_algorithm4(&data, &cfg).unwrap();
        let gd = fit_empirical_gd(&data, LossKind::Quadratic, 0.02, 15, None).unwrap();
        for j in 0..2 {
            assert!((report.beta[j] - gd.beta[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn mad_burn_in_freezes_delta() {
        let data = linear_data(9, 120);
        let cfg = OptimConfig::new(LossKind::Quadratic, 11, DeltaMode::MadBurnIn { burn_in: 4, initial: 0.1 })
            .with_max_iter(12);
        let r = fit_algorithm3(&data, &cfg).unwrap();
        let deltas: Vec<f64> = r.trajectory.iter().map(|rec| rec.delta.unwrap()).collect();
        assert_eq!(deltas[0], 0.1);
        assert!(deltas[5..].iter().all(|&d| d == deltas[4]));
        assert_eq!(r.delta_final, Some(deltas[4]));
    }

    #[test]
    fn early_stop() {
        let data = linear_data(2, 100);
        let cfg = OptimConfig {
            tol: Some(1e-6),
            ..OptimConfig::new(LossKind::Quadratic, 5, DeltaMode::Fixed(1e9)).with_max_iter(100_000)
        };
        let r = fit_algorithm1(&data, &cfg).unwrap();
        assert!(r.trajectory.len() < 100_000);
    }

    #[test]
    fn fits_are_deterministic() {
        let data = linear_data(4, 90);
        let cfg = OptimConfig::new(LossKind::Quadratic, 9, DeltaMode::MadBurnIn { burn_in: 5, initial: 0.1 })
            .with_max_iter(50)
            .with_seed(17);
        for fit in [fit_algorithm1, fit_algorithm3, fit_algorithm4] {
            assert_eq!(fit(&data, &cfg).unwrap(), fit(&data, &cfg).unwrap());
        }
    }
}
