//! Two-stage refinement on a sample split.
//!
//! Stage 1 fits Algorithm 1 on the first half. Stage 2 descends the robust
//! estimate of the loss *difference* against the stage-1 fit on the second
//! half, rejecting any iterate whose empirical excess risk on the first half
//! exceeds `delta_prime`.

use rand::seq::SliceRandom;
use serde::Serialize;

use super::{
    active_gradient, algorithm1_partition, fit_algorithm1, robust_loss_at, take_step,
    DeltaSchedule, FitReport, IterRecord, OptimConfig, Scratch,
};
use crate::error::{invalid, Error, Result};
use crate::exec::seeded_rng;
use crate::models::{Dataset, Model};
use crate::robust_mean::{block_means_into, robust_mean_of_blocks};
use crate::stats::norm;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageReport {
    /// Row indices of the stage-1 half.
    pub first_half: Vec<usize>,
    /// Row indices of the stage-2 half.
    pub second_half: Vec<usize>,
    pub stage1: FitReport,
    pub stage2: FitReport,
    /// Stage-2 steps reverted for violating the excess-risk bound.
    pub rejected: usize,
}

/// Splits `0..n` at random into halves whose sizes differ by at most one.
pub fn split_halves(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = seeded_rng(seed);
    rng.set_stream(1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let second = idx.split_off(n.div_ceil(2));
    (idx, second)
}

/// Runs both stages and returns the stage-2 fit.
pub fn fit_two_stage(
    data: &Dataset,
    config1: &OptimConfig,
    config2: &OptimConfig,
    delta_prime: f64,
) -> Result<FitReport> {
    fit_two_stage_detailed(data, config1, config2, delta_prime).map(|r| r.stage2)
}

/// As [`fit_two_stage`], keeping the split and the stage-1 fit.
///
/// `delta_prime = f64::INFINITY` disables the constraint. Stage 2 starts
/// from `config2.beta0` when given, otherwise from the stage-1 fit.
pub fn fit_two_stage_detailed(
    data: &Dataset,
    config1: &OptimConfig,
    config2: &OptimConfig,
    delta_prime: f64,
) -> Result<TwoStageReport> {
    if !(delta_prime > 0.0) {
        return Err(invalid(format!("delta_prime must be positive, got {delta_prime}")));
    }
    if config1.loss != config2.loss {
        return Err(invalid("both stages must use the same loss"));
    }
    let (first_half, second_half) = split_halves(data.len(), config1.seed);
    let s1 = data.subset(&first_half);
    let s2 = data.subset(&second_half);
    config2.validate(&s2)?;

    let stage1 = fit_algorithm1(&s1, config1)?;
    let fhat = stage1.model();
    let p1 = algorithm1_partition(s1.len(), config1.k, config1.seed)?;
    let excess_config = config1.mean_config(stage1.delta_final.unwrap_or(config1.delta_mode.initial()));
    let base1 = robust_loss_at(&fhat, &s1, &p1, &excess_config)?.estimate;
    let excess = |beta: &[f64]| -> Result<f64> {
        let model = Model::new(beta.to_vec(), config1.loss);
        Ok(robust_loss_at(&model, &s1, &p1, &excess_config)?.estimate - base1)
    };

    let p2 = algorithm1_partition(s2.len(), config2.k, config2.seed)?;
    let reference = fhat.per_sample_loss(&s2)?;
    let mut model = Model::new(
        config2.beta0.clone().unwrap_or_else(|| fhat.beta.clone()),
        config2.loss,
    );
    let mut schedule = DeltaSchedule::new(config2.delta_mode);
    let mut scratch = Scratch::new(s2.n_features());
    let mut trajectory = Vec::with_capacity(config2.max_iter);
    let (mut skipped, mut rejected) = (0, 0);
    let root_n = (p2.block_size() as f64).sqrt();

    for t in 0..config2.max_iter {
        scratch.evaluate(&model, &s2, t)?;
        for (l, r) in scratch.losses.iter_mut().zip(&reference) {
            *l -= r;
        }
        block_means_into(&scratch.losses, &p2, &mut scratch.means);
        let delta = schedule.current;
        let rm = robust_mean_of_blocks(scratch.means.clone(), p2.block_size(), &config2.mean_config(delta))?;
        let active = active_gradient(
            &s2,
            &scratch.derivs,
            &p2,
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
        let previous = model.beta.clone();
        let stop = take_step(&mut model.beta, &scratch.grad, config2);
        if delta_prime.is_finite() && excess(&model.beta)? > delta_prime {
            model.beta = previous;
            rejected += 1;
            // with delta frozen every later iteration would repeat this one
            if !burn_in {
                break;
            }
            continue;
        }
        if stop {
            break;
        }
    }

    let stage2 = FitReport {
        beta: model.beta,
        loss: config2.loss,
        trajectory,
        delta_final: Some(schedule.current),
        skipped,
    };
    Ok(TwoStageReport {
        first_half,
        second_half,
        stage1,
        stage2,
        rejected,
    })
}
