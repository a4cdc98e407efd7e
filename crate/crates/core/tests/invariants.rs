use proptest::prelude::*;
use robust_erm::datagen::{generate, read_csv, write_csv, ContaminationSpec, GenConfig, Problem};
use robust_erm::eval::{fold_assignment, mse, robust_cv_median};
use robust_erm::optim::{
    algorithm1_partition, fit_algorithm1, fit_algorithm3, fit_ols, fit_two_stage_detailed, robust_loss_at, split_halves,
    DeltaMode, OptimConfig,
};
use robust_erm::robust_mean::RobustMeanConfig;
use robust_erm::stats::median;
use robust_erm::{Dataset, Execution, LossKind, Model};

fn linear(seed: u64, outliers: ContaminationSpec) -> Dataset {
    generate(&GenConfig::new(Problem::LinearModel, 570, outliers, seed)).unwrap()
}

fn regression_config(k: usize, seed: u64) -> OptimConfig {
    OptimConfig::new(LossKind::Quadratic, k, DeltaMode::Fixed(1.0))
        .with_eta(0.02)
        .with_max_iter(300)
        .with_seed(seed)
}

#[test]
fn robust_risk_ignores_response_outliers() {
    let data = linear(3, ContaminationSpec::response(30));
    let truth = Model::new(vec![10.0], LossKind::Quadratic);
    let empirical = truth.per_sample_loss(&data).unwrap().iter().sum::<f64>() / data.len() as f64;
    let partition = algorithm1_partition(data.len(), 71, 3).unwrap();
    let robust = robust_loss_at(&truth, &data, &partition, &RobustMeanConfig::new(71, 1.0)).unwrap().estimate;
    // clean quadratic risk at the truth is 1/2 per sample
    assert!(robust > 0.3 && robust < 2.0, "robust {robust}");
    assert!(empirical > 50.0 * robust, "empirical {empirical}");
}

#[test]
fn unconstrained_two_stage_matches_algorithm1_on_the_second_half() {
    let data = linear(5, ContaminationSpec::none());
    // large delta puts every block in the quadratic regime
    let cfg = OptimConfig::new(LossKind::Quadratic, 35, DeltaMode::Fixed(1e3))
        .with_eta(0.02)
        .with_max_iter(2000)
        .with_seed(5);
    let report = fit_two_stage_detailed(&data, &cfg, &cfg, f64::INFINITY).unwrap();
    assert_eq!(report.rejected, 0);
    let mut halves = [report.first_half.clone(), report.second_half.clone()].concat();
    halves.sort_unstable();
    assert_eq!(halves, (0..data.len()).collect::<Vec<_>>());
    // the stage-2 objective vanishes at the stage-1 fit
    assert_eq!(report.stage2.trajectory[0].robust_loss, 0.0);
    let direct = fit_algorithm1(&data.subset(&report.second_half), &cfg).unwrap();
    assert!((report.stage2.beta[0] - direct.beta[0]).abs() < 1e-6, "{:?} vs {:?}", report.stage2.beta, direct.beta);
}

#[test]
fn constrained_two_stage_respects_the_excess_bound() {
    let data = linear(8, ContaminationSpec::leverage(30));
    let c1 = regression_config(35, 8);
    // start stage 2 far away so the bound has work to do
    let c2 = regression_config(35, 8).with_beta0(vec![0.0]);
    let delta_prime = 0.05;
    let report = fit_two_stage_detailed(&data, &c1, &c2, delta_prime).unwrap();
    let s1 = data.subset(&report.first_half);
    let partition = algorithm1_partition(s1.len(), 35, 8).unwrap();
    let mean_cfg = RobustMeanConfig::new(35, 1.0);
    let risk = |beta: &[f64]| {
        robust_loss_at(&Model::new(beta.to_vec(), LossKind::Quadratic), &s1, &partition, &mean_cfg)
            .unwrap()
            .estimate
    };
    let excess = risk(&report.stage2.beta) - risk(&report.stage1.beta);
    // the starting point is only admissible if it already satisfies the bound
    let start_excess = risk(&[0.0]) - risk(&report.stage1.beta);
    assert!(start_excess > delta_prime);
    assert!(report.rejected > 0);
    assert!(report.stage2.beta[0] == 0.0 || excess <= delta_prime, "excess {excess}");
}

#[test]
fn two_stage_slope_error_is_no_worse_than_one_stage() {
    let (mut single, mut double) = (Vec::new(), Vec::new());
    for seed in 0..100 {
        let data = linear(seed, ContaminationSpec::none());
        let cfg = regression_config(35, seed);
        let report = fit_two_stage_detailed(&data, &cfg, &cfg, 0.01).unwrap();
        single.push((report.stage1.beta[0] - 10.0).abs());
        double.push((report.stage2.beta[0] - 10.0).abs());
    }
    let (a, b) = (median(&single).unwrap(), median(&double).unwrap());
    assert!(b <= a, "two-stage {b} vs one stage {a}");
}

#[test]
fn algorithm3_is_insensitive_to_row_order() {
    let mut original = Vec::new();
    let mut reversed = Vec::new();
    for seed in 0..60 {
        let data = linear(seed, ContaminationSpec::leverage(30));
        let rev: Vec<usize> = (0..data.len()).rev().collect();
        let test = linear(seed ^ 0xfeed, ContaminationSpec::none());
        let cfg = regression_config(71, seed).with_max_iter(200);
        original.push(mse(&fit_algorithm3(&data, &cfg).unwrap().model(), &test).unwrap());
        reversed.push(mse(&fit_algorithm3(&data.subset(&rev), &cfg).unwrap().model(), &test).unwrap());
    }
    let (a, b) = (median(&original).unwrap(), median(&reversed).unwrap());
    assert!((a - b).abs() < 0.05 * a, "{a} vs {b}");
}

#[test]
fn cv_median_commutes_with_monotone_transforms() {
    let data = linear(2, ContaminationSpec::leverage(30));
    let fit = |train: &Dataset, test: &Dataset| mse(&fit_ols(train)?, test);
    let plain = robust_cv_median(&data, 9, 4, Execution::Serial, fit).unwrap();
    let logged = robust_cv_median(&data, 9, 4, Execution::Parallel, |a, b| fit(a, b).map(f64::ln)).unwrap();
    assert_eq!(plain.folds, logged.folds);
    assert!((plain.median_score.ln() - logged.median_score).abs() < 1e-12);
}

#[test]
fn generated_data_survives_csv() {
    let data = generate(&GenConfig::new(Problem::TwoMoons, 90, ContaminationSpec::moons_point(10), 1)).unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    write_csv(&data, file.reopen().unwrap()).unwrap();
    let back = read_csv(file.reopen().unwrap()).unwrap();
    assert_eq!(back.features(), data.features());
    assert_eq!(back.targets(), data.targets());
    assert_eq!(back.outlier_mask(), data.outlier_mask());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_partition_the_rows(n in 2usize..300, m in 2usize..20, seed in any::<u64>()) {
        prop_assume!(m <= n);
        let folds = fold_assignment(n, m, seed).unwrap();
        prop_assert_eq!(folds.len(), m);
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn split_halves_is_balanced(n in 0usize..500, seed in any::<u64>()) {
        let (a, b) = split_halves(n, seed);
        prop_assert!(a.len() - b.len() <= 1);
        let mut all = [a, b].concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn robust_risk_scales_with_the_data(seed in 0u64..1000, s in 0.2f64..5.0) {
        // scaling targets and slope by s scales every loss by s^2
        let data = linear(seed, ContaminationSpec::none());
        let partition = algorithm1_partition(data.len(), 31, seed).unwrap();
        let base = robust_loss_at(&Model::new(vec![9.0], LossKind::Quadratic), &data, &partition, &RobustMeanConfig::new(31, 2.0))
            .unwrap()
            .estimate;
        let targets = data.targets().iter().map(|y| y * s).collect();
        let scaled = Dataset::new(data.features().to_vec(), 1, targets, None).unwrap();
        let c = s * s;
        let r = robust_loss_at(&Model::new(vec![9.0 * s], LossKind::Quadratic), &scaled, &partition, &RobustMeanConfig::new(31, 2.0 * c))
            .unwrap()
            .estimate;
        prop_assert!((r - c * base).abs() <= 1e-8 * c * base.abs().max(1.0), "{} vs {}", r, c * base);
    }
}
