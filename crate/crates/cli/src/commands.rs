//! Command implementations. Replicates run through the core crate's
//! execution policy; every file is written after all replicates finish.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use robust_erm::datagen::{generate, read_csv, ContaminationSpec, GenConfig, Problem};
use robust_erm::eval::{accuracy, mse, robust_cv_median, MonteCarloSummary};
use robust_erm::optim::{
    fit_algorithm1, fit_algorithm3, fit_algorithm4, fit_empirical_gd, fit_ols, fit_two_stage,
    DeltaMode, FitReport, OptimConfig,
};
use robust_erm::stats::median;
use robust_erm::{Dataset, Error, Execution, LossKind, Model};
use serde::Serialize;

use crate::args::{Algo, Command, DataSource, DatasetName, DeltaModeArg, Figure, Settings};
use crate::svg::{self, Chart, Series, PALETTE};
use crate::CliError;

/// Seed offset for the clean test sample paired with each training draw.
const TEST_SEED_SALT: u64 = 0x5eed_7e57;
const TEST_SIZE: usize = 1000;
const INITIAL_DELTA: f64 = 0.1;

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let exp = Experiment::new(settings.clone())?;
    match settings.command {
        Command::Fit => exp.fit_command(),
        Command::SweepK => exp.sweep_k(&settings.out_dir),
        Command::SweepDelta => exp.sweep_delta(&settings.out_dir),
        Command::CompareAlgos => exp.compare_algos(&settings.out_dir),
        Command::Cv => exp.cross_validate(),
        Command::ReproduceFigure => reproduce_figure(settings),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let mut root = &e;
        while let Error::RunFailed { source, .. } = root {
            root = source;
        }
        match root {
            Error::InvalidArgument(_) => CliError::Usage(message),
            _ => CliError::Runtime(message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Task {
    Regression,
    Classification,
}

impl Task {
    fn metric_name(self) -> &'static str {
        match self {
            Task::Regression => "mse",
            Task::Classification => "accuracy",
        }
    }

    fn loss(self) -> LossKind {
        match self {
            Task::Regression => LossKind::Quadratic,
            Task::Classification => LossKind::Logistic,
        }
    }
}

/// One replicate's result.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    seed: u64,
    metric: f64,
    delta: Option<f64>,
}

struct Fitted {
    model: Model,
    report: Option<FitReport>,
}

struct Experiment {
    settings: Settings,
    /// Loaded once when the data come from a file.
    csv: Option<Dataset>,
    task: Task,
}

impl Experiment {
    fn new(settings: Settings) -> Result<Self, CliError> {
        let csv = match &settings.data {
            DataSource::Csv(path) => Some(load_csv(path)?),
            DataSource::Generated { name, outliers, .. } => {
                if matches!(name, DatasetName::LinearClean | DatasetName::HeavyTail) && outliers.unwrap_or(0) > 0 {
                    return Err(CliError::Usage(format!("dataset {} takes no outliers", value_name(name))));
                }
                None
            }
        };
        let mut exp = Self {
            settings,
            csv,
            task: Task::Regression,
        };
        let (train, _) = exp.load(exp.settings.seed)?;
        if train.is_classification() {
            exp.task = Task::Classification;
        }
        Ok(exp)
    }

    fn with_settings(&self, settings: Settings) -> Self {
        Self {
            settings,
            csv: self.csv.clone(),
            task: self.task,
        }
    }

    fn gen_config(&self, seed: u64) -> Option<GenConfig> {
        let DataSource::Generated { name, n_clean, outliers } = &self.settings.data else {
            return None;
        };
        let (problem, clean, spec): (Problem, usize, fn(usize) -> ContaminationSpec) = match name {
            DatasetName::Blobs => (Problem::GaussianBlobs, 600, ContaminationSpec::blob_cluster),
            DatasetName::LinearA => (Problem::LinearModel, 570, ContaminationSpec::response),
            DatasetName::LinearB => (Problem::LinearModel, 570, ContaminationSpec::leverage),
            DatasetName::LinearClean => (Problem::LinearModel, 600, |_| ContaminationSpec::none()),
            DatasetName::Moons => (Problem::TwoMoons, 900, ContaminationSpec::moons_point),
            DatasetName::HeavyTail => (Problem::HeavyTailRegression, 600, |_| ContaminationSpec::none()),
        };
        let default_outliers = match name {
            DatasetName::Moons => 100,
            DatasetName::LinearClean | DatasetName::HeavyTail => 0,
            _ => 30,
        };
        Some(GenConfig::new(
            problem,
            n_clean.unwrap_or(clean),
            spec(outliers.unwrap_or(default_outliers)),
            seed,
        ))
    }

    /// Training data and the clean sample used for scoring.
    fn load(&self, seed: u64) -> Result<(Dataset, Dataset), CliError> {
        if let Some(data) = &self.csv {
            return Ok((data.clone(), data.clean()));
        }
        let config = self.gen_config(seed).expect("generated source");
        let train = generate(&config)?;
        let test_config = GenConfig {
            n_clean: TEST_SIZE,
            contamination: ContaminationSpec::none(),
            seed: seed ^ TEST_SEED_SALT,
            ..config
        };
        Ok((train, generate(&test_config)?))
    }

    fn dataset_label(&self) -> String {
        match &self.settings.data {
            DataSource::Csv(path) => path.display().to_string(),
            DataSource::Generated { name, .. } => value_name(name),
        }
    }

    fn k(&self, n_samples: usize) -> usize {
        self.settings.k.unwrap_or(match &self.settings.data {
            DataSource::Generated { name: DatasetName::Moons, .. } => 301,
            DataSource::Generated { .. } => 71,
            DataSource::Csv(_) => n_samples.min(71),
        })
    }

    fn eta(&self, algo: Algo) -> f64 {
        self.settings.eta.unwrap_or(match (self.task, algo) {
            (Task::Regression, _) => 0.02,
            (Task::Classification, Algo::PlainLogistic) => 1.0,
            (Task::Classification, _) => 10.0,
        })
    }

    fn optim_config(&self, algo: Algo, k: usize, mode: DeltaMode, seed: u64) -> OptimConfig {
        OptimConfig::new(self.task.loss(), k, mode)
            .with_eta(self.eta(algo))
            .with_max_iter(self.settings.iters)
            .with_seed(seed)
    }

    fn delta_mode(&self, delta: Option<f64>) -> DeltaMode {
        match (delta, self.settings.delta_mode) {
            (Some(d), _) => DeltaMode::Fixed(d),
            (None, DeltaModeArg::Fixed) => DeltaMode::Fixed(self.settings.delta),
            (None, DeltaModeArg::Mad) => DeltaMode::MadBurnIn {
                burn_in: self.settings.burn_in,
                initial: INITIAL_DELTA,
            },
        }
    }

    fn fit(&self, algo: Algo, train: &Dataset, k: usize, mode: DeltaMode, seed: u64) -> Result<Fitted, Error> {
        let cfg = self.optim_config(algo, k, mode, seed);
        let report = match algo {
            Algo::Alg1 => fit_algorithm1(train, &cfg)?,
            Algo::Alg3 => fit_algorithm3(train, &cfg)?,
            Algo::Alg4 => fit_algorithm4(train, &cfg)?,
            Algo::TwoStage => fit_two_stage(train, &cfg, &cfg, self.settings.delta_prime)?,
            Algo::Ols => {
                if self.task != Task::Regression {
                    return Err(Error::InvalidArgument("ols needs a regression dataset".into()));
                }
                return Ok(Fitted {
                    model: fit_ols(train)?,
                    report: None,
                });
            }
            Algo::PlainLogistic => {
                if self.task != Task::Classification {
                    return Err(Error::InvalidArgument("plain-logistic needs labels in {-1, +1}".into()));
                }
                fit_empirical_gd(train, LossKind::Logistic, cfg.eta, cfg.max_iter, None)?
            }
        };
        Ok(Fitted {
            model: report.model(),
            report: Some(report),
        })
    }

    fn score(&self, model: &Model, test: &Dataset) -> Result<f64, Error> {
        match self.task {
            Task::Regression => mse(model, test),
            Task::Classification => accuracy(model, test),
        }
    }

    /// Runs `runs` replicates with seeds `seed + i`.
    fn replicate(&self, label: &str, algo: Algo, k: Option<usize>, delta: Option<f64>) -> Result<(MonteCarloSummary, Vec<Outcome>), CliError> {
        let base = self.settings.seed;
        let results = Execution::Parallel.map_indexed(self.settings.runs, |i| -> Result<Outcome, CliError> {
            let seed = base.wrapping_add(i as u64);
            let (train, test) = self.load(seed)?;
            let k = k.unwrap_or_else(|| self.k(train.len()));
            let fitted = self.fit(algo, &train, k, self.delta_mode(delta), seed)?;
            Ok(Outcome {
                seed,
                metric: self.score(&fitted.model, &test)?,
                delta: fitted.report.and_then(|r| r.delta_final),
            })
        });
        let outcomes = results
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.map_err(|e| e.context(&format!("{label}, run {i}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let summary = MonteCarloSummary::from_runs(label, base, outcomes.iter().map(|o| o.metric).collect())?;
        Ok((summary, outcomes))
    }

    fn fit_command(&self) -> Result<(), CliError> {
        let s = &self.settings;
        let (train, test) = self.load(s.seed)?;
        let k = self.k(train.len());
        let fitted = self.fit(s.algo, &train, k, self.delta_mode(None), s.seed)?;
        let metric = self.score(&fitted.model, &test)?;
        let beta = &fitted.model.beta;

        println!("algorithm: {}", s.algo.name());
        println!("dataset: {} ({} rows, {} flagged outliers)", self.dataset_label(), train.len(), train.outlier_count());
        println!("beta: {}", beta.iter().map(|b| format!("{b:.6}")).collect::<Vec<_>>().join(", "));
        if self.task == Task::Regression {
            println!("slope: {:.6}", beta[0]);
        }
        println!("test {}: {metric:.6}", self.task.metric_name());

        ensure_dir(&s.out_dir)?;
        let summary = FitSummary {
            algorithm: s.algo.name(),
            dataset: self.dataset_label(),
            seed: s.seed,
            k,
            beta: beta.clone(),
            delta_final: fitted.report.as_ref().and_then(|r| r.delta_final),
            skipped: fitted.report.as_ref().map_or(0, |r| r.skipped),
            metric_name: self.task.metric_name(),
            metric,
        };
        write_json(&s.out_dir.join("fit.json"), &summary)?;
        if let Some(report) = &fitted.report {
            let mut w = csv_writer(&s.out_dir.join("fit_trajectory.csv"))?;
            w.write_record(["iteration", "robust_loss", "grad_norm", "delta", "active_blocks"])
                .map_err(runtime)?;
            for r in &report.trajectory {
                w.write_record([
                    r.iteration.to_string(),
                    r.robust_loss.to_string(),
                    r.grad_norm.to_string(),
                    r.delta.map_or(String::new(), |d| d.to_string()),
                    r.active_blocks.to_string(),
                ])
                .map_err(runtime)?;
            }
            w.flush().map_err(runtime)?;
        }
        let chart = self.fit_chart(&train, &[(s.algo.name().to_string(), fitted.model.clone())], fitted.report.as_ref());
        write_file(&s.out_dir.join("fit.svg"), &chart)
    }

    /// Scatter plot with fitted lines or decision boundaries when the data
    /// are low dimensional, otherwise the robust loss trajectory.
    fn fit_chart(&self, data: &Dataset, models: &[(String, Model)], report: Option<&FitReport>) -> String {
        let d = data.n_features();
        let has_intercept = data.rows().all(|r| r[d - 1] == 1.0) && d > 1;
        let predictors = if has_intercept { d - 1 } else { d };
        let mask = data.outlier_mask();
        let is_outlier = |i: usize| mask.is_some_and(|m| m[i]);
        let title = format!("{} on {}", models.iter().map(|m| m.0.as_str()).collect::<Vec<_>>().join(" vs "), self.dataset_label());

        match (self.task, predictors) {
            (Task::Regression, 1) => {
                let point = |i: usize| (data.row(i)[0], data.targets()[i]);
                let clean: Vec<_> = (0..data.len()).filter(|&i| !is_outlier(i)).map(point).collect();
                let dirty: Vec<_> = (0..data.len()).filter(|&i| is_outlier(i)).map(point).collect();
                let (lo, hi) = range(data.rows().map(|r| r[0]));
                let mut chart = Chart::new(&title, "z", "y")
                    .scatter(Series::new("informative", clean, PALETTE[0]))
                    .scatter(Series::new("outliers", dirty, PALETTE[1]));
                for (i, (name, model)) in models.iter().enumerate() {
                    let intercept = if has_intercept { model.beta[1] } else { 0.0 };
                    let line = vec![(lo, model.beta[0] * lo + intercept), (hi, model.beta[0] * hi + intercept)];
                    chart = chart.line(Series::new(name.clone(), line, PALETTE[2 + i % 4]));
                }
                chart.render()
            }
            (Task::Classification, 2) => {
                let point = |i: usize| (data.row(i)[0], data.row(i)[1]);
                let by_label = |label: f64| -> Vec<(f64, f64)> {
                    (0..data.len()).filter(|&i| data.targets()[i] == label).map(point).collect()
                };
                let (x0, x1) = range(data.rows().map(|r| r[0]));
                let (y0, y1) = range(data.rows().map(|r| r[1]));
                let mut chart = Chart::new(&title, "z1", "z2")
                    .x_range(x0, x1)
                    .y_range(y0, y1)
                    .scatter(Series::new("label +1", by_label(1.0), PALETTE[3]))
                    .scatter(Series::new("label -1", by_label(-1.0), PALETTE[4]));
                for (i, (name, model)) in models.iter().enumerate() {
                    let b = &model.beta;
                    let c = if has_intercept { b[2] } else { 0.0 };
                    // b0 x + b1 y + c = 0, traced along the longer axis of the frame
                    let line = if b[1].abs() >= b[0].abs() {
                        vec![(x0, -(b[0] * x0 + c) / b[1]), (x1, -(b[0] * x1 + c) / b[1])]
                    } else {
                        vec![(-(b[1] * y0 + c) / b[0], y0), (-(b[1] * y1 + c) / b[0], y1)]
                    };
                    chart = chart.line(Series::new(name.clone(), line, PALETTE[i % 3]));
                }
                chart.render()
            }
            _ => {
                let points = report
                    .map(|r| r.trajectory.iter().map(|t| (t.iteration as f64, t.robust_loss)).collect())
                    .unwrap_or_default();
                Chart::new(&title, "iteration", "robust loss estimate")
                    .line(Series::new("robust loss", points, PALETTE[0]))
                    .render()
            }
        }
    }

    fn sweep_k(&self, out: &Path) -> Result<(), CliError> {
        let s = &self.settings;
        let mut rows = Vec::new();
        let mut runs = Vec::new();
        for &k in &s.k_grid {
            let (summary, outcomes) = self.replicate(&format!("sweep-k {} k={k}", s.algo.name()), s.algo, Some(k), None)?;
            println!("k = {k}: median {} {:.6}", self.task.metric_name(), summary.median);
            runs.extend(outcomes.iter().map(|o| (k, *o)));
            rows.push((k, summary));
        }
        ensure_dir(out)?;
        let mut w = csv_writer(&out.join("sweep_k.csv"))?;
        w.write_record(["k", "metric_median", "metric_mean", "metric_std"]).map_err(runtime)?;
        for (k, sm) in &rows {
            w.write_record([k.to_string(), sm.median.to_string(), sm.mean.to_string(), sm.std.to_string()])
                .map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        let mut w = csv_writer(&out.join("sweep_k_runs.csv"))?;
        w.write_record(["k", "run", "seed", "metric"]).map_err(runtime)?;
        for (i, (k, o)) in runs.iter().enumerate() {
            w.write_record([k.to_string(), (i % s.runs).to_string(), o.seed.to_string(), o.metric.to_string()])
                .map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        let points = rows.iter().map(|(k, sm)| (*k as f64, sm.median)).collect();
        let mut chart = Chart::new(
            &format!("{} vs number of blocks ({})", self.task.metric_name(), self.dataset_label()),
            "k",
            &format!("median {}", self.task.metric_name()),
        );
        if self.task == Task::Regression {
            chart = chart.log_y();
        }
        write_file(
            &out.join("sweep_k.svg"),
            &chart.line(Series::new(s.algo.name(), points, PALETTE[0])).render(),
        )
    }

    fn sweep_delta(&self, out: &Path) -> Result<(), CliError> {
        let s = &self.settings;
        let ks: Vec<Option<usize>> = if s.k_grid.is_empty() {
            vec![s.k]
        } else {
            s.k_grid.iter().map(|&k| Some(k)).collect()
        };
        let deltas: Vec<Option<f64>> = if s.delta_mode == DeltaModeArg::Mad {
            vec![None]
        } else {
            s.delta_grid.iter().map(|&d| Some(d)).collect()
        };
        let mut rows = Vec::new();
        let mut runs = Vec::new();
        for &k in &ks {
            for &delta in &deltas {
                let label = format!("sweep-delta {} k={k:?} delta={delta:?}", s.algo.name());
                let (summary, outcomes) = self.replicate(&label, s.algo, k, delta)?;
                let k_used = k.unwrap_or_else(|| self.k(self.load(s.seed).map(|d| d.0.len()).unwrap_or(0)));
                // in MAD mode record the median of the frozen estimates
                let delta_used = delta.unwrap_or_else(|| {
                    median(&outcomes.iter().filter_map(|o| o.delta).collect::<Vec<_>>()).unwrap_or(f64::NAN)
                });
                println!("k = {k_used}, delta = {delta_used:.6}: median {} {:.6}", self.task.metric_name(), summary.median);
                runs.extend(outcomes.iter().map(|o| (k_used, delta_used, *o)));
                rows.push((k_used, delta_used, summary));
            }
        }
        ensure_dir(out)?;
        let mut w = csv_writer(&out.join("sweep_delta.csv"))?;
        w.write_record(["k", "delta", "metric_median", "metric_mean", "metric_std"]).map_err(runtime)?;
        for (k, d, sm) in &rows {
            w.write_record([k.to_string(), d.to_string(), sm.median.to_string(), sm.mean.to_string(), sm.std.to_string()])
                .map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        let mut w = csv_writer(&out.join("sweep_delta_runs.csv"))?;
        w.write_record(["k", "delta", "run", "seed", "metric", "delta_final"]).map_err(runtime)?;
        for (i, (k, d, o)) in runs.iter().enumerate() {
            w.write_record([
                k.to_string(),
                d.to_string(),
                (i % s.runs).to_string(),
                o.seed.to_string(),
                o.metric.to_string(),
                o.delta.map_or(String::new(), |v| v.to_string()),
            ])
            .map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        let mut chart = Chart::new(
            &format!("{} vs delta ({})", self.task.metric_name(), self.dataset_label()),
            "delta",
            &format!("median {}", self.task.metric_name()),
        )
        .log_log();
        let mut ks_used: Vec<usize> = rows.iter().map(|r| r.0).collect();
        ks_used.dedup();
        for (i, k) in ks_used.iter().enumerate() {
            let points = rows.iter().filter(|r| r.0 == *k).map(|r| (r.1, r.2.median)).collect();
            chart = chart.line(Series::new(format!("k = {k}"), points, PALETTE[i % PALETTE.len()]));
        }
        write_file(&out.join("sweep_delta.svg"), &chart.render())
    }

    fn compare_algos(&self, out: &Path) -> Result<(), CliError> {
        let s = &self.settings;
        let (train, _) = self.load(s.seed)?;
        let mut rows = Vec::new();
        let mut runs = Vec::new();
        for &algo in &s.algos {
            let (summary, outcomes) = self.replicate(&format!("compare {}", algo.name()), algo, s.k, None)?;
            println!(
                "{}: median {} {:.6} (mean {:.6}, sd {:.6})",
                algo.name(),
                self.task.metric_name(),
                summary.median,
                summary.mean,
                summary.std
            );
            runs.extend(outcomes.iter().map(|o| (algo, *o)));
            rows.push((algo, summary));
        }
        ensure_dir(out)?;
        let mut w = csv_writer(&out.join("compare.csv"))?;
        w.write_record(["algorithm", "n", "contamination", "metric", "metric_median", "metric_mean", "metric_std"])
            .map_err(runtime)?;
        for (algo, sm) in &rows {
            w.write_record([
                algo.name().to_string(),
                train.len().to_string(),
                train.outlier_count().to_string(),
                self.task.metric_name().to_string(),
                sm.median.to_string(),
                sm.mean.to_string(),
                sm.std.to_string(),
            ])
            .map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        let mut w = csv_writer(&out.join("compare_runs.csv"))?;
        w.write_record(["algorithm", "run", "seed", "metric"]).map_err(runtime)?;
        for (i, (algo, o)) in runs.iter().enumerate() {
            w.write_record([algo.name().to_string(), (i % s.runs).to_string(), o.seed.to_string(), o.metric.to_string()])
                .map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        let groups: Vec<String> = rows.iter().map(|r| r.0.name().to_string()).collect();
        let series = vec![
            ("median".to_string(), rows.iter().map(|r| r.1.median).collect()),
            ("mean".to_string(), rows.iter().map(|r| r.1.mean).collect()),
        ];
        let title = format!("{} by algorithm ({}, N = {})", self.task.metric_name(), self.dataset_label(), train.len());
        write_file(&out.join("compare.svg"), &svg::grouped_bars(&title, self.task.metric_name(), &groups, &series))
    }

    fn cross_validate(&self) -> Result<(), CliError> {
        let s = &self.settings;
        let (data, _) = self.load(s.seed)?;
        let k_default = self.k(data.len());
        let report = robust_cv_median(&data, s.folds, s.seed, Execution::Parallel, |train, test| {
            let k = s.k.unwrap_or(k_default).min(train.len());
            let fitted = self.fit(s.algo, train, k, self.delta_mode(None), s.seed)?;
            self.score(&fitted.model, test)
        })?;
        let log_scores = self.task == Task::Regression;
        let shown: Vec<f64> = if log_scores {
            report.fold_scores.iter().map(|v| v.ln()).collect()
        } else {
            report.fold_scores.clone()
        };
        println!("folds: {}", s.folds);
        println!("median {}: {:.6}", self.task.metric_name(), report.median_score);
        if log_scores {
            println!("median log-{}: {:.6}", self.task.metric_name(), report.median_score.ln());
        }

        ensure_dir(&s.out_dir)?;
        let mut w = csv_writer(&s.out_dir.join("cv_folds.csv"))?;
        w.write_record(["fold", "size", "score"]).map_err(runtime)?;
        for (j, (score, fold)) in report.fold_scores.iter().zip(&report.folds).enumerate() {
            w.write_record([j.to_string(), fold.len().to_string(), score.to_string()]).map_err(runtime)?;
        }
        w.flush().map_err(runtime)?;
        write_json(
            &s.out_dir.join("cv.json"),
            &CvSummary {
                algorithm: s.algo.name(),
                dataset: self.dataset_label(),
                folds: s.folds,
                seed: s.seed,
                metric_name: self.task.metric_name(),
                median_score: report.median_score,
            },
        )?;
        let label = if log_scores { format!("log {}", self.task.metric_name()) } else { self.task.metric_name().into() };
        let title = format!("{} fold scores, {} folds ({})", s.algo.name(), s.folds, self.dataset_label());
        write_file(&s.out_dir.join("cv_hist.svg"), &svg::histogram(&title, &label, &shown, 30))
    }

    /// Fits several algorithms on one draw and overlays them on the data.
    fn overlay_fits(&self, algos: &[Algo], out: &Path) -> Result<(), CliError> {
        let s = &self.settings;
        let (train, test) = self.load(s.seed)?;
        let k = self.k(train.len());
        let mut models = Vec::new();
        ensure_dir(out)?;
        let mut w = csv_writer(&out.join("fits.csv"))?;
        w.write_record(["algorithm", "beta", "metric", "value"]).map_err(runtime)?;
        for &algo in algos {
            let fitted = self.fit(algo, &train, k, self.delta_mode(None), s.seed)?;
            let metric = self.score(&fitted.model, &test)?;
            println!("{}: beta = {:?}, test {} = {metric:.6}", algo.name(), fitted.model.beta, self.task.metric_name());
            let beta: Vec<String> = fitted.model.beta.iter().map(|b| b.to_string()).collect();
            w.write_record([algo.name(), &beta.join(";"), self.task.metric_name(), &metric.to_string()])
                .map_err(runtime)?;
            models.push((algo.name().to_string(), fitted.model));
        }
        w.flush().map_err(runtime)?;
        write_file(&out.join("fits.svg"), &self.fit_chart(&train, &models, None))
    }
}

fn reproduce_figure(settings: &Settings) -> Result<(), CliError> {
    let figure = settings.figure.expect("validated");
    let generated = |name: DatasetName| DataSource::Generated {
        name,
        n_clean: None,
        outliers: None,
    };
    let mut s = settings.clone();
    let out = settings.out_dir.join(value_name(&figure));
    match figure {
        Figure::ScatterLogistic | Figure::ScatterRegA | Figure::ScatterRegB => {
            let (dataset, baseline) = match figure {
                Figure::ScatterLogistic => (DatasetName::Blobs, Algo::PlainLogistic),
                Figure::ScatterRegA => (DatasetName::LinearA, Algo::Ols),
                _ => (DatasetName::LinearB, Algo::Ols),
            };
            s.data = generated(dataset);
            Experiment::new(s)?.overlay_fits(&[Algo::Alg3, baseline], &out)
        }
        Figure::ChoiceK => {
            s.data = generated(DatasetName::LinearB);
            s.algo = Algo::Alg3;
            if s.k_grid.is_empty() {
                s.k_grid = (21..=121).step_by(10).collect();
            }
            Experiment::new(s)?.sweep_k(&out)
        }
        Figure::SelectDelta => {
            s.data = generated(DatasetName::LinearB);
            s.algo = Algo::Alg3;
            s.delta_mode = DeltaModeArg::Fixed;
            if s.k_grid.is_empty() {
                s.k_grid = vec![61, 91, 151];
            }
            if s.delta_grid.is_empty() {
                s.delta_grid = (0..=10).map(|i| 10f64.powf(-1.0 + 0.5 * i as f64)).collect();
            }
            Experiment::new(s)?.sweep_delta(&out)
        }
        Figure::MomHom => {
            s.algos = vec![Algo::Alg3, Algo::Alg4, Algo::PlainLogistic];
            let base = Experiment::new(Settings {
                data: generated(DatasetName::Moons),
                ..s.clone()
            })?;
            for (n_clean, outliers) in [(90, 10), (900, 100)] {
                let sized = Settings {
                    data: DataSource::Generated {
                        name: DatasetName::Moons,
                        n_clean: Some(n_clean),
                        outliers: Some(outliers),
                    },
                    // keep k below the sample size for the small regime
                    k: s.k.or(Some(if n_clean < 300 { 31 } else { 301 })),
                    ..s.clone()
                };
                base.with_settings(sized).compare_algos(&out.join(format!("n{}", n_clean + outliers)))?;
            }
            Ok(())
        }
        Figure::CompShuffle => {
            s.data = generated(DatasetName::LinearA);
            s.algos = vec![Algo::Alg1, Algo::Alg3];
            s.k = Some(71);
            s.delta_mode = DeltaModeArg::Fixed;
            s.delta = 1.0;
            Experiment::new(s)?.compare_algos(&out)
        }
    }
}

#[derive(Serialize)]
struct FitSummary {
    algorithm: &'static str,
    dataset: String,
    seed: u64,
    k: usize,
    beta: Vec<f64>,
    delta_final: Option<f64>,
    skipped: usize,
    metric_name: &'static str,
    metric: f64,
}

#[derive(Serialize)]
struct CvSummary {
    algorithm: &'static str,
    dataset: String,
    folds: usize,
    seed: u64,
    metric_name: &'static str,
    median_score: f64,
}

fn value_name(v: &impl ValueEnum) -> String {
    v.to_possible_value().map_or_else(String::new, |p| p.get_name().to_string())
}

fn load_csv(path: &Path) -> Result<Dataset, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open dataset CSV {}: {e}", path.display())))?;
    read_csv(file).map_err(|e| CliError::Usage(format!("cannot read dataset CSV {}: {e}", path.display())))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    (lo - pad, hi + pad)
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn csv_writer(path: &PathBuf) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(runtime)?;
    write_file(path, &(text + "\n"))
}
