//! Seeded simulators for the benchmark problems, with outlier injection and
//! CSV round-tripping.
//!
//! Clean rows come first, outlier rows are appended after them and flagged
//! in the dataset's outlier mask.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Normal, StudentT};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec::{seeded_rng, SeededRng};
use crate::models::Dataset;

/// How outliers are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ContaminationKind {
    /// Features `N(center, variance * I)`, label `+1`.
    ClassificationCluster { center: [f64; 2], variance: f64 },
    /// Clean-distribution predictor, response `N(mean, variance)`.
    ResponseOutlier { mean: f64, variance: f64 },
    /// Joint `(z, y) ~ N(center, variance * I)`.
    PredictorOutlier { center: [f64; 2], variance: f64 },
    /// Every outlier sits exactly at `location` with `label`.
    FixedPoint { location: [f64; 2], label: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContaminationSpec {
    pub count: usize,
    pub kind: ContaminationKind,
}

impl ContaminationSpec {
    pub fn none() -> Self {
        Self {
            count: 0,
            kind: ContaminationKind::ResponseOutlier {
                mean: 0.0,
                variance: 1.0,
            },
        }
    }

    /// Label-one cluster at `(24, 8)` with variance 0.1.
    pub fn blob_cluster(count: usize) -> Self {
        Self {
            count,
            kind: ContaminationKind::ClassificationCluster {
                center: [24.0, 8.0],
                variance: 0.1,
            },
        }
    }

    /// Responses `N(100, 0.01)` at ordinary predictors.
    pub fn response(count: usize) -> Self {
        Self {
            count,
            kind: ContaminationKind::ResponseOutlier {
                mean: 100.0,
                variance: 0.01,
            },
        }
    }

    /// Points `(z, y) ~ N((24, 24), 0.01 I)`.
    pub fn leverage(count: usize) -> Self {
        Self {
            count,
            kind: ContaminationKind::PredictorOutlier {
                center: [24.0, 24.0],
                variance: 0.01,
            },
        }
    }

    /// All outliers at `(0, 5)` with label `+1`.
    pub fn moons_point(count: usize) -> Self {
        Self {
            count,
            kind: ContaminationKind::FixedPoint {
                location: [0.0, 5.0],
                label: 1.0,
            },
        }
    }

    fn validate(&self, problem: Problem) -> Result<()> {
        if self.count == 0 {
            return Ok(());
        }
        let variance = match self.kind {
            ContaminationKind::ClassificationCluster { variance, .. }
            | ContaminationKind::ResponseOutlier { variance, .. }
            | ContaminationKind::PredictorOutlier { variance, .. } => variance,
            ContaminationKind::FixedPoint { .. } => 1.0,
        };
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(invalid(format!("outlier variance must be positive, got {variance}")));
        }
        let fits = match self.kind {
            ContaminationKind::ClassificationCluster { .. } | ContaminationKind::FixedPoint { .. } => {
                matches!(problem, Problem::GaussianBlobs | Problem::TwoMoons)
            }
            ContaminationKind::ResponseOutlier { .. } | ContaminationKind::PredictorOutlier { .. } => {
                problem == Problem::LinearModel
            }
        };
        if !fits {
            return Err(invalid(format!("{:?} outliers do not apply to {problem:?}", self.kind)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Problem {
    /// Two Gaussian classes at `(-1,-1)` (label `+1`) and `(1,1)` (label `-1`).
    GaussianBlobs,
    /// `y = 10 z + noise`, `z ~ U[-3, 3]`.
    LinearModel,
    /// Two interleaved unit half-circles.
    TwoMoons,
    /// `y = 10 z + t5 noise` scaled to unit variance.
    HeavyTailRegression,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenConfig {
    pub problem: Problem,
    pub n_clean: usize,
    pub contamination: ContaminationSpec,
    pub seed: u64,
    /// Noise scale: the regression noise sd, or the moons' jitter sd.
    pub noise: f64,
    /// Append a constant-one feature.
    pub intercept: bool,
}

impl GenConfig {
    pub fn new(problem: Problem, n_clean: usize, contamination: ContaminationSpec, seed: u64) -> Self {
        Self {
            problem,
            n_clean,
            contamination,
            seed,
            noise: if problem == Problem::TwoMoons { 0.2 } else { 1.0 },
            intercept: problem == Problem::TwoMoons,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_intercept(mut self, intercept: bool) -> Self {
        self.intercept = intercept;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_clean == 0 {
            return Err(invalid("at least one clean sample is required"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(invalid(format!("noise must be non-negative, got {}", self.noise)));
        }
        if self.problem == Problem::HeavyTailRegression && self.contamination.count > 0 {
            return Err(invalid("the heavy-tail problem takes no outliers"));
        }
        self.contamination.validate(self.problem)
    }
}

struct Builder {
    features: Vec<f64>,
    targets: Vec<f64>,
    mask: Vec<bool>,
    d: usize,
}

impl Builder {
    fn new(d: usize, capacity: usize) -> Self {
        Self {
            features: Vec::with_capacity(capacity * d),
            targets: Vec::with_capacity(capacity),
            mask: Vec::with_capacity(capacity),
            d,
        }
    }

    fn push(&mut self, z: &[f64], y: f64, outlier: bool) {
        self.features.extend_from_slice(z);
        self.targets.push(y);
        self.mask.push(outlier);
    }

    fn finish(self, config: &GenConfig, masked: bool) -> Result<Dataset> {
        let data = Dataset::new(
            self.features,
            self.d,
            self.targets,
            masked.then_some(self.mask),
        )?;
        Ok(if config.intercept {
            data.with_intercept()
        } else {
            data
        })
    }
}

fn normal(mean: f64, variance: f64) -> Normal<f64> {
    Normal::new(mean, variance.sqrt()).expect("variance validated")
}

fn push_classification_outliers(b: &mut Builder, spec: &ContaminationSpec, rng: &mut SeededRng) {
    for _ in 0..spec.count {
        match spec.kind {
            ContaminationKind::ClassificationCluster { center, variance } => {
                let z = [
                    normal(center[0], variance).sample(rng),
                    normal(center[1], variance).sample(rng),
                ];
                b.push(&z, 1.0, true);
            }
            ContaminationKind::FixedPoint { location, label } => b.push(&location, label, true),
            _ => unreachable!("validated"),
        }
    }
}

pub fn gen_logistic_blobs(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let mut b = Builder::new(2, config.n_clean + config.contamination.count);
    let jitter = normal(0.0, 1.4);
    for _ in 0..config.n_clean {
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let z = [-y + jitter.sample(&mut rng), -y + jitter.sample(&mut rng)];
        b.push(&z, y, false);
    }
    push_classification_outliers(&mut b, &config.contamination, &mut rng);
    b.finish(config, true)
}

pub fn gen_linear(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let spec = config.contamination;
    let mut b = Builder::new(1, config.n_clean + spec.count);
    let noise = Normal::new(0.0, config.noise).expect("noise validated");
    for _ in 0..config.n_clean {
        let z: f64 = rng.random_range(-3.0..=3.0);
        b.push(&[z], 10.0 * z + noise.sample(&mut rng), false);
    }
    for _ in 0..spec.count {
        match spec.kind {
            ContaminationKind::ResponseOutlier { mean, variance } => {
                let z: f64 = rng.random_range(-3.0..=3.0);
                b.push(&[z], normal(mean, variance).sample(&mut rng), true);
            }
            ContaminationKind::PredictorOutlier { center, variance } => {
                let z = normal(center[0], variance).sample(&mut rng);
                b.push(&[z], normal(center[1], variance).sample(&mut rng), true);
            }
            _ => unreachable!("validated"),
        }
    }
    b.finish(config, true)
}

/// Upper moon `(cos t, sin t)` labelled `-1`; lower moon
/// `(1 - cos t, 0.5 - sin t)` labelled `+1`; `t` evenly spaced on `[0, pi]`.
pub fn gen_two_moons(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let mut b = Builder::new(2, config.n_clean + config.contamination.count);
    let noise = Normal::new(0.0, config.noise).expect("noise validated");
    let n_upper = config.n_clean.div_ceil(2);
    let n_lower = config.n_clean - n_upper;
    let angle = |i: usize, n: usize| if n > 1 { PI * i as f64 / (n - 1) as f64 } else { 0.0 };
    for i in 0..n_upper {
        let t = angle(i, n_upper);
        let z = [t.cos() + noise.sample(&mut rng), t.sin() + noise.sample(&mut rng)];
        b.push(&z, -1.0, false);
    }
    for i in 0..n_lower {
        let t = angle(i, n_lower);
        let z = [
            1.0 - t.cos() + noise.sample(&mut rng),
            0.5 - t.sin() + noise.sample(&mut rng),
        ];
        b.push(&z, 1.0, false);
    }
    push_classification_outliers(&mut b, &config.contamination, &mut rng);
    b.finish(config, true)
}

pub fn gen_heavy_tail(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let mut b = Builder::new(1, config.n_clean);
    let t5 = StudentT::new(5.0).expect("valid degrees of freedom");
    let scale = config.noise / (5.0f64 / 3.0).sqrt();
    for _ in 0..config.n_clean {
        let z: f64 = rng.random_range(-3.0..=3.0);
        let eta: f64 = t5.sample(&mut rng);
        b.push(&[z], 10.0 * z + scale * eta, false);
    }
    b.finish(config, false)
}

pub fn generate(config: &GenConfig) -> Result<Dataset> {
    match config.problem {
        Problem::GaussianBlobs => gen_logistic_blobs(config),
        Problem::LinearModel => gen_linear(config),
        Problem::TwoMoons => gen_two_moons(config),
        Problem::HeavyTailRegression => gen_heavy_tail(config),
    }
}

/// Writes `z1,...,zd,y,is_outlier` with round-trippable floats.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.n_features()).map(|j| format!("z{j}")).collect();
    header.push("y".into());
    header.push("is_outlier".into());
    w.write_record(&header)?;
    let mask = data.outlier_mask();
    for (i, row) in data.rows().enumerate() {
        let mut record: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        record.push(format!("{:.16e}", data.targets()[i]));
        record.push(u8::from(mask.is_some_and(|m| m[i])).to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a headed CSV. The target is the column named `y` (the last column
/// when there is none); an `is_outlier` column, if present, becomes the
/// outlier mask; every other column is a feature, in file order.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let mask_col = header.iter().position(|h| h.trim() == "is_outlier");
    let y_col = header
        .iter()
        .position(|h| h.trim() == "y")
        .or_else(|| (0..header.len()).rev().find(|&c| Some(c) != mask_col))
        .ok_or_else(|| invalid("CSV has no columns"))?;
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != y_col && Some(c) != mask_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(invalid("CSV has no feature columns"));
    }
    let (mut features, mut targets, mut mask) = (Vec::new(), Vec::new(), Vec::new());
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let field = |c: usize| -> Result<f64> {
            let raw = record.get(c).unwrap_or("").trim();
            raw.parse::<f64>()
                .map_err(|_| invalid(format!("row {}: cannot parse {raw:?} as a number", line + 1)))
        };
        for &c in &feature_cols {
            features.push(field(c)?);
        }
        targets.push(field(y_col)?);
        if let Some(c) = mask_col {
            mask.push(field(c)? != 0.0);
        }
    }
    Dataset::new(
        features,
        feature_cols.len(),
        targets,
        mask_col.map(|_| mask),
    )
}
