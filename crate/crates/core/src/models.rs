//! Linear predictors `f(z) = <beta, z>` with logistic or quadratic loss.
//!
//! Intercepts are not handled here: append a constant feature column
//! (see [`Dataset::with_intercept`]) and the last coefficient plays that role.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stats::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    /// `log(1 + exp(-y t))`, labels in `{-1, +1}`.
    Logistic,
    /// `(y - t)^2`.
    Quadratic,
}

impl LossKind {
    /// Loss at target `y` and prediction `t`.
    pub fn value(self, y: f64, t: f64) -> f64 {
        match self {
            LossKind::Logistic => softplus(-y * t),
            LossKind::Quadratic => (y - t) * (y - t),
        }
    }

    /// Partial derivative of the loss in the prediction `t`.
    pub fn derivative(self, y: f64, t: f64) -> f64 {
        match self {
            LossKind::Logistic => -y * sigmoid(-y * t),
            LossKind::Quadratic => 2.0 * (t - y),
        }
    }
}

/// `log(1 + e^x)` without overflow for large `|x|`.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Feature matrix (row-major), targets and optional outlier labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    targets: Vec<f64>,
    outlier_mask: Option<Vec<bool>>,
}

impl Dataset {
    /// Builds a dataset from a row-major feature buffer of `targets.len()`
    /// rows and `n_features` columns.
    pub fn new(
        features: Vec<f64>,
        n_features: usize,
        targets: Vec<f64>,
        outlier_mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(invalid("at least one feature is required"));
        }
        if features.len() != n_features * targets.len() {
            return Err(invalid(format!(
                "feature buffer of length {} does not hold {} rows of {} features",
                features.len(),
                targets.len(),
                n_features
            )));
        }
        if let Some(mask) = &outlier_mask {
            if mask.len() != targets.len() {
                return Err(invalid("outlier mask length differs from the number of rows"));
            }
        }
        Ok(Self {
            features,
            n_features,
            targets,
            outlier_mask,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], targets: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(invalid("rows have different lengths"));
        }
        Self::new(rows.concat(), d, targets, None)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn outlier_mask(&self) -> Option<&[bool]> {
        self.outlier_mask.as_deref()
    }

    pub fn outlier_count(&self) -> usize {
        self.outlier_mask
            .as_ref()
            .map_or(0, |m| m.iter().filter(|&&o| o).count())
    }

    pub fn with_outlier_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(invalid("outlier mask length differs from the number of rows"));
        }
        self.outlier_mask = Some(mask);
        Ok(self)
    }

    /// Copy with a trailing constant-one feature column.
    pub fn with_intercept(&self) -> Self {
        let d = self.n_features + 1;
        let mut features = Vec::with_capacity(self.len() * d);
        for row in self.rows() {
            features.extend_from_slice(row);
            features.push(1.0);
        }
        Self {
            features,
            n_features: d,
            targets: self.targets.clone(),
            outlier_mask: self.outlier_mask.clone(),
        }
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            n_features: self.n_features,
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            outlier_mask: self
                .outlier_mask
                .as_ref()
                .map(|m| indices.iter().map(|&i| m[i]).collect()),
        }
    }

    /// Rows not flagged as outliers.
    pub fn clean(&self) -> Self {
        match &self.outlier_mask {
            None => self.clone(),
            Some(mask) => {
                let keep: Vec<usize> = (0..self.len()).filter(|&i| !mask[i]).collect();
                self.subset(&keep)
            }
        }
    }

    pub fn is_classification(&self) -> bool {
        self.targets.iter().all(|&y| y == 1.0 || y == -1.0)
    }

    pub(crate) fn check_for(&self, loss: LossKind) -> Result<()> {
        if self.is_empty() {
            return Err(invalid("dataset is empty"));
        }
        if loss == LossKind::Logistic && !self.is_classification() {
            return Err(invalid("logistic loss needs targets in {-1, +1}"));
        }
        Ok(())
    }
}

/// Coefficients of a linear predictor plus the loss it is trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub beta: Vec<f64>,
    pub loss: LossKind,
}

impl Model {
    pub fn new(beta: Vec<f64>, loss: LossKind) -> Self {
        Self { beta, loss }
    }

    pub fn zeros(n_features: usize, loss: LossKind) -> Self {
        Self::new(vec![0.0; n_features], loss)
    }

    pub fn predict(&self, z: &[f64]) -> f64 {
        dot(&self.beta, z)
    }

    fn check(&self, data: &Dataset) -> Result<()> {
        if self.beta.len() != data.n_features() {
            return Err(invalid(format!(
                "model has {} coefficients but data has {} features",
                self.beta.len(),
                data.n_features()
            )));
        }
        if let Some(i) = self.beta.iter().position(|b| !b.is_finite()) {
            return Err(invalid(format!("coefficient {i} is not finite")));
        }
        Ok(())
    }

    /// `loss(Y_i, <beta, Z_i>)` for every row.
    pub fn per_sample_loss(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check(data)?;
        Ok(data
            .rows()
            .zip(data.targets())
            .map(|(z, &y)| self.loss.value(y, self.predict(z)))
            .collect())
    }

    /// Row `i` is `Z_i * loss'(Y_i, <beta, Z_i>)`, the gradient in `beta`
    /// of the `i`-th loss.
    pub fn per_sample_loss_grad(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        let derivs = self.loss_derivatives(data)?;
        Ok(data
            .rows()
            .zip(derivs)
            .map(|(z, g)| z.iter().map(|x| x * g).collect())
            .collect())
    }

    /// Scalar derivatives `loss'(Y_i, <beta, Z_i>)`.
    pub fn loss_derivatives(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check(data)?;
        Ok(data
            .rows()
            .zip(data.targets())
            .map(|(z, &y)| self.loss.derivative(y, self.predict(z)))
            .collect())
    }

    pub(crate) fn losses_and_derivatives(
        &self,
        data: &Dataset,
        losses: &mut Vec<f64>,
        derivs: &mut Vec<f64>,
    ) {
        losses.clear();
        derivs.clear();
        for (z, &y) in data.rows().zip(data.targets()) {
            let t = self.predict(z);
            losses.push(self.loss.value(y, t));
            derivs.push(self.loss.derivative(y, t));
        }
    }
}
