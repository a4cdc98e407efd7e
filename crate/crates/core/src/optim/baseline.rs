//! Non-robust reference fits: least squares and full-batch gradient descent
//! on the empirical risk (plain logistic regression when the loss is logistic).

use nalgebra::{DMatrix, DVector};

use super::{FitReport, IterRecord};
use crate::error::{invalid, Error, Result};
use crate::models::{Dataset, LossKind, Model};
use crate::stats::norm;

/// Ordinary least squares through the normal equations.
pub fn fit_ols(data: &Dataset) -> Result<Model> {
    data.check_for(LossKind::Quadratic)?;
    let d = data.n_features();
    let x = DMatrix::from_row_slice(data.len(), d, data.features());
    let y = DVector::from_column_slice(data.targets());
    let gram = x.transpose() * &x;
    let rhs = x.transpose() * y;
    let scale = gram.diagonal().max();
    let chol = gram
        .cholesky()
        .filter(|c| c.l_dirty().diagonal().iter().all(|l| l * l > 1e-12 * scale))
        .ok_or_else(|| Error::Singular("X^T X is not positive definite".into()))?;
    let beta = chol.solve(&rhs);
    Ok(Model::new(beta.iter().copied().collect(), LossKind::Quadratic))
}

/// Full-batch gradient descent on the mean loss.
pub fn fit_empirical_gd(
    data: &Dataset,
    loss: LossKind,
    eta: f64,
    max_iter: usize,
    beta0: Option<Vec<f64>>,
) -> Result<FitReport> {
    data.check_for(loss)?;
    if !(eta > 0.0) {
        return Err(invalid("step size must be positive"));
    }
    let mut model = Model::new(beta0.unwrap_or_else(|| vec![0.0; data.n_features()]), loss);
    let n = data.len() as f64;
    let (mut losses, mut derivs) = (Vec::new(), Vec::new());
    let mut grad = vec![0.0; data.n_features()];
    let mut trajectory = Vec::with_capacity(max_iter);
    for t in 0..max_iter {
        model.losses_and_derivatives(data, &mut losses, &mut derivs);
        let risk = losses.iter().sum::<f64>() / n;
        if !risk.is_finite() {
            return Err(Error::Diverged { iteration: t });
        }
        grad.fill(0.0);
        for (z, &w) in data.rows().zip(&derivs) {
            for (g, x) in grad.iter_mut().zip(z) {
                *g += x * w / n;
            }
        }
        trajectory.push(IterRecord {
            iteration: t,
            robust_loss: risk,
            grad_norm: norm(&grad),
            delta: None,
            active_blocks: 0,
        });
        for (b, g) in model.beta.iter_mut().zip(&grad) {
            *b -= eta * g;
        }
    }
    Ok(FitReport {
        beta: model.beta,
        loss,
        trajectory,
        delta_final: None,
        skipped: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_recovers_exact_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 1.0]).collect();
        let y = rows.iter().map(|r| 4.0 * r[0] + 0.5).collect();
        let m = fit_ols(&Dataset::from_rows(&rows, y).unwrap()).unwrap();
        assert!((m.beta[0] - 4.0).abs() < 1e-10 && (m.beta[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn ols_singular_design() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        assert!(matches!(
            fit_ols(&Dataset::from_rows(&rows, vec![1.0, 2.0, 3.0]).unwrap()),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn logistic_gd_decreases_risk() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 10.0 - 1.0, 1.0]).collect();
        let y = rows.iter().map(|r| if r[0] + 0.1 > 0.0 { 1.0 } else { -1.0 }).collect();
        let data = Dataset::from_rows(&rows, y).unwrap();
        let r = fit_empirical_gd(&data, LossKind::Logistic, 0.5, 200, None).unwrap();
        assert!(r.trajectory.last().unwrap().robust_loss < r.trajectory[0].robust_loss);
        assert!((r.trajectory[0].robust_loss - 2f64.ln()).abs() < 1e-12);
    }
}
