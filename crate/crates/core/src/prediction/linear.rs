use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::Regressor;
use crate::error::{Error, Result};

/// Relative ridge added to the normal equations, scaled by the mean
/// diagonal of the centered Gram matrix. Small enough to leave
/// well-conditioned fits untouched, large enough to keep collinear feature
/// sets (common among the count features) solvable.
pub const RELATIVE_RIDGE: f64 = 1e-8;

/// Predicts the training mean of the target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanModel {
    pub mean: f64,
}

impl MeanModel {
    pub fn fit(targets: &[f64]) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Fit("mean model needs at least one row".into()));
        }
        Ok(Self {
            mean: targets.iter().sum::<f64>() / targets.len() as f64,
        })
    }
}

impl Regressor for MeanModel {
    fn predict_row(&self, _row: &[f64]) -> f64 {
        self.mean
    }
}

/// Ordinary least squares with an intercept.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn fit(rows: &[Vec<f64>], targets: &[f64]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n != targets.len() {
            return Err(Error::Fit(format!(
                "linear model needs matching nonempty inputs, got {n} rows and {} targets",
                targets.len()
            )));
        }
        let f = rows[0].len();
        let y_mean = targets.iter().sum::<f64>() / n as f64;
        if f == 0 {
            return Ok(Self {
                intercept: y_mean,
                coefficients: Vec::new(),
            });
        }
        let x_mean: Vec<f64> = (0..f)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let x = DMatrix::from_fn(n, f, |i, j| rows[i][j] - x_mean[j]);
        let y = DVector::from_iterator(n, targets.iter().map(|t| t - y_mean));

        let mut gram = x.tr_mul(&x);
        let rhs = x.tr_mul(&y);
        let scale = (gram.trace() / f as f64).max(f64::MIN_POSITIVE);
        for j in 0..f {
            gram[(j, j)] += RELATIVE_RIDGE * scale;
        }
        let beta = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => gram
                .svd(true, true)
                .solve(&rhs, 1e-12 * scale)
                .map_err(|e| Error::Fit(format!("least squares solve failed: {e}")))?,
        };
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Fit(
                "least squares produced non-finite coefficients".into(),
            ));
        }
        let intercept = y_mean - beta.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();
        Ok(Self {
            intercept,
            coefficients: beta.iter().copied().collect(),
        })
    }
}

impl Regressor for LinearModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }
}
