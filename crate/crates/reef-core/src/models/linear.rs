//! Ordinary least squares and ridge regression via the normal equations.
//!
//! OLS appends an all-ones intercept column and solves (XᵀX)w = Xᵀy.
//! Ridge centers features and target first and solves
//! (XcᵀXc + λI)w = Xcᵀyc, so the intercept mean(y) − w·mean(x) is never
//! penalized; that keeps the λ→∞ limit at the target mean.

use serde::{Deserialize, Serialize};

use crate::dataset::ReefDataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, solve_spd, Matrix, Vector};

/// Diagonal jitter added once when the normal system is not positive
/// definite as given; a second failure is reported as rank deficiency.
const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub weights: Vec<f64>,
}

impl LinearModel {
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                context: "linear model input width",
                left: self.weights.len().to_string(),
                right: row.len().to_string(),
            });
        }
        Ok(self.intercept + dot(&self.weights, row))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RidgeConfig {
    pub lambda: f64,
}

impl Default for RidgeConfig {
    fn default() -> Self {
        RidgeConfig { lambda: 1.0 }
    }
}

impl RidgeConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "ridge lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Solves a normal system, retrying once with diagonal jitter.
fn solve_normal(mut a: Matrix, b: &Vector) -> Result<Vector> {
    match solve_spd(&a, b) {
        Ok(w) => Ok(w),
        Err(Error::NotPositiveDefinite { .. }) => {
            a.add_diagonal(JITTER);
            solve_spd(&a, b).map_err(|e| match e {
                Error::NotPositiveDefinite { .. } => Error::RankDeficient,
                other => other,
            })
        }
        Err(other) => Err(other),
    }
}

/// Least-squares fit of intercept plus one weight per feature.
pub fn fit_ols(train: &ReefDataset) -> Result<LinearModel> {
    let n = train.n_rows();
    let p = train.n_features();
    if n < p + 1 {
        return Err(Error::TooFewRows {
            what: "an ordinary least squares model",
            needed: p + 1,
            got: n,
        });
    }

    // Design matrix with the intercept column appended last.
    let mut design = Vec::with_capacity(n * (p + 1));
    for i in 0..n {
        design.extend_from_slice(train.row(i));
        design.push(1.0);
    }
    let x = Matrix::from_vec(n, p + 1, design)?;
    let xt = x.transpose();
    let xtx = xt.matmul(&x)?;
    let xty = xt.mul_vec(&train.target_vector())?;

    let w = solve_normal(xtx, &xty)?;
    let mut weights: Vec<f64> = w.to_vec();
    let intercept = weights.pop().expect("system has p+1 unknowns");
    Ok(LinearModel { intercept, weights })
}

/// Ridge fit on centered data; lambda 0 coincides with OLS.
pub fn fit_ridge(train: &ReefDataset, cfg: &RidgeConfig) -> Result<LinearModel> {
    cfg.validate()?;
    let n = train.n_rows();
    let p = train.n_features();
    if n == 0 {
        return Err(Error::NoRows {
            context: "ridge fit",
        });
    }

    let mut x_mean = vec![0.0; p];
    for i in 0..n {
        for (m, &v) in x_mean.iter_mut().zip(train.row(i)) {
            *m += v;
        }
    }
    for m in &mut x_mean {
        *m /= n as f64;
    }
    let y_mean = train.targets().iter().sum::<f64>() / n as f64;

    let mut centered = Vec::with_capacity(n * p);
    for i in 0..n {
        centered.extend(train.row(i).iter().zip(&x_mean).map(|(&v, &m)| v - m));
    }
    let xc = Matrix::from_vec(n, p, centered)?;
    let yc = Vector::new(train.targets().iter().map(|&y| y - y_mean).collect())?;

    let xt = xc.transpose();
    let mut a = xt.matmul(&xc)?;
    a.add_diagonal(cfg.lambda);
    let b = xt.mul_vec(&yc)?;

    let w = solve_normal(a, &b)?;
    let intercept = y_mean - dot(&w, &x_mean);
    Ok(LinearModel {
        intercept,
        weights: w.into(),
    })
}
