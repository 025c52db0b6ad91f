//! Regression metrics and the evaluation report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::ReefDataset;
use crate::error::{Error, Result};
use crate::models::Predictor;

fn check_pair(y_true: &[f64], y_pred: &[f64]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            context: "metric input lengths",
            left: y_true.len().to_string(),
            right: y_pred.len().to_string(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::NoRows { context: "metrics" });
    }
    if y_true.iter().chain(y_pred).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "metric inputs",
        });
    }
    Ok(())
}

/// Coefficient of determination, 1 - SSres/SStot. Negative when the model is
/// worse than predicting the mean; undefined when y_true is constant.
pub fn r2_score(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let first = y_true[0];
    if y_true.iter().all(|&y| y == first) {
        return Err(Error::UndefinedR2);
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        ss_res += (t - p) * (t - p);
        ss_tot += (t - mean) * (t - mean);
    }
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let sum: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(&t, &p)| (t - p) * (t - p))
        .sum();
    Ok(sum / y_true.len() as f64)
}

pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let sum: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(&t, &p)| (t - p).abs())
        .sum();
    Ok(sum / y_true.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub name: String,
    pub r2: f64,
    pub mse: f64,
    pub mae: f64,
}

/// Per-model scores plus enough context to read the table on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: String,
    pub config: String,
    pub rows: Vec<EvalRow>,
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl EvalReport {
    pub fn row(&self, name: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Aligned text table, metrics to six decimal places.
    pub fn render_text(&self) -> String {
        let name_width = self
            .rows
            .iter()
            .map(|r| r.name.len())
            .chain(std::iter::once("Model".len()))
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "split: {}", self.split);
        let _ = writeln!(out, "config: {}", self.config);
        out.push('\n');
        let _ = writeln!(
            out,
            "{:<name_width$}  {:>12}  {:>12}  {:>12}",
            "Model", "R2", "MSE", "MAE"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<name_width$}  {:>12.6}  {:>12.6}  {:>12.6}",
                row.name, row.r2, row.mse, row.mae
            );
        }
        out
    }

    /// Machine-readable variant with a fixed header.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("model,r2,mse,mae\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6}",
                csv_field(&row.name),
                row.r2,
                row.mse,
                row.mae
            );
        }
        out
    }
}

/// Scores every named model on the test set, preserving roster order.
pub fn evaluate_all(
    models: &[(&str, &dyn Predictor)],
    test: &ReefDataset,
    split: String,
    config: String,
) -> Result<EvalReport> {
    if test.n_rows() == 0 {
        return Err(Error::NoRows {
            context: "evaluation",
        });
    }
    for (i, (name, _)) in models.iter().enumerate() {
        if models[..i].iter().any(|(other, _)| other == name) {
            return Err(Error::InvalidConfig(format!(
                "duplicate model name '{name}' in evaluation"
            )));
        }
    }
    let targets = test.target_vector();
    let mut rows = Vec::with_capacity(models.len());
    for (name, model) in models {
        let mut preds = Vec::with_capacity(test.n_rows());
        for i in 0..test.n_rows() {
            let p = model.predict(test.row(i)).map_err(|e| Error::ModelFailed {
                model: (*name).to_string(),
                source: Box::new(e),
            })?;
            preds.push(p);
        }
        rows.push(EvalRow {
            name: (*name).to_string(),
            r2: r2_score(&targets, &preds)?,
            mse: mse(&targets, &preds)?,
            mae: mae(&targets, &preds)?,
        });
    }
    Ok(EvalReport {
        split,
        config,
        rows,
    })
}
