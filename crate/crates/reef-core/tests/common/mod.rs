//! Shared fixtures and independent oracle implementations for the
//! integration suites. Everything here recomputes results from first
//! principles so the library under test never checks itself.

// Each integration binary compiles this module separately and none uses
// every helper.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use reef_core::dataset::{export_csv, generate_synthetic, ReefDataset, SchemaConfig};
use reef_core::models::svr::SvrModel;
use reef_core::rng::Rng;

pub const ANALOG_INTERCEPT: f64 = 5.0;
pub const ANALOG_TARGET_R2: f64 = 0.91;

/// Planted-signal weights for the desk-scale analog: w_j = 0.5 + 0.1 j.
pub fn analog_weights(p: usize) -> Vec<f64> {
    (0..p).map(|j| 0.5 + 0.1 * j as f64).collect()
}

/// Noise level at which the analog's theoretical R² equals the target:
/// features are U[-1,1] (variance 1/3), so Var(signal) = Σw²/3 and
/// R² = Var(signal) / (Var(signal) + σ²).
pub fn analog_noise_sd(weights: &[f64]) -> f64 {
    let var_signal: f64 = weights.iter().map(|w| w * w).sum::<f64>() / 3.0;
    (var_signal * (1.0 / ANALOG_TARGET_R2 - 1.0)).sqrt()
}

/// Synthetic stand-in for the 505-row reef dataset: 18 uniform features,
/// a planted linear signal, and noise calibrated for R² = 0.91.
pub fn analog_dataset(n: usize, seed: u64) -> ReefDataset {
    let weights = analog_weights(18);
    let sd = analog_noise_sd(&weights);
    generate_synthetic(n, 18, &weights, ANALOG_INTERCEPT, sd, seed).unwrap()
}

/// The same numbers wearing the default reef schema: columns renamed, the
/// Day/Night feature binarized at zero, written as a CSV that ingests under
/// `SchemaConfig::default()`.
pub fn write_reef_csv(path: &Path, n: usize, seed: u64) {
    let analog = analog_dataset(n, seed);
    let schema = SchemaConfig::default();
    let day_night = schema
        .features
        .iter()
        .position(|f| f == "Day/Night")
        .unwrap();
    let rows: Vec<Vec<f64>> = (0..analog.n_rows())
        .map(|i| {
            let mut row = analog.row(i).to_vec();
            row[day_night] = if row[day_night] > 0.0 { 1.0 } else { 0.0 };
            row
        })
        .collect();
    let renamed = ReefDataset::new(
        schema.features.clone(),
        schema.target.clone(),
        rows,
        analog.targets().to_vec(),
    )
    .unwrap();
    export_csv(&renamed, path).unwrap();
}

/// Gradient-descent OLS oracle: minimizes mean squared error from zero
/// initialization with a fixed step. Returns (weights, intercept).
pub fn gd_ols(data: &ReefDataset, learning_rate: f64, iterations: usize) -> (Vec<f64>, f64) {
    let n = data.n_rows();
    let p = data.n_features();
    let mut weights = vec![0.0; p];
    let mut intercept = 0.0;
    let mut grad = vec![0.0; p];
    for _ in 0..iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for i in 0..n {
            let row = data.row(i);
            let pred: f64 =
                intercept + row.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>();
            let r = pred - data.targets()[i];
            for j in 0..p {
                grad[j] += r * row[j];
            }
            grad_b += r;
        }
        let scale = 2.0 * learning_rate / n as f64;
        for j in 0..p {
            weights[j] -= scale * grad[j];
        }
        intercept -= scale * grad_b;
    }
    (weights, intercept)
}

/// Gauss-Jordan elimination with partial pivoting; independent of the
/// library's Cholesky path.
// Index loops kept: they mirror the textbook row operations.
#[allow(clippy::needless_range_loop)]
pub fn gauss_jordan(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (row, &rhs) in m.iter_mut().zip(b) {
        row.push(rhs);
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| m[r1][col].abs().total_cmp(&m[r2][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let d = m[col][col];
        assert!(d.abs() > 1e-12, "oracle given a singular system");
        for j in col..=n {
            m[col][j] /= d;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for j in col..=n {
                    m[r][j] -= f * m[col][j];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n]).collect()
}

#[derive(Debug)]
pub struct ExactSplit {
    pub feature: usize,
    pub threshold: f64,
    pub reduction: f64,
    /// A different (feature, threshold) attains exactly the same reduction.
    pub tied: bool,
}

/// Exhaustive best-split oracle in exact integer arithmetic over small
/// integer features and targets. Ties break toward the lowest feature, then
/// the lowest threshold, and are reported so callers can skip instances
/// where float argmax order is undefined.
pub fn exact_best_split(rows: &[Vec<i64>], targets: &[i64]) -> Option<ExactSplit> {
    let n = rows.len();
    assert!(n >= 1 && !rows[0].is_empty());
    let p = rows[0].len();
    let total_y: i128 = targets.iter().map(|&y| y as i128).sum();
    let total_y2: i128 = targets.iter().map(|&y| (y as i128) * (y as i128)).sum();

    // reduction = parent - left - right with exact value num / (n*k*m).
    // best is (num, k, m); comparison cross-multiplies (n cancels).
    let mut best: Option<(usize, f64, i128, i128, i128)> = None;
    let mut tied = false;
    for feature in 0..p {
        let mut pairs: Vec<(i64, i64)> = rows
            .iter()
            .zip(targets)
            .map(|(row, &y)| (row[feature], y))
            .collect();
        pairs.sort_unstable();
        let mut left_y: i128 = 0;
        let mut left_y2: i128 = 0;
        for k in 1..n {
            let (x_prev, y_prev) = pairs[k - 1];
            left_y += y_prev as i128;
            left_y2 += (y_prev as i128) * (y_prev as i128);
            if x_prev == pairs[k].0 {
                continue;
            }
            let (ki, mi, ni) = (k as i128, (n - k) as i128, n as i128);
            let right_y = total_y - left_y;
            let right_y2 = total_y2 - left_y2;
            let parent_num = ni * total_y2 - total_y * total_y;
            let left_num = ki * left_y2 - left_y * left_y;
            let right_num = mi * right_y2 - right_y * right_y;
            let num = parent_num * ki * mi - left_num * ni * mi - right_num * ni * ki;
            if num <= 0 {
                continue;
            }
            let threshold = (x_prev + pairs[k].0) as f64 / 2.0;
            match &best {
                None => best = Some((feature, threshold, num, ki, mi)),
                Some((bf, bt, bnum, bk, bm)) => {
                    let lhs = num * bk * bm;
                    let rhs = bnum * ki * mi;
                    if lhs > rhs {
                        best = Some((feature, threshold, num, ki, mi));
                        tied = false;
                    } else if lhs == rhs && (feature, threshold) != (*bf, *bt) {
                        tied = true;
                    }
                }
            }
        }
    }
    best.map(|(feature, threshold, num, k, m)| ExactSplit {
        feature,
        threshold,
        reduction: num as f64 / (n as i128 * k * m) as f64,
        tied,
    })
}

/// ε-SVR dual objective in β form (with α, α* complementary):
/// W(β) = −½ βᵀKβ − ε Σ|β| + Σ yβ. Zero scores zero.
pub fn svr_dual_objective(beta: &[f64], gram: &[Vec<f64>], y: &[f64], epsilon: f64) -> f64 {
    let n = beta.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += beta[i] * gram[i][j] * beta[j];
        }
    }
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let lin: f64 = beta.iter().zip(y).map(|(b, yi)| b * yi).sum();
    -0.5 * quad - epsilon * l1 + lin
}

/// Maps a pruned model's support vectors back onto training rows to
/// reconstruct the full dual coefficient vector.
pub fn full_beta(model: &SvrModel, data: &ReefDataset) -> Vec<f64> {
    let mut beta = vec![0.0; data.n_rows()];
    for (sv, coef) in model.support_vectors.iter().zip(&model.coefficients) {
        let idx = (0..data.n_rows())
            .find(|&i| data.row(i) == sv.as_slice())
            .expect("support vector matches a training row");
        beta[idx] += coef;
    }
    beta
}

/// Uniform integer in [lo, hi] from the library RNG.
pub fn int_in(rng: &mut Rng, lo: i64, hi: i64) -> i64 {
    lo + rng.below((hi - lo + 1) as usize) as i64
}

/// A dataset whose feature and target values are small exact integers.
pub fn int_dataset(rows: &[Vec<i64>], targets: &[i64]) -> ReefDataset {
    let p = rows[0].len();
    ReefDataset::new(
        (0..p).map(|j| format!("x{j}")).collect(),
        "y".into(),
        rows.iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect(),
        targets.iter().map(|&v| v as f64).collect(),
    )
    .unwrap()
}

/// Every file under `dir`, keyed by path relative to it.
pub fn collect_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
