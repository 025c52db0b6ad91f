//! ε-insensitive support vector regression with linear, polynomial, and RBF
//! kernels, trained by SMO-style coordinate ascent on the dual.
//!
//! The dual being solved (maximization form, β_i = α_i − α*_i):
//!
//!   W(β) = −½ ΣΣ β_i β_j k(x_i,x_j) − ε Σ|β_i| + Σ y_i β_i,
//!   subject to Σβ_i = 0 and |β_i| ≤ c.
//!
//! Internally the solver works on 2n box variables t (the α and α* halves,
//! sign s=+1/−1), tracking u = Kβ so every KKT value
//! v_k = (y_i − u_i) − s_k ε is O(1). Each step picks the maximal violator
//! from the "can increase" set and the second-order best partner from the
//! "can decrease" set, then transfers mass between their β entries; box
//! clipping re-derives the partner from the pair invariant, so the equality
//! constraint never drifts beyond roundoff.

use serde::{Deserialize, Serialize};

use crate::dataset::ReefDataset;
use crate::error::{Error, Result};
use crate::linalg::dot;

/// Floor for the pairwise curvature term in SMO updates.
const TAU: f64 = 1e-12;
/// Dual coefficients at or below this magnitude are pruned from the model.
const PRUNE: f64 = 1e-12;

fn default_degree() -> u32 {
    3
}

/// Kernel choice as configured: gamma left unset means the "scale"
/// convention 1/(p · pooled feature variance), resolved at fit time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSettings {
    #[default]
    Linear,
    Polynomial {
        #[serde(default = "default_degree")]
        degree: u32,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        coef0: f64,
    },
    Rbf {
        #[serde(default)]
        gamma: Option<f64>,
    },
}

impl KernelSettings {
    pub fn validate(&self) -> Result<()> {
        let check_gamma = |gamma: &Option<f64>| match gamma {
            Some(g) if !g.is_finite() || *g <= 0.0 => Err(Error::InvalidConfig(format!(
                "kernel gamma must be finite and > 0, got {g}"
            ))),
            _ => Ok(()),
        };
        match self {
            KernelSettings::Linear => Ok(()),
            KernelSettings::Polynomial {
                degree,
                gamma,
                coef0,
            } => {
                if *degree < 1 {
                    return Err(Error::InvalidConfig(
                        "polynomial degree must be >= 1".into(),
                    ));
                }
                if !coef0.is_finite() {
                    return Err(Error::InvalidConfig("coef0 must be finite".into()));
                }
                check_gamma(gamma)
            }
            KernelSettings::Rbf { gamma } => check_gamma(gamma),
        }
    }

    /// Fills in the scale-convention gamma from the training features.
    pub fn resolve(&self, train: &ReefDataset) -> Result<KernelSpec> {
        self.validate()?;
        Ok(match self {
            KernelSettings::Linear => KernelSpec::Linear,
            KernelSettings::Polynomial {
                degree,
                gamma,
                coef0,
            } => KernelSpec::Polynomial {
                degree: *degree,
                gamma: gamma.unwrap_or_else(|| scale_gamma(train)),
                coef0: *coef0,
            },
            KernelSettings::Rbf { gamma } => KernelSpec::Rbf {
                gamma: gamma.unwrap_or_else(|| scale_gamma(train)),
            },
        })
    }
}

/// 1 / (p · population variance of all feature entries), or 1.0 when the
/// features are essentially constant.
fn scale_gamma(train: &ReefDataset) -> f64 {
    let n = train.n_rows();
    let p = train.n_features();
    let count = (n * p) as f64;
    let mut mean = 0.0;
    for i in 0..n {
        mean += train.row(i).iter().sum::<f64>();
    }
    mean /= count;
    let mut var = 0.0;
    for i in 0..n {
        for &x in train.row(i) {
            var += (x - mean) * (x - mean);
        }
    }
    var /= count;
    if var < 1e-12 {
        1.0
    } else {
        1.0 / (p as f64 * var)
    }
}

/// Fully specified kernel as stored in a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
    Rbf { gamma: f64 },
}

pub fn kernel_eval(kernel: &KernelSpec, x: &[f64], z: &[f64]) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            context: "kernel arguments",
            left: x.len().to_string(),
            right: z.len().to_string(),
        });
    }
    Ok(match kernel {
        KernelSpec::Linear => dot(x, z),
        KernelSpec::Polynomial {
            degree,
            gamma,
            coef0,
        } => (gamma * dot(x, z) + coef0).powi(*degree as i32),
        KernelSpec::Rbf { gamma } => {
            let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            (-gamma * d2).exp()
        }
    })
}

fn default_c() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_tol() -> f64 {
    1e-3
}
fn default_max_passes() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrConfig {
    /// Box constraint on each dual coefficient.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Half-width of the insensitive tube.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub kernel: KernelSettings,
    /// KKT violation gap at which optimization stops.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Iteration budget: at most max_passes * n_rows pairwise updates.
    #[serde(default = "default_max_passes")]
    pub max_passes: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        SvrConfig {
            c: default_c(),
            epsilon: default_epsilon(),
            kernel: KernelSettings::default(),
            tol: default_tol(),
            max_passes: default_max_passes(),
        }
    }
}

impl SvrConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "svr c must be finite and > 0, got {}",
                self.c
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "svr epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "svr tol must be finite and > 0, got {}",
                self.tol
            )));
        }
        self.kernel.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: KernelSpec,
    pub support_vectors: Vec<Vec<f64>>,
    /// Dual coefficients α_i − α*_i of the retained support vectors.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub n_features: usize,
    pub converged: bool,
}

impl SvrModel {
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                context: "svr input width",
                left: self.n_features.to_string(),
                right: row.len().to_string(),
            });
        }
        let mut out = self.bias;
        for (sv, coeff) in self.support_vectors.iter().zip(&self.coefficients) {
            out += coeff * kernel_eval(&self.kernel, sv, row)?;
        }
        Ok(out)
    }
}

pub fn fit_svr(train: &ReefDataset, cfg: &SvrConfig) -> Result<SvrModel> {
    fit_svr_traced(train, cfg).map(|(model, _)| model)
}

/// Fits and also returns the dual objective after initialization and after
/// every pairwise update, for ascent diagnostics.
pub fn fit_svr_traced(train: &ReefDataset, cfg: &SvrConfig) -> Result<(SvrModel, Vec<f64>)> {
    cfg.validate()?;
    let n = train.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows {
            what: "a support vector regression",
            needed: 2,
            got: n,
        });
    }
    let kernel = cfg.kernel.resolve(train)?;
    let c = cfg.c;
    let eps = cfg.epsilon;
    let y = train.targets();

    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel_eval(&kernel, train.row(i), train.row(j))?;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }

    // Box variables: t[0..n] are the α half (sign +1), t[n..2n] the α* half
    // (sign −1). β_i = t[i] − t[n+i]; u = Kβ.
    let mut t = vec![0.0; 2 * n];
    let mut beta = vec![0.0; n];
    let mut u = vec![0.0; n];

    let sign = |kk: usize| -> f64 {
        if kk < n {
            1.0
        } else {
            -1.0
        }
    };
    let point = |kk: usize| -> usize { if kk < n { kk } else { kk - n } };
    let kkt_value = |kk: usize, u: &[f64]| -> f64 {
        let i = point(kk);
        (y[i] - u[i]) - sign(kk) * eps
    };
    // I_up: indices whose KKT value bounds the bias from below (mass can
    // move in); I_low: from above (mass can move out).
    let in_up = |kk: usize, t: &[f64]| -> bool {
        if kk < n {
            t[kk] < c
        } else {
            t[kk] > 0.0
        }
    };
    let in_low = |kk: usize, t: &[f64]| -> bool {
        if kk < n {
            t[kk] > 0.0
        } else {
            t[kk] < c
        }
    };

    let dual_objective = |t: &[f64], beta: &[f64], u: &[f64]| -> f64 {
        let quad: f64 = beta.iter().zip(u).map(|(b, uu)| b * uu).sum();
        let lin: f64 = (0..2 * n)
            .map(|kk| (eps - sign(kk) * y[point(kk)]) * t[kk])
            .sum();
        -(0.5 * quad + lin)
    };

    let mut trace = Vec::with_capacity(64);
    trace.push(dual_objective(&t, &beta, &u));

    let select = |t: &[f64], u: &[f64]| -> (Option<(usize, f64)>, Option<f64>) {
        let mut best_up: Option<(usize, f64)> = None;
        let mut low_min: Option<f64> = None;
        for kk in 0..2 * n {
            let v = kkt_value(kk, u);
            if in_up(kk, t) && best_up.is_none_or(|(_, m)| v > m) {
                best_up = Some((kk, v));
            }
            if in_low(kk, t) && low_min.is_none_or(|m| v < m) {
                low_min = Some(v);
            }
        }
        (best_up, low_min)
    };

    let max_updates = cfg.max_passes.saturating_mul(n);
    let mut converged = false;
    for _ in 0..max_updates {
        let (best_up, low_min) = select(&t, &u);
        let (i_k, m) = match best_up {
            Some(pair) => pair,
            None => {
                converged = true;
                break;
            }
        };
        let big_m = match low_min {
            Some(v) => v,
            None => {
                converged = true;
                break;
            }
        };
        if m - big_m <= cfg.tol {
            converged = true;
            break;
        }

        // Second-order partner: maximal (m − v_j)² / curvature over I_low.
        let a_pt = point(i_k);
        let mut j_best: Option<(usize, f64, f64)> = None; // (index, v_j, gain)
        for kk in 0..2 * n {
            if !in_low(kk, &t) {
                continue;
            }
            let v = kkt_value(kk, &u);
            if v >= m {
                continue;
            }
            let b_pt = point(kk);
            let quad =
                (k[a_pt * n + a_pt] + k[b_pt * n + b_pt] - 2.0 * k[a_pt * n + b_pt]).max(TAU);
            let diff = m - v;
            let gain = diff * diff / quad;
            if j_best.is_none_or(|(_, _, g)| gain > g) {
                j_best = Some((kk, v, gain));
            }
        }
        let (j_k, v_j, _) = match j_best {
            Some(tuple) => tuple,
            None => {
                converged = true;
                break;
            }
        };

        let b_pt = point(j_k);
        let si = sign(i_k);
        let sj = sign(j_k);
        let quad =
            (k[a_pt * n + a_pt] + k[b_pt * n + b_pt] - 2.0 * k[a_pt * n + b_pt]).max(TAU);
        let theta = (m - v_j) / quad;

        let old_ti = t[i_k];
        let old_tj = t[j_k];
        let (mut new_ti, mut new_tj);
        if si == sj {
            // t_i + t_j is invariant under this move.
            let sum = old_ti + old_tj;
            new_ti = old_ti + si * theta;
            if new_ti > c {
                new_ti = c;
            }
            if new_ti < 0.0 {
                new_ti = 0.0;
            }
            new_tj = sum - new_ti;
            if new_tj > c {
                new_tj = c;
                new_ti = sum - c;
            }
            if new_tj < 0.0 {
                new_tj = 0.0;
                new_ti = sum;
            }
        } else {
            // t_i − t_j is invariant under this move.
            let diff = old_ti - old_tj;
            new_ti = old_ti + si * theta;
            new_tj = old_tj + si * theta;
            if new_ti > c {
                new_ti = c;
                new_tj = c - diff;
            }
            if new_ti < 0.0 {
                new_ti = 0.0;
                new_tj = -diff;
            }
            if new_tj > c {
                new_tj = c;
                new_ti = c + diff;
            }
            if new_tj < 0.0 {
                new_tj = 0.0;
                new_ti = diff;
            }
        }

        let d_beta_a = si * (new_ti - old_ti);
        let d_beta_b = sj * (new_tj - old_tj);
        t[i_k] = new_ti;
        t[j_k] = new_tj;
        beta[a_pt] += d_beta_a;
        beta[b_pt] += d_beta_b;
        for (idx, uu) in u.iter_mut().enumerate() {
            *uu += d_beta_a * k[a_pt * n + idx] + d_beta_b * k[b_pt * n + idx];
        }
        trace.push(dual_objective(&t, &beta, &u));
    }

    // Bias: average KKT value over free vectors, else the midpoint of the
    // remaining bounds.
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for (kk, &tk) in t.iter().enumerate() {
        if tk > 0.0 && tk < c {
            free_sum += kkt_value(kk, &u);
            free_count += 1;
        }
    }
    let bias = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        let (best_up, low_min) = select(&t, &u);
        match (best_up, low_min) {
            (Some((_, m)), Some(big_m)) => (m + big_m) / 2.0,
            _ => 0.0,
        }
    };

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (i, &b) in beta.iter().enumerate() {
        if b.abs() > PRUNE {
            support_vectors.push(train.row(i).to_vec());
            coefficients.push(b);
        }
    }

    Ok((
        SvrModel {
            kernel,
            support_vectors,
            coefficients,
            bias,
            n_features: train.n_features(),
            converged,
        },
        trace,
    ))
}
