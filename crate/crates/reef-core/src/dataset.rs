//! Dataset ingestion, splitting, standardization, and synthetic generation.
//!
//! The CSV loader applies a configurable retain/drop column policy whose
//! defaults follow the tank-chemistry schema: 18 retained features (one
//! binary), Gross Community Production Rate as the target, and the
//! calculation-based columns dropped. Rows with missing or unparseable
//! values in retained columns are removed and counted, never imputed.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::rng::{derive_seed, Rng};

/// Default retained feature columns, in report order.
pub const DEFAULT_FEATURES: [&str; 18] = [
    "Tank Total Alkalinity",
    "Tank Temperature",
    "Tank pH",
    "Tank Phosphate",
    "Nitrate",
    "Silicate",
    "Tank CO2",
    "Tank HCO3",
    "Tank CO3",
    "Tank Dissolved Inorganic Carbon",
    "Tank Aragonite Saturation State",
    "Tank Calcite Saturation State",
    "Residence Time",
    "Flow Rate",
    "Surface Area",
    "Ash-Free Dry Weight",
    "Day/Night",
    "Respiration",
];

/// Default binary (day=1 / night=0) columns.
pub const DEFAULT_BINARY: [&str; 1] = ["Day/Night"];

pub const DEFAULT_TARGET: &str = "Gross Community Production Rate";

/// Columns dropped by default. Net Community Production Rate is
/// calculation-based (gross production minus respiration), so keeping it
/// would leak the target.
pub const DEFAULT_DROPPED: [&str; 7] = [
    "Tank Header Observations",
    "Tank pCO2",
    "Tank fCO2",
    "Net Community Calcification Rate",
    "Gross Community Calcification Rate",
    "Net Community Production Rate",
    "Dry Weight",
];

fn default_features() -> Vec<String> {
    DEFAULT_FEATURES.iter().map(|s| s.to_string()).collect()
}

fn default_binary() -> Vec<String> {
    DEFAULT_BINARY.iter().map(|s| s.to_string()).collect()
}

fn default_target() -> String {
    DEFAULT_TARGET.to_string()
}

fn default_dropped() -> Vec<String> {
    DEFAULT_DROPPED.iter().map(|s| s.to_string()).collect()
}

/// Column policy for ingestion: which header columns become features (in
/// which order), which of those are binary-encoded, and which column is the
/// target. `dropped` is documentation plus validation; any header column not
/// named in `features`/`target` is ignored either way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaConfig {
    #[serde(default = "default_features")]
    pub features: Vec<String>,
    #[serde(default = "default_binary")]
    pub binary: Vec<String>,
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_dropped")]
    pub dropped: Vec<String>,
}

impl Default for SchemaConfig {
    fn default() -> Self {
        SchemaConfig {
            features: default_features(),
            binary: default_binary(),
            target: default_target(),
            dropped: default_dropped(),
        }
    }
}

impl SchemaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidSchema("no feature columns named".into()));
        }
        let mut seen = HashSet::new();
        for name in &self.features {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "feature column '{name}' named twice"
                )));
            }
        }
        if seen.contains(self.target.as_str()) {
            return Err(Error::InvalidSchema(format!(
                "target column '{}' also named as a feature",
                self.target
            )));
        }
        for name in &self.binary {
            if !seen.contains(name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "binary column '{name}' is not a retained feature"
                )));
            }
        }
        for name in &self.dropped {
            if seen.contains(name.as_str()) || name == &self.target {
                return Err(Error::InvalidSchema(format!(
                    "column '{name}' is both retained and dropped"
                )));
            }
        }
        Ok(())
    }

    pub fn is_binary(&self, name: &str) -> bool {
        self.binary.iter().any(|b| b == name)
    }
}

/// In-memory dataset: named feature columns plus one target column.
/// Rows are stored densely; construction rejects ragged or non-finite data.
#[derive(Debug, Clone, PartialEq)]
pub struct ReefDataset {
    feature_names: Vec<String>,
    target_name: String,
    /// Row-major feature values, n_rows * n_features.
    features: Vec<f64>,
    targets: Vec<f64>,
}

impl ReefDataset {
    pub fn new(
        feature_names: Vec<String>,
        target_name: String,
        rows: Vec<Vec<f64>>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        if rows.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                context: "dataset rows vs targets",
                left: rows.len().to_string(),
                right: targets.len().to_string(),
            });
        }
        let p = feature_names.len();
        let mut features = Vec::with_capacity(rows.len() * p);
        for row in &rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    context: "dataset row width",
                    left: p.to_string(),
                    right: row.len().to_string(),
                });
            }
            features.extend_from_slice(row);
        }
        if features.iter().chain(&targets).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "dataset value",
            });
        }
        Ok(ReefDataset {
            feature_names,
            target_name,
            features,
            targets,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.features[i * p..(i + 1) * p]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn feature_matrix(&self) -> Matrix {
        Matrix::from_vec(self.n_rows(), self.n_features(), self.features.clone())
            .expect("dataset invariants guarantee a valid matrix")
    }

    pub fn target_vector(&self) -> Vector {
        Vector::new(self.targets.clone()).expect("dataset targets are finite")
    }

    /// New dataset from row indices; indices may repeat (bootstrap).
    pub fn select_rows(&self, indices: &[usize]) -> ReefDataset {
        let p = self.n_features();
        let mut features = Vec::with_capacity(indices.len() * p);
        let mut targets = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            targets.push(self.targets[i]);
        }
        ReefDataset {
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            features,
            targets,
        }
    }
}

/// Result of CSV ingestion: the dataset plus how many rows were removed for
/// missing or unparseable retained values.
#[derive(Debug)]
pub struct IngestOutcome {
    pub dataset: ReefDataset,
    pub rows_removed: usize,
}

pub(crate) fn parse_binary(raw: &str) -> Option<f64> {
    let v = raw.trim();
    if v.eq_ignore_ascii_case("day") {
        Some(1.0)
    } else if v.eq_ignore_ascii_case("night") {
        Some(0.0)
    } else if v == "1" {
        Some(1.0)
    } else if v == "0" {
        Some(0.0)
    } else {
        None
    }
}

pub(crate) fn parse_numeric(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Loads a CSV file under the given column policy.
///
/// The header must contain every retained feature and the target; anything
/// else in the file is ignored. Binary columns accept day/night labels
/// (case-insensitive) or literal 0/1, which is what `export_csv` writes.
pub fn ingest_csv(path: &Path, schema: &SchemaConfig) -> Result<IngestOutcome> {
    schema.validate()?;
    let ctx = || format!("reading {}", path.display());
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::csv(ctx(), e))?;

    let headers = reader.headers().map_err(|e| Error::csv(ctx(), e))?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);

    let mut missing: Vec<String> = Vec::new();
    let mut feature_idx = Vec::with_capacity(schema.features.len());
    for name in &schema.features {
        match position(name) {
            Some(i) => feature_idx.push(i),
            None => missing.push(name.clone()),
        }
    }
    let target_idx = position(&schema.target);
    if target_idx.is_none() {
        missing.push(schema.target.clone());
    }
    if !missing.is_empty() {
        return Err(Error::MissingColumns { missing });
    }
    let target_idx = target_idx.unwrap();
    let binary: Vec<bool> = schema
        .features
        .iter()
        .map(|name| schema.is_binary(name))
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut targets: Vec<f64> = Vec::new();
    let mut rows_removed = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(ctx(), e))?;
        let mut row = Vec::with_capacity(feature_idx.len());
        let mut ok = true;
        for (&idx, &is_bin) in feature_idx.iter().zip(&binary) {
            let parsed = record.get(idx).and_then(|raw| {
                if is_bin {
                    parse_binary(raw)
                } else {
                    parse_numeric(raw)
                }
            });
            match parsed {
                Some(v) => row.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let target = record.get(target_idx).and_then(parse_numeric);
        match (ok, target) {
            (true, Some(t)) => {
                rows.push(row);
                targets.push(t);
            }
            _ => rows_removed += 1,
        }
    }

    if rows.is_empty() {
        return Err(Error::EmptyDataset { rows_removed });
    }
    let dataset = ReefDataset::new(
        schema.features.clone(),
        schema.target.clone(),
        rows,
        targets,
    )?;
    Ok(IngestOutcome {
        dataset,
        rows_removed,
    })
}

/// Writes a dataset back out as CSV (features in order, target last).
///
/// Values print in shortest round-trip form, so ingest(export(d)) == d
/// bit for bit.
pub fn export_csv(data: &ReefDataset, path: &Path) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(ctx(), e))?;
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push(data.target_name());
    writer.write_record(&header).map_err(|e| Error::csv(ctx(), e))?;
    for i in 0..data.n_rows() {
        let mut record: Vec<String> = data.row(i).iter().map(|v| v.to_string()).collect();
        record.push(data.targets()[i].to_string());
        writer.write_record(&record).map_err(|e| Error::csv(ctx(), e))?;
    }
    writer.flush().map_err(|e| Error::io(ctx(), e))?;
    Ok(())
}

/// Train/test split policy: shuffle with the given seed, then cut a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.train_fraction.is_finite()
            || self.train_fraction <= 0.0
            || self.train_fraction > 1.0
        {
            return Err(Error::InvalidConfig(format!(
                "train_fraction must be in (0, 1], got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Seeded Fisher-Yates shuffle followed by a prefix split.
///
/// Train size is floor(n * fraction), nudged by 1e-9 before flooring so that
/// decimal fractions behave as written (505 * 0.6 is fractionally below 303
/// in binary floating point).
pub fn split(data: &ReefDataset, cfg: &SplitConfig) -> Result<(ReefDataset, ReefDataset)> {
    cfg.validate()?;
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::NoRows {
            context: "split input",
        });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    Rng::new(cfg.seed).shuffle(&mut indices);
    let n_train = ((n as f64) * cfg.train_fraction + 1e-9).floor() as usize;
    let n_train = n_train.min(n);
    let train = data.select_rows(&indices[..n_train]);
    let test = data.select_rows(&indices[n_train..]);
    Ok((train, test))
}

/// Per-feature centering and scaling, fit on training rows only.
/// Stds are population stds, stored as computed; columns with std below
/// 1e-12 transform to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(train: &ReefDataset) -> Result<Self> {
        let n = train.n_rows();
        if n == 0 {
            return Err(Error::NoRows {
                context: "standardizer fit",
            });
        }
        let p = train.n_features();
        let mut means = vec![0.0; p];
        for i in 0..n {
            for (m, &x) in means.iter_mut().zip(train.row(i)) {
                *m += x;
            }
        }
        for m in &mut means {
            *m /= n as f64;
        }
        let mut vars = vec![0.0; p];
        for i in 0..n {
            for j in 0..p {
                let d = train.row(i)[j] - means[j];
                vars[j] += d * d;
            }
        }
        let stds = vars.iter().map(|v| (v / n as f64).sqrt()).collect();
        Ok(Standardizer { means, stds })
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.means.len() {
            return Err(Error::DimensionMismatch {
                context: "standardizer row width",
                left: self.means.len().to_string(),
                right: row.len().to_string(),
            });
        }
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&x, (&m, &s))| if s < 1e-12 { 0.0 } else { (x - m) / s })
            .collect())
    }

    /// Applies the stored train statistics; targets pass through untouched.
    pub fn transform(&self, data: &ReefDataset) -> Result<ReefDataset> {
        let rows: Result<Vec<Vec<f64>>> =
            (0..data.n_rows()).map(|i| self.transform_row(data.row(i))).collect();
        ReefDataset::new(
            data.feature_names().to_vec(),
            data.target_name().to_string(),
            rows?,
            data.targets().to_vec(),
        )
    }
}

/// Generates a linear-plus-noise dataset for oracle tests and benchmarks.
///
/// Features are i.i.d. uniform on [-1, 1]; the target is
/// intercept + w.x + N(0, noise_sd). Features and noise come from separate
/// labeled streams of the seed, so changing one never perturbs the other.
pub fn generate_synthetic(
    n: usize,
    p: usize,
    weights: &[f64],
    intercept: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<ReefDataset> {
    if weights.len() != p {
        return Err(Error::DimensionMismatch {
            context: "synthetic weights",
            left: p.to_string(),
            right: weights.len().to_string(),
        });
    }
    if !noise_sd.is_finite() || noise_sd < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "noise_sd must be finite and >= 0, got {noise_sd}"
        )));
    }
    let mut rng_x = Rng::new(derive_seed(seed, "synthetic/features"));
    let mut rng_e = Rng::new(derive_seed(seed, "synthetic/noise"));
    let mut rows = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p).map(|_| rng_x.uniform(-1.0, 1.0)).collect();
        let signal: f64 = intercept + crate::linalg::dot(weights, &row);
        targets.push(signal + noise_sd * rng_e.normal());
        rows.push(row);
    }
    let feature_names = (0..p).map(|j| format!("x{j}")).collect();
    ReefDataset::new(feature_names, "y".to_string(), rows, targets)
}
