//! End-to-end runs: configuration, the staged training pipeline, and the
//! prediction and plot-data commands that consume its artifacts.
//!
//! A training run is a fixed sequence of named stages (config, ingest,
//! split, standardize, train/<model>, evaluate, write). Whatever stage
//! fails, a manifest recording it is written to the output directory before
//! the error propagates. Successful runs are byte-for-byte reproducible:
//! artifacts contain no timestamps or absolute paths, and all randomness
//! derives from the root seed through labeled stage seeds.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{
    self, export_csv, ingest_csv, IngestOutcome, ReefDataset, SchemaConfig, SplitConfig,
    Standardizer,
};
use crate::ensemble::{fit_ensemble, neumaier_sum, EnsembleModel};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_all, EvalReport};
use crate::models::{ModelSpec, Predictor, SavedModel, TrainedModel};
use crate::rng::derive_seed;

fn default_train_fraction() -> f64 {
    0.6
}
fn default_seed() -> u64 {
    42
}
fn default_true() -> bool {
    true
}
fn default_ensemble_name() -> String {
    "Bagging Ensemble".to_string()
}

/// One named model in the training roster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub name: String,
    #[serde(flatten)]
    pub spec: ModelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleSettings {
    pub enabled: bool,
    /// Train each member on a fresh bootstrap resample instead of the full
    /// training set.
    pub bootstrap: bool,
    pub name: String,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        EnsembleSettings {
            enabled: true,
            bootstrap: false,
            name: default_ensemble_name(),
        }
    }
}

/// Full description of a training run. Every field has a default, so `{}`
/// is a valid config file describing the standard seven-model run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub schema: SchemaConfig,
    pub train_fraction: f64,
    /// Root seed; splitting, forests, and bootstrap resampling use seeds
    /// derived from it under distinct labels.
    pub seed: u64,
    pub standardize: bool,
    pub models: Vec<RosterEntry>,
    pub ensemble: EnsembleSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: SchemaConfig::default(),
            train_fraction: default_train_fraction(),
            seed: default_seed(),
            standardize: default_true(),
            models: default_roster(),
            ensemble: EnsembleSettings::default(),
        }
    }
}

/// The standard roster, in report order.
pub fn default_roster() -> Vec<RosterEntry> {
    use crate::models::{ForestConfig, KernelSettings, RidgeConfig, SvrConfig, TreeConfig};
    let svr = |kernel: KernelSettings| SvrConfig {
        kernel,
        ..SvrConfig::default()
    };
    vec![
        RosterEntry {
            name: "Linear Regression".into(),
            spec: ModelSpec::Linear,
        },
        RosterEntry {
            name: "SVR Linear".into(),
            spec: ModelSpec::Svr(svr(KernelSettings::Linear)),
        },
        RosterEntry {
            name: "SVR Poly".into(),
            spec: ModelSpec::Svr(svr(KernelSettings::Polynomial {
                degree: 3,
                gamma: None,
                coef0: 0.0,
            })),
        },
        RosterEntry {
            name: "SVR RBF".into(),
            spec: ModelSpec::Svr(svr(KernelSettings::Rbf { gamma: None })),
        },
        RosterEntry {
            name: "Decision Trees".into(),
            spec: ModelSpec::Tree(TreeConfig::default()),
        },
        RosterEntry {
            name: "Random Forests".into(),
            spec: ModelSpec::Forest(ForestConfig::default()),
        },
        RosterEntry {
            name: "Ridge Regression".into(),
            spec: ModelSpec::Ridge(RidgeConfig::default()),
        },
    ]
}

/// File-name-safe identifier: lowercase alphanumerics with single
/// underscores between runs of anything else.
pub fn slug(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.is_empty() && !out.ends_with('_') {
            out.push('_');
        }
    }
    while out.ends_with('_') {
        out.pop();
    }
    if out.is_empty() {
        out.push_str("unnamed");
    }
    out
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::json(format!("parsing config {}", path.display()), e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.schema.validate()?;
        SplitConfig {
            train_fraction: self.train_fraction,
            seed: 0,
        }
        .validate()?;
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("model roster is empty".into()));
        }
        let mut names: Vec<&str> = self.models.iter().map(|e| e.name.as_str()).collect();
        if self.ensemble.enabled {
            names.push(self.ensemble.name.as_str());
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidConfig("model names must be non-empty".into()));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate model name '{name}'"
                )));
            }
            let s = slug(name);
            if names[..i].iter().any(|other| slug(other) == s) {
                return Err(Error::InvalidConfig(format!(
                    "model names '{name}' and another entry map to the same file name '{s}.json'"
                )));
            }
        }
        for entry in &self.models {
            entry.spec.validate().map_err(|e| {
                Error::InvalidConfig(format!("model '{}': {e}", entry.name))
            })?;
        }
        Ok(())
    }
}

fn spec_kind(spec: &ModelSpec) -> &'static str {
    match spec {
        ModelSpec::Linear => "linear",
        ModelSpec::Ridge(_) => "ridge",
        ModelSpec::Svr(_) => "svr",
        ModelSpec::Tree(_) => "tree",
        ModelSpec::Forest(_) => "forest",
    }
}

/// Forests draw their seed from the run's root seed by roster position;
/// a seed given in the config file is deliberately overridden so one root
/// seed pins the whole run.
fn with_injected_seed(spec: &ModelSpec, root: u64, index: usize) -> ModelSpec {
    match spec {
        ModelSpec::Forest(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = derive_seed(root, &format!("forest/{index}"));
            ModelSpec::Forest(cfg)
        }
        other => other.clone(),
    }
}

#[derive(Serialize)]
struct ManifestModel {
    name: String,
    file: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_features: Option<usize>,
}

#[derive(Serialize)]
struct ManifestEnsemble {
    name: String,
    file: String,
    aggregation: &'static str,
    bootstrap: bool,
    members: Vec<String>,
}

#[derive(Serialize)]
struct ManifestArtifacts {
    report_text: String,
    report_csv: String,
    train_csv: String,
    test_csv: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    status: &'static str,
    data_path: String,
    rows_ingested: usize,
    rows_removed: usize,
    train_rows: usize,
    test_rows: usize,
    split_seed: u64,
    models: Vec<ManifestModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ensemble: Option<ManifestEnsemble>,
    artifacts: ManifestArtifacts,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct FailureManifest<'a> {
    status: &'static str,
    failed_stage: &'a str,
    error: String,
    data_path: String,
    /// Absent when the config itself could not be read.
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a RunConfig>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::json(format!("serializing {}", path.display()), e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Reference from an ensemble document to one member model file, relative
/// to the document's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRef {
    pub name: String,
    pub file: String,
}

/// On-disk ensemble: an aggregation rule over member model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDocument {
    /// Always "ensemble"; distinguishes this document from single models.
    pub kind: String,
    pub aggregation: String,
    pub members: Vec<MemberRef>,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub report: EvalReport,
    pub rows_ingested: usize,
    pub rows_removed: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub model_files: Vec<PathBuf>,
    pub report_text_path: PathBuf,
    pub report_csv_path: PathBuf,
    pub manifest_path: PathBuf,
    /// Names of SVR models that hit the iteration budget before meeting
    /// their tolerance.
    pub unconverged: Vec<String>,
}

fn write_failure_manifest(
    out_dir: &Path,
    data_path: &Path,
    stage: &str,
    error: &Error,
    config: Option<&RunConfig>,
) {
    let _ = fs::create_dir_all(out_dir);
    let manifest = FailureManifest {
        status: "failed",
        failed_stage: stage,
        error: error.to_string(),
        data_path: data_path.display().to_string(),
        config,
    };
    let _ = write_json(&out_dir.join("manifest.json"), &manifest);
}

/// For callers that fail before they even have a config (unreadable or
/// invalid config file): records the failure under the "config" stage.
pub fn write_config_failure_manifest(out_dir: &Path, data_path: &Path, error: &Error) {
    write_failure_manifest(out_dir, data_path, "config", error, None);
}

pub fn run_train(config: &RunConfig, data_path: &Path, out_dir: &Path) -> Result<TrainOutcome> {
    let fail = |stage: &str, e: Error| -> Error {
        write_failure_manifest(out_dir, data_path, stage, &e, Some(config));
        Error::StageFailed {
            stage: stage.to_string(),
            source: Box::new(e),
        }
    };

    config.validate().map_err(|e| fail("config", e))?;

    let IngestOutcome {
        dataset,
        rows_removed,
    } = ingest_csv(data_path, &config.schema).map_err(|e| fail("ingest", e))?;
    let rows_ingested = dataset.n_rows();

    let split_seed = derive_seed(config.seed, "split");
    let (train_raw, test_raw) = dataset::split(
        &dataset,
        &SplitConfig {
            train_fraction: config.train_fraction,
            seed: split_seed,
        },
    )
    .map_err(|e| fail("split", e))?;

    let standardizer = if config.standardize {
        Some(Standardizer::fit(&train_raw).map_err(|e| fail("standardize", e))?)
    } else {
        None
    };
    let (train, test) = match &standardizer {
        Some(s) => (
            s.transform(&train_raw).map_err(|e| fail("standardize", e))?,
            s.transform(&test_raw).map_err(|e| fail("standardize", e))?,
        ),
        None => (train_raw.clone(), test_raw.clone()),
    };

    let mut members: Vec<(String, TrainedModel)> = Vec::with_capacity(config.models.len());
    for (index, entry) in config.models.iter().enumerate() {
        let spec = with_injected_seed(&entry.spec, config.seed, index);
        let model = spec
            .fit(&train)
            .map_err(|e| fail(&format!("train/{}", entry.name), e))?;
        members.push((entry.name.clone(), model));
    }

    let ensemble = if config.ensemble.enabled {
        let stage = format!("train/{}", config.ensemble.name);
        let model = if config.ensemble.bootstrap {
            let specs: Vec<(String, ModelSpec)> = config
                .models
                .iter()
                .enumerate()
                .map(|(i, e)| (e.name.clone(), with_injected_seed(&e.spec, config.seed, i)))
                .collect();
            fit_ensemble(
                &train,
                &specs,
                true,
                derive_seed(config.seed, "ensemble"),
            )
        } else {
            // Without resampling every member would retrain on identical
            // data, so the fitted roster is reused as-is.
            EnsembleModel::new(
                members.iter().map(|(n, _)| n.clone()).collect(),
                members.iter().map(|(_, m)| m.clone()).collect(),
            )
        }
        .map_err(|e| fail(&stage, e))?;
        Some(model)
    } else {
        None
    };

    let mut scored: Vec<(&str, &dyn Predictor)> = members
        .iter()
        .map(|(n, m)| (n.as_str(), m as &dyn Predictor))
        .collect();
    if let Some(e) = &ensemble {
        scored.push((config.ensemble.name.as_str(), e as &dyn Predictor));
    }
    let split_desc = format!(
        "train {} rows / test {} rows (fraction {})",
        train.n_rows(),
        test.n_rows(),
        config.train_fraction
    );
    let config_desc = format!(
        "seed={}, standardize={}, rows_removed={}",
        config.seed, config.standardize, rows_removed
    );
    let report = evaluate_all(&scored, &test, split_desc, config_desc)
        .map_err(|e| fail("evaluate", e))?;

    let outcome = write_artifacts(
        config,
        data_path,
        out_dir,
        &train_raw,
        &test_raw,
        &standardizer,
        &members,
        &ensemble,
        split_seed,
        rows_ingested,
        rows_removed,
        report,
    )
    .map_err(|e| fail("write", e))?;
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn write_artifacts(
    config: &RunConfig,
    data_path: &Path,
    out_dir: &Path,
    train_raw: &ReefDataset,
    test_raw: &ReefDataset,
    standardizer: &Option<Standardizer>,
    members: &[(String, TrainedModel)],
    ensemble: &Option<EnsembleModel>,
    split_seed: u64,
    rows_ingested: usize,
    rows_removed: usize,
    report: EvalReport,
) -> Result<TrainOutcome> {
    let models_dir = out_dir.join("models");
    fs::create_dir_all(&models_dir)
        .map_err(|e| Error::io(format!("creating {}", models_dir.display()), e))?;

    let saved = |model: &TrainedModel| SavedModel {
        model: model.clone(),
        feature_names: train_raw.feature_names().to_vec(),
        binary_features: config.schema.binary.clone(),
        target_name: train_raw.target_name().to_string(),
        standardizer: standardizer.clone(),
    };

    let mut model_files = Vec::new();
    let mut manifest_models = Vec::new();
    let mut unconverged = Vec::new();
    for ((name, model), entry) in members.iter().zip(&config.models) {
        let file_name = format!("{}.json", slug(name));
        let path = models_dir.join(&file_name);
        saved(model).save(&path)?;
        let mut echo = ManifestModel {
            name: name.clone(),
            file: format!("models/{file_name}"),
            kind: spec_kind(&entry.spec),
            seed: None,
            converged: None,
            gamma: None,
            max_features: None,
        };
        match model {
            TrainedModel::Svr(m) => {
                echo.converged = Some(m.converged);
                echo.gamma = match m.kernel {
                    crate::models::KernelSpec::Polynomial { gamma, .. } => Some(gamma),
                    crate::models::KernelSpec::Rbf { gamma } => Some(gamma),
                    crate::models::KernelSpec::Linear => None,
                };
                if !m.converged {
                    unconverged.push(name.clone());
                }
            }
            TrainedModel::Forest(m) => {
                echo.seed = Some(m.seed);
                echo.max_features = Some(m.max_features);
            }
            _ => {}
        }
        manifest_models.push(echo);
        model_files.push(path);
    }

    let manifest_ensemble = if let Some(ensemble) = ensemble {
        let ensemble_slug = slug(&config.ensemble.name);
        let mut refs = Vec::new();
        if config.ensemble.bootstrap {
            // Bootstrap members differ from the roster models, so they get
            // their own files next to the document.
            for (name, model) in ensemble.members() {
                let file_name = format!("{ensemble_slug}__{}.json", slug(name));
                let path = models_dir.join(&file_name);
                saved(model).save(&path)?;
                if let TrainedModel::Svr(m) = model {
                    if !m.converged {
                        unconverged.push(format!("{} / {name}", config.ensemble.name));
                    }
                }
                model_files.push(path);
                refs.push(MemberRef {
                    name: name.to_string(),
                    file: file_name,
                });
            }
        } else {
            for (name, _) in ensemble.members() {
                refs.push(MemberRef {
                    name: name.to_string(),
                    file: format!("{}.json", slug(name)),
                });
            }
        }
        let document = EnsembleDocument {
            kind: "ensemble".into(),
            aggregation: "mean".into(),
            members: refs,
        };
        let file_name = format!("{ensemble_slug}.json");
        let path = models_dir.join(&file_name);
        write_json(&path, &document)?;
        model_files.push(path);
        Some(ManifestEnsemble {
            name: config.ensemble.name.clone(),
            file: format!("models/{file_name}"),
            aggregation: "mean",
            bootstrap: config.ensemble.bootstrap,
            members: document.members.iter().map(|m| m.name.clone()).collect(),
        })
    } else {
        None
    };

    let report_text_path = out_dir.join("report.txt");
    fs::write(&report_text_path, report.render_text())
        .map_err(|e| Error::io(format!("writing {}", report_text_path.display()), e))?;
    let report_csv_path = out_dir.join("report.csv");
    fs::write(&report_csv_path, report.render_csv())
        .map_err(|e| Error::io(format!("writing {}", report_csv_path.display()), e))?;

    export_csv(train_raw, &out_dir.join("train.csv"))?;
    export_csv(test_raw, &out_dir.join("test.csv"))?;

    let manifest = RunManifest {
        status: "ok",
        data_path: data_path.display().to_string(),
        rows_ingested,
        rows_removed,
        train_rows: train_raw.n_rows(),
        test_rows: test_raw.n_rows(),
        split_seed,
        models: manifest_models,
        ensemble: manifest_ensemble,
        artifacts: ManifestArtifacts {
            report_text: "report.txt".into(),
            report_csv: "report.csv".into(),
            train_csv: "train.csv".into(),
            test_csv: "test.csv".into(),
        },
        config,
    };
    let manifest_path = out_dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;

    Ok(TrainOutcome {
        report,
        rows_ingested,
        rows_removed,
        train_rows: train_raw.n_rows(),
        test_rows: test_raw.n_rows(),
        model_files,
        report_text_path,
        report_csv_path,
        manifest_path,
        unconverged,
    })
}

enum LoadedPredictor {
    Single(SavedModel),
    /// Members sorted by name: the ensemble's fixed summation order.
    Ensemble(Vec<(String, SavedModel)>),
}

impl LoadedPredictor {
    fn feature_names(&self) -> &[String] {
        match self {
            LoadedPredictor::Single(m) => &m.feature_names,
            LoadedPredictor::Ensemble(members) => &members[0].1.feature_names,
        }
    }

    fn binary_features(&self) -> &[String] {
        match self {
            LoadedPredictor::Single(m) => &m.binary_features,
            LoadedPredictor::Ensemble(members) => &members[0].1.binary_features,
        }
    }

    fn target_name(&self) -> &str {
        match self {
            LoadedPredictor::Single(m) => &m.target_name,
            LoadedPredictor::Ensemble(members) => &members[0].1.target_name,
        }
    }

    fn predict_raw(&self, row: &[f64]) -> Result<f64> {
        match self {
            LoadedPredictor::Single(m) => m.predict_raw(row),
            LoadedPredictor::Ensemble(members) => {
                let mut preds = Vec::with_capacity(members.len());
                for (_, m) in members {
                    preds.push(m.predict_raw(row)?);
                }
                Ok(neumaier_sum(preds) / members.len() as f64)
            }
        }
    }
}

fn load_predictor(model_path: &Path) -> Result<LoadedPredictor> {
    let text = fs::read_to_string(model_path)
        .map_err(|e| Error::io(format!("reading model {}", model_path.display()), e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::json(format!("parsing model {}", model_path.display()), e))?;
    if value.get("kind").and_then(|k| k.as_str()) == Some("ensemble") {
        let document: EnsembleDocument = serde_json::from_value(value)
            .map_err(|e| Error::json(format!("parsing ensemble {}", model_path.display()), e))?;
        if document.aggregation != "mean" {
            return Err(Error::BadModelFile(format!(
                "unsupported aggregation '{}'",
                document.aggregation
            )));
        }
        if document.members.is_empty() {
            return Err(Error::BadModelFile("ensemble lists no members".into()));
        }
        let base = model_path.parent().unwrap_or_else(|| Path::new("."));
        let mut members = Vec::with_capacity(document.members.len());
        for member in &document.members {
            let loaded = SavedModel::load(&base.join(&member.file))?;
            members.push((member.name.clone(), loaded));
        }
        members.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in members.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::BadModelFile(format!(
                    "duplicate ensemble member name '{}'",
                    pair[0].0
                )));
            }
        }
        let first = &members[0].1.feature_names;
        if members.iter().any(|(_, m)| &m.feature_names != first) {
            return Err(Error::BadModelFile(
                "ensemble members disagree on feature columns".into(),
            ));
        }
        Ok(LoadedPredictor::Ensemble(members))
    } else {
        serde_json::from_value(value)
            .map(LoadedPredictor::Single)
            .map_err(|e| {
                Error::BadModelFile(format!("{}: {e}", model_path.display()))
            })
    }
}

/// Scores a raw CSV with a saved model (or ensemble document) and writes a
/// single-column `prediction` CSV. Returns the number of rows scored.
///
/// The input must carry exactly the model's feature columns; the trained
/// target column is tolerated and ignored, anything else is an error.
pub fn run_predict(model_path: &Path, input: &Path, output: &Path) -> Result<usize> {
    let predictor = load_predictor(model_path)?;
    let feature_names = predictor.feature_names().to_vec();

    let ctx = || format!("reading {}", input.display());
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(input)
        .map_err(|e| Error::csv(ctx(), e))?;
    let headers = reader.headers().map_err(|e| Error::csv(ctx(), e))?.clone();

    let mut missing = Vec::new();
    let mut positions = Vec::with_capacity(feature_names.len());
    for name in &feature_names {
        match headers.iter().position(|h| h == name) {
            Some(idx) => positions.push(idx),
            None => missing.push(name.clone()),
        }
    }
    let extra: Vec<String> = headers
        .iter()
        .filter(|h| !feature_names.iter().any(|f| f == h) && *h != predictor.target_name())
        .map(str::to_string)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::ColumnMismatch { missing, extra });
    }

    let mut predictions = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(ctx(), e))?;
        let mut row = Vec::with_capacity(feature_names.len());
        for (name, &idx) in feature_names.iter().zip(&positions) {
            let raw = record.get(idx).unwrap_or("");
            let parsed = if predictor.binary_features().iter().any(|b| b == name) {
                dataset::parse_binary(raw)
            } else {
                dataset::parse_numeric(raw)
            };
            match parsed {
                Some(v) => row.push(v),
                None => {
                    return Err(Error::InvalidSchema(format!(
                        "input row {}: column '{}' has unparseable value '{}'",
                        i + 1,
                        name,
                        raw
                    )))
                }
            }
        }
        predictions.push(predictor.predict_raw(&row)?);
    }
    if predictions.is_empty() {
        return Err(Error::NoRows {
            context: "prediction input",
        });
    }

    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
    }
    let mut text = String::from("prediction\n");
    for p in &predictions {
        text.push_str(&p.to_string());
        text.push('\n');
    }
    fs::write(output, text).map_err(|e| Error::io(format!("writing {}", output.display()), e))?;
    Ok(predictions.len())
}

/// Writes one two-column CSV (feature, target) per retained non-binary
/// feature, named by the feature's slug. Returns the paths written.
pub fn run_plotdata(schema: &SchemaConfig, data_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let IngestOutcome { dataset, .. } = ingest_csv(data_path, schema)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::io(format!("creating {}", out_dir.display()), e))?;

    let mut written = Vec::new();
    let mut seen = Vec::new();
    for (j, name) in dataset.feature_names().iter().enumerate() {
        if schema.is_binary(name) {
            continue;
        }
        let s = slug(name);
        if seen.contains(&s) {
            return Err(Error::InvalidConfig(format!(
                "features '{name}' and another column map to the same file name '{s}.csv'"
            )));
        }
        let mut text = format!(
            "{},{}\n",
            crate::metrics::csv_field(name),
            crate::metrics::csv_field(dataset.target_name())
        );
        for i in 0..dataset.n_rows() {
            text.push_str(&dataset.row(i)[j].to_string());
            text.push(',');
            text.push_str(&dataset.targets()[i].to_string());
            text.push('\n');
        }
        let path = out_dir.join(format!("{s}.csv"));
        fs::write(&path, text)
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        written.push(path);
        seen.push(s);
    }
    Ok(written)
}
