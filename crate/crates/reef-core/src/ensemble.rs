//! Model averaging over a heterogeneous member roster.
//!
//! Members train independently (optionally on bootstrap resamples) and
//! predictions are the plain mean of member outputs. Summation runs in
//! ascending member-name order with Neumaier compensation, so the result is
//! independent of the order members were supplied in.

use crate::dataset::ReefDataset;
use crate::error::{Error, Result};
use crate::models::{ModelSpec, Predictor, TrainedModel};
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    names: Vec<String>,
    members: Vec<TrainedModel>,
    /// Member indices sorted by name: the fixed summation order.
    order: Vec<usize>,
}

/// Compensated (Neumaier) summation; exact for a single addend.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

impl EnsembleModel {
    /// Wraps already-trained members. Names must be unique and non-empty.
    pub fn new(names: Vec<String>, members: Vec<TrainedModel>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidConfig("ensemble has no members".into()));
        }
        if names.len() != members.len() {
            return Err(Error::InvalidConfig(format!(
                "{} member names for {} members",
                names.len(),
                members.len()
            )));
        }
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        for pair in order.windows(2) {
            if names[pair[0]] == names[pair[1]] {
                return Err(Error::InvalidConfig(format!(
                    "duplicate member name '{}'",
                    names[pair[0]]
                )));
            }
        }
        Ok(EnsembleModel {
            names,
            members,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in their original supply order.
    pub fn members(&self) -> impl Iterator<Item = (&str, &TrainedModel)> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.members.iter())
    }
}

impl Predictor for EnsembleModel {
    fn predict(&self, row: &[f64]) -> Result<f64> {
        let mut per_member = vec![0.0; self.members.len()];
        for (i, member) in self.members.iter().enumerate() {
            per_member[i] = member.predict(row)?;
        }
        let total = neumaier_sum(self.order.iter().map(|&i| per_member[i]));
        Ok(total / self.members.len() as f64)
    }
}

/// Trains one member per spec. With `bootstrap` set, member `i` trains on a
/// seeded size-n resample drawn with replacement; otherwise every member sees
/// the full training set.
pub fn fit_ensemble(
    train: &ReefDataset,
    specs: &[(String, ModelSpec)],
    bootstrap: bool,
    seed: u64,
) -> Result<EnsembleModel> {
    if specs.is_empty() {
        return Err(Error::InvalidConfig("ensemble has no members".into()));
    }
    let n = train.n_rows();
    let mut names = Vec::with_capacity(specs.len());
    let mut members = Vec::with_capacity(specs.len());
    for (index, (name, spec)) in specs.iter().enumerate() {
        let model = if bootstrap {
            let mut rng = Rng::new(derive_seed(seed, &format!("member/{index}")));
            let rows: Vec<usize> = (0..n).map(|_| rng.below(n)).collect();
            let resample = train.select_rows(&rows);
            spec.fit(&resample)
        } else {
            spec.fit(train)
        }
        .map_err(|e| Error::MemberFit {
            index,
            source: Box::new(e),
        })?;
        names.push(name.clone());
        members.push(model);
    }
    EnsembleModel::new(names, members)
}
