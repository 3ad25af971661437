//! Persistence prediction: dataset construction, regressors, evaluation,
//! feature importance and the feature/observation-period sweeps.

mod dataset;
mod forest;
mod linear;
mod sweep;

pub use dataset::{
    build_dataset, build_group_dataset, build_node_dataset, split, DatasetOptions, LabeledDataset,
    Problem, Provenance,
};
pub use forest::{ForestModel, ForestParams, RegressionTree, TreeNode};
pub use linear::{LinearModel, MeanModel, RELATIVE_RIDGE};
pub use sweep::{feature_selection_sweep, observation_period_sweep, PeriodCell, SelectionStep};

use serde::Serialize;

use crate::error::{Error, Result};

pub trait Regressor {
    fn predict_row(&self, row: &[f64]) -> f64;

    fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mean,
    Linear,
    RandomForest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Mean, ModelKind::Linear, ModelKind::RandomForest];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Mean => "mean",
            ModelKind::Linear => "linear",
            ModelKind::RandomForest => "random_forest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    /// `None` when the test targets are constant.
    pub r_squared: Option<f64>,
    pub rmse: f64,
    pub n_test: usize,
}

pub fn evaluate_predictions(predicted: &[f64], actual: &[f64]) -> Result<EvalReport> {
    if actual.is_empty() || predicted.len() != actual.len() {
        return Err(Error::Fit(format!(
            "cannot evaluate {} predictions against {} targets",
            predicted.len(),
            actual.len()
        )));
    }
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_res: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (a - p).powi(2))
        .sum();
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    Ok(EvalReport {
        r_squared: (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot),
        rmse: (ss_res / n).sqrt(),
        n_test: actual.len(),
    })
}

pub fn evaluate(model: &dyn Regressor, test: &LabeledDataset) -> Result<EvalReport> {
    evaluate_predictions(&model.predict(&test.rows), &test.targets)
}

/// A fitted model of any kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Model {
    Mean(MeanModel),
    Linear(LinearModel),
    RandomForest(ForestModel),
}

impl Model {
    pub fn fit(kind: ModelKind, train: &LabeledDataset, forest: &ForestParams) -> Result<Self> {
        Ok(match kind {
            ModelKind::Mean => Model::Mean(MeanModel::fit(&train.targets)?),
            ModelKind::Linear => Model::Linear(LinearModel::fit(&train.rows, &train.targets)?),
            ModelKind::RandomForest => {
                Model::RandomForest(ForestModel::fit(&train.rows, &train.targets, forest)?)
            }
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Mean(_) => ModelKind::Mean,
            Model::Linear(_) => ModelKind::Linear,
            Model::RandomForest(_) => ModelKind::RandomForest,
        }
    }
}

impl Regressor for Model {
    fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Model::Mean(m) => m.predict_row(row),
            Model::Linear(m) => m.predict_row(row),
            Model::RandomForest(m) => m.predict_row(row),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelComparison {
    pub n_train: usize,
    pub results: Vec<(ModelKind, EvalReport)>,
}

impl ModelComparison {
    pub fn report(&self, kind: ModelKind) -> Option<&EvalReport> {
        self.results
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, r)| r)
    }

    /// Relative RMSE reduction of the forest over the mean baseline, in percent.
    pub fn improvement_over_mean(&self) -> Option<f64> {
        let base = self.report(ModelKind::Mean)?.rmse;
        let rf = self.report(ModelKind::RandomForest)?.rmse;
        (base > 0.0).then(|| 100.0 * (base - rf) / base)
    }
}

/// Fits every model on one seeded split and evaluates on the held-out rows.
pub fn compare_models(
    ds: &LabeledDataset,
    train_fraction: f64,
    split_seed: u64,
    forest: &ForestParams,
) -> Result<ModelComparison> {
    let (train, test) = split(ds, train_fraction, split_seed)?;
    let results = ModelKind::ALL
        .iter()
        .map(|&kind| {
            let model = Model::fit(kind, &train, forest)?;
            Ok((kind, evaluate(&model, &test)?))
        })
        .collect::<Result<_>>()?;
    Ok(ModelComparison {
        n_train: train.len(),
        results,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Importance {
    pub names: Vec<String>,
    /// Mean impurity decrease per feature.
    pub raw: Vec<f64>,
    /// Shares summing to 1 (uniform when no split reduced impurity).
    pub normalized: Vec<f64>,
    /// Feature indices from most to least important; ties keep column order.
    pub ranking: Vec<usize>,
}

pub fn gini_importance(model: &ForestModel, names: &[String]) -> Importance {
    let raw = model.raw_importance();
    let total: f64 = raw.iter().sum();
    let normalized = if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / raw.len().max(1) as f64; raw.len()]
    };
    let mut ranking: Vec<usize> = (0..raw.len()).collect();
    ranking.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));
    Importance {
        names: names.to_vec(),
        raw,
        normalized,
        ranking,
    }
}
