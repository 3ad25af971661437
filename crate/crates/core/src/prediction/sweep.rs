use serde::Serialize;

use super::{
    build_dataset, compare_models, evaluate, gini_importance, split, DatasetOptions, ForestModel,
    ForestParams, LabeledDataset, ModelKind, Problem,
};
use crate::error::{Error, Result};
use crate::hypergraph::TemporalHypergraph;
use crate::persistence::Protocol;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionStep {
    pub features: Vec<String>,
    pub rmse: f64,
    pub r_squared: Option<f64>,
    /// Least important feature of this step, removed before the next one.
    pub dropped: Option<String>,
}

/// Backward elimination: train a forest, drop the least important feature,
/// retrain, until one feature remains. Uses one split for every step.
pub fn feature_selection_sweep(
    ds: &LabeledDataset,
    train_fraction: f64,
    split_seed: u64,
    forest: &ForestParams,
) -> Result<Vec<SelectionStep>> {
    let (train, test) = split(ds, train_fraction, split_seed)?;
    let mut active: Vec<usize> = (0..ds.n_features()).collect();
    let mut steps = Vec::with_capacity(active.len());
    while !active.is_empty() {
        let tr = train.select_features(&active);
        let te = test.select_features(&active);
        let model = ForestModel::fit(&tr.rows, &tr.targets, forest)?;
        let report = evaluate(&model, &te)?;
        let dropped = if active.len() > 1 {
            let imp = gini_importance(&model, &tr.feature_names);
            let last = *imp.ranking.last().expect("nonempty ranking");
            Some(active.remove(last))
        } else {
            active.clear();
            None
        };
        steps.push(SelectionStep {
            features: tr.feature_names,
            rmse: report.rmse,
            r_squared: report.r_squared,
            dropped: dropped.map(|c| ds.feature_names[c].clone()),
        });
    }
    Ok(steps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodCell {
    pub observe: u32,
    pub include_past: bool,
    /// Zero when the cell has too few rows to train and test; the error
    /// fields are then absent.
    pub n_rows: usize,
    pub rmse_mean: Option<f64>,
    pub rmse_forest: Option<f64>,
    /// `100 * (rmse_mean - rmse_forest) / rmse_mean`; absent for a zero
    /// baseline.
    pub improvement: Option<f64>,
}

/// Forest improvement over the mean baseline for every combination of
/// observation period and past-inclusion flag. The persistence horizon is
/// the one in `base` for every cell.
#[allow(clippy::too_many_arguments)]
pub fn observation_period_sweep(
    h: &TemporalHypergraph,
    problem: Problem,
    k: usize,
    base: &DatasetOptions,
    observe_periods: &[u32],
    past_flags: &[bool],
    train_fraction: f64,
    split_seed: u64,
    forest: &ForestParams,
) -> Result<Vec<PeriodCell>> {
    let mut cells = Vec::new();
    for &observe in observe_periods {
        for &include_past in past_flags {
            let opts = DatasetOptions {
                protocol: Protocol {
                    observe,
                    include_past,
                    ..base.protocol
                },
                ..*base
            };
            let absent = PeriodCell {
                observe,
                include_past,
                n_rows: 0,
                rmse_mean: None,
                rmse_forest: None,
                improvement: None,
            };
            let ds = match build_dataset(h, problem, k, &opts) {
                Ok(ds) => ds,
                Err(Error::EmptyDataset(_)) => {
                    cells.push(absent);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let cmp = match compare_models(&ds, train_fraction, split_seed, forest) {
                Ok(cmp) => cmp,
                Err(Error::EmptyDataset(_)) => {
                    cells.push(absent);
                    continue;
                }
                Err(e) => return Err(e),
            };
            cells.push(PeriodCell {
                observe,
                include_past,
                n_rows: ds.len(),
                rmse_mean: cmp.report(ModelKind::Mean).map(|r| r.rmse),
                rmse_forest: cmp.report(ModelKind::RandomForest).map(|r| r.rmse),
                improvement: cmp.improvement_over_mean(),
            });
        }
    }
    Ok(cells)
}
