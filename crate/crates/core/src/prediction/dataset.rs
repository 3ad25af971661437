//! Labeled regression datasets for HOI persistence (16 features per HOI)
//! and k-node persistence (8 features per node).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{hoi_feature_names, WindowFeatures, NODE_FEATURE_NAMES};
use crate::hypergraph::{TemporalHypergraph, Unit};
use crate::metrics::PageRankOptions;
use crate::persistence::{
    check_hoi_size, count_units, enumerate_hois, node_persistences, Hoi, Protocol,
};

/// Which quantity a dataset predicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Persistence of a HOI from its group and averaged node features.
    Group,
    /// k-node persistence of a node from its node features.
    Node,
}

impl Problem {
    /// Share of rows used for training.
    pub fn default_train_fraction(self) -> f64 {
        match self {
            Problem::Group => 2.0 / 3.0,
            Problem::Node => 4.0 / 5.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Group => "group",
            Problem::Node => "node",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub problem: Problem,
    pub k: usize,
    pub protocol: Protocol,
    pub cap: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Row identifiers: the HOI's (or node's) original ids joined by `|`.
    pub keys: Vec<String>,
    pub provenance: Option<Provenance>,
}

impl LabeledDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Self {
        assert_eq!(rows.len(), targets.len());
        debug_assert!(rows.iter().all(|r| r.len() == feature_names.len()));
        let keys = (0..rows.len()).map(|i| i.to_string()).collect();
        Self {
            feature_names,
            rows,
            targets,
            keys,
            provenance: None,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            keys: indices.iter().map(|&i| self.keys[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Same rows restricted to the feature columns `columns`.
    pub fn select_features(&self, columns: &[usize]) -> Self {
        Self {
            feature_names: columns
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            rows: self
                .rows
                .iter()
                .map(|r| columns.iter().map(|&c| r[c]).collect())
                .collect(),
            targets: self.targets.clone(),
            keys: self.keys.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }
}

/// Inputs shared by the dataset builders.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DatasetOptions {
    pub protocol: Protocol,
    /// Upper bound on the number of HOIs (group problem only).
    pub cap: Option<usize>,
    pub seed: u64,
    pub pagerank: PageRankOptions,
}

fn key_of(h: &TemporalHypergraph, nodes: &[u32]) -> String {
    nodes
        .iter()
        .map(|&v| h.label(v).to_string())
        .collect::<Vec<_>>()
        .join("|")
}

/// Rows for HOI persistence prediction: 16 features on each HOI's feature
/// window, target = persistence over its persistence window.
pub fn build_group_dataset(
    h: &TemporalHypergraph,
    k: usize,
    opts: &DatasetOptions,
) -> Result<LabeledDataset> {
    check_hoi_size(k)?;
    opts.protocol.validate()?;
    let hois = enumerate_hois(h, k, opts.cap, opts.seed)?;
    let eligible: Vec<(Hoi, _)> = hois
        .into_iter()
        .filter_map(|s| opts.protocol.windows(s.t0(), h.num_units()).map(|w| (s, w)))
        .collect();
    if eligible.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "no size-{k} HOI has a complete persistence window"
        )));
    }

    let mut by_window: BTreeMap<(Unit, Unit), Vec<usize>> = BTreeMap::new();
    for (i, (_, w)) in eligible.iter().enumerate() {
        by_window
            .entry((w.feature_lo, w.feature_hi))
            .or_default()
            .push(i);
    }
    let groups: Vec<((Unit, Unit), Vec<usize>)> = by_window.into_iter().collect();
    let computed: Vec<Vec<(usize, Vec<f64>, f64)>> = groups
        .par_iter()
        .map(|((lo, hi), members)| {
            let wf = WindowFeatures::new(h.window(*lo, *hi), &opts.pagerank)?;
            Ok(members
                .iter()
                .map(|&i| {
                    let (s, w) = &eligible[i];
                    let target = count_units(h, s.nodes(), w.persist_lo, w.persist_hi) as f64;
                    (i, wf.hoi_features(s.nodes()).to_vec(), target)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut rows = vec![Vec::new(); eligible.len()];
    let mut targets = vec![0.0; eligible.len()];
    for (i, row, target) in computed.into_iter().flatten() {
        rows[i] = row;
        targets[i] = target;
    }
    Ok(LabeledDataset {
        feature_names: hoi_feature_names(),
        keys: eligible.iter().map(|(s, _)| key_of(h, s.nodes())).collect(),
        rows,
        targets,
        provenance: Some(Provenance {
            problem: Problem::Group,
            k,
            protocol: opts.protocol,
            cap: opts.cap,
            seed: opts.seed,
        }),
    })
}

/// Rows for k-node persistence prediction: 8 node features on the window
/// after the node's first size-`k` HOI, target = mean persistence of the
/// node's HOIs. Nodes whose HOIs are all excluded are dropped.
pub fn build_node_dataset(
    h: &TemporalHypergraph,
    k: usize,
    opts: &DatasetOptions,
) -> Result<LabeledDataset> {
    check_hoi_size(k)?;
    opts.protocol.validate()?;
    let hois = enumerate_hois(h, k, None, opts.seed)?;
    let nodes: Vec<_> = node_persistences(h, &hois, &opts.protocol)
        .into_iter()
        .filter_map(|np| {
            let mean = np.mean?;
            let w = opts.protocol.windows(np.first, h.num_units())?;
            Some((np.node, w, mean))
        })
        .collect();
    if nodes.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "no node has a size-{k} HOI with a complete persistence window"
        )));
    }

    let mut by_window: BTreeMap<(Unit, Unit), Vec<usize>> = BTreeMap::new();
    for (i, (_, w, _)) in nodes.iter().enumerate() {
        by_window
            .entry((w.feature_lo, w.feature_hi))
            .or_default()
            .push(i);
    }
    let groups: Vec<((Unit, Unit), Vec<usize>)> = by_window.into_iter().collect();
    let computed: Vec<Vec<(usize, Vec<f64>)>> = groups
        .par_iter()
        .map(|((lo, hi), members)| {
            let wf = WindowFeatures::new(h.window(*lo, *hi), &opts.pagerank)?;
            Ok(members
                .iter()
                .map(|&i| (i, wf.node(nodes[i].0).to_array().to_vec()))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut rows = vec![Vec::new(); nodes.len()];
    for (i, row) in computed.into_iter().flatten() {
        rows[i] = row;
    }
    Ok(LabeledDataset {
        feature_names: NODE_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        keys: nodes
            .iter()
            .map(|(v, _, _)| h.label(*v).to_string())
            .collect(),
        targets: nodes.iter().map(|n| n.2).collect(),
        rows,
        provenance: Some(Provenance {
            problem: Problem::Node,
            k,
            protocol: opts.protocol,
            cap: None,
            seed: opts.seed,
        }),
    })
}

pub fn build_dataset(
    h: &TemporalHypergraph,
    problem: Problem,
    k: usize,
    opts: &DatasetOptions,
) -> Result<LabeledDataset> {
    match problem {
        Problem::Group => build_group_dataset(h, k, opts),
        Problem::Node => build_node_dataset(h, k, opts),
    }
}

/// Seeded shuffle followed by a prefix split into `(train, test)`.
pub fn split(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let n = ds.len();
    let n_train = (n as f64 * train_fraction).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::EmptyDataset(format!(
            "{n} rows cannot be split into nonempty train and test sets at fraction {train_fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((ds.subset(&order[..n_train]), ds.subset(&order[n_train..])))
}
