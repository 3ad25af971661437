//! Random forest regression with bootstrap samples, per-node feature
//! subsampling, and impurity-decrease (Gini) importances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::Regressor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features tried per split; `None` means `max(1, ceil(F / 3))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 30,
            max_depth: 10,
            min_samples_split: 2,
            max_features: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn features_per_split(&self, n_features: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| n_features.div_ceil(3))
            .clamp(1, n_features.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        samples: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionTree {
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
    /// Total impurity decrease attributed to each feature.
    #[serde(skip)]
    pub importance: Vec<f64>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { value, .. } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

impl ForestModel {
    pub fn fit(rows: &[Vec<f64>], targets: &[f64], params: &ForestParams) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n != targets.len() {
            return Err(Error::Fit(format!(
                "forest needs matching nonempty inputs, got {n} rows and {} targets",
                targets.len()
            )));
        }
        if params.n_trees == 0 {
            return Err(Error::Config("forest needs at least one tree".into()));
        }
        let n_features = rows[0].len();
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(Error::Fit("rows have differing lengths".into()));
        }
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(t as u64);
                grow_tree(rows, targets, params, &mut rng)
            })
            .collect();
        Ok(Self {
            params: *params,
            n_features,
            trees,
        })
    }

    /// Mean impurity decrease per feature over trees.
    pub fn raw_importance(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.n_features];
        for tree in &self.trees {
            for (acc, v) in total.iter_mut().zip(&tree.importance) {
                *acc += v;
            }
        }
        let n = self.trees.len() as f64;
        total.iter_mut().for_each(|v| *v /= n);
        total
    }
}

impl Regressor for ForestModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }
}

/// Per-tree growth state. Every feature keeps the node's sample positions
/// sorted by that feature's value over a shared range `[start, end)`, so a
/// split is a stable partition of each list instead of a fresh sort.
struct Grower<'a> {
    rows: &'a [Vec<f64>],
    targets: &'a [f64],
    params: &'a ForestParams,
    mtry: usize,
    /// Row index of each bootstrap position.
    sample: Vec<usize>,
    sorted: Vec<Vec<u32>>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
    nodes: Vec<TreeNode>,
    importance: Vec<f64>,
    order: Vec<usize>,
}

struct Best {
    feature: usize,
    threshold: f64,
    gain: f64,
    n_left: usize,
}

fn grow_tree(
    rows: &[Vec<f64>],
    targets: &[f64],
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> RegressionTree {
    let n = rows.len();
    let n_features = rows[0].len();
    let sample: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let sorted = (0..n_features)
        .map(|f| {
            let mut pos: Vec<u32> = (0..n as u32).collect();
            pos.sort_by(|&a, &b| {
                rows[sample[a as usize]][f].total_cmp(&rows[sample[b as usize]][f])
            });
            pos
        })
        .collect();
    let mut g = Grower {
        rows,
        targets,
        params,
        mtry: params.features_per_split(n_features),
        sample,
        sorted,
        goes_left: vec![false; n],
        scratch: Vec::with_capacity(n),
        nodes: Vec::new(),
        importance: vec![0.0; n_features],
        order: (0..n_features).collect(),
    };
    g.grow(0, n, 0, rng);
    RegressionTree {
        nodes: g.nodes,
        importance: g.importance,
    }
}

impl Grower<'_> {
    fn y(&self, pos: u32) -> f64 {
        self.targets[self.sample[pos as usize]]
    }

    fn x(&self, pos: u32, f: usize) -> f64 {
        self.rows[self.sample[pos as usize]][f]
    }

    fn grow(&mut self, start: usize, end: usize, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let id = self.nodes.len();
        let n = end - start;
        let positions = match self.sorted.first() {
            Some(list) => &list[start..end],
            None => &[][..],
        };
        let sum: f64 = if positions.is_empty() {
            (start..end).map(|i| self.targets[self.sample[i]]).sum()
        } else {
            positions.iter().map(|&p| self.y(p)).sum()
        };
        let mean = sum / n as f64;
        self.nodes.push(TreeNode::Leaf {
            value: mean,
            samples: n,
        });
        if depth >= self.params.max_depth || n < self.params.min_samples_split.max(2) {
            return id;
        }
        let Some(best) = self.best_split(start, end, sum, rng) else {
            return id;
        };

        self.importance[best.feature] += best.gain;
        for i in start..end {
            let p = self.sorted[best.feature][i];
            self.goes_left[p as usize] = i < start + best.n_left;
        }
        for f in 0..self.sorted.len() {
            self.scratch.clear();
            let list = &mut self.sorted[f];
            let mut w = start;
            for i in start..end {
                let p = list[i];
                if self.goes_left[p as usize] {
                    list[w] = p;
                    w += 1;
                } else {
                    self.scratch.push(p);
                }
            }
            list[w..end].copy_from_slice(&self.scratch);
        }
        let mid = start + best.n_left;
        let left = self.grow(start, mid, depth + 1, rng);
        let right = self.grow(mid, end, depth + 1, rng);
        self.nodes[id] = TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    /// Tries features in random order until `mtry` of them were
    /// non-constant on the node; constant features do not use up the budget.
    fn best_split(
        &mut self,
        start: usize,
        end: usize,
        sum: f64,
        rng: &mut ChaCha8Rng,
    ) -> Option<Best> {
        let n = end - start;
        let parent = sum * sum / n as f64;
        let mut best: Option<Best> = None;
        self.order.shuffle(rng);
        let mut tried = 0;
        for &f in &self.order {
            if tried >= self.mtry {
                break;
            }
            let list = &self.sorted[f][start..end];
            let mut left_sum = 0.0;
            let mut varies = false;
            for i in 0..n - 1 {
                left_sum += self.y(list[i]);
                let (xa, xb) = (self.x(list[i], f), self.x(list[i + 1], f));
                if xa >= xb {
                    continue;
                }
                varies = true;
                let nl = (i + 1) as f64;
                let nr = (n - i - 1) as f64;
                let right_sum = sum - left_sum;
                let gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mid = xa + (xb - xa) / 2.0;
                    best = Some(Best {
                        feature: f,
                        threshold: if mid < xb { mid } else { xa },
                        gain,
                        n_left: i + 1,
                    });
                }
            }
            tried += usize::from(varies);
        }
        // Splits that do not reduce impurity only add noise to the tree.
        let scale = parent.abs().max(1.0);
        best.filter(|b| b.gain > 1e-12 * scale)
    }
}
