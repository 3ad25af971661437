//! Structural features of HOIs (group features) and of their nodes (node
//! features), measured on a window hypergraph and its projection.

use serde::Serialize;

use crate::error::Result;
use crate::hypergraph::{sorted_set, NodeId, TemporalHypergraph};
use crate::metrics::{core_numbers, local_clustering, pagerank, PageRankOptions};
use crate::projection::ProjectedGraph;

pub const GROUP_FEATURE_NAMES: [&str; 8] = [
    "n_edges",
    "n_edges_per_overlap",
    "size_per_overlap_size",
    "common_neighbors",
    "n_edges_per_common",
    "size_per_common",
    "avg_edge_size",
    "size_entropy",
];

pub const NODE_FEATURE_NAMES: [&str; 8] = [
    "degree",
    "weighted_degree",
    "core_number",
    "pagerank",
    "avg_neighbor_degree",
    "avg_neighbor_weighted_degree",
    "clustering",
    "occurrences",
];

/// All 16 HOI feature names: group features then averaged node features.
pub fn hoi_feature_names() -> Vec<String> {
    GROUP_FEATURE_NAMES
        .iter()
        .chain(NODE_FEATURE_NAMES.iter())
        .map(|s| s.to_string())
        .collect()
}

/// Raw counts describing how a node set sits among the window's hyperedges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GroupBasic {
    /// |E(S)|
    pub cnt: u64,
    /// Sum of sizes over E(S).
    pub sigma: u64,
    /// Number of hyperedges touching any node of S.
    pub cup: u64,
    /// Sum of sizes over the hyperedges touching S.
    pub sigma_cup: u64,
    /// |∩_{v∈S} N(v)|
    pub cap: u64,
    /// Shannon entropy (nats) of the sizes of the hyperedges in E(S).
    pub entropy: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GroupFeatures {
    pub cnt: f64,
    pub density: f64,
    pub size_ratio: f64,
    pub cap: f64,
    pub cnt_per_cap: f64,
    pub sigma_per_cap: f64,
    pub avg_size: f64,
    pub entropy: f64,
}

impl GroupFeatures {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.cnt,
            self.density,
            self.size_ratio,
            self.cap,
            self.cnt_per_cap,
            self.sigma_per_cap,
            self.avg_size,
            self.entropy,
        ]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct NodeFeatures {
    pub degree: f64,
    pub weighted_degree: f64,
    pub core: f64,
    pub pagerank: f64,
    pub avg_nbr_degree: f64,
    pub avg_nbr_weighted_degree: f64,
    pub clustering: f64,
    pub occurrences: f64,
}

impl NodeFeatures {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.degree,
            self.weighted_degree,
            self.core,
            self.pagerank,
            self.avg_nbr_degree,
            self.avg_nbr_weighted_degree,
            self.clustering,
            self.occurrences,
        ]
    }
}

/// Shannon entropy (natural log) of the empirical distribution of `values`.
pub fn entropy_of_counts<I: IntoIterator<Item = usize>>(values: I) -> f64 {
    let mut values: Vec<usize> = values.into_iter().collect();
    let n = values.len();
    if n <= 1 {
        return 0.0;
    }
    values.sort_unstable();
    let mut h = 0.0;
    let mut i = 0;
    while i < n {
        let j = values[i..].partition_point(|&x| x == values[i]) + i;
        let p = (j - i) as f64 / n as f64;
        h -= p * p.ln();
        i = j;
    }
    // exact zero for a single distinct value
    h.max(0.0)
}

/// Basic features of the node set `s` in `hw`. Common neighbors come from
/// the hypergraph neighborhoods.
pub fn group_basic(hw: &TemporalHypergraph, s: &[NodeId]) -> GroupBasic {
    let s = sorted_set(s);
    let mut lists = s.iter().map(|&v| hw.neighbors(v));
    let cap = match lists.next() {
        Some(first) => lists
            .fold(first, |acc, next| intersect_sorted(&acc, &next))
            .len() as u64,
        None => 0,
    };
    basic_with_cap(hw, &s, cap)
}

fn basic_with_cap(hw: &TemporalHypergraph, s: &[NodeId], cap: u64) -> GroupBasic {
    let containing = hw.positions_containing(s);
    let sizes: Vec<usize> = containing.iter().map(|&p| hw.edge_at(p).len()).collect();
    let mut overlap: Vec<u32> = s
        .iter()
        .flat_map(|&v| hw.incident(v).iter().copied())
        .collect();
    overlap.sort_unstable();
    overlap.dedup();
    GroupBasic {
        cnt: sizes.len() as u64,
        sigma: sizes.iter().sum::<usize>() as u64,
        cup: overlap.len() as u64,
        sigma_cup: overlap.iter().map(|&p| hw.edge_at(p).len() as u64).sum(),
        cap,
        entropy: entropy_of_counts(sizes),
    }
}

fn intersect_sorted<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Derived group features; ratios with a zero denominator are 0.
pub fn derive_group_features(b: &GroupBasic) -> GroupFeatures {
    let (cnt, sigma, cup, sigma_cup, cap) = (
        b.cnt as f64,
        b.sigma as f64,
        b.cup as f64,
        b.sigma_cup as f64,
        b.cap as f64,
    );
    GroupFeatures {
        cnt,
        density: ratio(cnt, cup),
        size_ratio: ratio(sigma, sigma_cup),
        cap,
        cnt_per_cap: ratio(cnt, cap),
        sigma_per_cap: ratio(sigma, cap),
        avg_size: ratio(sigma, cnt),
        entropy: b.entropy,
    }
}

/// Componentwise mean of node feature vectors.
pub fn aggregate_node_features(nodes: &[NodeFeatures]) -> [f64; 8] {
    let mut out = [0.0; 8];
    if nodes.is_empty() {
        return out;
    }
    for f in nodes {
        for (o, x) in out.iter_mut().zip(f.to_array()) {
            *o += x;
        }
    }
    out.iter_mut().for_each(|o| *o /= nodes.len() as f64);
    out
}

/// A window hypergraph with its projection and the node features of every
/// node in it, computed once and shared by all HOIs observed on the window.
#[derive(Clone, Debug)]
pub struct WindowFeatures {
    hw: TemporalHypergraph,
    graph: ProjectedGraph,
    nodes: Vec<NodeFeatures>,
}

impl WindowFeatures {
    pub fn new(hw: TemporalHypergraph, pagerank_opts: &PageRankOptions) -> Result<Self> {
        let graph = ProjectedGraph::from_hypergraph(&hw);
        let n = graph.num_nodes();
        let ranks = pagerank(&graph, pagerank_opts)?;
        let cores = core_numbers(&graph);
        let degree: Vec<f64> = (0..n).map(|i| graph.row(i).len() as f64).collect();
        let wdegree: Vec<f64> = (0..n)
            .map(|i| graph.local_weighted_degree(i) as f64)
            .collect();
        let nodes = (0..n)
            .map(|i| {
                let row = graph.row(i);
                let mean_over = |xs: &[f64]| {
                    if row.is_empty() {
                        0.0
                    } else {
                        row.iter().map(|&(j, _)| xs[j as usize]).sum::<f64>() / row.len() as f64
                    }
                };
                NodeFeatures {
                    degree: degree[i],
                    weighted_degree: wdegree[i],
                    core: cores[i] as f64,
                    pagerank: ranks[i],
                    avg_nbr_degree: mean_over(&degree),
                    avg_nbr_weighted_degree: mean_over(&wdegree),
                    clustering: local_clustering(&graph, i),
                    occurrences: hw.incident(graph.nodes()[i]).len() as f64,
                }
            })
            .collect();
        Ok(Self { hw, graph, nodes })
    }

    pub fn hypergraph(&self) -> &TemporalHypergraph {
        &self.hw
    }

    pub fn graph(&self) -> &ProjectedGraph {
        &self.graph
    }

    /// Features of `v`; all zero when `v` has no edge in the window.
    pub fn node(&self, v: NodeId) -> NodeFeatures {
        self.graph
            .index_of(v)
            .map(|i| self.nodes[i])
            .unwrap_or_default()
    }

    /// [`group_basic`] with common neighbors read from the projection.
    pub fn group_basic(&self, s: &[NodeId]) -> GroupBasic {
        let s = sorted_set(s);
        let rows: Option<Vec<&[(u32, u32)]>> = s
            .iter()
            .map(|&v| self.graph.index_of(v).map(|i| self.graph.row(i)))
            .collect();
        let cap = match rows {
            Some(rows) if !rows.is_empty() => {
                let mut acc: Vec<u32> = rows[0].iter().map(|&(j, _)| j).collect();
                for row in &rows[1..] {
                    let next: Vec<u32> = row.iter().map(|&(j, _)| j).collect();
                    acc = intersect_sorted(&acc, &next);
                }
                acc.len() as u64
            }
            _ => 0,
        };
        basic_with_cap(&self.hw, &s, cap)
    }

    /// Eight group features followed by eight averaged node features.
    pub fn hoi_features(&self, s: &[NodeId]) -> [f64; 16] {
        let group = derive_group_features(&self.group_basic(s)).to_array();
        let per_node: Vec<NodeFeatures> = s.iter().map(|&v| self.node(v)).collect();
        let nodes = aggregate_node_features(&per_node);
        let mut out = [0.0; 16];
        out[..8].copy_from_slice(&group);
        out[8..].copy_from_slice(&nodes);
        out
    }
}
