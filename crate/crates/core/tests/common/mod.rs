//! Brute-force oracles and synthetic data shared by the integration tests.
//! The oracles work on a plain `(nodes, unit)` list and never touch the
//! library's indexes.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use hoi_core::prediction::LabeledDataset;
use hoi_core::TemporalHypergraph;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type EdgeList = Vec<(Vec<u32>, u32)>;

/// Up to `max_edges` edges of 2..=5 distinct nodes from `0..max_nodes`,
/// each stamped with a unit in `0..max_units`.
pub fn random_edges(
    rng: &mut impl Rng,
    max_edges: usize,
    max_nodes: u32,
    max_units: u32,
) -> EdgeList {
    let n_edges = rng.gen_range(1..=max_edges);
    let n_nodes = rng.gen_range(2..=max_nodes);
    let n_units = rng.gen_range(1..=max_units);
    let pool: Vec<u32> = (0..n_nodes).collect();
    (0..n_edges)
        .map(|_| {
            let size = rng.gen_range(2..=5.min(n_nodes as usize));
            let mut nodes: Vec<u32> = pool.choose_multiple(rng, size).copied().collect();
            nodes.sort_unstable();
            (nodes, rng.gen_range(0..n_units))
        })
        .collect()
}

pub fn arb_edges(
    max_edges: usize,
    max_nodes: u32,
    max_units: u32,
) -> impl Strategy<Value = EdgeList> {
    any::<u64>().prop_map(move |seed| {
        random_edges(
            &mut ChaCha8Rng::seed_from_u64(seed),
            max_edges,
            max_nodes,
            max_units,
        )
    })
}

pub fn build(edges: &EdgeList) -> TemporalHypergraph {
    TemporalHypergraph::from_units(edges.iter().cloned())
}

pub fn contains(e: &[u32], s: &[u32]) -> bool {
    s.iter().all(|v| e.contains(v))
}

/// Ids (input positions) of the edges containing every node of `s`.
pub fn bf_edges_containing(edges: &EdgeList, s: &[u32]) -> BTreeSet<u32> {
    (0..edges.len() as u32)
        .filter(|&i| contains(&edges[i as usize].0, s))
        .collect()
}

pub fn bf_edges_containing_at(edges: &EdgeList, s: &[u32], t: u32) -> BTreeSet<u32> {
    (0..edges.len() as u32)
        .filter(|&i| edges[i as usize].1 == t && contains(&edges[i as usize].0, s))
        .collect()
}

pub fn bf_neighbors(edges: &EdgeList, v: u32) -> BTreeSet<u32> {
    edges
        .iter()
        .filter(|(e, _)| e.contains(&v))
        .flat_map(|(e, _)| e.iter().copied())
        .filter(|&u| u != v)
        .collect()
}

pub fn bf_omega(edges: &EdgeList, u: u32, v: u32) -> u32 {
    edges
        .iter()
        .filter(|(e, _)| e.contains(&u) && e.contains(&v))
        .count() as u32
}

fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every size-`k` subset of every edge, with its earliest unit.
pub fn bf_hois(edges: &EdgeList, k: usize) -> BTreeMap<Vec<u32>, u32> {
    let mut out: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    for (e, t) in edges {
        for s in combinations(e, k) {
            let entry = out.entry(s).or_insert(*t);
            *entry = (*entry).min(*t);
        }
    }
    out
}

pub fn bf_persistence(edges: &EdgeList, s: &[u32], lo: u32, hi: u32) -> u32 {
    (lo..=hi)
        .filter(|&t| edges.iter().any(|(e, u)| *u == t && contains(e, s)))
        .count() as u32
}

pub fn bf_window(edges: &EdgeList, lo: u32, hi: u32) -> EdgeList {
    edges
        .iter()
        .filter(|(_, t)| (lo..=hi).contains(t))
        .cloned()
        .collect()
}

pub fn bf_entropy(sizes: &[usize]) -> f64 {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &s in sizes {
        *counts.entry(s).or_default() += 1;
    }
    let n = sizes.len() as f64;
    -counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// (cnt, sigma, cup, sigma_cup, cap, entropy) on the given edges.
pub fn bf_group_basic(edges: &EdgeList, s: &[u32]) -> (u64, u64, u64, u64, u64, f64) {
    let inside: Vec<usize> = edges
        .iter()
        .filter(|(e, _)| contains(e, s))
        .map(|(e, _)| e.len())
        .collect();
    let touching: Vec<usize> = edges
        .iter()
        .filter(|(e, _)| s.iter().any(|v| e.contains(v)))
        .map(|(e, _)| e.len())
        .collect();
    let mut common: Option<BTreeSet<u32>> = None;
    for &v in s {
        let n = bf_neighbors(edges, v);
        common = Some(match common {
            None => n,
            Some(c) => c.intersection(&n).copied().collect(),
        });
    }
    let entropy = if inside.is_empty() {
        0.0
    } else {
        bf_entropy(&inside)
    };
    (
        inside.len() as u64,
        inside.iter().sum::<usize>() as u64,
        touching.len() as u64,
        touching.iter().sum::<usize>() as u64,
        common.map_or(0, |c| c.len() as u64),
        entropy,
    )
}

pub fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Dense symmetric weight matrix of a simple graph.
#[derive(Clone, Debug)]
pub struct DenseGraph {
    pub w: Vec<Vec<u32>>,
}

impl DenseGraph {
    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn nbrs(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.w[i][j] > 0).collect()
    }

    /// Projection of `edges` over the nodes that appear in them, in
    /// ascending id order.
    pub fn projection(edges: &EdgeList) -> (Vec<u32>, Self) {
        let nodes: Vec<u32> = edges
            .iter()
            .flat_map(|(e, _)| e.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let w = nodes
            .iter()
            .map(|&u| {
                nodes
                    .iter()
                    .map(|&v| if u == v { 0 } else { bf_omega(edges, u, v) })
                    .collect()
            })
            .collect();
        (nodes, Self { w })
    }
}

pub fn random_graph(rng: &mut impl Rng, max_nodes: usize) -> DenseGraph {
    let n = rng.gen_range(1..=max_nodes);
    let p: f64 = rng.gen_range(0.0..0.6);
    let mut w = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                let x = rng.gen_range(1..=4);
                w[i][j] = x;
                w[j][i] = x;
            }
        }
    }
    DenseGraph { w }
}

/// Largest k such that the node survives repeated removal of every node
/// with fewer than k remaining neighbors.
pub fn bf_core_numbers(g: &DenseGraph) -> Vec<u32> {
    let n = g.n();
    let mut core = vec![0u32; n];
    for k in 1..=n as u32 {
        let mut alive = vec![true; n];
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&i| {
                    alive[i] && (g.nbrs(i).iter().filter(|&&j| alive[j]).count() as u32) < k
                })
                .collect();
            if doomed.is_empty() {
                break;
            }
            for i in doomed {
                alive[i] = false;
            }
        }
        for i in 0..n {
            if alive[i] {
                core[i] = k;
            }
        }
    }
    core
}

pub fn bf_clustering(g: &DenseGraph, i: usize) -> f64 {
    let nb = g.nbrs(i);
    if nb.len() < 2 {
        return 0.0;
    }
    let mut links = 0;
    for a in 0..nb.len() {
        for b in a + 1..nb.len() {
            if g.w[nb[a]][nb[b]] > 0 {
                links += 1;
            }
        }
    }
    links as f64 / (nb.len() * (nb.len() - 1) / 2) as f64
}

/// Fixed number of dense power-iteration steps, dangling mass spread
/// uniformly.
pub fn bf_pagerank(g: &DenseGraph, damping: f64, weighted: bool, steps: usize) -> Vec<f64> {
    let n = g.n();
    let wt = |i: usize, j: usize| -> f64 {
        match (g.w[i][j], weighted) {
            (0, _) => 0.0,
            (x, true) => x as f64,
            (_, false) => 1.0,
        }
    };
    let out: Vec<f64> = (0..n).map(|i| (0..n).map(|j| wt(i, j)).sum()).collect();
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..steps {
        let dangling: f64 = (0..n).filter(|&i| out[i] == 0.0).map(|i| r[i]).sum();
        let mut next = vec![(1.0 - damping) / n as f64 + damping * dangling / n as f64; n];
        for i in 0..n {
            if out[i] > 0.0 {
                for (j, x) in next.iter_mut().enumerate() {
                    *x += damping * r[i] * wt(i, j) / out[i];
                }
            }
        }
        r = next;
    }
    r
}

/// Node features of every node in `edges`, computed from scratch:
/// degree, weighted degree, core, pagerank, avg neighbor degree,
/// avg neighbor weighted degree, clustering, occurrences.
pub fn bf_node_feature_table(edges: &EdgeList) -> BTreeMap<u32, [f64; 8]> {
    let (nodes, g) = DenseGraph::projection(edges);
    let cores = bf_core_numbers(&g);
    let ranks = bf_pagerank(&g, 0.85, true, 10_000);
    let deg = |j: usize| g.nbrs(j).len() as f64;
    let wdeg = |j: usize| g.w[j].iter().map(|&x| x as f64).sum::<f64>();
    let mut out = BTreeMap::new();
    for (i, &v) in nodes.iter().enumerate() {
        let nb = g.nbrs(i);
        let mean = |f: &dyn Fn(usize) -> f64| {
            if nb.is_empty() {
                0.0
            } else {
                nb.iter().map(|&j| f(j)).sum::<f64>() / nb.len() as f64
            }
        };
        out.insert(
            v,
            [
                deg(i),
                wdeg(i),
                cores[i] as f64,
                ranks[i],
                mean(&deg),
                mean(&wdeg),
                bf_clustering(&g, i),
                edges.iter().filter(|(e, _)| e.contains(&v)).count() as f64,
            ],
        );
    }
    out
}

pub fn bf_node_features(edges: &EdgeList, v: u32) -> [f64; 8] {
    bf_node_feature_table(edges)
        .get(&v)
        .copied()
        .unwrap_or([0.0; 8])
}

/// Hyperedge stream where latent node groups recur with group-specific
/// probabilities, plus background noise edges. Each group starts at a
/// random early unit; its recurrence rate is what persistence measures.
pub fn persistent_stream(seed: u64, n_groups: usize, n_units: u32) -> TemporalHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_nodes = (n_groups * 3) as u32;
    let groups: Vec<(Vec<u32>, f64, u32)> = (0..n_groups)
        .map(|_| {
            let size = rng.gen_range(2..=3);
            let mut nodes: Vec<u32> = (0..n_nodes)
                .collect::<Vec<_>>()
                .choose_multiple(&mut rng, size)
                .copied()
                .collect();
            nodes.sort_unstable();
            let p: f64 = rng.gen_range(0.0f64..1.0).powi(2);
            let start = rng.gen_range(0..n_units / 3);
            (nodes, p, start)
        })
        .collect();
    let mut edges: EdgeList = Vec::new();
    for t in 0..n_units {
        for (nodes, p, start) in &groups {
            if t == *start || (t > *start && rng.gen_bool(*p)) {
                // repeat activity within a unit in proportion to the rate
                let reps = 1 + (3.0 * p) as usize;
                for _ in 0..reps {
                    edges.push((nodes.clone(), t));
                }
            }
        }
        for _ in 0..n_groups / 4 {
            let a = rng.gen_range(0..n_nodes);
            let b = rng.gen_range(0..n_nodes);
            if a != b {
                edges.push((vec![a, b], t));
            }
        }
    }
    TemporalHypergraph::from_units(edges)
}

/// `n` rows of 8 features in [0, 1): column `signal` drives a noisy
/// monotone target in [0, 10], the rest are noise.
pub fn planted_dataset(seed: u64, n: usize, signal: usize, noise_sd: f64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..8).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let targets = rows
        .iter()
        .map(|r| {
            let x = r[signal];
            let clean = 10.0 * x * x;
            let eps: f64 = (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
            (clean + noise_sd * eps).clamp(0.0, 10.0)
        })
        .collect();
    let names = (0..8).map(|i| format!("x{i}")).collect();
    LabeledDataset::new(names, rows, targets)
}
