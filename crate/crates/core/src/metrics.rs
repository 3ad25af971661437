//! Node centrality and cohesion metrics on a projected graph: weighted
//! PageRank, k-core numbers, and local clustering coefficients.

use crate::error::{Error, Result};
use crate::projection::ProjectedGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageRankOptions {
    pub damping: f64,
    /// L1 change between consecutive iterates at which iteration stops.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Transition probabilities proportional to edge weight (otherwise
    /// uniform over neighbors).
    pub weighted: bool,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-10,
            max_iter: 200,
            weighted: true,
        }
    }
}

/// PageRank scores by local node index. Nodes without neighbors spread their
/// mass uniformly.
pub fn pagerank(g: &ProjectedGraph, opts: &PageRankOptions) -> Result<Vec<f64>> {
    let n = g.num_nodes();
    if n == 0 {
        return Ok(Vec::new());
    }
    let out_weight: Vec<f64> = (0..n)
        .map(|i| {
            if opts.weighted {
                g.local_weighted_degree(i) as f64
            } else {
                g.row(i).len() as f64
            }
        })
        .collect();
    let teleport = (1.0 - opts.damping) / n as f64;
    let mut rank = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let dangling: f64 = (0..n)
            .filter(|&i| out_weight[i] == 0.0)
            .map(|i| rank[i])
            .sum();
        let base = teleport + opts.damping * dangling / n as f64;
        next.iter_mut().for_each(|x| *x = base);
        for i in 0..n {
            if out_weight[i] == 0.0 {
                continue;
            }
            let share = opts.damping * rank[i] / out_weight[i];
            for &(j, w) in g.row(i) {
                let w = if opts.weighted { w as f64 } else { 1.0 };
                next[j as usize] += share * w;
            }
        }
        residual = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if residual < opts.tolerance {
            let total: f64 = rank.iter().sum();
            rank.iter_mut().for_each(|r| *r /= total);
            return Ok(rank);
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// Core number of every local node (unweighted), by bucketed min-degree
/// peeling.
pub fn core_numbers(g: &ProjectedGraph) -> Vec<u32> {
    let n = g.num_nodes();
    let mut degree: Vec<usize> = (0..n).map(|i| g.row(i).len()).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // Nodes sorted by degree, with bucket starts and each node's position.
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_degree).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &(u, _) in g.row(v) {
            let u = u as usize;
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree.into_iter().map(|d| d as u32).collect()
}

/// Fraction of neighbor pairs of local node `i` that are adjacent
/// (unweighted); zero below two neighbors.
pub fn local_clustering(g: &ProjectedGraph, i: usize) -> f64 {
    let row = g.row(i);
    let d = row.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (a, &(u, _)) in row.iter().enumerate() {
        for &(w, _) in &row[a + 1..] {
            if g.adjacent_local(u as usize, w as usize) {
                links += 1;
            }
        }
    }
    links as f64 / (d * (d - 1) / 2) as f64
}
