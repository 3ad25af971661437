//! Clique expansion of a hypergraph: a weighted pairwise graph where
//! `weight(u, v)` counts the hyperedges containing both `u` and `v`.

use crate::hypergraph::{NodeId, TemporalHypergraph};

/// Weighted undirected graph over a compact local index.
///
/// `nodes[i]` is the global id of local node `i`; adjacency rows hold
/// `(local neighbor, weight)` pairs sorted by neighbor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectedGraph {
    nodes: Vec<NodeId>,
    adj: Vec<Vec<(u32, u32)>>,
}

impl ProjectedGraph {
    /// Projection of `h`. The node set is every node with an incident edge.
    pub fn from_hypergraph(h: &TemporalHypergraph) -> Self {
        let nodes = h.active_nodes();
        let mut local = vec![u32::MAX; h.num_nodes()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut counts = vec![0u32; nodes.len()];
        let mut touched: Vec<u32> = Vec::new();
        let mut adj = Vec::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            for &pos in h.incident(v) {
                for &u in h.edge_at(pos).nodes.iter() {
                    let j = local[u as usize];
                    if j as usize == i {
                        continue;
                    }
                    if counts[j as usize] == 0 {
                        touched.push(j);
                    }
                    counts[j as usize] += 1;
                }
            }
            touched.sort_unstable();
            let row: Vec<(u32, u32)> = touched
                .iter()
                .map(|&j| (j, std::mem::take(&mut counts[j as usize])))
                .collect();
            touched.clear();
            adj.push(row);
        }
        Self { nodes, adj }
    }

    /// Graph over `nodes` plus every edge endpoint. Parallel edges add up
    /// their weights; self-loops and zero weights are ignored.
    pub fn from_weighted_edges<N, E>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId, u32)>,
    {
        let edges: Vec<(NodeId, NodeId, u32)> = edges.into_iter().collect();
        let mut all: Vec<NodeId> = nodes.into_iter().collect();
        all.extend(edges.iter().flat_map(|&(u, v, _)| [u, v]));
        all.sort_unstable();
        all.dedup();
        let idx = |v: NodeId| all.binary_search(&v).unwrap() as u32;
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); all.len()];
        for &(u, v, w) in edges.iter().filter(|&&(u, v, w)| u != v && w > 0) {
            let (i, j) = (idx(u), idx(v));
            adj[i as usize].push((j, w));
            adj[j as usize].push((i, w));
        }
        for row in &mut adj {
            row.sort_unstable();
            let mut merged: Vec<(u32, u32)> = Vec::with_capacity(row.len());
            for &(j, w) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += w,
                    _ => merged.push((j, w)),
                }
            }
            *row = merged;
        }
        Self { nodes: all, adj }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Global ids, ascending; position is the local index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn index_of(&self, v: NodeId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    /// Adjacency row of local node `i`.
    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.adj[i]
    }

    /// Ω(u, v); zero when the pair never co-occurs.
    pub fn weight(&self, u: NodeId, v: NodeId) -> u32 {
        match (self.index_of(u), self.index_of(v)) {
            (Some(i), Some(j)) => self.adj[i]
                .binary_search_by_key(&(j as u32), |&(n, _)| n)
                .map(|k| self.adj[i][k].1)
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// N'(v), sorted by global id.
    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        self.index_of(v)
            .map(|i| {
                self.adj[i]
                    .iter()
                    .map(|&(j, _)| self.nodes[j as usize])
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.index_of(v).map_or(0, |i| self.adj[i].len())
    }

    pub fn weighted_degree(&self, v: NodeId) -> u64 {
        self.index_of(v)
            .map_or(0, |i| self.local_weighted_degree(i))
    }

    pub(crate) fn local_weighted_degree(&self, i: usize) -> u64 {
        self.adj[i].iter().map(|&(_, w)| w as u64).sum()
    }

    pub(crate) fn adjacent_local(&self, i: usize, j: usize) -> bool {
        self.adj[i]
            .binary_search_by_key(&(j as u32), |&(n, _)| n)
            .is_ok()
    }
}
