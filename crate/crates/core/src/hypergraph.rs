//! Timestamped hypergraphs with node and time indexes.
//!
//! Hyperedges are stored sorted by `(unit, id)`, so the time index is a
//! prefix-offset array and every node posting list (positions into the edge
//! vector) is sorted by both edge id and unit. Windows keep the global node id
//! space and the original edge ids and units.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type EdgeId = u32;
/// Discrete time-unit index.
pub type Unit = u32;

pub const DEFAULT_MAX_EDGE_SIZE: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    pub id: EdgeId,
    /// Strictly increasing.
    pub nodes: Arc<[NodeId]>,
    pub raw_ts: i64,
    pub unit: Unit,
}

impl Hyperedge {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `true` when every node of the sorted set `s` belongs to this edge.
    pub fn contains_all(&self, s: &[NodeId]) -> bool {
        s.iter().all(|v| self.nodes.binary_search(v).is_ok())
    }
}

/// One hyperedge as read from disk, before filtering and remapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEdge {
    pub nodes: Vec<i64>,
    pub ts: i64,
}

/// Counts reported by ingestion, before and after filtering.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct LoadSummary {
    pub raw_edges: usize,
    pub raw_nodes: usize,
    pub dropped_oversize: usize,
    pub dropped_degenerate: usize,
    pub edges: usize,
    pub nodes: usize,
    pub units: u32,
}

#[derive(Clone, Debug)]
pub struct TemporalHypergraph {
    edges: Vec<Hyperedge>,
    node_index: Vec<Vec<u32>>,
    unit_offsets: Vec<usize>,
    num_units: Unit,
    unit_width: i64,
    t_min: i64,
    labels: Arc<[i64]>,
}

impl TemporalHypergraph {
    /// Bins, deduplicates, filters and remaps raw records.
    ///
    /// `t_min` is taken over every record, including the ones that are
    /// dropped, so the unit grid only depends on the raw timestamps. Dense node
    /// ids follow ascending original id over the retained edges.
    pub fn from_raw(
        records: Vec<RawEdge>,
        unit_width: i64,
        max_size: usize,
    ) -> Result<(Self, LoadSummary)> {
        if unit_width <= 0 {
            return Err(Error::Config(format!(
                "unit width must be positive, got {unit_width}"
            )));
        }
        if max_size < 2 {
            return Err(Error::Config(format!(
                "max hyperedge size must be at least 2, got {max_size}"
            )));
        }
        let mut summary = LoadSummary {
            raw_edges: records.len(),
            ..Default::default()
        };
        let t_min = records.iter().map(|r| r.ts).min().unwrap_or(0);
        summary.raw_nodes = records
            .iter()
            .flat_map(|r| r.nodes.iter().copied())
            .collect::<BTreeSet<_>>()
            .len();

        let mut kept: Vec<(Vec<i64>, i64)> = Vec::with_capacity(records.len());
        for mut r in records {
            r.nodes.sort_unstable();
            r.nodes.dedup();
            if r.nodes.len() < 2 {
                summary.dropped_degenerate += 1;
            } else if r.nodes.len() > max_size {
                summary.dropped_oversize += 1;
            } else {
                kept.push((r.nodes, r.ts));
            }
        }

        let labels: Vec<i64> = kept
            .iter()
            .flat_map(|(n, _)| n.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let mut edges = Vec::with_capacity(kept.len());
        for (id, (nodes, ts)) in kept.into_iter().enumerate() {
            // labels is sorted, and each edge's nodes are sorted, so the
            // remapped ids stay strictly increasing.
            let dense: Vec<NodeId> = nodes
                .iter()
                .map(|x| labels.binary_search(x).expect("label collected above") as NodeId)
                .collect();
            let unit = (ts - t_min).div_euclid(unit_width);
            let unit = Unit::try_from(unit).map_err(|_| {
                Error::Format(format!("timestamp {ts} falls in unit {unit}, out of range"))
            })?;
            edges.push(Hyperedge {
                id: id as EdgeId,
                nodes: dense.into(),
                raw_ts: ts,
                unit,
            });
        }

        let num_units = edges.iter().map(|e| e.unit + 1).max().unwrap_or(0);
        let h = Self::assemble(edges, labels.into(), num_units, unit_width, t_min);
        summary.edges = h.num_edges();
        summary.nodes = h.num_nodes();
        summary.units = h.num_units();
        Ok((h, summary))
    }

    /// Builds a hypergraph directly from dense node ids and unit labels.
    ///
    /// Edge ids follow input order. Repeated nodes inside an edge collapse and
    /// edges left with fewer than two nodes are skipped. Each raw timestamp is
    /// the unit itself (`unit_width = 1`, `t_min = 0`).
    pub fn from_units<I, N>(edges: I) -> Self
    where
        I: IntoIterator<Item = (N, Unit)>,
        N: IntoIterator<Item = NodeId>,
    {
        let mut out = Vec::new();
        let mut num_nodes = 0usize;
        for (id, (nodes, unit)) in edges.into_iter().enumerate() {
            let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
            nodes.sort_unstable();
            nodes.dedup();
            if nodes.len() < 2 {
                continue;
            }
            num_nodes = num_nodes.max(*nodes.last().unwrap() as usize + 1);
            out.push(Hyperedge {
                id: id as EdgeId,
                nodes: nodes.into(),
                raw_ts: unit as i64,
                unit,
            });
        }
        let num_units = out.iter().map(|e| e.unit + 1).max().unwrap_or(0);
        let labels: Vec<i64> = (0..num_nodes as i64).collect();
        Self::assemble(out, labels.into(), num_units, 1, 0)
    }

    /// Rebuilds a hypergraph of the same node space from already-binned
    /// edges. Used by the null models and windows.
    pub(crate) fn with_edges(&self, edges: Vec<Hyperedge>) -> Self {
        Self::assemble(
            edges,
            Arc::clone(&self.labels),
            self.num_units,
            self.unit_width,
            self.t_min,
        )
    }

    fn assemble(
        mut edges: Vec<Hyperedge>,
        labels: Arc<[i64]>,
        num_units: Unit,
        unit_width: i64,
        t_min: i64,
    ) -> Self {
        edges.sort_by_key(|e| (e.unit, e.id));
        let mut node_index = vec![Vec::new(); labels.len()];
        for (pos, e) in edges.iter().enumerate() {
            for &v in e.nodes.iter() {
                node_index[v as usize].push(pos as u32);
            }
        }
        let mut unit_offsets = vec![0usize; num_units as usize + 1];
        for e in &edges {
            unit_offsets[e.unit as usize + 1] += 1;
        }
        for t in 0..num_units as usize {
            unit_offsets[t + 1] += unit_offsets[t];
        }
        Self {
            edges,
            node_index,
            unit_offsets,
            num_units,
            unit_width,
            t_min,
            labels,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Size of the unit grid (max unit + 1 of the source data).
    pub fn num_units(&self) -> Unit {
        self.num_units
    }

    pub fn unit_width(&self) -> i64 {
        self.unit_width
    }

    pub fn t_min(&self) -> i64 {
        self.t_min
    }

    /// Original identifier of a dense node id.
    pub fn label(&self, v: NodeId) -> i64 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Hyperedges sorted by `(unit, id)`.
    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge_at(&self, pos: u32) -> &Hyperedge {
        &self.edges[pos as usize]
    }

    /// Hyperedges whose unit is `t`.
    pub fn edges_at(&self, t: Unit) -> &[Hyperedge] {
        &self.edges[self.position_range(t, t)]
    }

    /// Positions of the edges with `lo <= unit <= hi`.
    pub fn position_range(&self, lo: Unit, hi: Unit) -> std::ops::Range<usize> {
        if lo > hi || lo >= self.num_units {
            return 0..0;
        }
        let hi = hi.min(self.num_units - 1);
        self.unit_offsets[lo as usize]..self.unit_offsets[hi as usize + 1]
    }

    /// Positions (into [`edges`](Self::edges)) of the hyperedges containing `v`.
    pub fn incident(&self, v: NodeId) -> &[u32] {
        self.node_index
            .get(v as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Sub-hypergraph of the edges with `lo <= unit <= hi`. Units are not
    /// re-based.
    pub fn window(&self, lo: Unit, hi: Unit) -> Self {
        let edges = self.edges[self.position_range(lo, hi)].to_vec();
        self.with_edges(edges)
    }

    /// Positions of the edges containing every node of the sorted set `s`,
    /// restricted to positions in `range`.
    pub(crate) fn positions_containing_in(
        &self,
        s: &[NodeId],
        range: std::ops::Range<usize>,
    ) -> Vec<u32> {
        let Some(smallest) = s.iter().copied().min_by_key(|&v| self.incident(v).len()) else {
            return Vec::new();
        };
        let list = self.incident(smallest);
        let start = list.partition_point(|&p| (p as usize) < range.start);
        let end = list.partition_point(|&p| (p as usize) < range.end);
        list[start..end]
            .iter()
            .copied()
            .filter(|&p| self.edges[p as usize].contains_all(s))
            .collect()
    }

    pub(crate) fn positions_containing(&self, s: &[NodeId]) -> Vec<u32> {
        self.positions_containing_in(s, 0..self.edges.len())
    }

    /// E(S): ids of the hyperedges containing every node of `s`.
    pub fn edges_containing(&self, s: &[NodeId]) -> Vec<EdgeId> {
        let s = sorted_set(s);
        self.positions_containing(&s)
            .into_iter()
            .map(|p| self.edges[p as usize].id)
            .collect()
    }

    /// E(S, t): ids of the hyperedges at unit `t` containing every node of `s`.
    pub fn edges_containing_at(&self, s: &[NodeId], t: Unit) -> Vec<EdgeId> {
        let s = sorted_set(s);
        self.positions_containing_in(&s, self.position_range(t, t))
            .into_iter()
            .map(|p| self.edges[p as usize].id)
            .collect()
    }

    /// N(v): nodes sharing at least one hyperedge with `v`, sorted.
    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .incident(v)
            .iter()
            .flat_map(|&p| self.edges[p as usize].nodes.iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Nodes with at least one incident hyperedge, ascending.
    pub fn active_nodes(&self) -> Vec<NodeId> {
        (0..self.num_nodes() as NodeId)
            .filter(|&v| !self.incident(v).is_empty())
            .collect()
    }

    /// Writes one `unit<TAB>node,node,...` line per edge, sorted by
    /// `(unit, nodes)`.
    pub fn write_canonical<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut rows: Vec<(Unit, &[NodeId])> =
            self.edges.iter().map(|e| (e.unit, &e.nodes[..])).collect();
        rows.sort();
        for (unit, nodes) in rows {
            write!(out, "{unit}\t")?;
            for (i, v) in nodes.iter().enumerate() {
                if i > 0 {
                    out.write_all(b",")?;
                }
                write!(out, "{v}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn canonical_dump(&self) -> String {
        let mut buf = Vec::new();
        self.write_canonical(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii output")
    }
}

pub(crate) fn sorted_set(s: &[NodeId]) -> Vec<NodeId> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Paths of the three files of a simplex-format dataset sharing `prefix`
/// (`<prefix>-nverts.txt`, `<prefix>-simplices.txt`, `<prefix>-times.txt`).
pub fn triple_paths(prefix: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    (
        with("-nverts.txt"),
        with("-simplices.txt"),
        with("-times.txt"),
    )
}

fn read_integers(path: &Path) -> Result<Vec<i64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let value = token.parse::<i64>().map_err(|_| Error::Parse {
            path: path.to_owned(),
            line: i + 1,
            token: token.to_owned(),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Decodes the three-file simplex layout into raw records.
pub fn read_simplex_triple(
    nverts_path: &Path,
    simplices_path: &Path,
    times_path: &Path,
) -> Result<Vec<RawEdge>> {
    let nverts = read_integers(nverts_path)?;
    let simplices = read_integers(simplices_path)?;
    let times = read_integers(times_path)?;
    if nverts.len() != times.len() {
        return Err(Error::Format(format!(
            "{} has {} entries but {} has {}",
            nverts_path.display(),
            nverts.len(),
            times_path.display(),
            times.len()
        )));
    }
    if let Some(bad) = nverts.iter().find(|&&n| n < 0) {
        return Err(Error::Format(format!("negative simplex size {bad}")));
    }
    let expected: i64 = nverts.iter().sum();
    if expected != simplices.len() as i64 {
        return Err(Error::Format(format!(
            "simplex sizes sum to {expected} but {} has {} node ids",
            simplices_path.display(),
            simplices.len()
        )));
    }
    let mut out = Vec::with_capacity(nverts.len());
    let mut cursor = 0usize;
    for (&n, &ts) in nverts.iter().zip(&times) {
        let n = n as usize;
        out.push(RawEdge {
            nodes: simplices[cursor..cursor + n].to_vec(),
            ts,
        });
        cursor += n;
    }
    Ok(out)
}

pub fn load_simplex_triple(
    nverts_path: &Path,
    simplices_path: &Path,
    times_path: &Path,
    unit_width: i64,
    max_size: usize,
) -> Result<(TemporalHypergraph, LoadSummary)> {
    if unit_width <= 0 {
        return Err(Error::Config(format!(
            "unit width must be positive, got {unit_width}"
        )));
    }
    let records = read_simplex_triple(nverts_path, simplices_path, times_path)?;
    TemporalHypergraph::from_raw(records, unit_width, max_size)
}

/// [`load_simplex_triple`] on the files named by [`triple_paths`].
pub fn load_prefix(
    prefix: &Path,
    unit_width: i64,
    max_size: usize,
) -> Result<(TemporalHypergraph, LoadSummary)> {
    let (n, s, t) = triple_paths(prefix);
    load_simplex_triple(&n, &s, &t, unit_width, max_size)
}
