//! Higher-order interactions (HOIs), their first appearances, and
//! persistence: the number of time units in a range at which a node set is
//! covered by at least one hyperedge.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{sorted_set, NodeId, TemporalHypergraph, Unit};

pub const MIN_HOI_SIZE: usize = 2;
pub const MAX_HOI_SIZE: usize = 4;

/// A node set of size 2 to 4 together with the unit of its first appearance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Hoi {
    nodes: [NodeId; MAX_HOI_SIZE],
    k: u8,
    t0: Unit,
}

impl Hoi {
    /// `nodes` must be strictly increasing with length in `2..=4`.
    pub fn new(nodes: &[NodeId], t0: Unit) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!((MIN_HOI_SIZE..=MAX_HOI_SIZE).contains(&nodes.len()));
        let mut buf = [0; MAX_HOI_SIZE];
        buf[..nodes.len()].copy_from_slice(nodes);
        Self {
            nodes: buf,
            k: nodes.len() as u8,
            t0,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes[..self.k as usize]
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn t0(&self) -> Unit {
        self.t0
    }
}

impl Ord for Hoi {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nodes().cmp(other.nodes()).then(self.t0.cmp(&other.t0))
    }
}

impl PartialOrd for Hoi {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn check_hoi_size(k: usize) -> Result<()> {
    if (MIN_HOI_SIZE..=MAX_HOI_SIZE).contains(&k) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "HOI size must be 2, 3 or 4, got {k}"
        )))
    }
}

/// Calls `f` on every size-`k` subset of the sorted slice `nodes`, in
/// lexicographic order.
pub(crate) fn for_each_subset(nodes: &[NodeId], k: usize, mut f: impl FnMut(&[NodeId])) {
    let m = nodes.len();
    if k == 0 || k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = nodes[i];
        }
        f(&buf);
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

type FirstSeen = HashMap<[NodeId; MAX_HOI_SIZE], Unit>;

fn merge_first_seen(mut a: FirstSeen, b: FirstSeen) -> FirstSeen {
    if a.len() < b.len() {
        return merge_first_seen(b, a);
    }
    for (key, t) in b {
        a.entry(key)
            .and_modify(|cur| *cur = (*cur).min(t))
            .or_insert(t);
    }
    a
}

/// Every size-`k` HOI of `h` with its first-appearance unit, sorted by node
/// set.
///
/// With `cap`, a seeded uniform sample of at most `cap` HOIs is returned;
/// first appearances are resolved over the full set before sampling.
pub fn enumerate_hois(
    h: &TemporalHypergraph,
    k: usize,
    cap: Option<usize>,
    seed: u64,
) -> Result<Vec<Hoi>> {
    check_hoi_size(k)?;
    let first_seen = h
        .edges()
        .par_chunks(256)
        .fold(FirstSeen::new, |mut acc, chunk| {
            for e in chunk {
                for_each_subset(&e.nodes, k, |s| {
                    let mut key = [0; MAX_HOI_SIZE];
                    key[..k].copy_from_slice(s);
                    acc.entry(key)
                        .and_modify(|t| *t = (*t).min(e.unit))
                        .or_insert(e.unit);
                });
            }
            acc
        })
        .reduce(FirstSeen::new, merge_first_seen);

    let mut hois: Vec<Hoi> = first_seen
        .into_iter()
        .map(|(key, t0)| Hoi::new(&key[..k], t0))
        .collect();
    hois.par_sort_unstable();

    if let Some(cap) = cap {
        if cap < hois.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, hois.len(), cap).into_vec();
            picked.sort_unstable();
            hois = picked.into_iter().map(|i| hois[i]).collect();
        }
    }
    Ok(hois)
}

/// P(S, [lo, hi]): number of units `t` in the range with |E(S, t)| ≥ 1.
pub fn persistence(h: &TemporalHypergraph, s: &[NodeId], lo: Unit, hi: Unit) -> u32 {
    if lo > hi {
        return 0;
    }
    let s = sorted_set(s);
    count_units(h, &s, lo, hi)
}

/// Same as [`persistence`] for an already sorted, deduplicated node set.
pub(crate) fn count_units(h: &TemporalHypergraph, s: &[NodeId], lo: Unit, hi: Unit) -> u32 {
    let positions = h.positions_containing_in(s, h.position_range(lo, hi));
    let mut count = 0;
    let mut last = None;
    for p in positions {
        let unit = h.edge_at(p).unit;
        if last != Some(unit) {
            count += 1;
            last = Some(unit);
        }
    }
    count
}

/// Observation and prediction lengths of the measurement protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Protocol {
    /// T_s: units observed for features.
    pub observe: u32,
    /// T_p: units over which persistence is measured.
    pub horizon: u32,
    /// Extend the feature window back to the start of the data.
    pub include_past: bool,
    /// Start the feature window at t0 instead of t0 + 1.
    pub include_first: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            observe: 5,
            horizon: 10,
            include_past: false,
            include_first: false,
        }
    }
}

impl Protocol {
    pub fn new(observe: u32, horizon: u32) -> Self {
        Self {
            observe,
            horizon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.observe == 0 || self.horizon == 0 {
            return Err(Error::Config(format!(
                "observation ({}) and persistence ({}) windows must be at least one unit",
                self.observe, self.horizon
            )));
        }
        Ok(())
    }

    /// Windows for a first appearance at `t0`, or `None` when the
    /// persistence window would run past the last unit.
    pub fn windows(&self, t0: Unit, num_units: Unit) -> Option<ProtocolWindows> {
        let t0 = t0 as u64;
        let (ts, tp) = (self.observe as u64, self.horizon as u64);
        if t0 + ts + tp >= num_units as u64 {
            return None;
        }
        let feature_lo = if self.include_past {
            0
        } else if self.include_first {
            t0
        } else {
            t0 + 1
        };
        Some(ProtocolWindows {
            feature_lo: feature_lo as Unit,
            feature_hi: (t0 + ts) as Unit,
            persist_lo: (t0 + ts + 1) as Unit,
            persist_hi: (t0 + ts + tp) as Unit,
        })
    }
}

/// Feature window `[feature_lo, feature_hi]` followed by the persistence
/// window `[persist_lo, persist_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProtocolWindows {
    pub feature_lo: Unit,
    pub feature_hi: Unit,
    pub persist_lo: Unit,
    pub persist_hi: Unit,
}

pub fn protocol_windows(
    t0: Unit,
    observe: u32,
    horizon: u32,
    include_past: bool,
    num_units: Unit,
) -> Option<ProtocolWindows> {
    Protocol {
        observe,
        horizon,
        include_past,
        include_first: false,
    }
    .windows(t0, num_units)
}

/// Persistence of each HOI over the `width` units right after its first
/// appearance. HOIs whose window passes the last unit are left out.
pub fn global_persistence(h: &TemporalHypergraph, hois: &[Hoi], width: u32) -> Vec<(Hoi, u32)> {
    let n = h.num_units() as u64;
    hois.par_iter()
        .filter(|s| (s.t0() as u64) + (width as u64) < n)
        .map(|s| (*s, count_units(h, s.nodes(), s.t0() + 1, s.t0() + width)))
        .collect()
}

/// Persistence of every non-excluded HOI over its protocol window.
pub fn protocol_persistence(
    h: &TemporalHypergraph,
    hois: &[Hoi],
    protocol: &Protocol,
) -> Vec<(Hoi, ProtocolWindows, u32)> {
    hois.par_iter()
        .filter_map(|s| {
            let w = protocol.windows(s.t0(), h.num_units())?;
            Some((*s, w, count_units(h, s.nodes(), w.persist_lo, w.persist_hi)))
        })
        .collect()
}

/// Node-level aggregate of the size-`k` HOIs a node takes part in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePersistence {
    pub node: NodeId,
    /// First unit at which the node is in a size-`k` HOI.
    pub first: Unit,
    /// Mean persistence over the node's non-excluded HOIs.
    pub mean: Option<f64>,
}

/// k-node persistence of every node that belongs to at least one HOI in
/// `hois` (which must be the full, unsampled size-`k` HOI set).
pub fn node_persistences(
    h: &TemporalHypergraph,
    hois: &[Hoi],
    protocol: &Protocol,
) -> Vec<NodePersistence> {
    let values: Vec<Option<u32>> = hois
        .par_iter()
        .map(|s| {
            protocol
                .windows(s.t0(), h.num_units())
                .map(|w| count_units(h, s.nodes(), w.persist_lo, w.persist_hi))
        })
        .collect();
    let mut first: Vec<Option<Unit>> = vec![None; h.num_nodes()];
    let mut sums: Vec<(u64, u64)> = vec![(0, 0); h.num_nodes()];
    for (s, value) in hois.iter().zip(&values) {
        for &v in s.nodes() {
            let f = &mut first[v as usize];
            *f = Some(f.map_or(s.t0(), |t| t.min(s.t0())));
            if let Some(p) = value {
                sums[v as usize].0 += *p as u64;
                sums[v as usize].1 += 1;
            }
        }
    }
    first
        .into_iter()
        .zip(sums)
        .enumerate()
        .filter_map(|(v, (first, (sum, n)))| {
            first.map(|first| NodePersistence {
                node: v as NodeId,
                first,
                mean: (n > 0).then(|| sum as f64 / n as f64),
            })
        })
        .collect()
}

/// k-node persistence of a single node: the mean protocol persistence of the
/// size-`k` HOIs containing `v`. `None` when every such HOI is excluded or
/// there is none.
pub fn k_node_persistence(
    h: &TemporalHypergraph,
    v: NodeId,
    k: usize,
    protocol: &Protocol,
) -> Result<Option<f64>> {
    check_hoi_size(k)?;
    let mut first_seen: HashMap<Vec<NodeId>, Unit> = HashMap::new();
    // Incident positions are in unit order, so the first sighting is t0.
    for &pos in h.incident(v) {
        let e = h.edge_at(pos);
        for_each_subset(&e.nodes, k, |s| {
            if s.contains(&v) {
                first_seen.entry(s.to_vec()).or_insert(e.unit);
            }
        });
    }
    let (sum, n) = first_seen
        .iter()
        .filter_map(|(s, &t0)| {
            let w = protocol.windows(t0, h.num_units())?;
            Some(count_units(h, s, w.persist_lo, w.persist_hi))
        })
        .fold((0u64, 0u64), |(sum, n), p| (sum + p as u64, n + 1));
    Ok((n > 0).then(|| sum as f64 / n as f64))
}
