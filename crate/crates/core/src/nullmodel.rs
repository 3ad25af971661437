//! Randomized reference hypergraphs.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::hypergraph::{sorted_set, Hyperedge, NodeId, TemporalHypergraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomizeMode {
    /// Permute time stamps across edges; node sets stay intact.
    ShuffleTimes,
    /// Relabel nodes by one global random permutation; timing stays intact.
    ShuffleNodes,
}

impl FromStr for RandomizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "shuffle-times" => Ok(Self::ShuffleTimes),
            "shuffle-nodes" => Ok(Self::ShuffleNodes),
            other => Err(Error::Config(format!(
                "unknown randomization mode {other:?} (expected shuffle-times or shuffle-nodes)"
            ))),
        }
    }
}

impl fmt::Display for RandomizeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ShuffleTimes => "shuffle-times",
            Self::ShuffleNodes => "shuffle-nodes",
        })
    }
}

/// A randomized copy of `h`. Edge count, edge sizes and the multiset of
/// time units are preserved by both modes; node degrees by both as a
/// multiset.
pub fn randomize(h: &TemporalHypergraph, mode: RandomizeMode, seed: u64) -> TemporalHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = h.edges();
    let randomized: Vec<Hyperedge> = match mode {
        RandomizeMode::ShuffleTimes => {
            let mut times: Vec<(i64, u32)> = edges.iter().map(|e| (e.raw_ts, e.unit)).collect();
            times.shuffle(&mut rng);
            edges
                .iter()
                .zip(times)
                .map(|(e, (raw_ts, unit))| Hyperedge {
                    raw_ts,
                    unit,
                    ..e.clone()
                })
                .collect()
        }
        RandomizeMode::ShuffleNodes => {
            let mut perm: Vec<NodeId> = (0..h.num_nodes() as NodeId).collect();
            perm.shuffle(&mut rng);
            edges
                .iter()
                .map(|e| Hyperedge {
                    nodes: Arc::from(sorted_set(
                        &e.nodes
                            .iter()
                            .map(|&v| perm[v as usize])
                            .collect::<Vec<_>>(),
                    )),
                    ..e.clone()
                })
                .collect()
        }
    };
    h.with_edges(randomized)
}
