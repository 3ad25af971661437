//! Temporal hypergraph toolkit for measuring and predicting the persistence
//! of higher-order interactions (HOIs): node groups of size 2 to 4 that
//! co-occur in hyperedges.

pub mod error;
pub mod features;
pub mod hypergraph;
pub mod metrics;
pub mod nullmodel;
pub mod persistence;
pub mod prediction;
pub mod projection;
pub mod stats;

pub use error::{Error, Result};
pub use hypergraph::{
    load_prefix, load_simplex_triple, EdgeId, Hyperedge, LoadSummary, NodeId, RawEdge,
    TemporalHypergraph, Unit, DEFAULT_MAX_EDGE_SIZE,
};
pub use persistence::{enumerate_hois, persistence, Hoi, Protocol, ProtocolWindows};
pub use projection::ProjectedGraph;
